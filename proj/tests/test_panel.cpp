#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <memory>

#include "oracles.hpp"
#include "specflow/panel.hpp"

using namespace specflow;

namespace {

std::shared_ptr<const BasisEngine> make(BasisKind kind, int n, double tau) {
    return std::make_shared<const BasisEngine>(kind, MeasureParams{tau, n});
}

// volume spike at a chosen age; steady background elsewhere
std::vector<Tick> spike_session(double spike_at_sec, double t_total, double gap,
                                double price = 100.0) {
    std::vector<Tick> out;
    std::int64_t t0 = 34'200'000'000'000;
    for (double sec = gap; sec <= t_total; sec += gap) {
        double size = 1.0;
        if (sec >= spike_at_sec && sec < spike_at_sec + 2.0) size = 500.0;
        out.push_back({t0 + static_cast<std::int64_t>(sec * 1e9), price, size, -1});
    }
    return out;
}

}  // namespace

TEST_CASE("identical streams give unit projection and zero spike distance") {
    auto be = make(BasisKind::LegendreShifted, 5, 8.0);
    AssetPanel panel(be, {});
    const int a = panel.add_asset("AAA");
    const int b = panel.add_asset("BBB");
    const auto ticks = oracles::random_session(111, 400, 0.5);
    for (const Tick& t : ticks) {
        panel.advance(a, t);
        panel.advance(b, t);  // same tick stream, same times
    }
    REQUIRE(panel.ready(a));
    REQUIRE(panel.ready(b));
    const auto proj = panel.cross_projection(a, b);
    REQUIRE(proj.has_value());
    CHECK(*proj == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(*panel.cross_projection(a, a) == doctest::Approx(1.0).epsilon(1e-11));
    const auto order = panel.spike_order(a, b);
    REQUIRE(order.by_tv_m.has_value());
    REQUIRE(order.by_spur.has_value());
    CHECK(std::abs(*order.by_tv_m) < 1e-8);
    CHECK(std::abs(*order.by_spur) < 1e-8);
    // symmetry
    CHECK(*panel.cross_projection(a, b) == doctest::Approx(*panel.cross_projection(b, a))
                                               .epsilon(1e-12));
}

TEST_CASE("offset spikes: low projection, signed order, sign agreement") {
    // the shifted Legendre basis resolves spike ages in roughly [tau/n, tau],
    // so both spikes must sit inside that window at measurement time
    const double tau = 64.0;
    const int n = 8;
    auto be = make(BasisKind::LegendreShifted, n, tau);
    AssetPanel panel(be, {});
    const int a = panel.add_asset("EARLY");
    const int b = panel.add_asset("LATE");
    const double t_total = 240.0;
    // spike in EARLY at 190s (age ~49s at the end), in LATE at 230s (age ~9s)
    const auto ta = spike_session(190.0, t_total, 0.25);
    const auto tb = spike_session(230.0, t_total, 0.25);
    REQUIRE(ta.size() == tb.size());
    for (std::size_t i = 0; i < ta.size(); ++i) {
        panel.advance(a, ta[i]);
        panel.advance(b, tb[i]);
    }
    REQUIRE(panel.ready(a));
    REQUIRE(panel.ready(b));
    const auto proj = panel.cross_projection(a, b);
    REQUIRE(proj.has_value());
    CHECK(*proj < 0.1);
    const auto order = panel.spike_order(a, b);
    REQUIRE(order.by_tv_m.has_value());
    REQUIRE(order.by_spur.has_value());
    // EARLY's spike age minus LATE's: about +40s, within tau/n
    CHECK(std::abs(*order.by_tv_m - 40.0) < tau / n);
    CHECK(*order.by_tv_m > 0.0);
    CHECK(*order.by_spur > 0.0);  // both measures agree in sign
}

TEST_CASE("single-asset index state scales with the constant price") {
    const double price = 25.0;
    auto be = make(BasisKind::LegendreShifted, 5, 6.0);
    AssetPanel panel(be, {});
    const int a = panel.add_asset("ONLY");
    auto ticks = oracles::random_session(222, 400, 0.5, price);
    for (Tick& t : ticks) t.price = price;
    for (const Tick& t : ticks) panel.advance(a, t);
    REQUIRE(panel.ready(a));
    const auto idx = panel.index_state();
    REQUIRE(idx.ok);
    const auto& frame = panel.last_frame(a);
    REQUIRE(frame.real_f.lambda_ih.has_value());
    CHECK(idx.lambda == doctest::Approx(price * *frame.real_f.lambda_ih).epsilon(1e-9));
}

TEST_CASE("N identical assets multiply the index eigenvalue") {
    auto be = make(BasisKind::LegendreShifted, 4, 6.0);
    const auto ticks = oracles::random_session(333, 300, 0.5);

    AssetPanel one(be, {});
    const int a0 = one.add_asset("S0");
    for (const Tick& t : ticks) one.advance(a0, t);
    const auto idx_one = one.index_state();
    REQUIRE(idx_one.ok);

    AssetPanel four(be, {});
    int ids[4];
    for (int i = 0; i < 4; ++i) ids[i] = four.add_asset("S" + std::to_string(i));
    for (const Tick& t : ticks)
        for (int i = 0; i < 4; ++i) four.advance(ids[i], t);
    const auto idx_four = four.index_state();
    REQUIRE(idx_four.ok);
    CHECK(idx_four.lambda == doctest::Approx(4.0 * idx_one.lambda).epsilon(1e-9));
}

TEST_CASE("panel integration equals a standalone integrator with idle shifts") {
    auto be = make(BasisKind::LegendreShifted, 4, 5.0);
    AssetPanel panel(be, {});
    const int a = panel.add_asset("A");
    const int b = panel.add_asset("B");
    const auto ta = oracles::random_session(41, 150, 1.0);
    const auto tb = oracles::random_session(42, 150, 1.1);

    MomentIntegrator standalone(be);
    std::size_t ia = 0, ib = 0;
    while (ia < ta.size() || ib < tb.size()) {
        const bool pick_a =
            ib >= tb.size() || (ia < ta.size() && ta[ia].t_ns <= tb[ib].t_ns);
        if (pick_a) {
            panel.advance(a, ta[ia]);
            standalone.add_tick(ta[ia]);
            ++ia;
        } else {
            panel.advance(b, tb[ib]);
            if (standalone.started() && tb[ib].t_ns >= standalone.t_now_ns())
                standalone.advance_time(tb[ib].t_ns);
            ++ib;
        }
    }
    const Eigen::VectorXd diff = panel.integrator(a).real().flow - standalone.real().flow;
    CHECK(diff.cwiseAbs().maxCoeff() <=
          1e-12 * standalone.real().flow.cwiseAbs().maxCoeff());
}

TEST_CASE("weighted directional sum aggregates ready assets") {
    auto be = make(BasisKind::LegendreShifted, 4, 6.0);
    AssetPanel panel(be, {});
    const int a = panel.add_asset("X");
    const int b = panel.add_asset("Y");
    const auto ta = oracles::random_session(51, 300, 0.5);
    const auto tb = oracles::random_session(52, 300, 0.5);
    for (std::size_t i = 0; i < ta.size(); ++i) {
        panel.advance(a, ta[i]);
        panel.advance(b, tb[i]);
    }
    const auto sum = panel.weighted_directional_sum();
    REQUIRE(sum.has_value());
    double want = 0.0;
    for (int id : {a, b}) {
        const FlowFields& f = panel.last_frame(id).real_f;
        REQUIRE(f.ready);
        want += *f.lambda_ih * (panel.integrator(id).last_price() - *f.peqv_from_m);
    }
    CHECK(*sum == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("unknown asset indices are rejected") {
    auto be = make(BasisKind::LegendreShifted, 3, 5.0);
    AssetPanel panel(be, {});
    panel.add_asset("A");
    CHECK(panel.asset_index("A") == 0);
    CHECK(panel.asset_index("B") == -1);
    CHECK_THROWS_AS(panel.advance(5, Tick{0, 1.0, 1.0, -1}), std::out_of_range);
}
