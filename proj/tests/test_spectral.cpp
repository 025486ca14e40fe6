#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <memory>
#include <random>

#include "oracles.hpp"
#include "specflow/moments.hpp"
#include "specflow/operators.hpp"
#include "specflow/spectral.hpp"

using namespace specflow;

namespace {

std::shared_ptr<const BasisEngine> make(BasisKind kind, int n, double tau) {
    return std::make_shared<const BasisEngine>(kind, MeasureParams{tau, n});
}

Eigen::MatrixXd random_spd(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXd m(n, n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) m(j, k) = g(rng);
    return m * m.transpose() + 0.1 * Eigen::MatrixXd::Identity(n, n);
}

Eigen::MatrixXd random_symmetric(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXd m(n, n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k <= j; ++k) m(j, k) = m(k, j) = g(rng);
    return m;
}

}  // namespace

TEST_CASE("A proportional to B gives a constant spectrum") {
    auto be = make(BasisKind::LegendreShifted, 5, 2.0);
    const double c = 3.75;
    const SpectralState spec =
        solve_gev(*be, c * be->gram_matrix(), be->gram_matrix(), GevWhich::IvsGram);
    REQUIRE(spec.ok);
    for (int i = 0; i < 5; ++i) CHECK(spec.lambdas(i) == doctest::Approx(c).epsilon(1e-12));
    // B-orthonormality survives the degenerate tie-break reordering
    const Eigen::MatrixXd bnorm = spec.alphas.transpose() * be->gram_matrix() * spec.alphas;
    CHECK((bnorm - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("n = 1 scalar problem") {
    auto be = make(BasisKind::Laguerre, 1, 4.0);
    Eigen::MatrixXd a(1, 1), b(1, 1);
    a(0, 0) = 10.0;
    b(0, 0) = be->gram_matrix()(0, 0);  // <1> = tau
    const SpectralState spec = solve_gev(*be, a, b, GevWhich::IvsGram);
    REQUIRE(spec.ok);
    CHECK(spec.lambdas(0) == doctest::Approx(10.0 / 4.0).epsilon(1e-13));
    CHECK(spec.alphas(0, 0) == doctest::Approx(1.0 / std::sqrt(4.0)).epsilon(1e-13));
}

TEST_CASE("random problems satisfy the eigen contracts") {
    std::mt19937_64 rng(2024);
    auto be = make(BasisKind::LegendreShifted, 6, 1.0);
    for (int rep = 0; rep < 25; ++rep) {
        const Eigen::MatrixXd b = random_spd(rng, 6);
        const Eigen::MatrixXd a = random_symmetric(rng, 6);
        const SpectralState spec = solve_gev(*be, a, b, GevWhich::IvsGram);
        REQUIRE(spec.ok);
        const double anorm = a.cwiseAbs().maxCoeff();
        for (int i = 0; i < 6; ++i) {
            const Eigen::VectorXd resid =
                a * spec.alphas.col(i) - spec.lambdas(i) * (b * spec.alphas.col(i));
            CHECK(resid.cwiseAbs().maxCoeff() < 1e-8 * anorm);
        }
        const Eigen::MatrixXd bn = spec.alphas.transpose() * b * spec.alphas;
        CHECK((bn - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-8);
        const Eigen::MatrixXd an = spec.alphas.transpose() * a * spec.alphas;
        Eigen::MatrixXd ad = spec.lambdas.asDiagonal();
        CHECK((an - ad).cwiseAbs().maxCoeff() < 1e-8 * spec.lambdas.cwiseAbs().maxCoeff());
        // ascending order
        for (int i = 1; i < 6; ++i) CHECK(spec.lambdas(i) >= spec.lambdas(i - 1) - 1e-12);
    }
}

TEST_CASE("rank-deficient B is reported not ok") {
    auto be = make(BasisKind::LegendreShifted, 4, 1.0);
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(4, 4);
    b.topLeftCorner(2, 2) = Eigen::MatrixXd::Identity(2, 2);
    std::mt19937_64 rng(1);
    const SpectralState spec = solve_gev(*be, random_symmetric(rng, 4), b, GevWhich::IvsGram);
    CHECK_FALSE(spec.ok);
}

TEST_CASE("localized state: n = 1 is flat and unit-norm") {
    auto be = make(BasisKind::LegendreShifted, 1, 9.0);
    Eigen::MatrixXd a(1, 1);
    a(0, 0) = 2.0;
    const SpectralState spec = solve_gev(*be, a, be->gram_matrix(), GevWhich::IvsGram);
    REQUIRE(spec.ok);
    for (double y : {0.1, 0.5, 1.0}) {
        const Eigen::VectorXd psi = localized_state(*be, spec, y);
        CHECK(psi(0) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));  // 1/sqrt(tau)
    }
}

TEST_CASE("localized state: completeness of projections") {
    std::mt19937_64 rng(7);
    auto be = make(BasisKind::LegendreShifted, 6, 2.0);
    MomentIntegrator mi(be);
    for (const Tick& t : oracles::random_session(5150, 500, 0.4)) mi.add_tick(t);
    const Eigen::MatrixXd i_q = matrix_from_moments_raw(*be, mi.real().flow);
    const SpectralState spec = solve_gev(*be, i_q, be->gram_matrix(), GevWhich::IvsGram);
    REQUIRE(spec.ok);
    std::uniform_real_distribution<double> unit(0.05, 1.0);
    for (int rep = 0; rep < 10; ++rep) {
        const double y = unit(rng);
        const Eigen::VectorXd psi_y = localized_state(*be, spec, y);
        // <psi_y|psi_y> = 1 and sum_i <psi_y|psi^{[i]}>^2 = 1
        CHECK(psi_y.dot(be->gram_matrix() * psi_y) == doctest::Approx(1.0).epsilon(1e-10));
        double total = 0.0;
        for (int i = 0; i < 6; ++i) {
            const double pr = psi_y.dot(be->gram_matrix() * spec.alphas.col(i));
            total += pr * pr;
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("localized state matches the kernel form of the interpolation") {
    auto be = make(BasisKind::LegendreShifted, 5, 3.0);
    MomentIntegrator mi(be);
    for (const Tick& t : oracles::random_session(9000, 400, 0.5)) mi.add_tick(t);
    const Eigen::MatrixXd i_q = matrix_from_moments_raw(*be, mi.real().flow);
    const SpectralState spec = solve_gev(*be, i_q, be->gram_matrix(), GevWhich::IvsGram);
    REQUIRE(spec.ok);
    for (double y : {0.2, 0.7, 1.0}) {
        const Eigen::VectorXd psi_y = localized_state(*be, spec, y);
        // G^{-1} kernel form, independent of the eigenproblem
        Eigen::VectorXd qy(5);
        for (int m = 0; m < 5; ++m) qy(m) = be->eval_q(m, y);
        const Eigen::VectorXd ginv_qy = be->gram_matrix().llt().solve(qy);
        const Eigen::VectorXd kernel = ginv_qy / std::sqrt(qy.dot(ginv_qy));
        CHECK((psi_y - kernel).cwiseAbs().maxCoeff() < 1e-9 * kernel.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("max flow state: Rayleigh maximality and dI_future >= 0") {
    std::mt19937_64 rng(88);
    for (BasisKind kind : {BasisKind::LegendreShifted, BasisKind::Laguerre}) {
        auto be = make(kind, 6, 2.0);
        MomentIntegrator mi(be);
        const std::uint64_t seed = kind == BasisKind::LegendreShifted ? 42 : 43;
        for (const Tick& t : oracles::random_session(seed, 600, 0.5)) mi.add_tick(t);
        const Eigen::MatrixXd i_q = matrix_from_moments_raw(*be, mi.real().flow);
        const SpectralState spec = solve_gev(*be, i_q, be->gram_matrix(), GevWhich::IvsGram);
        REQUIRE(spec.ok);
        const MaxFlowState mf = max_flow_state(spec);
        CHECK(mf.lambda_ih > 0.0);
        CHECK(mf.projection_now >= 0.0);
        CHECK(mf.projection_now <= 1.0 + 1e-12);
        CHECK(mf.lambda_ih - mf.i_now >= -1e-10 * mf.lambda_ih);  // dI^F >= 0
        std::normal_distribution<double> g(0.0, 1.0);
        for (int rep = 0; rep < 100; ++rep) {
            Eigen::VectorXd psi(6);
            for (int i = 0; i < 6; ++i) psi(i) = g(rng);
            const double rq =
                psi.dot(i_q * psi) / psi.dot(be->gram_matrix() * psi);
            CHECK(rq <= mf.lambda_ih * (1.0 + 1e-10));
        }
    }
}

TEST_CASE("degenerate spectrum tie-break picks the now-localized state") {
    // constant-flow synthetic stream: A ~ c*B so every lambda is c; the
    // tie-break must still give a well-defined projection
    auto be = make(BasisKind::LegendreShifted, 4, 2.0);
    const double c = 7.0;
    const SpectralState spec =
        solve_gev(*be, c * be->gram_matrix(), be->gram_matrix(), GevWhich::IvsGram);
    REQUIRE(spec.ok);
    const MaxFlowState mf = max_flow_state(spec);
    CHECK(mf.lambda_ih == doctest::Approx(c).epsilon(1e-12));
    // within the fully degenerate cluster, index 0 holds the largest |psi(x0)|
    for (int i = 1; i < 4; ++i)
        CHECK(std::abs(spec.psi_at_x0(mf.index)) >= std::abs(spec.psi_at_x0(i)) - 1e-12);
    CHECK(mf.projection_now >= 0.0);
    CHECK(mf.projection_now <= 1.0 + 1e-12);
}

TEST_CASE("aggregated flow state: lambda_VT does not exceed lambda_IH") {
    auto be = make(BasisKind::LegendreShifted, 6, 3.0);
    MomentIntegrator mi(be);
    for (const Tick& t : oracles::random_session(31337, 800, 0.4)) mi.add_tick(t);
    const Eigen::MatrixXd i_q = matrix_from_moments_raw(*be, mi.real().flow);
    const SpectralState spec = solve_gev(*be, i_q, be->gram_matrix(), GevWhich::IvsGram);
    REQUIRE(spec.ok);
    const MaxFlowState mf = max_flow_state(spec);

    const Eigen::MatrixXd a_vt = matrix_from_moments_raw(*be, mi.rel_volume_moments(mi.real()));
    const Eigen::MatrixXd b_vt = matrix_from_moments_raw(*be, mi.rel_age_moments());
    const SpectralState vt = solve_gev(*be, a_vt, b_vt, GevWhich::VvsT);
    REQUIRE(vt.ok);
    CHECK(vt.lambda_top() > 0.0);
    CHECK(vt.lambda_top() <= mf.lambda_ih * (1.0 + 1e-8));
}

TEST_CASE("solutions are invariant under Q-basis change with the same measure") {
    // Laguerre vs Monomial share the measure; spectra and Rayleigh quotients
    // must agree
    const auto ticks = oracles::random_session(777, 500, 0.6);
    Eigen::VectorXd lam[2];
    double pih[2];
    int idx = 0;
    for (BasisKind kind : {BasisKind::Laguerre, BasisKind::Monomial}) {
        auto be = make(kind, 6, 2.0);
        MomentIntegrator mi(be);
        for (const Tick& t : ticks) mi.add_tick(t);
        const Eigen::MatrixXd i_q = matrix_from_moments_raw(*be, mi.real().flow);
        const SpectralState spec = solve_gev(*be, i_q, be->gram_matrix(), GevWhich::IvsGram);
        REQUIRE(spec.ok);
        const MaxFlowState mf = max_flow_state(spec);
        lam[idx] = spec.lambdas;
        const Eigen::MatrixXd pi_q = matrix_from_moments_raw(*be, mi.real().price_flow);
        pih[idx] = mf.psi_ih.dot(pi_q * mf.psi_ih) / mf.lambda_ih;
        ++idx;
    }
    for (int i = 0; i < 6; ++i)
        CHECK(lam[0](i) == doctest::Approx(lam[1](i)).epsilon(1e-6));
    CHECK(pih[0] == doctest::Approx(pih[1]).epsilon(1e-6));
}
