// Test-only numerical oracles, independent of the streaming/recurrence
// implementation paths they check.
#ifndef SPECFLOW_TESTS_ORACLES_HPP
#define SPECFLOW_TESTS_ORACLES_HPP

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "specflow/basis.hpp"
#include "specflow/ticks.hpp"

namespace oracles {

// adaptive Simpson quadrature with a relative tolerance against a running
// magnitude estimate; depth-capped so unreachable tolerances terminate
inline double simpson_step(const std::function<double(double)>& f, double a, double b, double fa,
                           double fb, double fm, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson_step(f, a, m, fa, fm, flm, left, 0.5 * tol, depth - 1) +
           simpson_step(f, m, b, fm, fb, frm, right, 0.5 * tol, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double rtol = 1e-12) {
    // process in panels so decaying-weight tails don't force deep recursion
    const int panels = 64;
    double magnitude = 0.0;
    for (int i = 0; i <= 256; ++i)
        magnitude = std::max(magnitude, std::abs(f(a + (b - a) * i / 256.0)));
    const double tol = std::max(rtol * magnitude * (b - a) / panels, 1e-300);
    double total = 0.0;
    for (int i = 0; i < panels; ++i) {
        const double pa = a + (b - a) * i / panels;
        const double pb = a + (b - a) * (i + 1) / panels;
        const double fa = f(pa), fb = f(pb), fm = f(0.5 * (pa + pb));
        const double whole = (pb - pa) / 6.0 * (fa + 4.0 * fm + fb);
        total += simpson_step(f, pa, pb, fa, fb, fm, whole, tol, 22);
    }
    return total;
}

// five-point central finite difference d/dt
inline double fd_derivative(const std::function<double(double)>& f, double t, double h) {
    return (-f(t + 2 * h) + 8 * f(t + h) - 8 * f(t - h) + f(t - 2 * h)) / (12.0 * h);
}

// Direct batch evaluation of the sampled moments at a fixed t_now: the
// brute-force counterpart of the recurrent integrator.
struct BatchMoments {
    Eigen::VectorXd time, p_time, dp;
    Eigen::VectorXd flow, price_flow, vol_dp, age_flow;          // real volume
    Eigen::VectorXd s_flow, s_price_flow, s_vol_dp, s_age_flow;  // surrogate
};

inline BatchMoments batch_moments(const specflow::BasisEngine& be,
                                  const std::vector<specflow::Tick>& ticks,
                                  std::int64_t t_now_ns = -1) {
    const int size = be.moment_count();
    BatchMoments out;
    for (Eigen::VectorXd* v : {&out.time, &out.p_time, &out.dp, &out.flow, &out.price_flow,
                               &out.vol_dp, &out.age_flow, &out.s_flow, &out.s_price_flow,
                               &out.s_vol_dp, &out.s_age_flow})
        *v = Eigen::VectorXd::Zero(size);
    if (ticks.size() < 2) return out;
    if (t_now_ns < 0) t_now_ns = ticks.back().t_ns;
    const double t_now = static_cast<double>(t_now_ns - ticks.front().t_ns) * 1e-9;
    double v_cum = 0.0, a_cum = 0.0;
    std::vector<double> v_at(ticks.size()), a_at(ticks.size());
    for (std::size_t l = 1; l < ticks.size(); ++l) {
        v_cum += ticks[l].size;
        a_cum += std::abs(ticks[l].price - ticks[l - 1].price);
        v_at[l] = v_cum;
        a_at[l] = a_cum;
    }
    for (std::size_t l = 1; l < ticks.size(); ++l) {
        const double t = static_cast<double>(ticks[l].t_ns - ticks.front().t_ns) * 1e-9;
        const double age = t_now - t;
        const double x = be.x_of_age(age);
        const double w = be.omega_of_age(age);
        const double dt = static_cast<double>(ticks[l].t_ns - ticks[l - 1].t_ns) * 1e-9;
        const double dp = ticks[l].price - ticks[l - 1].price;
        const double dv = ticks[l].size;
        const double da = std::abs(dp);
        Eigen::VectorXd q(size);
        for (int m = 0; m < size; ++m) q(m) = be.eval_q(m, x);
        out.time += w * dt * q;
        out.p_time += ticks[l].price * w * dt * q;
        out.dp += w * dp * q;
        out.flow += w * dv * q;
        out.price_flow += ticks[l].price * w * dv * q;
        out.vol_dp += (v_at[l] - v_cum) * w * dp * q;
        out.age_flow += age * w * dv * q;
        out.s_flow += w * da * q;
        out.s_price_flow += ticks[l].price * w * da * q;
        out.s_vol_dp += (a_at[l] - a_cum) * w * dp * q;
        out.s_age_flow += age * w * da * q;
    }
    return out;
}

// tick-series builders ------------------------------------------------------

inline std::vector<specflow::Tick> random_session(std::uint64_t seed, int count,
                                                  double mean_gap_sec = 1.0,
                                                  double price0 = 100.0) {
    std::mt19937_64 rng(seed);
    std::exponential_distribution<double> gap(1.0 / mean_gap_sec);
    std::normal_distribution<double> step(0.0, 0.05);
    std::lognormal_distribution<double> vol(3.0, 1.0);
    std::vector<specflow::Tick> ticks;
    ticks.reserve(count);
    std::int64_t t = 34'200'000'000'000;  // 09:30
    double p = price0;
    for (int i = 0; i < count; ++i) {
        t += static_cast<std::int64_t>(gap(rng) * 1e9);
        p = std::max(1.0, p + step(rng));
        ticks.push_back({t, p, std::floor(vol(rng)) + 1.0, -1});
    }
    return ticks;
}

// smooth deterministic session p(t), V(t) sampled on a uniform grid
inline std::vector<specflow::Tick> smooth_session(const std::function<double(double)>& price,
                                                  const std::function<double(double)>& cum_volume,
                                                  double t_total, int count) {
    std::vector<specflow::Tick> ticks;
    ticks.reserve(count);
    const std::int64_t t0 = 34'200'000'000'000;
    double v_prev = cum_volume(0.0);
    for (int i = 0; i < count; ++i) {
        const double t = t_total * (i + 1) / count;
        const double v = cum_volume(t);
        ticks.push_back({t0 + static_cast<std::int64_t>(t * 1e9), price(t),
                         std::max(0.0, v - v_prev), -1});
        v_prev = v;
    }
    return ticks;
}

inline Eigen::VectorXd random_poly(std::mt19937_64& rng, int degree) {
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    Eigen::VectorXd p(degree + 1);
    for (int i = 0; i <= degree; ++i) p(i) = coeff(rng);
    return p;
}

inline const std::vector<specflow::BasisKind>& all_kinds() {
    static const std::vector<specflow::BasisKind> kinds = {
        specflow::BasisKind::Laguerre, specflow::BasisKind::LegendreShifted,
        specflow::BasisKind::Monomial, specflow::BasisKind::ChebyshevShifted};
    return kinds;
}

}  // namespace oracles

#endif
