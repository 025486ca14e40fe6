#include "specflow/moments.hpp"

#include <cmath>
#include <stdexcept>

namespace specflow {

MomentIntegrator::MomentIntegrator(std::shared_ptr<const BasisEngine> be) : be_(std::move(be)) {
    const int size = be_->moment_count();
    time_ = Eigen::VectorXd::Zero(size);
    p_time_ = Eigen::VectorXd::Zero(size);
    dp_ = Eigen::VectorXd::Zero(size);
    for (FlowMoments* bank : {&real_, &surrogate_}) {
        bank->flow = Eigen::VectorXd::Zero(size);
        bank->price_flow = Eigen::VectorXd::Zero(size);
        bank->vol_dp = Eigen::VectorXd::Zero(size);
        bank->age_flow = Eigen::VectorXd::Zero(size);
    }
    secondary_.df = Eigen::VectorXd::Zero(size);
    secondary_.p_df = Eigen::VectorXd::Zero(size);
    secondary_.d_pf = Eigen::VectorXd::Zero(size);
}

void MomentIntegrator::apply_shift(double delta_sec) {
    if (delta_sec == 0.0) return;
    const auto shift = be_->shift_operator(delta_sec);
    const Eigen::MatrixXd& s = *shift;
    // age-weighted vectors pick up delta * (flow) before the common shift:
    // (t_now + d - t) = (t_now - t) + d for every past observation
    for (FlowMoments* bank : {&real_, &surrogate_}) {
        bank->age_flow += delta_sec * bank->flow;
        bank->age_flow = s * bank->age_flow;
        bank->flow = s * bank->flow;
        bank->price_flow = s * bank->price_flow;
        bank->vol_dp = s * bank->vol_dp;
    }
    time_ = s * time_;
    p_time_ = s * p_time_;
    dp_ = s * dp_;
    if (secondary_.primed) {
        secondary_.df = s * secondary_.df;
        secondary_.p_df = s * secondary_.p_df;
        secondary_.d_pf = s * secondary_.d_pf;
    }
}

void MomentIntegrator::add_tick(const Tick& tick) {
    if (ticks_ == 0) {
        t0_ns_ = tick.t_ns;
        t_ns_ = tick.t_ns;
        t_now_sec_ = 0.0;
        p_last_ = tick.price;
        real_.total = tick.size;
        ticks_ = 1;
        return;  // no increments: the sums need a previous tick
    }
    if (tick.t_ns < t_ns_) throw std::logic_error("add_tick: time regression (reader must clamp)");
    const double delta = static_cast<double>(tick.t_ns - t_ns_) * 1e-9;
    apply_shift(delta);

    const Eigen::VectorXd& q0 = be_->q_at_x0();  // omega(x_0) = 1
    const double dp = tick.price - p_last_;
    const double dv = tick.size;
    const double da = std::abs(dp);

    time_ += delta * q0;
    p_time_ += (tick.price * delta) * q0;

    // vol_dp re-anchoring to the new V_last uses the pre-increment dp vector
    real_.vol_dp -= dv * dp_;
    surrogate_.vol_dp -= da * dp_;
    dp_ += dp * q0;

    real_.flow += dv * q0;
    real_.price_flow += (tick.price * dv) * q0;
    real_.total += dv;
    surrogate_.flow += da * q0;
    surrogate_.price_flow += (tick.price * da) * q0;
    surrogate_.total += da;
    // the new tick's own age is zero, so age_flow gets no direct term

    t_ns_ = tick.t_ns;
    t_now_sec_ = static_cast<double>(t_ns_ - t0_ns_) * 1e-9;
    p_last_ = tick.price;
    ++ticks_;
}

void MomentIntegrator::advance_time(std::int64_t t_ns) {
    if (ticks_ == 0) return;  // nothing to age before the first tick
    if (t_ns < t_ns_) throw std::logic_error("advance_time: time regression");
    apply_shift(static_cast<double>(t_ns - t_ns_) * 1e-9);
    t_ns_ = t_ns;
    t_now_sec_ = static_cast<double>(t_ns_ - t0_ns_) * 1e-9;
}

void MomentIntegrator::add_secondary(double f) {
    if (ticks_ == 0) throw std::logic_error("add_secondary before first tick");
    const double pf = p_last_ * f;
    if (secondary_.primed) {
        const Eigen::VectorXd& q0 = be_->q_at_x0();
        const double df = f - secondary_.prev_f;
        secondary_.df += df * q0;
        secondary_.p_df += (p_last_ * df) * q0;
        secondary_.d_pf += (pf - secondary_.prev_pf) * q0;
    }
    secondary_.prev_f = f;
    secondary_.prev_pf = pf;
    secondary_.primed = true;
}

Eigen::VectorXd MomentIntegrator::rel_volume_moments(const FlowMoments& bank) const {
    return be_->j_matrix().transpose() * bank.flow;
}

double ScalpAccumulator::add(double price, double monitored) {
    if (!primed_) {
        value_ = price;
        primed_ = true;
    } else if (monitored > prev_monitored_) {
        value_ += price - prev_price_;
    }
    prev_price_ = price;
    prev_monitored_ = monitored;
    return value_;
}

}  // namespace specflow
