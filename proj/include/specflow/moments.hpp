#ifndef SPECFLOW_MOMENTS_HPP
#define SPECFLOW_MOMENTS_HPP

#include <Eigen/Dense>
#include <memory>
#include <optional>

#include "specflow/basis.hpp"
#include "specflow/ticks.hpp"

namespace specflow {

// Moment vectors of one volume-like increment stream (real traded size, or
// the |dp| surrogate). All vectors have length 2n-1 and share the basis and
// t_now of the owning integrator. Volume is anchored so V(t_now) = 0.
struct FlowMoments {
    Eigen::VectorXd flow;        // <Q_m I>, I = dV/dt
    Eigen::VectorXd price_flow;  // <Q_m p I>
    Eigen::VectorXd vol_dp;      // <Q_m (V - V_last) dp/dt>
    Eigen::VectorXd age_flow;    // <Q_m (t_now - t) I>
    double total = 0.0;          // cumulative volume over the whole stream
};

// Optional secondary-sampling vectors: a per-tick computed value f is
// treated as an observable with increments df_l = f_l - f_{l-1}.
struct SecondaryMoments {
    Eigen::VectorXd df;    // <Q_m df/dt>
    Eigen::VectorXd p_df;  // <Q_m p df/dt>
    Eigen::VectorXd d_pf;  // <Q_m d(p f)/dt>
    bool primed = false;   // first observation recorded
    double prev_f = 0.0;
    double prev_pf = 0.0;
};

// Recurrent per-tick moment state for one instrument: on every tick all
// vectors are advanced by the basis shift for the inter-tick gap, then
// incremented with the tick's contributions. Single owner; distinct
// instruments can run in parallel with no shared mutable state.
class MomentIntegrator {
public:
    explicit MomentIntegrator(std::shared_ptr<const BasisEngine> be);

    void add_tick(const Tick& tick);
    // shift-only advance (panel peers without a tick at this time)
    void advance_time(std::int64_t t_ns);

    // call after add_tick for the same tick, once f has been computed
    void add_secondary(double f);

    const BasisEngine& basis() const { return *be_; }
    std::shared_ptr<const BasisEngine> basis_ptr() const { return be_; }
    long ticks_seen() const { return ticks_; }
    bool started() const { return ticks_ > 0; }
    double last_price() const { return p_last_; }
    double t_now_seconds() const { return t_now_sec_; }
    std::int64_t t_now_ns() const { return t_ns_; }
    std::int64_t anchor_ns() const { return t0_ns_; }

    const FlowMoments& real() const { return real_; }
    const FlowMoments& surrogate() const { return surrogate_; }
    const Eigen::VectorXd& time_moments() const { return time_; }      // sampled <Q_m>
    const Eigen::VectorXd& price_moments() const { return p_time_; }   // <Q_m p>
    const Eigen::VectorXd& dp_moments() const { return dp_; }          // <Q_m dp/dt>
    const SecondaryMoments& secondary() const { return secondary_; }

    // exact by-parts duals: <Q_m (V_last - V)> = J^T <Q_m I>
    Eigen::VectorXd rel_volume_moments(const FlowMoments& bank) const;
    // analytic <Q_m (t_now - t)>
    const Eigen::VectorXd& rel_age_moments() const { return be_->age_moments(); }

private:
    void apply_shift(double delta_sec);

    std::shared_ptr<const BasisEngine> be_;
    long ticks_ = 0;
    std::int64_t t0_ns_ = 0;
    std::int64_t t_ns_ = 0;
    double t_now_sec_ = 0.0;
    double p_last_ = 0.0;

    Eigen::VectorXd time_;
    Eigen::VectorXd p_time_;
    Eigen::VectorXd dp_;
    FlowMoments real_;
    FlowMoments surrogate_;
    SecondaryMoments secondary_;
};

// Cumulative price changes counted only on ticks where a monitored value
// (typically the top execution-flow eigenvalue) increased.
class ScalpAccumulator {
public:
    // returns the running scalp price after this tick
    double add(double price, double monitored);
    double value() const { return value_; }

private:
    bool primed_ = false;
    double prev_price_ = 0.0;
    double prev_monitored_ = 0.0;
    double value_ = 0.0;
};

}  // namespace specflow

#endif
