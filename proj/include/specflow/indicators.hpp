#ifndef SPECFLOW_INDICATORS_HPP
#define SPECFLOW_INDICATORS_HPP

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "specflow/density.hpp"
#include "specflow/idpdt.hpp"
#include "specflow/moments.hpp"
#include "specflow/projections.hpp"
#include "specflow/spectral.hpp"

namespace specflow {

struct EngineConfig {
    IdpdtVariant variant = IdpdtVariant::RightProduct;
    double beta = 1.0;
    double ignore_threshold = 0.1;  // <psi_0|psi^{IH}>^2 at or above -> no directional info
    double lambda_floor_rel = 1e-12;
    double condition_limit = 1e12;
    bool experimental = false;       // dI/dt projectors, flow-adjusted Pi, P*
    bool compare_variants = false;   // emit Delta_I for every computable variant
    bool use_adjusted_i0f = false;   // SandwichDtPoverI boundary refinement
};

// One bank's per-tick indicator values; absent optionals are emitted as NA.
struct FlowFields {
    bool ready = false;
    std::optional<double> pv_average;   // P^tau
    std::optional<double> tv_average;   // T^tau
    double total_volume = 0.0;
    std::optional<double> pv_m;         // P^{IH}
    std::optional<double> tv_m;         // T^{[IH]}
    std::optional<double> wh_squared;   // <psi_0|psi^{IH}>^2
    std::optional<double> lambda_ih;    // I_0^F
    std::optional<double> di_future;    // dI^F = I_0^F - I_0 >= 0
    std::optional<bool> no_info;
    std::optional<double> peqv_from_m;  // lagging P^EQ
    std::optional<double> delta_vd;
    std::optional<double> delta_i;      // advancing, selected variant
    std::optional<double> peq_i;
    std::optional<double> delta_v;
    std::optional<double> peq_local_volume;
    std::optional<double> delta_t;
    std::optional<double> peq_total;
    std::optional<double> vt_ratio;     // (V_IH/T_IH)/lambda^{IH}
    std::optional<double> lambda_vt;    // top eigenvalue of V vs T
    std::optional<double> scalp;        // running scalp price
    // experimental group
    std::optional<double> p_plus, p_minus, pnl_pi;
    std::optional<double> v_tilde, p_star;
    std::optional<double> i0f_adjusted;
    std::optional<double> didt_lambda_min, didt_lambda_max;
    std::optional<int> neg_rho_jih;
    // comparison mode: Delta_I per variant, ordered as all_variants()
    std::vector<std::optional<double>> delta_i_variants;
};

struct IndicatorFrame {
    std::int64_t t_ns = 0;
    double t_sec = 0.0;
    double price = 0.0;
    int symbol = -1;
    FlowFields real_f;       // pFV
    FlowFields surrogate_f;  // pFA
};

// Internals of one bank's spectral computation, shared with the panel layer.
struct BankState {
    SpectralState spec;
    MaxFlowState mf;
    DensityState rho_jih;
    bool valid = false;
};

// Per-instrument indicator pipeline. Owns the scalp accumulators and feeds
// the lambda_IH stream back into the integrator's secondary sampling.
class FlowEngine {
public:
    FlowEngine(std::shared_ptr<const BasisEngine> be, EngineConfig cfg);

    // full per-tick computation; updates scalp/secondary state
    IndicatorFrame process(MomentIntegrator& mi);
    // pure computation without mutating side channels
    IndicatorFrame compute(const MomentIntegrator& mi) const;

    const EngineConfig& config() const { return cfg_; }
    const DensityFactory& densities() const { return density_; }
    // last spike states (for cross-asset projections)
    const BankState& real_state() const { return real_state_; }
    const BankState& surrogate_state() const { return surrogate_state_; }

private:
    FlowFields compute_bank(const MomentIntegrator& mi, const FlowMoments& bank,
                            BankState* state_out) const;
    FlowFields compute_bank_impl(const MomentIntegrator& mi, const FlowMoments& bank,
                                 BankState* state_out) const;

    std::shared_ptr<const BasisEngine> be_;
    EngineConfig cfg_;
    DensityFactory density_;
    Eigen::MatrixXd vt_b_;  // <Q_j|(t_now-t)|Q_k>, analytic
    ScalpAccumulator scalp_real_;
    ScalpAccumulator scalp_surrogate_;
    BankState real_state_;
    BankState surrogate_state_;
};

}  // namespace specflow

#endif
