#include "specflow/panel.hpp"

#include <stdexcept>

#include "specflow/operators.hpp"

namespace specflow {

AssetPanel::AssetPanel(std::shared_ptr<const BasisEngine> be, EngineConfig cfg)
    : be_(std::move(be)), cfg_(cfg) {
    index_moments_ = Eigen::VectorXd::Zero(be_->moment_count());
}

int AssetPanel::add_asset(const std::string& symbol) {
    assets_.push_back(Asset{symbol, MomentIntegrator(be_), FlowEngine(be_, cfg_),
                            IndicatorFrame{}, false});
    return static_cast<int>(assets_.size()) - 1;
}

int AssetPanel::asset_index(const std::string& symbol) const {
    for (std::size_t i = 0; i < assets_.size(); ++i)
        if (assets_[i].symbol == symbol) return static_cast<int>(i);
    return -1;
}

const IndicatorFrame& AssetPanel::advance(int asset, const Tick& tick) {
    if (asset < 0 || asset >= asset_count()) throw std::out_of_range("panel: unknown asset");
    std::int64_t t = tick.t_ns;
    if (clock_started_ && t < t_ns_) t = t_ns_;  // shared clock is monotone

    double delta = 0.0;
    if (clock_started_) delta = static_cast<double>(t - t_ns_) * 1e-9;
    if (clock_started_ && delta > 0.0) {
        const auto shift = be_->shift_operator(delta);
        index_moments_ = (*shift) * index_moments_;
    }
    for (int i = 0; i < asset_count(); ++i) {
        if (i == asset) continue;
        assets_[i].integrator.advance_time(t);
    }
    Tick clamped = tick;
    clamped.t_ns = t;
    Asset& a = assets_[asset];
    a.integrator.add_tick(clamped);
    if (a.primed) index_moments_ += (tick.price * tick.size) * be_->q_at_x0();
    a.primed = true;

    clock_started_ = true;
    t_ns_ = t;
    a.frame = a.engine.process(a.integrator);
    a.frame.symbol = asset;
    return a.frame;
}

std::optional<double> AssetPanel::cross_projection(int a, int b) const {
    const BankState& sa = assets_[a].engine.real_state();
    const BankState& sb = assets_[b].engine.real_state();
    if (!sa.valid || !sb.valid) return std::nullopt;
    const double dot = sa.mf.psi_ih.dot(be_->gram_matrix() * sb.mf.psi_ih);
    return dot * dot;
}

AssetPanel::SpikeOrder AssetPanel::spike_order(int a, int b) const {
    SpikeOrder out;
    const FlowFields& fa = assets_[a].frame.real_f;
    const FlowFields& fb = assets_[b].frame.real_f;
    if (fa.tv_m && fb.tv_m) out.by_tv_m = *fa.tv_m - *fb.tv_m;
    const BankState& sa = assets_[a].engine.real_state();
    const BankState& sb = assets_[b].engine.real_state();
    if (sa.valid && sb.valid && sa.rho_jih.ok && sb.rho_jih.ok)
        out.by_spur = sa.rho_jih.rho_psi.trace() - sb.rho_jih.rho_psi.trace();
    return out;
}

AssetPanel::IndexState AssetPanel::index_state() const {
    IndexState out;
    const Eigen::MatrixXd a_q = matrix_from_moments_raw(*be_, index_moments_);
    GevOptions opts;
    opts.condition_limit = cfg_.condition_limit;
    const SpectralState spec = solve_gev(*be_, a_q, be_->gram_matrix(), GevWhich::IvsGram, opts);
    if (!spec.ok) return out;
    const MaxFlowState mf = max_flow_state(spec);
    if (!(mf.lambda_ih > 0.0)) return out;
    out.ok = true;
    out.lambda = mf.lambda_ih;
    out.wh_squared = mf.projection_now;
    return out;
}

std::optional<double> AssetPanel::weighted_directional_sum() const {
    double sum = 0.0;
    bool any = false;
    for (const Asset& a : assets_) {
        const FlowFields& f = a.frame.real_f;
        if (!f.ready || !f.lambda_ih || !f.peqv_from_m) continue;
        sum += *f.lambda_ih * (a.integrator.last_price() - *f.peqv_from_m);
        any = true;
    }
    if (!any) return std::nullopt;
    return sum;
}

}  // namespace specflow
