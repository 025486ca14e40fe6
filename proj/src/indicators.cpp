#include "specflow/indicators.hpp"

#include <cmath>

#include "specflow/operators.hpp"

namespace specflow {

FlowEngine::FlowEngine(std::shared_ptr<const BasisEngine> be, EngineConfig cfg)
    : be_(std::move(be)), cfg_(cfg), density_(be_) {
    vt_b_ = matrix_from_moments_raw(*be_, be_->age_moments());
}

namespace {

// frames that are not ready must carry no numbers in directional fields;
// only the plain moving averages and the volume counter survive
FlowFields scrub_directional(FlowFields f) {
    if (f.ready) return f;
    FlowFields kept;
    kept.pv_average = f.pv_average;
    kept.tv_average = f.tv_average;
    kept.total_volume = f.total_volume;
    return kept;
}

}  // namespace

FlowFields FlowEngine::compute_bank(const MomentIntegrator& mi, const FlowMoments& bank,
                                    BankState* state_out) const {
    return scrub_directional(compute_bank_impl(mi, bank, state_out));
}

FlowFields FlowEngine::compute_bank_impl(const MomentIntegrator& mi, const FlowMoments& bank,
                                         BankState* state_out) const {
    const BasisEngine& be = *be_;
    const int n = be.n();
    FlowFields out;
    out.total_volume = bank.total;
    if (state_out) state_out->valid = false;

    if (bank.flow(0) > 0.0) {
        out.pv_average = bank.price_flow(0) / bank.flow(0);
        out.tv_average = bank.age_flow(0) / bank.flow(0);
    }
    if (mi.ticks_seen() < 2 * n) return out;

    const Eigen::MatrixXd i_q = matrix_from_moments_raw(be, bank.flow);
    GevOptions gev_opts;
    gev_opts.condition_limit = cfg_.condition_limit;
    gev_opts.pseudo_floor = cfg_.lambda_floor_rel;
    const SpectralState spec = solve_gev(be, i_q, be.gram_matrix(), GevWhich::IvsGram, gev_opts);
    if (!spec.ok) return out;
    const MaxFlowState mf = max_flow_state(spec);
    if (!(mf.lambda_ih > 0.0)) return out;

    out.lambda_ih = mf.lambda_ih;
    out.wh_squared = mf.projection_now;
    out.di_future = mf.lambda_ih - mf.i_now;
    out.no_info = mf.projection_now >= cfg_.ignore_threshold;

    const Eigen::MatrixXd pi_q = matrix_from_moments_raw(be, bank.price_flow);
    const Eigen::MatrixXd agei_q = matrix_from_moments_raw(be, bank.age_flow);
    const Eigen::MatrixXd vdp_q = matrix_from_moments_raw(be, bank.vol_dp);
    const Eigen::VectorXd& psi = mf.psi_ih;

    const double i_in_ih = psi.dot(i_q * psi);  // = lambda_IH by construction
    out.pv_m = psi.dot(pi_q * psi) / i_in_ih;
    out.tv_m = psi.dot(agei_q * psi) / i_in_ih;

    const double delta_vd = psi.dot(vdp_q * psi);
    out.delta_vd = delta_vd;
    out.peqv_from_m = *out.pv_m - delta_vd / mf.lambda_ih;

    // since-spike density matrix and the advancing-price machinery
    const DensityState rho_jih = density_.since_state(psi, spec, DensityOrigin::JIH);
    if (state_out) {
        state_out->spec = spec;
        state_out->mf = mf;
        state_out->rho_jih = rho_jih;
        state_out->valid = true;
    }
    if (!rho_jih.ok) return out;
    out.ready = true;

    const Eigen::MatrixXd ed = ed_of_eigenvectors(be, spec);
    IdpdtContext ctx;
    ctx.spec = &spec;
    ctx.k_pi = ed_sandwich(ed, pi_q, spec.alphas);
    ctx.k_i = ed_sandwich(ed, i_q, spec.alphas);
    ctx.k_vdp = ed_sandwich(ed, vdp_q, spec.alphas);
    ctx.p_last = mi.last_price();
    ctx.i0f = mf.lambda_ih;
    ctx.beta = cfg_.beta;
    ctx.lambda_floor_rel = cfg_.lambda_floor_rel;
    const Eigen::MatrixXd dp_q = matrix_from_moments_raw(be, mi.dp_moments());
    const Eigen::MatrixXd p_q = matrix_from_moments_raw(be, mi.price_moments());
    ctx.k_dp = ed_sandwich(ed, dp_q, spec.alphas);
    ctx.dp_psi = spec.alphas.transpose() * dp_q * spec.alphas;
    ctx.p_psi = spec.alphas.transpose() * p_q * spec.alphas;
    const Eigen::VectorXd vrel_moms = mi.rel_volume_moments(bank);
    const Eigen::MatrixXd vrel_q = matrix_from_moments_raw(be, vrel_moms);
    ctx.vrel_psi = spec.alphas.transpose() * vrel_q * spec.alphas;

    const Eigen::MatrixXd i_psi = spec.alphas.transpose() * i_q * spec.alphas;
    const Eigen::MatrixXd pi_psi = spec.alphas.transpose() * pi_q * spec.alphas;
    const Eigen::MatrixXd vdp_psi = spec.alphas.transpose() * vdp_q * spec.alphas;

    const double v_ih = spur(i_psi, rho_jih.rho_psi);
    const double t_ih = rho_jih.rho_psi.trace();
    if (t_ih > 0.0) out.vt_ratio = (v_ih / t_ih) / mf.lambda_ih;

    // aggregated execution flow eigenproblem V vs T
    const Eigen::MatrixXd vrel_for_vt = vrel_q;
    const SpectralState vt_spec = solve_gev(be, vrel_for_vt, vt_b_, GevWhich::VvsT, gev_opts);
    if (vt_spec.ok) out.lambda_vt = vt_spec.lambda_top();

    // adjusted boundary for the sandwich difference proxy
    double i0f_used = mf.lambda_ih;
    if (cfg_.use_adjusted_i0f || cfg_.experimental) {
        const double lo = out.lambda_vt && *out.lambda_vt > 0.0 ? *out.lambda_vt
                                                                : 0.1 * mf.lambda_ih;
        const AdjustedI0F adj = adjust_i0f(ctx, rho_jih.rho_psi, lo);
        out.i0f_adjusted = adj.value;
        if (cfg_.use_adjusted_i0f && cfg_.variant == IdpdtVariant::SandwichDtPoverI &&
            adj.converged)
            i0f_used = adj.value;
    }

    const Eigen::MatrixXd ddt_pi = ddt_pi_matrix(ctx);
    const double spur_ddt_pi = spur(ddt_pi, rho_jih.rho_psi);

    auto delta_for = [&](IdpdtVariant v, double boundary) -> std::optional<double> {
        IdpdtContext local = ctx;
        local.i0f = boundary;
        const auto x = idpdt_matrix(v, local);
        if (!x) return std::nullopt;
        const double s = spur(*x, rho_jih.rho_psi);
        if (variant_traits(v).yields_difference) return s;
        return 2.0 * s - spur_ddt_pi;
    };

    const double boundary = cfg_.variant == IdpdtVariant::SandwichDtPoverI ? i0f_used
                                                                           : mf.lambda_ih;
    out.delta_i = delta_for(cfg_.variant, boundary);
    if (out.delta_i) out.peq_i = ctx.p_last - *out.delta_i / mf.lambda_ih;

    // local volume driven: exactly computable d/dt (V-V_last) dp/dt with zero boundary
    const Eigen::MatrixXd ddt_vdp = -ctx.k_vdp - ctx.k_vdp.transpose();
    const double spur_ddt_vdp = spur(ddt_vdp, rho_jih.rho_psi);
    {
        IdpdtContext local = ctx;
        const auto x = idpdt_matrix(cfg_.variant == IdpdtVariant::DtPoverI ||
                                            cfg_.variant == IdpdtVariant::SandwichDtPoverI
                                        ? IdpdtVariant::RightProduct
                                        : cfg_.variant,
                                    local);
        if (x) {
            const double s = spur(*x, rho_jih.rho_psi);
            out.delta_v = 2.0 * s - spur_ddt_vdp;
            out.peq_local_volume = ctx.p_last - *out.delta_v / mf.lambda_ih;
            if (out.delta_i) {
                out.delta_t = *out.delta_i + *out.delta_v;
                out.peq_total = ctx.p_last - *out.delta_t / mf.lambda_ih;
            }
        }
    }

    if (cfg_.compare_variants) {
        out.delta_i_variants.resize(all_variants().size());
        for (std::size_t vi = 0; vi < all_variants().size(); ++vi)
            out.delta_i_variants[vi] = delta_for(all_variants()[vi], mf.lambda_ih);
    }

    if (cfg_.experimental) {
        out.neg_rho_jih = rho_jih.negative_eigenvalues();
        const Eigen::MatrixXd didt = ddt_i_matrix(ctx);
        const ProjectionPair proj = didt_projectors(didt);
        if (proj.ok) {
            out.didt_lambda_min = proj.didt_lambdas.minCoeff();
            out.didt_lambda_max = proj.didt_lambdas.maxCoeff();
        }
        const FlowAdjusted fa = flow_adjusted_pi(spec, v_ih, t_ih, pi_psi, i_psi,
                                                 rho_jih.rho_psi, cfg_.lambda_floor_rel);
        if (fa.ok) {
            out.p_plus = fa.p_plus;
            out.p_minus = fa.p_minus;
            out.pnl_pi = fa.pnl;
        }
        const DensityState rho_jjih = density_.since_state(psi, spec, DensityOrigin::JJIH);
        if (rho_jjih.ok) {
            IdpdtContext local = ctx;
            const auto x = idpdt_matrix(cfg_.variant, local);
            if (x) {
                double delta_jj;
                if (variant_traits(cfg_.variant).yields_difference) {
                    delta_jj = spur(*x, rho_jjih.rho_psi);
                } else {
                    delta_jj = 2.0 * spur(*x, rho_jjih.rho_psi) - spur(ddt_pi, rho_jjih.rho_psi);
                }
                const DoubleIntegration di =
                    double_integration_pstar(mf.lambda_ih, v_ih, t_ih, delta_jj, mf.lambda_ih);
                out.v_tilde = di.v_tilde;
                out.p_star = di.p_star;
            }
        }
    }
    return out;
}

IndicatorFrame FlowEngine::compute(const MomentIntegrator& mi) const {
    IndicatorFrame frame;
    frame.t_ns = mi.t_now_ns();
    frame.t_sec = mi.t_now_seconds();
    frame.price = mi.last_price();
    frame.real_f = compute_bank(mi, mi.real(), nullptr);
    frame.surrogate_f = compute_bank(mi, mi.surrogate(), nullptr);
    return frame;
}

IndicatorFrame FlowEngine::process(MomentIntegrator& mi) {
    IndicatorFrame frame;
    frame.t_ns = mi.t_now_ns();
    frame.t_sec = mi.t_now_seconds();
    frame.price = mi.last_price();
    frame.real_f = compute_bank(mi, mi.real(), &real_state_);
    frame.surrogate_f = compute_bank(mi, mi.surrogate(), &surrogate_state_);
    if (frame.real_f.lambda_ih) {
        frame.real_f.scalp = scalp_real_.add(frame.price, *frame.real_f.lambda_ih);
        mi.add_secondary(*frame.real_f.lambda_ih);
    }
    if (frame.surrogate_f.lambda_ih)
        frame.surrogate_f.scalp = scalp_surrogate_.add(frame.price, *frame.surrogate_f.lambda_ih);
    return frame;
}

}  // namespace specflow
