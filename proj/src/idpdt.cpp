#include "specflow/idpdt.hpp"

#include <cmath>

namespace specflow {

VariantTraits variant_traits(IdpdtVariant v) {
    switch (v) {
        case IdpdtVariant::SqrtSandwich: return {true, false, false, false};
        case IdpdtVariant::RightProduct: return {false, false, false, false};
        case IdpdtVariant::PowerBeta: return {true, false, false, false};
        case IdpdtVariant::DirectProduct: return {false, false, false, false};
        case IdpdtVariant::PdIResidual: return {false, true, false, false};
        case IdpdtVariant::VddtResidual: return {false, false, false, true};
        case IdpdtVariant::DtPoverI: return {true, true, true, false};
        case IdpdtVariant::SandwichDtPoverI: return {true, true, true, false};
    }
    return {};
}

std::string to_string(IdpdtVariant v) {
    switch (v) {
        case IdpdtVariant::SqrtSandwich: return "sqrt_sandwich";
        case IdpdtVariant::RightProduct: return "right_product";
        case IdpdtVariant::PowerBeta: return "power_beta";
        case IdpdtVariant::DirectProduct: return "direct_product";
        case IdpdtVariant::PdIResidual: return "pdi_residual";
        case IdpdtVariant::VddtResidual: return "vddt_residual";
        case IdpdtVariant::DtPoverI: return "dtp_over_i";
        case IdpdtVariant::SandwichDtPoverI: return "sandwich_dtp_over_i";
    }
    return "?";
}

bool parse_variant(const std::string& name, IdpdtVariant& out) {
    for (IdpdtVariant v : all_variants())
        if (name == to_string(v)) {
            out = v;
            return true;
        }
    return false;
}

const std::vector<IdpdtVariant>& all_variants() {
    static const std::vector<IdpdtVariant> variants = {
        IdpdtVariant::SqrtSandwich,  IdpdtVariant::RightProduct,
        IdpdtVariant::PowerBeta,     IdpdtVariant::DirectProduct,
        IdpdtVariant::PdIResidual,   IdpdtVariant::VddtResidual,
        IdpdtVariant::DtPoverI,      IdpdtVariant::SandwichDtPoverI,
    };
    return variants;
}

namespace {

// eigenvalues below the floor make 1/lambda terms meaningless; the caller
// must mark the variant not-ready rather than clamp
bool lambdas_usable(const SpectralState& spec, double floor_rel) {
    const double top = spec.lambdas.maxCoeff();
    if (!(top > 0.0)) return false;
    return spec.lambdas.minCoeff() > floor_rel * top;
}

}  // namespace

Eigen::MatrixXd ddt_pi_matrix(const IdpdtContext& ctx) {
    const Eigen::VectorXd& w = ctx.spec->psi_at_x0;
    return ctx.p_last * ctx.i0f * (w * w.transpose()) - ctx.k_pi - ctx.k_pi.transpose();
}

Eigen::MatrixXd ddt_i_matrix(const IdpdtContext& ctx) {
    const Eigen::VectorXd& w = ctx.spec->psi_at_x0;
    return ctx.i0f * (w * w.transpose()) - ctx.k_i - ctx.k_i.transpose();
}

std::optional<Eigen::MatrixXd> dp_core(const IdpdtContext& ctx) {
    if (!lambdas_usable(*ctx.spec, ctx.lambda_floor_rel)) return std::nullopt;
    const Eigen::VectorXd& w = ctx.spec->psi_at_x0;
    const Eigen::VectorXd inv_lambda = ctx.spec->lambdas.cwiseInverse();
    Eigen::MatrixXd dp = ctx.p_last * (w * w.transpose());
    dp.noalias() -= ctx.k_pi * inv_lambda.asDiagonal();
    dp.noalias() -= inv_lambda.asDiagonal() * ctx.k_pi.transpose();
    return dp;
}

std::optional<Eigen::MatrixXd> idpdt_matrix(IdpdtVariant v, const IdpdtContext& ctx) {
    const Eigen::VectorXd& lam = ctx.spec->lambdas;
    const Eigen::VectorXd& w = ctx.spec->psi_at_x0;
    switch (v) {
        case IdpdtVariant::SqrtSandwich:
        case IdpdtVariant::PowerBeta: {
            const auto dp = dp_core(ctx);
            if (!dp) return std::nullopt;
            const double expo = v == IdpdtVariant::SqrtSandwich ? 0.5 : 0.5 * ctx.beta;
            const Eigen::VectorXd lam_pow = lam.array().pow(expo).matrix();
            return Eigen::MatrixXd(lam_pow.asDiagonal() * (*dp) * lam_pow.asDiagonal());
        }
        case IdpdtVariant::RightProduct: {
            const auto dp = dp_core(ctx);
            if (!dp) return std::nullopt;
            return Eigen::MatrixXd((*dp) * lam.asDiagonal());
        }
        case IdpdtVariant::DirectProduct:
            return Eigen::MatrixXd(ctx.dp_psi * lam.asDiagonal());
        case IdpdtVariant::PdIResidual:
            return Eigen::MatrixXd(ddt_pi_matrix(ctx) - ctx.p_psi * ddt_i_matrix(ctx));
        case IdpdtVariant::VddtResidual: {
            const Eigen::MatrixXd ddt_vdp = -ctx.k_vdp - ctx.k_vdp.transpose();
            const Eigen::MatrixXd d2p = -ctx.k_dp - ctx.k_dp.transpose();
            return Eigen::MatrixXd(ddt_vdp + ctx.vrel_psi * d2p);
        }
        case IdpdtVariant::DtPoverI: {
            if (!lambdas_usable(*ctx.spec, ctx.lambda_floor_rel) || !(ctx.i0f > 0.0)) return std::nullopt;
            const Eigen::VectorXd inv_sq = lam.cwiseAbs2().cwiseInverse();
            Eigen::MatrixXd x = (ctx.p_last / ctx.i0f) * (w * w.transpose());
            x.noalias() -= ctx.k_pi * inv_sq.asDiagonal();
            x.noalias() -= inv_sq.asDiagonal() * ctx.k_pi.transpose();
            return x;
        }
        case IdpdtVariant::SandwichDtPoverI: {
            if (!lambdas_usable(*ctx.spec, ctx.lambda_floor_rel) || !(ctx.i0f > 0.0)) return std::nullopt;
            const Eigen::VectorXd lw = lam.cwiseProduct(w);
            Eigen::MatrixXd x = (ctx.p_last / ctx.i0f) * (lw * lw.transpose());
            x.noalias() -= lam.asDiagonal() * ctx.k_pi * lam.cwiseInverse().asDiagonal();
            x.noalias() -= lam.cwiseInverse().asDiagonal() * ctx.k_pi.transpose() * lam.asDiagonal();
            return x;
        }
    }
    return std::nullopt;
}

AdjustedI0F adjust_i0f(const IdpdtContext& ctx, const Eigen::MatrixXd& rho_psi,
                       double bracket_lo) {
    const double lambda_ih = ctx.spec->lambdas.maxCoeff();
    AdjustedI0F out{lambda_ih, false};
    if (!lambdas_usable(*ctx.spec, ctx.lambda_floor_rel)) return out;
    const Eigen::VectorXd& lam = ctx.spec->lambdas;
    const Eigen::VectorXd lw = lam.cwiseProduct(ctx.spec->psi_at_x0);
    // p = const in the sandwich form: Spur = a/c - b, monotone in c
    const double a = lw.dot(rho_psi * lw);
    const Eigen::MatrixXd b_mat =
        lam.asDiagonal() * ctx.k_i * lam.cwiseInverse().asDiagonal() +
        lam.cwiseInverse().asDiagonal() * ctx.k_i.transpose() * lam.asDiagonal();
    const double b = b_mat.cwiseProduct(rho_psi.transpose()).sum();

    double lo = std::max(bracket_lo, 1e-12 * lambda_ih);
    double hi = 10.0 * lambda_ih;
    auto h = [&](double c) { return a / c - b; };
    double hlo = h(lo), hhi = h(hi);
    if (!(hlo * hhi < 0.0) || !std::isfinite(hlo) || !std::isfinite(hhi)) return out;
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double hm = h(mid);
        if (hm == 0.0 || (hi - lo) <= 1e-10 * mid) {
            out.value = mid;
            out.converged = true;
            return out;
        }
        if (hlo * hm < 0.0) {
            hi = mid;
        } else {
            lo = mid;
            hlo = hm;
        }
    }
    out.value = 0.5 * (lo + hi);
    out.converged = true;
    return out;
}

}  // namespace specflow
