#include "specflow/projections.hpp"

#include <cmath>

namespace specflow {

ProjectionPair didt_projectors(const Eigen::MatrixXd& didt_psi) {
    ProjectionPair out;
    const int n = static_cast<int>(didt_psi.rows());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(didt_psi);
    if (es.info() != Eigen::Success) return out;
    out.didt_lambdas = es.eigenvalues();
    out.pi_plus = Eigen::MatrixXd::Zero(n, n);
    out.pi_minus = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        const Eigen::VectorXd v = es.eigenvectors().col(i);
        if (es.eigenvalues()(i) > 0.0)
            out.pi_plus.noalias() += v * v.transpose();
        else
            out.pi_minus.noalias() += v * v.transpose();
    }
    out.ok = true;
    return out;
}

FlowAdjusted flow_adjusted_pi(const SpectralState& spec, double v_ih, double t_ih,
                              const Eigen::MatrixXd& pi_psi_matrix,
                              const Eigen::MatrixXd& i_psi_matrix,
                              const Eigen::MatrixXd& rho_psi, double lambda_floor_rel) {
    FlowAdjusted out;
    if (!(t_ih > 0.0)) return out;
    const Eigen::VectorXd& lam = spec.lambdas;
    const int n = static_cast<int>(lam.size());
    const double top = lam.maxCoeff();
    if (!(top > 0.0) || lam.minCoeff() <= lambda_floor_rel * top) return out;
    const double level = v_ih / t_ih;

    out.pi_diag.resize(n);
    Eigen::VectorXd plus_diag = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd minus_diag = Eigen::VectorXd::Zero(n);
    bool any_plus = false, any_minus = false;
    for (int i = 0; i < n; ++i) {
        const double v = 1.0 - level / lam(i);
        out.pi_diag(i) = v;
        if (lam(i) > level) {
            plus_diag(i) = v;
            any_plus = true;
        } else {
            minus_diag(i) = v;
            any_minus = true;
        }
    }

    auto spur_with = [&](const Eigen::MatrixXd& f, const Eigen::VectorXd& diag) {
        return (f * diag.asDiagonal() * rho_psi).trace();
    };
    if (any_plus) {
        const double denom = spur_with(i_psi_matrix, plus_diag);
        if (denom != 0.0) out.p_plus = spur_with(pi_psi_matrix, plus_diag) / denom;
    }
    if (any_minus) {
        const double denom = spur_with(i_psi_matrix, minus_diag);
        if (denom != 0.0) out.p_minus = spur_with(pi_psi_matrix, minus_diag) / denom;
    }
    out.pnl = -spur_with(pi_psi_matrix, out.pi_diag);
    out.constraint_residual = spur_with(i_psi_matrix, out.pi_diag);
    out.ok = true;
    return out;
}

DoubleIntegration double_integration_pstar(double i0f, double v_ih, double t_ih, double delta_jj,
                                           double lambda_ih, double epsilon) {
    DoubleIntegration out;
    out.v_tilde = i0f * t_ih - v_ih;
    if (std::abs(out.v_tilde) < epsilon * std::abs(lambda_ih * t_ih)) return out;
    out.p_star = -delta_jj / out.v_tilde;
    return out;
}

}  // namespace specflow
