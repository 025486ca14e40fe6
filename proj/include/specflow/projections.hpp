#ifndef SPECFLOW_PROJECTIONS_HPP
#define SPECFLOW_PROJECTIONS_HPP

#include <Eigen/Dense>
#include <optional>

#include "specflow/spectral.hpp"

namespace specflow {

// Projectors onto the positive / non-positive subspaces of ||dI/dt||,
// expressed in the psi basis of the execution-flow eigenproblem.
// pi_plus + pi_minus = 1; each is idempotent.
struct ProjectionPair {
    Eigen::MatrixXd pi_plus;
    Eigen::MatrixXd pi_minus;
    Eigen::VectorXd didt_lambdas;  // ascending
    bool ok = false;
};

// didt_psi must carry the explicit I_0^F boundary (ddt_i_matrix).
// The zero eigenvalue edge goes to pi_minus.
ProjectionPair didt_projectors(const Eigen::MatrixXd& didt_psi);

// The operator with psi^{[i]}-eigenvalues 1 - (V_IH/T_IH)/lambda^{[i]} and its
// split by lambda^{[i]} vs V_IH/T_IH; equilibrium prices of the two sides and
// the P&L of trading execution flow against its aggregated level.
struct FlowAdjusted {
    Eigen::VectorXd pi_diag;  // psi-basis diagonal of Pi
    std::optional<double> p_plus;
    std::optional<double> p_minus;
    double pnl = 0.0;
    double constraint_residual = 0.0;  // Spur||I|Pi|rho||, zero by construction
    bool ok = false;
};

FlowAdjusted flow_adjusted_pi(const SpectralState& spec, double v_ih, double t_ih,
                              const Eigen::MatrixXd& pi_psi_matrix,
                              const Eigen::MatrixXd& i_psi_matrix,
                              const Eigen::MatrixXd& rho_psi, double lambda_floor_rel = 1e-12);

// Double-integration price: V~ = (I_0^F - V_IH/T_IH) T_IH and the P* that
// zeroes the kinetic/potential difference in the twice-integrated state.
struct DoubleIntegration {
    double v_tilde = 0.0;
    std::optional<double> p_star;
};

// delta_jj = 2 Spur||I dp/dt|rho_JJIH|| - Spur||d(pI)/dt|rho_JJIH|| (or the
// difference-variant Spur); epsilon guards the V~ -> 0 aggregated-flow limit.
DoubleIntegration double_integration_pstar(double i0f, double v_ih, double t_ih, double delta_jj,
                                           double lambda_ih, double epsilon = 1e-9);

}  // namespace specflow

#endif
