#ifndef SPECFLOW_SPECTRAL_HPP
#define SPECFLOW_SPECTRAL_HPP

#include <Eigen/Dense>

#include "specflow/basis.hpp"

namespace specflow {

enum class GevWhich { IvsGram, VvsT, dIdtVsGram };

// Solution of A alpha = lambda B alpha with B-orthonormal eigenvectors:
//   alphas^T B alphas = I,   alphas^T A alphas = diag(lambdas).
// Eigenvalues ascending; within numerically degenerate clusters the
// more now-localized state (larger |psi(x0)|) comes first.
struct SpectralState {
    Eigen::VectorXd lambdas;
    Eigen::MatrixXd alphas;     // column i = alpha^{[i]} in the Q basis
    Eigen::VectorXd psi_at_x0;  // psi^{[i]}(x0)
    Eigen::MatrixXd b;          // the B matrix used (Gram for IvsGram)
    GevWhich which = GevWhich::IvsGram;
    double b_condition = 0.0;   // eigenvalue-ratio estimate from whitening
    bool ok = false;

    int top_index() const;      // max-lambda state, degeneracy tie-broken
    double lambda_top() const { return lambdas(top_index()); }
};

struct GevOptions {
    double condition_limit = 1e12;   // not-ready beyond this
    double pseudo_floor = 1e-12;     // relative eigenvalue floor for pseudo-whitening
    double degeneracy_rtol = 1e-10;  // cluster width relative to max |lambda|
};

SpectralState solve_gev(const BasisEngine& be, const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                        GevWhich which, const GevOptions& opts = {});

// psi_y(x) = sum_jk Q_j(x) G^-1_jk Q_k(y) / sqrt(sum_jk Q_j(y) G^-1_jk Q_k(y)),
// the unit-norm state localized at y. Returned in Q coefficients.
Eigen::VectorXd localized_state(const BasisEngine& be, const SpectralState& spec, double y);

// The state of maximal execution flow and its now-projection.
struct MaxFlowState {
    Eigen::VectorXd psi_ih;     // Q-basis coefficients
    int index = -1;             // position inside the SpectralState
    double lambda_ih = 0.0;     // I_0^F estimate
    double projection_now = 0.0;  // <psi_0|psi^{IH}>^2 in [0,1]
    double i_now = 0.0;         // I_0 = <psi_0|I|psi_0>
};

MaxFlowState max_flow_state(const SpectralState& spec);

}  // namespace specflow

#endif
