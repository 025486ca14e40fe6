#ifndef SPECFLOW_OPERATORS_HPP
#define SPECFLOW_OPERATORS_HPP

#include <Eigen/Dense>

#include "specflow/basis.hpp"

namespace specflow {

struct SpectralState;  // spectral.hpp

enum class BasisTag { Q, Psi };

// n x n matrix <.|f|.> tagged with the basis it is expressed in.
struct OperatorMatrix {
    Eigen::MatrixXd m;
    BasisTag tag = BasisTag::Q;
    bool hermitian = true;
};

// M_jk = sum_m c_m^{jk} <Q_m f> from a length-(2n-1) moment vector.
OperatorMatrix matrix_from_moments(const BasisEngine& be, const Eigen::VectorXd& moms);
Eigen::MatrixXd matrix_from_moments_raw(const BasisEngine& be, const Eigen::VectorXd& moms);

// Q -> Psi: alpha^T M alpha;  Psi -> Q: G alpha M alpha^T G.
OperatorMatrix convert_basis(const OperatorMatrix& m, BasisTag target, const SpectralState& spec);

// Integration-by-parts derivative operator in the psi basis:
//   <psi_j|df/dt|psi_k> = f_now omega(x0) psi_j(x0) psi_k(x0)
//                         - <ED(psi_j)|f|psi_k> - <psi_j|f|ED(psi_k)>
// The boundary value f_now is always explicit, never defaulted.
Eigen::MatrixXd ddt_operator(const BasisEngine& be, const SpectralState& spec,
                             const Eigen::VectorXd& f_moms, double f_now);

// ED applied to each eigenvector column: column i = ED(psi^{[i]}) in Q coeffs.
Eigen::MatrixXd ed_of_eigenvectors(const BasisEngine& be, const SpectralState& spec);

// <ED(psi_j)|f|psi_k> for all j,k given the Q-basis matrix of f.
Eigen::MatrixXd ed_sandwich(const Eigen::MatrixXd& ed_alphas, const Eigen::MatrixXd& f_q,
                            const Eigen::MatrixXd& alphas);

}  // namespace specflow

#endif
