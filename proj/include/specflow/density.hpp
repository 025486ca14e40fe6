#ifndef SPECFLOW_DENSITY_HPP
#define SPECFLOW_DENSITY_HPP

#include <Eigen/Dense>
#include <memory>

#include "specflow/basis.hpp"
#include "specflow/spectral.hpp"

namespace specflow {

enum class DensityOrigin { FromPoly, JIH, JJIH, JVT };

// Symmetric matrix rho reproducing averages against a polynomial weight P:
//   Spur||f|rho_P|| = <P f>  for every moment vector f of degree <= 2n-2.
// Eigenvalues may be negative; only the Spur contract is guaranteed.
struct DensityState {
    Eigen::MatrixXd rho_psi;  // in the eigenbasis of the defining SpectralState
    Eigen::MatrixXd rho_q;
    Eigen::VectorXd poly;     // the defining polynomial P, Q coefficients, length 2n-1
    DensityOrigin origin = DensityOrigin::FromPoly;
    bool ok = false;

    // diagnostic: count of eigenvalues below -tol * max|eig|
    int negative_eigenvalues(double tol = 1e-12) const;
};

// Converts polynomials to density matrices. The symmetric solution of the
// moment contract is underdetermined for n >= 3; the representative chosen
// minimizes the Frobenius norm in the Gram-whitened (psi-basis) metric,
// which makes every downstream Spur invariant under Q-basis changes.
class DensityFactory {
public:
    explicit DensityFactory(std::shared_ptr<const BasisEngine> be);

    DensityState from_poly(const Eigen::VectorXd& poly_q, const SpectralState& spec,
                           DensityOrigin origin = DensityOrigin::FromPoly) const;

    // rho for J(psi^2) ("since the spike till now") and J(J(psi^2))
    DensityState since_state(const Eigen::VectorXd& psi_q, const SpectralState& spec,
                             DensityOrigin origin) const;

    const BasisEngine& basis() const { return *be_; }

private:
    std::shared_ptr<const BasisEngine> be_;
    Eigen::MatrixXd l_inv_;  // G = L L^T, stored L^{-1}
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> contract_cod_;
    double contract_scale_ = 1.0;
};

// Spur||f|rho|| = trace(F rho); both in the same basis (psi preferred).
double spur(const Eigen::MatrixXd& f, const Eigen::MatrixXd& rho);

}  // namespace specflow

#endif
