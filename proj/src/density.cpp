#include "specflow/density.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace specflow {

namespace {

int packed_size(int n) { return n * (n + 1) / 2; }

}  // namespace

int DensityState::negative_eigenvalues(double tol) const {
    if (!ok || rho_psi.size() == 0) return 0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(rho_psi, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) return 0;
    const double scale = es.eigenvalues().cwiseAbs().maxCoeff();
    int count = 0;
    for (int i = 0; i < es.eigenvalues().size(); ++i)
        if (es.eigenvalues()(i) < -tol * scale) ++count;
    return count;
}

DensityFactory::DensityFactory(std::shared_ptr<const BasisEngine> be) : be_(std::move(be)) {
    const int n = be_->n();
    const int mcount = be_->moment_count();
    Eigen::LLT<Eigen::MatrixXd> llt(be_->gram_matrix());
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("density: Gram matrix is not positive definite");
    l_inv_ = Eigen::MatrixXd::Identity(n, n);
    llt.matrixL().solveInPlace(l_inv_);

    // contract matrix over the whitened packed-symmetric unknowns
    const double sqrt2 = std::sqrt(2.0);
    Eigen::MatrixXd contract(mcount, packed_size(n));
    std::vector<Eigen::MatrixXd> c_whitened(mcount);
    for (int m = 0; m < mcount; ++m) c_whitened[m] = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            const Eigen::VectorXd& c = be_->multiply_coeffs(j, k);
            for (int m = 0; m < c.size(); ++m) c_whitened[m](j, k) = c(m);
        }
    for (int m = 0; m < mcount; ++m) {
        const Eigen::MatrixXd ct = l_inv_ * c_whitened[m] * l_inv_.transpose();
        int idx = 0;
        for (int r = 0; r < n; ++r)
            for (int s = r; s < n; ++s, ++idx)
                contract(m, idx) = (r == s) ? ct(r, r) : sqrt2 * ct(r, s);
    }
    contract_scale_ = contract.norm();
    contract_cod_.compute(contract);
}

DensityState DensityFactory::from_poly(const Eigen::VectorXd& poly_q, const SpectralState& spec,
                                       DensityOrigin origin) const {
    const int n = be_->n();
    const int mcount = be_->moment_count();
    if (poly_q.size() > mcount)
        throw std::invalid_argument("density: polynomial degree exceeds moment support");
    DensityState out;
    out.origin = origin;
    out.poly = Eigen::VectorXd::Zero(mcount);
    out.poly.head(poly_q.size()) = poly_q;

    const Eigen::VectorXd y = contract_cod_.solve(out.poly);
    Eigen::MatrixXd rho_w(n, n);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    int idx = 0;
    for (int r = 0; r < n; ++r)
        for (int s = r; s < n; ++s, ++idx) {
            const double v = (r == s) ? y(idx) : inv_sqrt2 * y(idx);
            rho_w(r, s) = v;
            rho_w(s, r) = v;
        }
    out.rho_q = l_inv_.transpose() * rho_w * l_inv_;

    // numerically inconsistent system -> not ready
    Eigen::VectorXd residual = out.poly;
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            const Eigen::VectorXd& c = be_->multiply_coeffs(j, k);
            residual.head(c.size()) -= out.rho_q(j, k) * c;
        }
    const double rhs_scale = std::max(out.poly.norm(), contract_scale_ * rho_w.norm());
    out.ok = rhs_scale == 0.0 || residual.norm() <= 1e-8 * std::max(rhs_scale, 1e-300);

    if (spec.ok) {
        const Eigen::MatrixXd ga = spec.b * spec.alphas;
        out.rho_psi = ga.transpose() * out.rho_q * ga;
    }
    return out;
}

DensityState DensityFactory::since_state(const Eigen::VectorXd& psi_q, const SpectralState& spec,
                                         DensityOrigin origin) const {
    Eigen::VectorXd p = be_->multiply(psi_q, psi_q);
    p = be_->j_transform(p);
    if (origin == DensityOrigin::JJIH) p = be_->j_transform(p);
    return from_poly(p, spec, origin);
}

double spur(const Eigen::MatrixXd& f, const Eigen::MatrixXd& rho) {
    return f.cwiseProduct(rho.transpose()).sum();
}

}  // namespace specflow
