#include "specflow/operators.hpp"

#include <stdexcept>

#include "specflow/spectral.hpp"

namespace specflow {

Eigen::MatrixXd matrix_from_moments_raw(const BasisEngine& be, const Eigen::VectorXd& moms) {
    const int n = be.n();
    if (moms.size() != be.moment_count())
        throw std::invalid_argument("matrix_from_moments: moment vector has wrong length");
    Eigen::MatrixXd m(n, n);
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k <= j; ++k) {
            const Eigen::VectorXd& c = be.multiply_coeffs(j, k);
            const double v = c.dot(moms.head(c.size()));
            m(j, k) = v;
            m(k, j) = v;
        }
    }
    return m;
}

OperatorMatrix matrix_from_moments(const BasisEngine& be, const Eigen::VectorXd& moms) {
    return OperatorMatrix{matrix_from_moments_raw(be, moms), BasisTag::Q, true};
}

OperatorMatrix convert_basis(const OperatorMatrix& m, BasisTag target, const SpectralState& spec) {
    if (m.m.rows() != spec.alphas.rows())
        throw std::invalid_argument("convert_basis: dimension mismatch");
    if (m.tag == target) return m;
    OperatorMatrix out;
    out.tag = target;
    out.hermitian = m.hermitian;
    if (target == BasisTag::Psi) {
        out.m = spec.alphas.transpose() * m.m * spec.alphas;
    } else {
        const Eigen::MatrixXd ga = spec.b * spec.alphas;
        out.m = ga * m.m * ga.transpose();
    }
    return out;
}

Eigen::MatrixXd ed_of_eigenvectors(const BasisEngine& be, const SpectralState& spec) {
    const int n = static_cast<int>(spec.alphas.rows());
    Eigen::MatrixXd ed(n, n);
    for (int i = 0; i < n; ++i) ed.col(i) = be.ed_transform(spec.alphas.col(i));
    return ed;
}

Eigen::MatrixXd ed_sandwich(const Eigen::MatrixXd& ed_alphas, const Eigen::MatrixXd& f_q,
                            const Eigen::MatrixXd& alphas) {
    return ed_alphas.transpose() * f_q * alphas;
}

Eigen::MatrixXd ddt_operator(const BasisEngine& be, const SpectralState& spec,
                             const Eigen::VectorXd& f_moms, double f_now) {
    const Eigen::MatrixXd f_q = matrix_from_moments_raw(be, f_moms);
    const Eigen::MatrixXd ed = ed_of_eigenvectors(be, spec);
    const Eigen::MatrixXd k = ed_sandwich(ed, f_q, spec.alphas);
    // omega(x_0) = 1 for every supported measure
    return f_now * (spec.psi_at_x0 * spec.psi_at_x0.transpose()) - k - k.transpose();
}

}  // namespace specflow
