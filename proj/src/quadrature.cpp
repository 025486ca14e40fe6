#include "specflow/quadrature.hpp"

#include <stdexcept>

namespace specflow {

namespace {

// Golub-Welsch: nodes are eigenvalues of the Jacobi matrix, weights come from
// the first components of the eigenvectors scaled by the total measure mass.
QuadratureRule golub_welsch(const Eigen::VectorXd& diag, const Eigen::VectorXd& offdiag,
                            double total_mass) {
    const int n = static_cast<int>(diag.size());
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        jacobi(i, i) = diag(i);
        if (i + 1 < n) {
            jacobi(i, i + 1) = offdiag(i);
            jacobi(i + 1, i) = offdiag(i);
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
    if (es.info() != Eigen::Success) throw std::runtime_error("quadrature: eigensolver failed");
    QuadratureRule rule;
    rule.nodes = es.eigenvalues();
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        const double v0 = es.eigenvectors()(0, i);
        rule.weights(i) = total_mass * v0 * v0;
    }
    return rule;
}

}  // namespace

QuadratureRule gauss_legendre_01(int n) {
    if (n < 1) throw std::invalid_argument("quadrature order must be >= 1");
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd off(n > 1 ? n - 1 : 0);
    for (int k = 1; k < n; ++k) off(k - 1) = k / std::sqrt(4.0 * k * k - 1.0);
    QuadratureRule rule = golub_welsch(diag, off, 2.0);
    // map [-1,1] -> [0,1]
    rule.nodes = (rule.nodes.array() + 1.0) / 2.0;
    rule.weights /= 2.0;
    return rule;
}

QuadratureRule gauss_laguerre(int n) {
    if (n < 1) throw std::invalid_argument("quadrature order must be >= 1");
    Eigen::VectorXd diag(n);
    Eigen::VectorXd off(n > 1 ? n - 1 : 0);
    for (int k = 0; k < n; ++k) diag(k) = 2.0 * k + 1.0;
    for (int k = 1; k < n; ++k) off(k - 1) = k;
    return golub_welsch(diag, off, 1.0);
}

}  // namespace specflow
