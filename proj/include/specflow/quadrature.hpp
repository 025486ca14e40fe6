#ifndef SPECFLOW_QUADRATURE_HPP
#define SPECFLOW_QUADRATURE_HPP

#include <Eigen/Dense>

namespace specflow {

struct QuadratureRule {
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;
};

// Gauss-Legendre rule on [0,1], exact for polynomials of degree <= 2n-1.
QuadratureRule gauss_legendre_01(int n);

// Gauss-Laguerre rule for integral_0^inf f(u) e^{-u} du, exact for degree <= 2n-1.
QuadratureRule gauss_laguerre(int n);

}  // namespace specflow

#endif
