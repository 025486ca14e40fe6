#ifndef SPECFLOW_BASIS_HPP
#define SPECFLOW_BASIS_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

namespace specflow {

// Polynomial basis over the exponentially weighted past-time measure
// omega(t) = exp(-(t_now-t)/tau).
//
//   Laguerre:         Q_m(x) = L_m(-x),     x(t) = (t-t_now)/tau,        x in (-inf,0]
//   LegendreShifted:  Q_m(x) = P_m(2x-1),   x(t) = exp(-(t_now-t)/tau),  x in (0,1]
//   Monomial:         Q_m(x) = x^m          with the Laguerre measure
//   ChebyshevShifted: Q_m(x) = T_m(2x-1)    with the LegendreShifted measure
enum class BasisKind { Laguerre, LegendreShifted, Monomial, ChebyshevShifted };

std::string to_string(BasisKind kind);
bool parse_basis_kind(const std::string& name, BasisKind& out);

struct MeasureParams {
    double tau = 256.0;  // exponent time, seconds
    int n = 12;          // basis dimension
};

// A polynomial as a coefficient vector in the active Q_m basis.
struct Poly {
    BasisKind kind = BasisKind::LegendreShifted;
    Eigen::VectorXd coeffs;

    int degree() const { return static_cast<int>(coeffs.size()) - 1; }
};

// Precomputed polynomial machinery for one (kind, tau, n) triple.
// Immutable after construction; shift operators go through an internal
// mutex-guarded cache, so sharing one instance across threads is safe.
class BasisEngine {
public:
    BasisEngine(BasisKind kind, MeasureParams params);

    BasisKind kind() const { return kind_; }
    int n() const { return n_; }
    double tau() const { return tau_; }
    // number of tracked moments <Q_m f>, m = 0..2n-2
    int moment_count() const { return 2 * n_ - 1; }

    // x(t_now) and the basis values Q_m(x_0), m = 0..2n-2;  omega(x_0) = 1 always.
    double x0() const { return x0_; }
    const Eigen::VectorXd& q_at_x0() const { return q_at_x0_; }

    // Q_j*Q_k = sum_m c_m^{jk} Q_m, exact as polynomials; j,k <= 2n-2.
    const Eigen::VectorXd& multiply_coeffs(int j, int k) const;
    // true when the requested order is past the kind's double-precision
    // stability bound and coefficients may have degraded accuracy
    bool multiply_overflow_risk(int j, int k) const;
    Eigen::VectorXd multiply(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;

    // ED: d/dt[omega psi phi] = omega [ED(psi) phi + psi ED(phi)]
    Eigen::VectorXd ed_transform(const Eigen::VectorXd& psi) const;
    // D(P) = ED(P) + P/(2 tau):  d/dt[omega P] = omega D(P)
    Eigen::VectorXd full_derivative(const Eigen::VectorXd& p) const;
    // J: integral_{-inf}^t P(x(t')) omega(t') dt' = omega(t) J(P)(x(t)); D(J(P)) = P
    Eigen::VectorXd j_transform(const Eigen::VectorXd& p) const;
    // column m = coefficients of J(Q_m); square, size x size (size <= 2n-1)
    const Eigen::MatrixXd& j_matrix() const { return j_matrix_; }

    // <Q_j|Q_k> over the full support, analytic
    const Eigen::MatrixXd& gram_matrix() const { return gram_; }
    // analytic <Q_m>, m = 0..2n-2 (equals (tau, 0, ..., 0) in orthogonal bases)
    const Eigen::VectorXd& unit_moments() const { return unit_moments_; }
    // analytic <Q_m (t_now - t)> = J^T <Q_m>
    const Eigen::VectorXd& age_moments() const { return age_moments_; }

    // Moment-vector update for advancing t_now by delta_t >= 0 with a frozen
    // history; includes the overall e^{-delta_t/tau} decay factor.
    std::shared_ptr<const Eigen::MatrixXd> shift_operator(double delta_t) const;

    // pointwise evaluation (three-term recurrence)
    double eval_q(int m, double x) const;
    double eval(const Eigen::VectorXd& coeffs, double x) const;
    // x(t) and omega(t) as functions of the age t_now - t >= 0
    double x_of_age(double age) const;
    double omega_of_age(double age) const { return std::exp(-age / tau_); }

    // x * p(x) expressed in the Q basis (one degree higher)
    Eigen::VectorXd x_times(const Eigen::VectorXd& p) const;

private:
    Eigen::VectorXd derivative(const Eigen::VectorXd& p) const;  // dp/dx in Q basis
    Eigen::VectorXd integrate_from_zero(const Eigen::VectorXd& p) const;
    Eigen::VectorXd divide_by_x(Eigen::VectorXd p) const;
    Eigen::MatrixXd build_shift_matrix(double d) const;  // d = delta_t/tau
    void build_multiplication_table();
    void build_analytic_objects();

    BasisKind kind_;
    int n_;
    double tau_;
    double x0_;
    Eigen::VectorXd q_at_x0_;
    // mult_[j*(2n-1)+k], j,k = 0..2n-2
    std::vector<Eigen::VectorXd> mult_;
    Eigen::MatrixXd gram_;
    Eigen::MatrixXd j_matrix_;
    Eigen::VectorXd unit_moments_;
    Eigen::VectorXd age_moments_;

    mutable std::mutex shift_mutex_;
    mutable std::unordered_map<std::uint64_t, std::shared_ptr<const Eigen::MatrixXd>> shift_cache_;
    mutable std::vector<std::uint64_t> shift_order_;  // FIFO eviction
};

// Spec-level wrappers over BasisEngine for single polynomials.
Poly ed_transform(const BasisEngine& be, const Poly& psi);
Poly j_transform(const BasisEngine& be, const Poly& p);

}  // namespace specflow

#endif
