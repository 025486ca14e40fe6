#include "specflow/basis.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

#include "specflow/quadrature.hpp"

namespace specflow {

namespace {

constexpr int kShiftCacheCapacity = 128;
// past this gap the e^{-d} factor is below 1e-170; treat history as gone
constexpr double kShiftResetThreshold = 400.0;

bool laguerre_measure(BasisKind kind) {
    return kind == BasisKind::Laguerre || kind == BasisKind::Monomial;
}

int stability_bound(BasisKind kind) { return laguerre_measure(kind) ? 50 : 150; }

std::uint64_t double_bits(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    return bits;
}

}  // namespace

std::string to_string(BasisKind kind) {
    switch (kind) {
        case BasisKind::Laguerre: return "Laguerre";
        case BasisKind::LegendreShifted: return "LegendreShifted";
        case BasisKind::Monomial: return "Monomial";
        case BasisKind::ChebyshevShifted: return "ChebyshevShifted";
    }
    return "?";
}

bool parse_basis_kind(const std::string& name, BasisKind& out) {
    if (name == "Laguerre") out = BasisKind::Laguerre;
    else if (name == "LegendreShifted") out = BasisKind::LegendreShifted;
    else if (name == "Monomial") out = BasisKind::Monomial;
    else if (name == "ChebyshevShifted") out = BasisKind::ChebyshevShifted;
    else return false;
    return true;
}

BasisEngine::BasisEngine(BasisKind kind, MeasureParams params)
    : kind_(kind), n_(params.n), tau_(params.tau) {
    if (!(tau_ > 0.0)) throw std::invalid_argument("tau must be positive");
    if (n_ < 1) throw std::invalid_argument("basis dimension must be >= 1");
    if (n_ > stability_bound(kind_))
        throw std::invalid_argument("basis dimension " + std::to_string(n_) +
                                    " exceeds the stability bound for " + to_string(kind_));
    x0_ = laguerre_measure(kind_) ? 0.0 : 1.0;
    build_multiplication_table();
    build_analytic_objects();
}

double BasisEngine::x_of_age(double age) const {
    return laguerre_measure(kind_) ? -age / tau_ : std::exp(-age / tau_);
}

double BasisEngine::eval_q(int m, double x) const {
    if (m == 0) return 1.0;
    switch (kind_) {
        case BasisKind::Monomial: return std::pow(x, m);
        case BasisKind::Laguerre: {
            double qm1 = 1.0, qm = 1.0 + x;
            for (int j = 1; j < m; ++j) {
                const double next = ((2.0 * j + 1.0 + x) * qm - j * qm1) / (j + 1.0);
                qm1 = qm;
                qm = next;
            }
            return qm;
        }
        case BasisKind::LegendreShifted: {
            const double y = 2.0 * x - 1.0;
            double qm1 = 1.0, qm = y;
            for (int j = 1; j < m; ++j) {
                const double next = ((2.0 * j + 1.0) * y * qm - j * qm1) / (j + 1.0);
                qm1 = qm;
                qm = next;
            }
            return qm;
        }
        case BasisKind::ChebyshevShifted: {
            const double y = 2.0 * x - 1.0;
            double qm1 = 1.0, qm = y;
            for (int j = 1; j < m; ++j) {
                const double next = 2.0 * y * qm - qm1;
                qm1 = qm;
                qm = next;
            }
            return qm;
        }
    }
    return 0.0;
}

double BasisEngine::eval(const Eigen::VectorXd& coeffs, double x) const {
    double sum = 0.0;
    for (int m = 0; m < coeffs.size(); ++m) sum += coeffs(m) * eval_q(m, x);
    return sum;
}

Eigen::VectorXd BasisEngine::x_times(const Eigen::VectorXd& p) const {
    const int len = static_cast<int>(p.size());
    Eigen::VectorXd out = Eigen::VectorXd::Zero(len + 1);
    for (int m = 0; m < len; ++m) {
        const double c = p(m);
        if (c == 0.0) continue;
        switch (kind_) {
            case BasisKind::Monomial:
                out(m + 1) += c;
                break;
            case BasisKind::Laguerre:
                // x Q_m = (m+1) Q_{m+1} - (2m+1) Q_m + m Q_{m-1}
                out(m + 1) += c * (m + 1.0);
                out(m) -= c * (2.0 * m + 1.0);
                if (m > 0) out(m - 1) += c * m;
                break;
            case BasisKind::LegendreShifted:
                // x Q_m = [((m+1) Q_{m+1} + m Q_{m-1})/(2m+1) + Q_m]/2
                out(m + 1) += c * (m + 1.0) / (2.0 * (2.0 * m + 1.0));
                out(m) += c * 0.5;
                if (m > 0) out(m - 1) += c * m / (2.0 * (2.0 * m + 1.0));
                break;
            case BasisKind::ChebyshevShifted:
                if (m == 0) {
                    out(1) += c * 0.5;
                    out(0) += c * 0.5;
                } else {
                    out(m + 1) += c * 0.25;
                    out(m) += c * 0.5;
                    out(m - 1) += c * 0.25;
                }
                break;
        }
    }
    return out;
}

void BasisEngine::build_multiplication_table() {
    const int size = 2 * n_ - 1;
    mult_.assign(static_cast<std::size_t>(size) * size, Eigen::VectorXd());
    auto at = [&](int j, int k) -> Eigen::VectorXd& {
        return mult_[static_cast<std::size_t>(j) * size + k];
    };
    for (int k = 0; k < size; ++k) {
        at(0, k) = Eigen::VectorXd::Zero(k + 1);
        at(0, k)(k) = 1.0;
    }
    // Q_{j+1} = (a_j x + b_j) Q_j + g_j Q_{j-1}
    auto recurrence = [&](int j, double& a, double& b, double& g) {
        switch (kind_) {
            case BasisKind::Monomial: a = 1.0; b = 0.0; g = 0.0; break;
            case BasisKind::Laguerre:
                a = 1.0 / (j + 1.0); b = (2.0 * j + 1.0) / (j + 1.0); g = -j / (j + 1.0);
                break;
            case BasisKind::LegendreShifted:
                a = 2.0 * (2.0 * j + 1.0) / (j + 1.0); b = -(2.0 * j + 1.0) / (j + 1.0);
                g = -j / (j + 1.0);
                break;
            case BasisKind::ChebyshevShifted:
                if (j == 0) { a = 2.0; b = -1.0; g = 0.0; }
                else { a = 4.0; b = -2.0; g = -1.0; }
                break;
        }
    };
    for (int j = 1; j < size; ++j) {
        double a, b, g;
        recurrence(j - 1, a, b, g);
        for (int k = 0; k < size; ++k) {
            Eigen::VectorXd next = a * x_times(at(j - 1, k));
            next.head(at(j - 1, k).size()) += b * at(j - 1, k);
            if (j >= 2) next.head(at(j - 2, k).size()) += g * at(j - 2, k);
            at(j, k) = std::move(next);
        }
    }
    // enforce exact (j,k) symmetry
    for (int j = 0; j < size; ++j)
        for (int k = 0; k < j; ++k) {
            Eigen::VectorXd avg = 0.5 * (at(j, k) + at(k, j));
            at(j, k) = avg;
            at(k, j) = std::move(avg);
        }
}

const Eigen::VectorXd& BasisEngine::multiply_coeffs(int j, int k) const {
    const int size = 2 * n_ - 1;
    if (j < 0 || k < 0 || j >= size || k >= size)
        throw std::out_of_range("multiply_coeffs: index out of range");
    return mult_[static_cast<std::size_t>(j) * size + k];
}

bool BasisEngine::multiply_overflow_risk(int j, int k) const {
    return j + k > stability_bound(kind_);
}

Eigen::VectorXd BasisEngine::multiply(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
    const int da = static_cast<int>(a.size()) - 1;
    const int db = static_cast<int>(b.size()) - 1;
    Eigen::VectorXd out = Eigen::VectorXd::Zero(da + db + 1);
    for (int j = 0; j <= da; ++j) {
        if (a(j) == 0.0) continue;
        for (int k = 0; k <= db; ++k) {
            if (b(k) == 0.0) continue;
            const Eigen::VectorXd& c = multiply_coeffs(j, k);
            out.head(c.size()) += (a(j) * b(k)) * c;
        }
    }
    return out;
}

Eigen::VectorXd BasisEngine::derivative(const Eigen::VectorXd& p) const {
    const int len = static_cast<int>(p.size());
    Eigen::VectorXd out = Eigen::VectorXd::Zero(std::max(1, len - 1));
    if (len <= 1) return out;
    switch (kind_) {
        case BasisKind::Monomial:
            for (int m = 1; m < len; ++m) out(m - 1) += m * p(m);
            break;
        case BasisKind::Laguerre:
            // dQ_m/dx = sum_{k<m} Q_k
            for (int m = 1; m < len; ++m)
                if (p(m) != 0.0) out.head(m).array() += p(m);
            break;
        case BasisKind::LegendreShifted: {
            // dQ_{m+1}/dx = dQ_{m-1}/dx + 2(2m+1) Q_m
            std::vector<Eigen::VectorXd> cols(len);
            cols[0] = Eigen::VectorXd::Zero(1);
            if (len > 1) {
                cols[1] = Eigen::VectorXd::Zero(1);
                cols[1](0) = 2.0;
            }
            for (int m = 2; m < len; ++m) {
                cols[m] = Eigen::VectorXd::Zero(m);
                cols[m].head(cols[m - 2].size()) = cols[m - 2];
                cols[m](m - 1) += 2.0 * (2.0 * (m - 1) + 1.0);
            }
            for (int m = 1; m < len; ++m)
                if (p(m) != 0.0) out.head(cols[m].size()) += p(m) * cols[m];
            break;
        }
        case BasisKind::ChebyshevShifted: {
            // dQ_{m+1}/dx = ((m+1)/(m-1)) dQ_{m-1}/dx + 4(m+1) Q_m, m >= 2
            std::vector<Eigen::VectorXd> cols(len);
            cols[0] = Eigen::VectorXd::Zero(1);
            if (len > 1) {
                cols[1] = Eigen::VectorXd::Zero(1);
                cols[1](0) = 2.0;
            }
            if (len > 2) {
                cols[2] = Eigen::VectorXd::Zero(2);
                cols[2](1) = 8.0;
            }
            for (int m = 3; m < len; ++m) {
                cols[m] = Eigen::VectorXd::Zero(m);
                cols[m].head(cols[m - 2].size()) = (m / (m - 2.0)) * cols[m - 2];
                cols[m](m - 1) += 4.0 * m;
            }
            for (int m = 1; m < len; ++m)
                if (p(m) != 0.0) out.head(cols[m].size()) += p(m) * cols[m];
            break;
        }
    }
    return out;
}

Eigen::VectorXd BasisEngine::ed_transform(const Eigen::VectorXd& psi) const {
    const int len = static_cast<int>(psi.size());
    Eigen::VectorXd out(len);
    if (laguerre_measure(kind_)) {
        out = 0.5 * psi;
        const Eigen::VectorXd dp = derivative(psi);
        out.head(dp.size()) += dp;
    } else {
        out = 0.5 * psi;
        const Eigen::VectorXd xdp = x_times(derivative(psi));
        out.head(std::min<int>(len, static_cast<int>(xdp.size()))) +=
            xdp.head(std::min<int>(len, static_cast<int>(xdp.size())));
    }
    return out / tau_;
}

Eigen::VectorXd BasisEngine::full_derivative(const Eigen::VectorXd& p) const {
    return ed_transform(p) + p / (2.0 * tau_);
}

Eigen::VectorXd BasisEngine::integrate_from_zero(const Eigen::VectorXd& p) const {
    // integral_0^x p, LegendreShifted/Chebyshev support only
    const int len = static_cast<int>(p.size());
    Eigen::VectorXd out = Eigen::VectorXd::Zero(len + 1);
    for (int m = 0; m < len; ++m) {
        const double c = p(m);
        if (c == 0.0) continue;
        if (kind_ == BasisKind::LegendreShifted) {
            if (m == 0) {
                out(1) += c * 0.5;
                out(0) += c * 0.5;
            } else {
                out(m + 1) += c / (2.0 * (2.0 * m + 1.0));
                out(m - 1) -= c / (2.0 * (2.0 * m + 1.0));
            }
        } else {
            if (m == 0) {
                out(1) += c * 0.5;
                out(0) += c * 0.5;
            } else if (m == 1) {
                out(2) += c / 8.0;
                out(0) -= c / 8.0;
            } else {
                out(m + 1) += c / (4.0 * (m + 1.0));
                out(m - 1) -= c / (4.0 * (m - 1.0));
                const double at_minus1 =
                    0.5 * ((m % 2 == 0 ? -1.0 : 1.0) / (2.0 * (m + 1.0)) -
                           (m % 2 == 0 ? -1.0 : 1.0) / (2.0 * (m - 1.0)));
                out(0) -= c * at_minus1;
            }
        }
    }
    return out;
}

Eigen::VectorXd BasisEngine::divide_by_x(Eigen::VectorXd p) const {
    const int dg = static_cast<int>(p.size()) - 1;
    Eigen::VectorXd h = Eigen::VectorXd::Zero(std::max(1, dg));
    auto top_coeff = [&](int d) -> double {
        switch (kind_) {
            case BasisKind::Monomial: return 1.0;
            case BasisKind::Laguerre: return d + 1.0;
            case BasisKind::LegendreShifted: return (d + 1.0) / (2.0 * (2.0 * d + 1.0));
            case BasisKind::ChebyshevShifted: return d == 0 ? 0.5 : 0.25;
        }
        return 1.0;
    };
    for (int d = dg - 1; d >= 0; --d) {
        const double hd = p(d + 1) / top_coeff(d);
        h(d) = hd;
        Eigen::VectorXd unit = Eigen::VectorXd::Zero(d + 1);
        unit(d) = 1.0;
        const Eigen::VectorXd xq = x_times(unit);
        p.head(xq.size()) -= hd * xq;
    }
    return h;
}

Eigen::VectorXd BasisEngine::j_transform(const Eigen::VectorXd& p) const {
    const int len = static_cast<int>(p.size());
    Eigen::VectorXd out = Eigen::VectorXd::Zero(len);
    switch (kind_) {
        case BasisKind::Laguerre:
            // J(Q_m) = tau (Q_m - Q_{m-1})
            for (int m = 0; m < len; ++m) {
                out(m) += tau_ * p(m);
                if (m > 0) out(m - 1) -= tau_ * p(m);
            }
            break;
        case BasisKind::Monomial:
            // J(x^m) = tau sum_{k<=m} (-1)^{m-k} (m!/k!) x^k
            for (int m = 0; m < len; ++m) {
                if (p(m) == 0.0) continue;
                double factor = 1.0;  // m!/k! for k = m
                for (int k = m; k >= 0; --k) {
                    out(k) += tau_ * p(m) * ((m - k) % 2 == 0 ? factor : -factor);
                    factor *= k;
                }
            }
            break;
        case BasisKind::LegendreShifted:
        case BasisKind::ChebyshevShifted: {
            const Eigen::VectorXd h = divide_by_x(integrate_from_zero(p));
            out.head(h.size()) = tau_ * h;
            break;
        }
    }
    return out;
}

void BasisEngine::build_analytic_objects() {
    const int size = 2 * n_ - 1;

    q_at_x0_.resize(size);
    for (int m = 0; m < size; ++m) q_at_x0_(m) = eval_q(m, x0_);

    gram_.resize(n_, n_);
    unit_moments_ = Eigen::VectorXd::Zero(size);
    auto cheb_even_integral = [](int m) {  // (1/2) integral_{-1}^{1} T_m(y) dy
        return m % 2 == 0 ? 1.0 / (1.0 - static_cast<double>(m) * m) : 0.0;
    };
    switch (kind_) {
        case BasisKind::Laguerre:
            gram_ = tau_ * Eigen::MatrixXd::Identity(n_, n_);
            unit_moments_(0) = tau_;
            break;
        case BasisKind::LegendreShifted:
            gram_.setZero();
            for (int j = 0; j < n_; ++j) gram_(j, j) = tau_ / (2.0 * j + 1.0);
            unit_moments_(0) = tau_;
            break;
        case BasisKind::Monomial: {
            // <x^j x^k> = tau (-1)^{j+k} (j+k)!
            std::vector<double> fact(2 * size, 1.0);
            for (std::size_t i = 1; i < fact.size(); ++i) fact[i] = fact[i - 1] * i;
            for (int j = 0; j < n_; ++j)
                for (int k = 0; k < n_; ++k)
                    gram_(j, k) = tau_ * ((j + k) % 2 == 0 ? fact[j + k] : -fact[j + k]);
            for (int m = 0; m < size; ++m)
                unit_moments_(m) = tau_ * (m % 2 == 0 ? fact[m] : -fact[m]);
            break;
        }
        case BasisKind::ChebyshevShifted:
            for (int j = 0; j < n_; ++j)
                for (int k = 0; k < n_; ++k)
                    gram_(j, k) =
                        tau_ * 0.5 * (cheb_even_integral(j + k) + cheb_even_integral(std::abs(j - k)));
            for (int m = 0; m < size; ++m) unit_moments_(m) = tau_ * cheb_even_integral(m);
            break;
    }

    j_matrix_.resize(size, size);
    for (int m = 0; m < size; ++m) {
        Eigen::VectorXd unit = Eigen::VectorXd::Zero(m + 1);
        unit(m) = 1.0;
        const Eigen::VectorXd jm = j_transform(unit);
        j_matrix_.col(m).setZero();
        j_matrix_.col(m).head(jm.size()) = jm;
    }
    age_moments_ = j_matrix_.transpose() * unit_moments_;
}

Eigen::MatrixXd BasisEngine::build_shift_matrix(double d) const {
    const int size = 2 * n_ - 1;
    if (d >= kShiftResetThreshold) return Eigen::MatrixXd::Zero(size, size);
    const double decay = std::exp(-d);
    Eigen::MatrixXd c(size, size);
    switch (kind_) {
        case BasisKind::Monomial: {
            // (x - d)^m = sum_k binom(m,k) (-d)^{m-k} x^k
            c.setZero();
            for (int m = 0; m < size; ++m) {
                double binom = 1.0;
                for (int k = m; k >= 0; --k) {
                    c(k, m) = binom * std::pow(-d, m - k);
                    binom = binom * k / static_cast<double>(m - k + 1);
                }
            }
            break;
        }
        case BasisKind::Laguerre: {
            // c_{km} = integral_0^inf L_m(u+d) L_k(u) e^{-u} du
            const QuadratureRule rule = gauss_laguerre(size);
            const int nq = static_cast<int>(rule.nodes.size());
            Eigen::MatrixXd lk(size, nq), lmShifted(nq, size);
            for (int i = 0; i < nq; ++i) {
                for (int k = 0; k < size; ++k) {
                    lk(k, i) = rule.weights(i) * eval_q(k, -rule.nodes(i));
                    lmShifted(i, k) = eval_q(k, -(rule.nodes(i) + d));
                }
            }
            c = lk * lmShifted;
            break;
        }
        case BasisKind::LegendreShifted: {
            // c_{km} = (2k+1) integral_0^1 Q_m(s x) Q_k(x) dx, s = e^{-d}
            const double s = decay;
            const QuadratureRule rule = gauss_legendre_01(size);
            const int nq = static_cast<int>(rule.nodes.size());
            Eigen::MatrixXd qk(size, nq), qmScaled(nq, size);
            for (int i = 0; i < nq; ++i) {
                for (int k = 0; k < size; ++k) {
                    qk(k, i) = (2.0 * k + 1.0) * rule.weights(i) * eval_q(k, rule.nodes(i));
                    qmScaled(i, k) = eval_q(k, s * rule.nodes(i));
                }
            }
            c = qk * qmScaled;
            break;
        }
        case BasisKind::ChebyshevShifted: {
            // Gauss-Chebyshev projection of Q_m(s x) on T_k(2x-1)
            const double s = decay;
            const int nq = size;
            Eigen::MatrixXd tk(size, nq), qmScaled(nq, size);
            for (int i = 0; i < nq; ++i) {
                const double y = std::cos(M_PI * (2.0 * i + 1.0) / (2.0 * nq));
                const double x = 0.5 * (y + 1.0);
                for (int k = 0; k < size; ++k) {
                    tk(k, i) = (k == 0 ? 1.0 : 2.0) / nq * eval_q(k, x);
                    qmScaled(i, k) = eval_q(k, s * x);
                }
            }
            c = tk * qmScaled;
            break;
        }
    }
    // c(k,m) expands the shifted Q_m over Q_k; moment vectors transform with
    // the transpose: <Q_m>_new = e^{-d} sum_k c(k,m) <Q_k>_old
    return decay * c.transpose();
}

std::shared_ptr<const Eigen::MatrixXd> BasisEngine::shift_operator(double delta_t) const {
    if (delta_t < 0.0) throw std::invalid_argument("shift_operator: delta_t must be >= 0");
    const double d = delta_t / tau_;
    const std::uint64_t key = double_bits(d);
    {
        std::lock_guard<std::mutex> lock(shift_mutex_);
        auto it = shift_cache_.find(key);
        if (it != shift_cache_.end()) return it->second;
    }
    auto mat = std::make_shared<const Eigen::MatrixXd>(build_shift_matrix(d));
    {
        std::lock_guard<std::mutex> lock(shift_mutex_);
        auto it = shift_cache_.find(key);
        if (it != shift_cache_.end()) return it->second;
        if (shift_order_.size() >= kShiftCacheCapacity) {
            shift_cache_.erase(shift_order_.front());
            shift_order_.erase(shift_order_.begin());
        }
        shift_cache_.emplace(key, mat);
        shift_order_.push_back(key);
    }
    return mat;
}

Poly ed_transform(const BasisEngine& be, const Poly& psi) {
    return Poly{be.kind(), be.ed_transform(psi.coeffs)};
}

Poly j_transform(const BasisEngine& be, const Poly& p) {
    return Poly{be.kind(), be.j_transform(p.coeffs)};
}

}  // namespace specflow
