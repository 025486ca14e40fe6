#include "specflow/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace specflow {

int SpectralState::top_index() const {
    // max-lambda cluster, then the most now-localized member within it
    const int n = static_cast<int>(lambdas.size());
    const double scale = lambdas.cwiseAbs().maxCoeff();
    const double tol = 1e-10 * std::max(scale, 1e-300);
    int best = n - 1;
    for (int i = n - 2; i >= 0; --i) {
        if (lambdas(n - 1) - lambdas(i) > tol) break;
        if (std::abs(psi_at_x0(i)) > std::abs(psi_at_x0(best))) best = i;
    }
    return best;
}

SpectralState solve_gev(const BasisEngine& be, const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                        GevWhich which, const GevOptions& opts) {
    SpectralState out;
    out.which = which;
    out.b = b;
    const int n = static_cast<int>(a.rows());

    // Jacobi equilibration keeps badly scaled B matrices (Monomial Gram)
    // solvable; it is an exact diagonal basis rescale.
    Eigen::VectorXd d(n);
    for (int i = 0; i < n; ++i) {
        const double bi = b(i, i);
        if (!(bi > 0.0) || !std::isfinite(bi)) return out;  // not SPD, frame not ready
        d(i) = 1.0 / std::sqrt(bi);
    }
    const Eigen::MatrixXd bs = d.asDiagonal() * b * d.asDiagonal();
    const Eigen::MatrixXd as = d.asDiagonal() * a * d.asDiagonal();

    // whitening: W with W^T B W = I
    Eigen::MatrixXd w;
    bool whitened = false;
    {
        Eigen::LLT<Eigen::MatrixXd> llt(bs);
        if (llt.info() == Eigen::Success) {
            w = Eigen::MatrixXd::Identity(n, n);
            llt.matrixU().solveInPlace(w);  // w = U^{-1}
            whitened = true;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> bes(bs);
    if (bes.info() != Eigen::Success) return out;
    const double bmax = bes.eigenvalues().maxCoeff();
    const double bmin = bes.eigenvalues().minCoeff();
    if (!(bmax > 0.0)) return out;
    out.b_condition = bmin > 0.0 ? bmax / bmin : std::numeric_limits<double>::infinity();
    if (!whitened) {
        // pseudo-whitening with a relative eigenvalue floor
        const double floor = opts.pseudo_floor * bmax;
        if (bmin <= floor) return out;  // rank-deficient B: flagged not ready
        Eigen::VectorXd inv_sqrt = bes.eigenvalues().cwiseSqrt().cwiseInverse();
        w = bes.eigenvectors() * inv_sqrt.asDiagonal();
    }
    if (out.b_condition > opts.condition_limit) return out;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> aes(w.transpose() * as * w);
    if (aes.info() != Eigen::Success) return out;

    out.lambdas = aes.eigenvalues();  // ascending
    out.alphas = d.asDiagonal() * (w * aes.eigenvectors());
    out.psi_at_x0.resize(n);
    const Eigen::VectorXd& q0 = be.q_at_x0();
    for (int i = 0; i < n; ++i) out.psi_at_x0(i) = q0.head(n).dot(out.alphas.col(i));

    // deterministic representatives: within each degenerate cluster order by
    // |psi(x0)| descending, and fix the sign so psi(x0) >= 0
    const double scale = std::max(out.lambdas.cwiseAbs().maxCoeff(), 1e-300);
    const double tol = opts.degeneracy_rtol * scale;
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    int start = 0;
    while (start < n) {
        int stop = start + 1;
        while (stop < n && out.lambdas(stop) - out.lambdas(start) <= tol) ++stop;
        std::stable_sort(order.begin() + start, order.begin() + stop, [&](int x, int y) {
            return std::abs(out.psi_at_x0(x)) > std::abs(out.psi_at_x0(y));
        });
        start = stop;
    }
    Eigen::VectorXd lam(n), px(n);
    Eigen::MatrixXd al(n, n);
    for (int i = 0; i < n; ++i) {
        const int src = order[i];
        lam(i) = out.lambdas(src);
        double sgn = 1.0;
        if (out.psi_at_x0(src) < 0.0) sgn = -1.0;
        else if (out.psi_at_x0(src) == 0.0) {
            for (int r = 0; r < n; ++r)
                if (out.alphas(r, src) != 0.0) {
                    sgn = out.alphas(r, src) > 0.0 ? 1.0 : -1.0;
                    break;
                }
        }
        al.col(i) = sgn * out.alphas.col(src);
        px(i) = sgn * out.psi_at_x0(src);
    }
    out.lambdas = std::move(lam);
    out.alphas = std::move(al);
    out.psi_at_x0 = std::move(px);
    out.ok = out.lambdas.allFinite() && out.alphas.allFinite();
    return out;
}

Eigen::VectorXd localized_state(const BasisEngine& be, const SpectralState& spec, double y) {
    const int n = static_cast<int>(spec.alphas.rows());
    Eigen::VectorXd qy(n);
    for (int m = 0; m < n; ++m) qy(m) = be.eval_q(m, y);
    // psi_y = sum_i psi^{[i]}(y) psi^{[i]} / sqrt(sum_i psi^{[i]}(y)^2), which
    // equals the G^{-1}-kernel form because the alphas are B-orthonormal
    Eigen::VectorXd proj(n);
    for (int i = 0; i < n; ++i) proj(i) = qy.dot(spec.alphas.col(i));
    const double norm = proj.norm();
    Eigen::VectorXd psi = Eigen::VectorXd::Zero(n);
    if (norm == 0.0) return psi;
    for (int i = 0; i < n; ++i) psi += (proj(i) / norm) * spec.alphas.col(i);
    return psi;
}

MaxFlowState max_flow_state(const SpectralState& spec) {
    MaxFlowState mf;
    if (!spec.ok) return mf;
    mf.index = spec.top_index();
    mf.lambda_ih = spec.lambdas(mf.index);
    mf.psi_ih = spec.alphas.col(mf.index);
    const double sum_sq = spec.psi_at_x0.squaredNorm();
    if (sum_sq > 0.0) {
        const double w = spec.psi_at_x0(mf.index);
        mf.projection_now = w * w / sum_sq;
        mf.i_now = spec.psi_at_x0.cwiseAbs2().dot(spec.lambdas) / sum_sq;
    }
    return mf;
}

}  // namespace specflow
