#ifndef SPECFLOW_IDPDT_HPP
#define SPECFLOW_IDPDT_HPP

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "specflow/basis.hpp"
#include "specflow/spectral.hpp"

namespace specflow {

// Approximation families for the operator ||I dp/dt|| (not obtainable from
// direct sampling). Difference-type variants approximate
// ||I dp/dt - p dI/dt|| directly instead.
enum class IdpdtVariant {
    SqrtSandwich,      // ||I^1/2|| DP ||I^1/2||
    RightProduct,      // DP ||I||
    PowerBeta,         // ||I^beta/2|| DP ||I^beta/2||
    DirectProduct,     // ||dp/dt|| ||I||
    PdIResidual,       // ||d(pI)/dt|| - ||p|| ||dI/dt||
    VddtResidual,      // ||d/dt (V-V_last) dp/dt|| - ||V-V_last|| ||d^2p/dt^2||
    DtPoverI,          // ||d/dt (p/I)||, difference proxy
    SandwichDtPoverI,  // ||I|| ||d/dt (p/I)|| ||I||, difference proxy
};

struct VariantTraits {
    bool hermitian = true;
    bool needs_i0f = false;       // boundary value I_0^F enters the formula
    bool yields_difference = false;
    bool diagnostic_only = false;
};

VariantTraits variant_traits(IdpdtVariant v);
std::string to_string(IdpdtVariant v);
bool parse_variant(const std::string& name, IdpdtVariant& out);
const std::vector<IdpdtVariant>& all_variants();

// Everything the approximations consume, in the psi basis of the
// execution-flow eigenproblem. k_* are <ED(psi_j)|f|psi_k> sandwiches.
struct IdpdtContext {
    const SpectralState* spec = nullptr;
    Eigen::MatrixXd k_pi;      // <ED(psi_j)|pI|psi_k>
    Eigen::MatrixXd k_i;       // <ED(psi_j)|I|psi_k>
    Eigen::MatrixXd k_dp;      // <ED(psi_j)|dp/dt|psi_k>
    Eigen::MatrixXd k_vdp;     // <ED(psi_j)|(V-V_last)dp/dt|psi_k>
    Eigen::MatrixXd p_psi;     // <psi_j|p|psi_k>
    Eigen::MatrixXd dp_psi;    // <psi_j|dp/dt|psi_k>
    Eigen::MatrixXd vrel_psi;  // <psi_j|V_last-V|psi_k>
    double p_last = 0.0;
    double i0f = 0.0;          // boundary, usually lambda_IH
    double beta = 1.0;
    double lambda_floor_rel = 1e-12;
};

// DP_jk = (1/lambda_k) <ED(psi_j)|(P_last-p)I|psi_k>
//       + (1/lambda_j) <psi_j|(P_last-p)I|ED(psi_k)>
// nullopt when some eigenvalue is under the relative floor.
std::optional<Eigen::MatrixXd> dp_core(const IdpdtContext& ctx);

std::optional<Eigen::MatrixXd> idpdt_matrix(IdpdtVariant v, const IdpdtContext& ctx);

// ||d(pI)/dt|| in the psi basis with the P_last * I_0^F boundary.
Eigen::MatrixXd ddt_pi_matrix(const IdpdtContext& ctx);
// ||dI/dt|| with the I_0^F boundary.
Eigen::MatrixXd ddt_i_matrix(const IdpdtContext& ctx);

// Root of Spur||I (d/dt)(1/I) I | rho|| = 0 in I_0^F, bisection on
// [bracket_lo, 10 lambda_IH]; falls back to lambda_IH when the bracket
// has no sign change.
struct AdjustedI0F {
    double value = 0.0;
    bool converged = false;
};
AdjustedI0F adjust_i0f(const IdpdtContext& ctx, const Eigen::MatrixXd& rho_psi,
                       double bracket_lo);

}  // namespace specflow

#endif
