// Streaming spectral indicator engine over (time, execution price, shares
// traded) transaction files. Reads ticks, maintains exponentially weighted
// moments, solves the execution-flow eigenproblem per tick, and writes one
// indicator row per tick for both real and surrogate volume.

#include <CLI11.hpp>
#include <iostream>
#include <string>
#include <vector>

#include "specflow/report.hpp"

int main(int argc, char** argv) {
    CLI::App app{"specflow: spectral execution-flow market indicators"};

    specflow::RunConfig cfg;
    std::string cols_text = "3:0:1:2";
    std::string measure_name = "LegendreShifted";
    std::string variant_name = "right_product";
    std::vector<std::string> symbol_args;

    app.add_option("--musein_file", cfg.input_path,
                   "input tab-separated tick file, optionally gzip-compressed");
    app.add_option("--musein_cols", cols_text,
                   "column layout total:time:price:volume[:symbol], indices base 0")
        ->capture_default_str();
    app.add_option("--n", cfg.params.n, "basis dimension")->capture_default_str();
    app.add_option("--tau", cfg.params.tau, "exponent time in seconds")->capture_default_str();
    app.add_option("--measure", measure_name,
                   "measure/basis: LegendreShifted, Laguerre, Monomial, ChebyshevShifted")
        ->capture_default_str();
    app.add_option("--museout_file", cfg.output_path, "output file")->capture_default_str();
    app.add_option("--idpdt_variant", variant_name,
                   "||I dp/dt|| approximation: sqrt_sandwich, right_product, power_beta, "
                   "direct_product, pdi_residual, vddt_residual, dtp_over_i, sandwich_dtp_over_i")
        ->capture_default_str();
    app.add_option("--beta", cfg.engine.beta, "exponent for power_beta")->capture_default_str();
    app.add_option("--threshold", cfg.engine.ignore_threshold,
                   "now-projection level at which directional signals carry no information")
        ->capture_default_str();
    app.add_option("--lambda_floor", cfg.engine.lambda_floor_rel,
                   "relative eigenvalue floor for 1/lambda terms")
        ->capture_default_str();
    app.add_option("--condition_limit", cfg.engine.condition_limit,
                   "matrix condition estimate beyond which frames are not ready")
        ->capture_default_str();
    app.add_flag("--experimental", cfg.engine.experimental,
                 "emit projection-operator and double-integration columns (experimental)");
    app.add_flag("--compare_variants", cfg.engine.compare_variants,
                 "emit Delta_I for every computable approximation variant");
    app.add_flag("--adjust_i0f", cfg.engine.use_adjusted_i0f,
                 "refine the I_0^F boundary for sandwich_dtp_over_i");
    app.add_option("--plotdata", cfg.plotdata_path,
                   "write an auxiliary (t, P, P_IH, P_EQ, lambda, wH^2) columnar file");
    app.add_flag("--plot_scale_lambda", cfg.plot_scale_lambda,
                 "rescale eigenvalue plot columns into the price range");
    app.add_option("--symbols", symbol_args,
                   "multi-asset inputs as SYMBOL=FILE (repeatable or comma-separated)")
        ->delimiter(',');
    app.add_option("--panel_out", cfg.panel_out, "cross-asset metrics output (multi-asset runs)");

    CLI11_PARSE(app, argc, argv);

    if (!specflow::parse_column_spec(cols_text, cfg.cols)) {
        std::cerr << "invalid --musein_cols: " << cols_text << "\n";
        return 1;
    }
    if (!specflow::parse_basis_kind(measure_name, cfg.kind)) {
        std::cerr << "invalid --measure: " << measure_name << "\n";
        return 1;
    }
    if (!specflow::parse_variant(variant_name, cfg.engine.variant)) {
        std::cerr << "invalid --idpdt_variant: " << variant_name << "\n";
        return 1;
    }
    for (const std::string& arg : symbol_args) {
        const std::size_t eq = arg.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 >= arg.size()) {
            std::cerr << "invalid --symbols entry (want SYMBOL=FILE): " << arg << "\n";
            return 1;
        }
        cfg.symbol_files.emplace_back(arg.substr(0, eq), arg.substr(eq + 1));
    }
    if (cfg.input_path.empty() && cfg.symbol_files.empty()) {
        std::cerr << "no input: provide --musein_file or --symbols\n";
        return 1;
    }

    const specflow::RunResult res = specflow::run(cfg, &std::cerr);
    if (res.exit_code != 0) std::cerr << "error: " << res.error << "\n";
    return res.exit_code;
}
