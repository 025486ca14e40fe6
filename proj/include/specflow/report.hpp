#ifndef SPECFLOW_REPORT_HPP
#define SPECFLOW_REPORT_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "specflow/basis.hpp"
#include "specflow/indicators.hpp"
#include "specflow/ticks.hpp"

namespace specflow {

struct RunConfig {
    std::string input_path;
    ColumnSpec cols;
    BasisKind kind = BasisKind::LegendreShifted;
    MeasureParams params;
    std::string output_path = "museout.dat";
    EngineConfig engine;
    std::string plotdata_path;        // empty: disabled
    bool plot_scale_lambda = false;   // rescale the eigenvalue columns into the price range
    // multi-asset: (symbol, file) pairs; empty means single-asset or merged file
    std::vector<std::pair<std::string, std::string>> symbol_files;
    std::string panel_out;            // cross-asset metrics file, multi-asset runs only
};

struct RunResult {
    int exit_code = 0;
    std::uint64_t ticks = 0;
    std::uint64_t rows_skipped = 0;
    std::uint64_t clamped_timestamps = 0;
    std::string error;
};

// One output row per input tick, every IndicatorFrame field for both the
// real-volume (pFV.) and surrogate (pFA.) twins; '#'-prefixed header;
// deterministic for identical input and config.
RunResult run(const RunConfig& cfg, std::ostream* log = nullptr);

// column names in emission order (exposed for tests)
std::vector<std::string> output_columns(const EngineConfig& engine, bool with_symbol);
std::string format_frame_row(const IndicatorFrame& frame, const EngineConfig& engine,
                             const std::string* symbol);

}  // namespace specflow

#endif
