#ifndef SPECFLOW_TICKS_HPP
#define SPECFLOW_TICKS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace specflow {

// One transaction event; the sole external input.
struct Tick {
    std::int64_t t_ns = 0;  // nanoseconds since midnight, non-decreasing within a stream
    double price = 0.0;     // > 0
    double size = 0.0;      // shares, >= 0
    int symbol = -1;        // panel slot index, -1 for single-asset streams
};

// Column layout "total:t:p:v[:sym]", indices base 0.
struct ColumnSpec {
    int total_cols = 3;
    int t_col = 0;
    int p_col = 1;
    int v_col = 2;
    int sym_col = -1;
};

bool parse_column_spec(const std::string& text, ColumnSpec& out);

// Streaming reader for tab-separated tick files, transparently gunzipping
// (zlib detects the magic bytes, so plain files work through the same path).
// Malformed rows are skipped and counted; non-monotone timestamps are clamped
// to the previous tick's time and counted.
class TickReader {
public:
    TickReader(const std::string& path, ColumnSpec spec);
    ~TickReader();
    TickReader(const TickReader&) = delete;
    TickReader& operator=(const TickReader&) = delete;

    // next tick in file order, or nullopt at end of stream
    std::optional<Tick> next();

    std::uint64_t rows_skipped() const { return rows_skipped_; }
    std::uint64_t clamped_timestamps() const { return clamped_; }
    std::uint64_t ticks_emitted() const { return emitted_; }
    // symbol strings in first-appearance order (merged multi-asset files)
    const std::vector<std::string>& symbols() const { return symbols_; }

private:
    bool read_line(std::string& line);
    int symbol_slot(const std::string& name);

    void* gz_ = nullptr;  // gzFile
    ColumnSpec spec_;
    std::string buffer_;
    std::size_t buffer_pos_ = 0;
    bool eof_ = false;
    bool have_prev_t_ = false;
    std::int64_t prev_t_ = 0;
    std::uint64_t rows_skipped_ = 0;
    std::uint64_t clamped_ = 0;
    std::uint64_t emitted_ = 0;
    std::vector<std::string> symbols_;
};

// Convenience: read a whole file into memory.
std::vector<Tick> read_ticks(const std::string& path, const ColumnSpec& spec,
                             std::uint64_t* rows_skipped = nullptr,
                             std::uint64_t* clamped = nullptr,
                             std::vector<std::string>* symbols = nullptr);

// da_l = |p_l - p_{l-1}|, da_1 = 0: absolute price change used as a
// volume substitute when traded size is unavailable or unreliable.
struct SurrogateIncrement {
    double da = 0.0;
};

std::vector<SurrogateIncrement> surrogate_stream(const std::vector<Tick>& ticks);

}  // namespace specflow

#endif
