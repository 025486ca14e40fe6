#include "specflow/ticks.hpp"

#include <zlib.h>

#include <charconv>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <string_view>

namespace specflow {

bool parse_column_spec(const std::string& text, ColumnSpec& out) {
    ColumnSpec spec;
    int fields[5] = {0, 0, 0, 0, -1};
    int count = 0;
    const char* p = text.c_str();
    const char* end = p + text.size();
    while (p < end && count < 5) {
        int value = 0;
        auto [next, ec] = std::from_chars(p, end, value);
        if (ec != std::errc()) return false;
        fields[count++] = value;
        p = next;
        if (p < end) {
            if (*p != ':') return false;
            ++p;
        }
    }
    if (p != end || count < 4) return false;
    spec.total_cols = fields[0];
    spec.t_col = fields[1];
    spec.p_col = fields[2];
    spec.v_col = fields[3];
    spec.sym_col = count == 5 ? fields[4] : -1;
    if (spec.total_cols < 1) return false;
    for (int c : {spec.t_col, spec.p_col, spec.v_col})
        if (c < 0 || c >= spec.total_cols) return false;
    if (spec.sym_col >= spec.total_cols) return false;
    out = spec;
    return true;
}

TickReader::TickReader(const std::string& path, ColumnSpec spec) : spec_(spec) {
    gzFile f = gzopen(path.c_str(), "rb");
    if (!f) throw std::runtime_error("cannot open tick file: " + path);
    gzbuffer(f, 1 << 16);
    gz_ = f;
}

TickReader::~TickReader() {
    if (gz_) gzclose(static_cast<gzFile>(gz_));
}

bool TickReader::read_line(std::string& line) {
    line.clear();
    while (true) {
        if (buffer_pos_ < buffer_.size()) {
            const std::size_t nl = buffer_.find('\n', buffer_pos_);
            if (nl != std::string::npos) {
                line.append(buffer_, buffer_pos_, nl - buffer_pos_);
                buffer_pos_ = nl + 1;
                if (!line.empty() && line.back() == '\r') line.pop_back();
                return true;
            }
            line.append(buffer_, buffer_pos_, buffer_.size() - buffer_pos_);
            buffer_pos_ = buffer_.size();
        }
        if (eof_) {
            if (!line.empty()) {
                if (line.back() == '\r') line.pop_back();
                return true;
            }
            return false;
        }
        char chunk[1 << 14];
        const int got = gzread(static_cast<gzFile>(gz_), chunk, sizeof(chunk));
        if (got < 0) throw std::runtime_error("gzread failed on tick file");
        if (got == 0) {
            eof_ = true;
            continue;
        }
        buffer_.assign(chunk, static_cast<std::size_t>(got));
        buffer_pos_ = 0;
    }
}

int TickReader::symbol_slot(const std::string& name) {
    for (std::size_t i = 0; i < symbols_.size(); ++i)
        if (symbols_[i] == name) return static_cast<int>(i);
    symbols_.push_back(name);
    return static_cast<int>(symbols_.size() - 1);
}

std::optional<Tick> TickReader::next() {
    std::string line;
    std::vector<std::string_view> cols;
    while (read_line(line)) {
        if (line.empty() || line[0] == '#') continue;
        cols.clear();
        std::size_t start = 0;
        while (true) {
            const std::size_t tab = line.find('\t', start);
            if (tab == std::string::npos) {
                cols.emplace_back(line.data() + start, line.size() - start);
                break;
            }
            cols.emplace_back(line.data() + start, tab - start);
            start = tab + 1;
        }
        if (static_cast<int>(cols.size()) != spec_.total_cols) {
            ++rows_skipped_;
            continue;
        }
        auto parse_double = [](std::string_view sv, double& v) {
            auto [p, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), v);
            return ec == std::errc() && p == sv.data() + sv.size();
        };
        auto parse_int = [](std::string_view sv, std::int64_t& v) {
            auto [p, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), v);
            return ec == std::errc() && p == sv.data() + sv.size();
        };
        Tick tick;
        if (!parse_int(cols[spec_.t_col], tick.t_ns) ||
            !parse_double(cols[spec_.p_col], tick.price) ||
            !parse_double(cols[spec_.v_col], tick.size) || !(tick.price > 0.0) ||
            tick.size < 0.0) {
            ++rows_skipped_;
            continue;
        }
        if (spec_.sym_col >= 0) tick.symbol = symbol_slot(std::string(cols[spec_.sym_col]));
        if (have_prev_t_ && tick.t_ns < prev_t_) {
            tick.t_ns = prev_t_;  // consolidated feeds interleave; keep the gap at zero
            ++clamped_;
        }
        prev_t_ = tick.t_ns;
        have_prev_t_ = true;
        ++emitted_;
        return tick;
    }
    return std::nullopt;
}

std::vector<Tick> read_ticks(const std::string& path, const ColumnSpec& spec,
                             std::uint64_t* rows_skipped, std::uint64_t* clamped,
                             std::vector<std::string>* symbols) {
    TickReader reader(path, spec);
    std::vector<Tick> ticks;
    while (auto t = reader.next()) ticks.push_back(*t);
    if (rows_skipped) *rows_skipped = reader.rows_skipped();
    if (clamped) *clamped = reader.clamped_timestamps();
    if (symbols) *symbols = reader.symbols();
    return ticks;
}

std::vector<SurrogateIncrement> surrogate_stream(const std::vector<Tick>& ticks) {
    std::vector<SurrogateIncrement> out(ticks.size());
    for (std::size_t i = 1; i < ticks.size(); ++i)
        out[i].da = std::abs(ticks[i].price - ticks[i - 1].price);
    return out;
}

}  // namespace specflow
