#include "specflow/report.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>

#include "specflow/panel.hpp"

namespace specflow {

namespace {

void append_double(std::string& row, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    row += buf;
}

void append_opt(std::string& row, const std::optional<double>& v) {
    if (v)
        append_double(row, *v);
    else
        row += "NA";
}

void append_fields(std::string& row, const FlowFields& f, const EngineConfig& engine) {
    row += f.ready ? "1" : "0";
    row += '\t';
    append_opt(row, f.pv_average);
    row += '\t';
    append_opt(row, f.tv_average);
    row += '\t';
    append_double(row, f.total_volume);
    row += '\t';
    append_opt(row, f.pv_m);
    row += '\t';
    append_opt(row, f.tv_m);
    row += '\t';
    append_opt(row, f.wh_squared);
    row += '\t';
    append_opt(row, f.lambda_ih);
    row += '\t';
    append_opt(row, f.di_future);
    row += '\t';
    if (f.no_info)
        row += *f.no_info ? "1" : "0";
    else
        row += "NA";
    row += '\t';
    append_opt(row, f.peqv_from_m);
    row += '\t';
    append_opt(row, f.delta_vd);
    row += '\t';
    append_opt(row, f.peq_i);
    row += '\t';
    append_opt(row, f.delta_i);
    row += '\t';
    append_opt(row, f.delta_v);
    row += '\t';
    append_opt(row, f.peq_local_volume);
    row += '\t';
    append_opt(row, f.delta_t);
    row += '\t';
    append_opt(row, f.peq_total);
    row += '\t';
    append_opt(row, f.vt_ratio);
    row += '\t';
    append_opt(row, f.lambda_vt);
    row += '\t';
    append_opt(row, f.scalp);
    if (engine.experimental) {
        row += '\t';
        append_opt(row, f.p_plus);
        row += '\t';
        append_opt(row, f.p_minus);
        row += '\t';
        append_opt(row, f.pnl_pi);
        row += '\t';
        append_opt(row, f.v_tilde);
        row += '\t';
        append_opt(row, f.p_star);
        row += '\t';
        append_opt(row, f.i0f_adjusted);
        row += '\t';
        if (f.neg_rho_jih)
            row += std::to_string(*f.neg_rho_jih);
        else
            row += "NA";
        row += '\t';
        append_opt(row, f.didt_lambda_min);
        row += '\t';
        append_opt(row, f.didt_lambda_max);
    }
    if (engine.compare_variants) {
        for (std::size_t i = 0; i < all_variants().size(); ++i) {
            row += '\t';
            if (i < f.delta_i_variants.size())
                append_opt(row, f.delta_i_variants[i]);
            else
                row += "NA";
        }
    }
}

void bank_columns(std::vector<std::string>& cols, const std::string& prefix,
                  const EngineConfig& engine) {
    for (const char* name :
         {"ready", "pv_average", "Tv_average", "totalVolume", "pv_M", "Tv_M", "I.wH_squared",
          "lambda_IH", "dIF", "no_info", "PEQV_from_M", "Delta_VD", "PEQ_I", "Delta_I", "Delta_V",
          "PEQ_LocalVolume", "Delta_T", "PEQ_Total", "VT_ratio", "lambda_VT", "scalp_price"})
        cols.push_back(prefix + name);
    if (engine.experimental)
        for (const char* name : {"P_plus", "P_minus", "PnL_Pi", "Vtilde", "P_star", "I0F_adjusted",
                                 "neg_rho_JIH", "dIdt_lambda_min", "dIdt_lambda_max"})
            cols.push_back(prefix + name);
    if (engine.compare_variants)
        for (IdpdtVariant v : all_variants()) cols.push_back(prefix + "Delta_I." + to_string(v));
}

struct PlotRow {
    double t_sec;
    double price;
    std::optional<double> pv_m[2], peq[2], lambda[2], wh[2];
};

class PlotBuffer {
public:
    void add(const IndicatorFrame& frame) {
        PlotRow r;
        r.t_sec = frame.t_sec;
        r.price = frame.price;
        const FlowFields* banks[2] = {&frame.real_f, &frame.surrogate_f};
        for (int b = 0; b < 2; ++b) {
            r.pv_m[b] = banks[b]->pv_m;
            r.peq[b] = banks[b]->peqv_from_m;
            r.lambda[b] = banks[b]->lambda_ih;
            r.wh[b] = banks[b]->wh_squared;
        }
        rows_.push_back(r);
    }

    bool write(const std::string& path, bool scale_lambda) {
        std::ofstream out(path);
        if (!out) return false;
        double pmin = std::numeric_limits<double>::max(), pmax = -pmin;
        double lmin[2] = {pmin, pmin}, lmax[2] = {-pmin, -pmin};
        for (const PlotRow& r : rows_) {
            pmin = std::min(pmin, r.price);
            pmax = std::max(pmax, r.price);
            for (int b = 0; b < 2; ++b)
                if (r.lambda[b]) {
                    lmin[b] = std::min(lmin[b], *r.lambda[b]);
                    lmax[b] = std::max(lmax[b], *r.lambda[b]);
                }
        }
        out << "#t_sec\tprice\tpFV.pv_M\tpFV.PEQV_from_M\tpFV.lambda_IH\tpFV.wH_squared"
               "\tpFA.pv_M\tpFA.PEQV_from_M\tpFA.lambda_IH\tpFA.wH_squared\n";
        for (const PlotRow& r : rows_) {
            std::string row;
            append_double(row, r.t_sec);
            row += '\t';
            append_double(row, r.price);
            for (int b = 0; b < 2; ++b) {
                row += '\t';
                append_opt(row, r.pv_m[b]);
                row += '\t';
                append_opt(row, r.peq[b]);
                row += '\t';
                std::optional<double> lam = r.lambda[b];
                if (lam && scale_lambda && lmax[b] > lmin[b] && pmax > pmin)
                    lam = pmin + (*lam - lmin[b]) / (lmax[b] - lmin[b]) * (pmax - pmin);
                append_opt(row, lam);
                row += '\t';
                append_opt(row, r.wh[b]);
            }
            out << row << '\n';
        }
        return static_cast<bool>(out);
    }

    bool empty() const { return rows_.empty(); }

private:
    std::vector<PlotRow> rows_;
};

}  // namespace

std::vector<std::string> output_columns(const EngineConfig& engine, bool with_symbol) {
    std::vector<std::string> cols = {"t_ns", "t_sec", "price"};
    if (with_symbol) cols.insert(cols.begin() + 1, "symbol");
    bank_columns(cols, "pFV.", engine);
    bank_columns(cols, "pFA.", engine);
    return cols;
}

std::string format_frame_row(const IndicatorFrame& frame, const EngineConfig& engine,
                             const std::string* symbol) {
    std::string row;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%" PRId64, static_cast<std::int64_t>(frame.t_ns));
    row += buf;
    row += '\t';
    if (symbol) {
        row += *symbol;
        row += '\t';
    }
    append_double(row, frame.t_sec);
    row += '\t';
    append_double(row, frame.price);
    row += '\t';
    append_fields(row, frame.real_f, engine);
    row += '\t';
    append_fields(row, frame.surrogate_f, engine);
    return row;
}

namespace {

RunResult run_single(const RunConfig& cfg, std::ostream* log) {
    RunResult res;
    std::ofstream out(cfg.output_path);
    if (!out) {
        res.exit_code = 1;
        res.error = "cannot open output file: " + cfg.output_path;
        return res;
    }
    std::unique_ptr<TickReader> reader;
    try {
        reader = std::make_unique<TickReader>(cfg.input_path, cfg.cols);
    } catch (const std::exception& e) {
        res.exit_code = 1;
        res.error = e.what();
        return res;
    }

    auto be = std::make_shared<const BasisEngine>(cfg.kind, cfg.params);
    MomentIntegrator integrator(be);
    FlowEngine engine(be, cfg.engine);
    PlotBuffer plot;

    std::string header = "#";
    const auto cols = output_columns(cfg.engine, false);
    for (std::size_t i = 0; i < cols.size(); ++i) {
        if (i) header += '\t';
        header += cols[i];
    }
    out << header << '\n';

    while (auto tick = reader->next()) {
        integrator.add_tick(*tick);
        const IndicatorFrame frame = engine.process(integrator);
        out << format_frame_row(frame, cfg.engine, nullptr) << '\n';
        if (!cfg.plotdata_path.empty()) plot.add(frame);
        ++res.ticks;
    }
    res.rows_skipped = reader->rows_skipped();
    res.clamped_timestamps = reader->clamped_timestamps();
    if (!out) {
        res.exit_code = 1;
        res.error = "write failure on " + cfg.output_path;
        return res;
    }
    if (!cfg.plotdata_path.empty() && !plot.write(cfg.plotdata_path, cfg.plot_scale_lambda)) {
        res.exit_code = 1;
        res.error = "write failure on " + cfg.plotdata_path;
        return res;
    }
    if (log)
        *log << "processed " << res.ticks << " ticks (" << res.rows_skipped << " rows skipped, "
             << res.clamped_timestamps << " timestamps clamped)\n";
    return res;
}

RunResult run_panel(const RunConfig& cfg, std::ostream* log) {
    RunResult res;
    std::ofstream out(cfg.output_path);
    if (!out) {
        res.exit_code = 1;
        res.error = "cannot open output file: " + cfg.output_path;
        return res;
    }

    auto be = std::make_shared<const BasisEngine>(cfg.kind, cfg.params);
    AssetPanel panel(be, cfg.engine);

    struct Source {
        std::unique_ptr<TickReader> reader;
        std::optional<Tick> pending;
        int asset = -1;
    };
    std::vector<Source> sources;
    std::vector<std::string> merged_symbols;
    if (!cfg.symbol_files.empty()) {
        for (const auto& [symbol, path] : cfg.symbol_files) {
            Source src;
            try {
                src.reader = std::make_unique<TickReader>(path, cfg.cols);
            } catch (const std::exception& e) {
                res.exit_code = 1;
                res.error = e.what();
                return res;
            }
            src.asset = panel.add_asset(symbol);
            src.pending = src.reader->next();
            sources.push_back(std::move(src));
        }
    } else {
        Source src;
        try {
            src.reader = std::make_unique<TickReader>(cfg.input_path, cfg.cols);
        } catch (const std::exception& e) {
            res.exit_code = 1;
            res.error = e.what();
            return res;
        }
        src.pending = src.reader->next();
        sources.push_back(std::move(src));
    }

    std::string header = "#";
    const auto cols = output_columns(cfg.engine, true);
    for (std::size_t i = 0; i < cols.size(); ++i) {
        if (i) header += '\t';
        header += cols[i];
    }
    out << header << '\n';

    // panel metrics are buffered: merged files discover symbols lazily, so
    // the pairwise column set is only known at the end of the run
    struct PanelRow {
        std::int64_t t_ns;
        std::string symbol;
        bool idx_ok;
        double idx_lambda, idx_wh;
        std::optional<double> weighted;
        std::vector<std::optional<double>> pair_cols;  // 3 per pair, (a,b) a<b
        int asset_count;
    };
    std::vector<PanelRow> panel_rows;

    while (true) {
        int pick = -1;
        for (std::size_t i = 0; i < sources.size(); ++i) {
            if (!sources[i].pending) continue;
            if (pick < 0 || sources[i].pending->t_ns < sources[pick].pending->t_ns)
                pick = static_cast<int>(i);
        }
        if (pick < 0) break;
        Source& src = sources[pick];
        Tick tick = *src.pending;
        src.pending = src.reader->next();

        int asset;
        std::string symbol_name;
        if (src.asset >= 0) {
            asset = src.asset;
            symbol_name = panel.symbol(asset);
        } else {
            // merged file with a symbol column
            if (tick.symbol < 0) {
                ++res.rows_skipped;
                continue;
            }
            const auto& names = src.reader->symbols();
            symbol_name = names[tick.symbol];
            asset = panel.asset_index(symbol_name);
            if (asset < 0) asset = panel.add_asset(symbol_name);
        }
        const IndicatorFrame& frame = panel.advance(asset, tick);
        out << format_frame_row(frame, cfg.engine, &symbol_name) << '\n';
        ++res.ticks;

        if (!cfg.panel_out.empty()) {
            PanelRow prow;
            prow.t_ns = frame.t_ns;
            prow.symbol = symbol_name;
            const auto idx = panel.index_state();
            prow.idx_ok = idx.ok;
            prow.idx_lambda = idx.lambda;
            prow.idx_wh = idx.wh_squared;
            prow.weighted = panel.weighted_directional_sum();
            prow.asset_count = panel.asset_count();
            for (int a = 0; a < panel.asset_count(); ++a)
                for (int b = a + 1; b < panel.asset_count(); ++b) {
                    prow.pair_cols.push_back(panel.cross_projection(a, b));
                    const auto order = panel.spike_order(a, b);
                    prow.pair_cols.push_back(order.by_tv_m);
                    prow.pair_cols.push_back(order.by_spur);
                }
            panel_rows.push_back(std::move(prow));
        }
    }
    for (const Source& src : sources) {
        res.rows_skipped += src.reader->rows_skipped();
        res.clamped_timestamps += src.reader->clamped_timestamps();
    }
    if (!cfg.panel_out.empty()) {
        std::ofstream panel_out(cfg.panel_out);
        if (!panel_out) {
            res.exit_code = 1;
            res.error = "cannot open panel output file: " + cfg.panel_out;
            return res;
        }
        panel_out << "#t_ns\tsymbol\tindex_lambda\tindex_wH_squared\tweighted_sum";
        for (int a = 0; a < panel.asset_count(); ++a)
            for (int b = a + 1; b < panel.asset_count(); ++b)
                panel_out << "\tproj." << panel.symbol(a) << '.' << panel.symbol(b)
                          << "\tspike_dt." << panel.symbol(a) << '.' << panel.symbol(b)
                          << "\tspike_dspur." << panel.symbol(a) << '.' << panel.symbol(b);
        panel_out << '\n';
        // map each row's pair values (computed with the then-current asset
        // set) onto the final pair enumeration; missing pairs print as NA
        auto pair_slot = [&](int count, int a, int b) {
            int slot = 0;
            for (int i = 0; i < count; ++i)
                for (int j = i + 1; j < count; ++j) {
                    if (i == a && j == b) return slot;
                    ++slot;
                }
            return -1;
        };
        for (const PanelRow& prow : panel_rows) {
            std::string row;
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%" PRId64, static_cast<std::int64_t>(prow.t_ns));
            row += buf;
            row += '\t';
            row += prow.symbol;
            row += '\t';
            if (prow.idx_ok) {
                append_double(row, prow.idx_lambda);
                row += '\t';
                append_double(row, prow.idx_wh);
            } else {
                row += "NA\tNA";
            }
            row += '\t';
            append_opt(row, prow.weighted);
            for (int a = 0; a < panel.asset_count(); ++a)
                for (int b = a + 1; b < panel.asset_count(); ++b) {
                    const int slot =
                        b < prow.asset_count ? pair_slot(prow.asset_count, a, b) : -1;
                    for (int k = 0; k < 3; ++k) {
                        row += '\t';
                        if (slot >= 0)
                            append_opt(row, prow.pair_cols[3 * slot + k]);
                        else
                            row += "NA";
                    }
                }
            panel_out << row << '\n';
        }
        if (!panel_out) {
            res.exit_code = 1;
            res.error = "write failure on " + cfg.panel_out;
            return res;
        }
    }
    if (!out) {
        res.exit_code = 1;
        res.error = "write failure";
        return res;
    }
    if (log)
        *log << "processed " << res.ticks << " ticks across " << panel.asset_count()
             << " assets\n";
    return res;
}

}  // namespace

RunResult run(const RunConfig& cfg, std::ostream* log) {
    const bool multi = !cfg.symbol_files.empty() || cfg.cols.sym_col >= 0;
    return multi ? run_panel(cfg, log) : run_single(cfg, log);
}

}  // namespace specflow
