#ifndef SPECFLOW_PANEL_HPP
#define SPECFLOW_PANEL_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "specflow/indicators.hpp"
#include "specflow/moments.hpp"

namespace specflow {

// Independent per-asset integrators on one shared time basis. The panel
// clock advances on every tick of any asset: the ticking asset integrates,
// every other asset receives only the basis shift, and all states stay
// expressible in the same basis so scalar products across assets are
// meaningful. Readers see a consistent snapshot after each advance.
class AssetPanel {
public:
    AssetPanel(std::shared_ptr<const BasisEngine> be, EngineConfig cfg);

    int add_asset(const std::string& symbol);
    int asset_index(const std::string& symbol) const;  // -1 when unknown
    int asset_count() const { return static_cast<int>(assets_.size()); }
    const std::string& symbol(int asset) const { return assets_[asset].symbol; }

    const IndicatorFrame& advance(int asset, const Tick& tick);

    const IndicatorFrame& last_frame(int asset) const { return assets_[asset].frame; }
    const MomentIntegrator& integrator(int asset) const { return assets_[asset].integrator; }
    bool ready(int asset) const { return assets_[asset].engine.real_state().valid; }

    // <psi^{IH(a)}|psi^{IH(b)}>^2 in the shared Gram metric
    std::optional<double> cross_projection(int a, int b) const;

    // signed seconds: positive when asset a's spike is older than asset b's
    struct SpikeOrder {
        std::optional<double> by_tv_m;   // T^{[IH](a)} - T^{[IH](b)}
        std::optional<double> by_spur;   // Spur||rho(a)|| - Spur||rho(b)||
    };
    SpikeOrder spike_order(int a, int b) const;

    // capital-flow index I~ = sum_a p^(a) I^(a)
    struct IndexState {
        bool ok = false;
        double lambda = 0.0;
        double wh_squared = 0.0;
    };
    IndexState index_state() const;

    // sum_a lambda^{IH(a)} (P^last(a) - P^EQ(a)), capital-flow dimension
    std::optional<double> weighted_directional_sum() const;

private:
    struct Asset {
        std::string symbol;
        MomentIntegrator integrator;
        FlowEngine engine;
        IndicatorFrame frame;
        bool primed = false;  // first tick seen (increments start on the next)
    };

    std::shared_ptr<const BasisEngine> be_;
    EngineConfig cfg_;
    std::vector<Asset> assets_;
    Eigen::VectorXd index_moments_;  // <Q_m I~>
    bool clock_started_ = false;
    std::int64_t t_ns_ = 0;
};

}  // namespace specflow

#endif
