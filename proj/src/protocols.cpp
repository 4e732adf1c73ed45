#include "qmem/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace qmem {

double eta_opt(double d) {
    if (!(d > 0.0)) throw GridError("eta_opt: optical depth must be positive");
    return std::max(0.0, 1.0 - 2.9 / d);
}

const std::vector<RegimePreset>& regime_presets() {
    static const std::vector<RegimePreset> presets = {
        {"ATT", MemoryParams(5.0, 0.1), ControlPulse(1.0789, 0.76176, 0.52137)},
        {"ATS", MemoryParams(7.5, 0.4), ControlPulse(2.63177, -0.23817, 1.23829)},
        {"EIT", MemoryParams(50.0, 1.5), ControlPulse(10.05845, -0.54359, 1.33658)},
    };
    return presets;
}

const RegimePreset& preset(const std::string& name) {
    for (const auto& p : regime_presets())
        if (p.name == name) return p;
    throw std::invalid_argument("unknown regime preset: " + name);
}

double adiabaticity(const MemoryParams& memory) { return memory.d * memory.tau_gamma; }

// Index-partitioned worker pool; output order follows input order regardless
// of scheduling.
void parallel_for(int n, int jobs, const std::function<void(int)>& body) {
    jobs = std::max(1, std::min(jobs, n));
    if (jobs == 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(jobs));
    for (int t = 0; t < jobs; ++t)
        pool.emplace_back([&, t] {
            for (int i = t; i < n; i += jobs) body(i);
        });
    for (auto& th : pool) th.join();
}

AreaScan sweep_pulse_area(const MemoryParams& memory, const ControlPulse& control_template,
                          const std::vector<double>& areas, const GridConfig& grid,
                          int jobs) {
    if (areas.empty()) throw GridError("sweep_pulse_area: empty area list");
    for (double a : areas)
        if (a < 0.0) throw GridError("sweep_pulse_area: areas must be non-negative");

    const TemporalField signal = gaussian_signal(memory.tau_gamma, grid.time_grid(), 0.0);
    AreaScan scan;
    scan.points.resize(areas.size());
    parallel_for(static_cast<int>(areas.size()), jobs, [&](int i) {
        const std::size_t k = static_cast<std::size_t>(i);
        AreaScanPoint& pt = scan.points[k];
        pt.theta = areas[k];
        try {
            const ControlPulse pulse(areas[k], control_template.delay, control_template.duration);
            const SolveResult r = solve(memory, signal, pulse, std::nullopt, 0.0, grid);
            pt.eta_store = r.eta_store;
            pt.ok = true;
        } catch (const std::exception& e) {
            pt.ok = false;
            pt.error = e.what();
        }
    });
    for (const auto& pt : scan.points)
        if (!pt.ok) scan.complete = false;

    // First local maximum: first interior point at least as high as its left
    // neighbor and strictly above its right one, refined parabolically.
    for (std::size_t i = 1; i + 1 < scan.points.size(); ++i) {
        const auto& l = scan.points[i - 1];
        const auto& c = scan.points[i];
        const auto& r = scan.points[i + 1];
        if (!l.ok || !c.ok || !r.ok) continue;
        if (c.eta_store >= l.eta_store && c.eta_store > r.eta_store) {
            scan.first_maximum = parabolic_vertex(l.theta, l.eta_store, c.theta, c.eta_store,
                                                  r.theta, r.eta_store);
            break;
        }
    }
    return scan;
}

}  // namespace qmem
