#include "qmem/norm.hpp"

#include <algorithm>
#include <cmath>

namespace qmem {

std::vector<double> default_detunings(const MemoryParams& memory) {
    if (adiabaticity(memory) < 10.0) return linspace(-10.0, 10.0, 41);
    return linspace(-30.0, 30.0, 61);
}

double default_retrieval_delay(const MemoryParams& memory) { return 10.0 * memory.tau_gamma; }

static DetuningSweep run_sweep(const MemoryParams& memory, const ControlPulse& control,
                               const std::vector<double>& detunings,
                               const GridConfig* fixed_grid, double retrieval_delay, int jobs) {
    if (detunings.empty()) throw GridError("sweep_detuning: empty detuning list");
    for (std::size_t i = 1; i < detunings.size(); ++i)
        if (!(detunings[i] > detunings[i - 1]))
            throw GridError("sweep_detuning: detunings must be strictly increasing");

    DetuningSweep sweep{memory, control, retrieval_delay, {}, true};
    sweep.points.resize(detunings.size());
    parallel_for(static_cast<int>(detunings.size()), jobs, [&](int i) {
        const std::size_t k = static_cast<std::size_t>(i);
        DetuningPoint& pt = sweep.points[k];
        pt.delta = detunings[k];
        try {
            const MemoryParams m(memory.d, memory.tau_gamma, detunings[k], memory.gamma_b);
            const GridConfig grid =
                fixed_grid ? *fixed_grid : default_grid(m, control, control, retrieval_delay);
            const TemporalField signal = gaussian_signal(m.tau_gamma, grid.time_grid(), 0.0);
            const SolveResult r = solve(m, signal, control, control, retrieval_delay, grid);
            pt.eta_store = r.eta_store;
            pt.eta_tot = r.eta_tot;
            pt.ok = true;
        } catch (const std::exception& e) {
            pt.ok = false;
            pt.error = e.what();
        }
    });
    for (const auto& pt : sweep.points)
        if (!pt.ok) sweep.complete = false;
    return sweep;
}

DetuningSweep sweep_detuning(const MemoryParams& memory, const ControlPulse& control,
                             const std::vector<double>& detunings, const GridConfig& grid,
                             double retrieval_delay, int jobs) {
    return run_sweep(memory, control, detunings, &grid, retrieval_delay, jobs);
}

DetuningSweep sweep_detuning(const MemoryParams& memory, const ControlPulse& control,
                             const std::vector<double>& detunings, double retrieval_delay,
                             int jobs) {
    return run_sweep(memory, control, detunings, nullptr, retrieval_delay, jobs);
}

DetuningOptimum optimal_detuning(const DetuningSweep& sweep) {
    std::vector<const DetuningPoint*> valid;
    for (const auto& pt : sweep.points)
        if (pt.ok) valid.push_back(&pt);
    if (valid.size() < 5) throw DataError("optimal_detuning: need at least 5 valid sweep points");

    std::size_t imax = 0;
    double lo = valid[0]->eta_tot, hi = valid[0]->eta_tot;
    for (std::size_t i = 0; i < valid.size(); ++i) {
        lo = std::min(lo, valid[i]->eta_tot);
        hi = std::max(hi, valid[i]->eta_tot);
        if (valid[i]->eta_tot > valid[imax]->eta_tot) imax = i;
    }

    DetuningOptimum opt;
    // Variation smaller than the solver's own accuracy is not structure: when
    // the points around the maximum form a plateau within tolerance, report a
    // degenerate optimum spanning it instead of refining sub-noise ripple.
    const double flat_tol = std::max(1e-9, 5e-3 * hi);
    std::size_t plo = imax, phi = imax;
    while (plo > 0 && valid[plo - 1]->eta_tot >= hi - flat_tol) --plo;
    while (phi + 1 < valid.size() && valid[phi + 1]->eta_tot >= hi - flat_tol) ++phi;
    if (phi > plo) {
        opt.degenerate = true;
        opt.flat_lo = valid[plo]->delta;
        opt.flat_hi = valid[phi]->delta;
        opt.delta_opt = 0.5 * (opt.flat_lo + opt.flat_hi);
        opt.eta_max = hi;
        return opt;
    }
    if (imax == 0 || imax + 1 == valid.size()) {
        opt.delta_opt = valid[imax]->delta;
        opt.eta_max = valid[imax]->eta_tot;
        return opt;
    }
    const auto [x, y] = parabolic_vertex(valid[imax - 1]->delta, valid[imax - 1]->eta_tot,
                                         valid[imax]->delta, valid[imax]->eta_tot,
                                         valid[imax + 1]->delta, valid[imax + 1]->eta_tot);
    opt.delta_opt = x;
    opt.eta_max = y;
    return opt;
}

bool norm_predicate(const MemoryParams& memory, const ControlPulse& control) {
    const double tol = 1e-9;
    for (const auto& p : regime_presets()) {
        if (std::abs(p.control.area - control.area) < tol &&
            std::abs(p.control.delay - control.delay) < tol &&
            std::abs(p.control.duration - control.duration) < tol) {
            const double chi_prime = adiabaticity(p.memory);
            return chi_prime < adiabaticity(memory);
        }
    }
    throw UndefinedAdiabaticity(
        "norm_predicate: control pulse is not an optimal preset and has no "
        "well-defined adiabaticity");
}

}  // namespace qmem
