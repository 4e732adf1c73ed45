#pragma once

#include "qmem/protocols.hpp"

namespace qmem {

// Raised when a control pulse is not one of the optimal presets and therefore
// carries no well-defined effective adiabaticity.
struct UndefinedAdiabaticity : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct DetuningPoint {
    double delta;      // Delta / gamma
    double eta_store = 0.0;
    double eta_tot = 0.0;
    bool ok = false;
    std::string error;
};

struct DetuningSweep {
    MemoryParams memory;   // detuning field ignored (swept)
    ControlPulse control;
    double retrieval_delay;
    std::vector<DetuningPoint> points;
    bool complete = true;
};

struct DetuningOptimum {
    double delta_opt = 0.0;
    double eta_max = 0.0;
    bool degenerate = false;  // flat curve within tolerance
    double flat_lo = 0.0;
    double flat_hi = 0.0;
};

// Storage + retrieval solve per detuning; failures are recorded per point and
// the sweep continues. Pass jobs > 1 to fan out.
DetuningSweep sweep_detuning(const MemoryParams& memory, const ControlPulse& control,
                             const std::vector<double>& detunings, const GridConfig& grid,
                             double retrieval_delay, int jobs = 1);

// As above but with a per-point default grid (needed when the detuning range
// changes the stiffness significantly).
DetuningSweep sweep_detuning(const MemoryParams& memory, const ControlPulse& control,
                             const std::vector<double>& detunings, double retrieval_delay,
                             int jobs = 1);

// Parabolic-refined argmax/max of the eta_tot curve. Needs >= 5 valid points.
DetuningOptimum optimal_detuning(const DetuningSweep& sweep);

// True iff the effective adiabaticity chi' of the preset protocol matching
// `control` is strictly less than the adiabaticity of `memory`. Throws
// UndefinedAdiabaticity for non-preset controls.
bool norm_predicate(const MemoryParams& memory, const ControlPulse& control);

// Default detuning axis: [-10, 10] x 41 for chi < 10, [-30, 30] x 61 above
// (the EIT-regime curves are much broader).
std::vector<double> default_detunings(const MemoryParams& memory);

// Retrieval delay used by sweeps when none is specified: 10 signal durations
// past the storage pulse.
double default_retrieval_delay(const MemoryParams& memory);

}  // namespace qmem
