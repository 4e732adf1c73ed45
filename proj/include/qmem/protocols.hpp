#pragma once

#include <functional>

#include "qmem/solver.hpp"

namespace qmem {

// Runs body(0..n-1) across up to `jobs` threads; iteration i always writes
// slot i, so results are independent of scheduling.
void parallel_for(int n, int jobs, const std::function<void(int)>& body);

// One of the three resonant storage regimes with its optimal Gaussian control.
struct RegimePreset {
    std::string name;     // ATT, ATS or EIT
    MemoryParams memory;  // detuning 0, gamma_b 0
    ControlPulse control;
};

// Optical-depth bound on storage efficiency, max(0, 1 - 2.9/d).
double eta_opt(double d);

// The three (memory, control) presets: ATT, ATS, EIT.
const std::vector<RegimePreset>& regime_presets();
const RegimePreset& preset(const std::string& name);

// chi = d * tau_FWHM * gamma.
double adiabaticity(const MemoryParams& memory);

struct AreaScanPoint {
    double theta;      // pulse area, units of pi
    double eta_store;
    bool ok;
    std::string error;
};

struct AreaScan {
    std::vector<AreaScanPoint> points;
    bool complete = true;
    // (theta, eta_store) of the first local maximum, parabolic-refined.
    std::optional<std::pair<double, double>> first_maximum;
};

// Storage-only solver run per area; signal centered at tau = 0.
AreaScan sweep_pulse_area(const MemoryParams& memory, const ControlPulse& control_template,
                          const std::vector<double>& areas, const GridConfig& grid,
                          int jobs = 1);

}  // namespace qmem
