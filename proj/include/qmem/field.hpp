#pragma once

#include <optional>
#include <vector>

#include "qmem/common.hpp"

namespace qmem {

// Uniform grid of normalized time (units of 1/gamma).
struct TimeGrid {
    double t_start;
    double t_end;
    int n_samples;

    TimeGrid(double start, double end, int n);

    double dt() const { return (t_end - t_start) / (n_samples - 1); }
    double at(int i) const { return t_start + dt() * i; }
    double span() const { return t_end - t_start; }
    // Nearest sample index to time t, clamped into range.
    int index_of(double t) const;
    std::vector<double> times() const;

    bool operator==(const TimeGrid& o) const;
};

// Complex envelope sampled on a TimeGrid.
struct TemporalField {
    TimeGrid grid;
    std::vector<cplx> samples;

    TemporalField(TimeGrid g, std::vector<cplx> s);

    double energy() const;            // trapezoidal \int |A|^2 dtau
    double centroid() const;          // energy-weighted center time
    double intensity_fwhm() const;    // FWHM of |A|^2, linearly interpolated
    // Cubic (4-point Lagrange) interpolation of the envelope at arbitrary t.
    cplx interp(double t) const;
};

// Amplitude/phase representation on an increasing frequency axis (units of gamma
// for normalized work, rad/s when physical).
struct SpectralField {
    std::vector<double> omega;
    std::vector<double> amplitude;
    std::vector<double> phase;

    SpectralField(std::vector<double> w, std::vector<double> amp, std::vector<double> ph);

    std::size_t size() const { return omega.size(); }
    double energy() const;  // trapezoidal \int |A(w)|^2 dw
    bool uniform() const;
    cplx value(std::size_t i) const;
};

// Gaussian control pulse. Durations and delays are expressed in units of the
// signal intensity FWHM; area is in units of pi.
struct ControlPulse {
    double area;      // pulse area theta / pi
    double delay;     // center offset from signal center, units of signal FWHM
    double duration;  // intensity FWHM, units of signal FWHM

    ControlPulse(double area_, double delay_, double duration_);
};

// Dimensionless memory configuration: optical depth, signal duration, detuning
// and storage-state decay, all normalized to the excited-state coherence decay
// rate gamma.
struct MemoryParams {
    double d;          // resonant optical depth
    double tau_gamma;  // tau_FWHM * gamma
    double detuning;   // Delta / gamma
    double gamma_b;    // gamma_B / gamma

    MemoryParams(double d_, double tau_gamma_, double detuning_ = 0.0, double gamma_b_ = 0.0);
};

// Default signal center: 25% into the grid, leaving room for retrieval.
double default_signal_center(const TimeGrid& grid);

// Transform-limited Gaussian signal with intensity FWHM tau_gamma, normalized
// to unit trapezoidal energy. Throws GridError if the grid does not span at
// least +-4 tau_gamma around the center.
TemporalField gaussian_signal(double tau_gamma, const TimeGrid& grid,
                              std::optional<double> center = std::nullopt);

// Real, non-negative Gaussian Rabi envelope Omega(tau). The amplitude FWHM is
// sqrt(2) times the intensity FWHM; trapezoidal area equals pulse.area * pi.
TemporalField control_envelope(const ControlPulse& pulse, double signal_tau_gamma,
                               const TimeGrid& grid,
                               std::optional<double> signal_center = std::nullopt);

// Peak Rabi frequency of the analytic envelope.
double control_peak_rabi(const ControlPulse& pulse, double signal_tau_gamma);

// Amplitude FWHM of the Rabi envelope in normalized time.
double control_amplitude_fwhm(const ControlPulse& pulse, double signal_tau_gamma);

}  // namespace qmem
