#pragma once

#include "qmem/fit.hpp"
#include "qmem/spectral.hpp"

namespace qmem {

// Frequency-resolved intensity of two delayed pulses combined on a beamsplitter.
struct Interferogram {
    std::vector<double> omega;
    std::vector<double> s;  // spectral intensity, >= 0
    double delta_tau;       // known inter-arm delay

    Interferogram(std::vector<double> w, std::vector<double> intensity, double dtau);
};

// Time-averaged visibility model V(t) = exp(-2 (f1 t^f2)^2).
struct VisibilityModel {
    double f1;
    double f2;
};

// S(w) = |A1|^2 + |A2|^2 + 2 |A1||A2| sin(w dtau + phi2 - phi1); the sine comes
// from the pi/2 beamsplitter phase of the reflected arm.
Interferogram forward_interferogram(const SpectralField& a1, const SpectralField& a2,
                                    double delta_tau);

struct Reconstruction {
    SpectralField a2;               // recovered magnitude and phase of the unknown arm
    std::vector<bool> in_support;   // samples where both magnitudes clear the floor
    double clamp_fraction = 0.0;    // fraction of support with |sin term| > 1
    bool low_confidence = false;    // clamp_fraction > 5%
};

// Per-sample inversion of the interferogram. phi1 is the known reference phase.
// Support is restricted to samples where both magnitudes exceed 5% of their
// peaks; outside support magnitude is kept but the phase is reported as 0.
Reconstruction reconstruct_phase(const Interferogram& ig, const std::vector<double>& a1_mag,
                                 const std::vector<double>& a2_mag,
                                 const std::vector<double>& phi1);

struct TimeDomainReport {
    TemporalField field;
    double c1 = 0.0;  // linear temporal-phase coefficient
    double c2 = 0.0;  // quadratic temporal-phase coefficient
};

// Inverse transform plus least-squares fit of the unwrapped temporal phase to
// c0 + c1 tau + c2 tau^2 over the pulse FWHM window.
TimeDomainReport reconstruct_time_domain(const SpectralField& a2, const TimeGrid& grid);

double visibility_closed_form(const VisibilityModel& model, double t);

// (Imax - Imin)/(Imax + Imin) for a Gaussian phase distribution of width sigma,
// by direct quadrature of the averaged fringe extrema.
double visibility_quadrature(double sigma);

// Nonlinear fit of V(t) = exp(-2 (f1 t^f2)^2); params = {f1, f2}.
FitResult fit_visibility(const std::vector<double>& times,
                         const std::vector<double>& visibilities);

}  // namespace qmem
