#pragma once

#include "qmem/fit.hpp"

namespace qmem {

// Total-efficiency decay versus storage time at one pressure/temperature point.
struct DecayScan {
    std::vector<double> storage_time;  // ns, strictly increasing
    std::vector<double> efficiency;    // normalized %, >= 0
    double pressure_mbar = 0.0;
    double temperature_c = 0.0;

    DecayScan(std::vector<double> t, std::vector<double> eta, double pressure, double temp);
};

struct PhysicalConstantsConfig {
    double mass_atom = 0.0;        // kg (memory species)
    double mass_perturber = 0.0;   // kg (buffer gas)
    double radius_atom = 0.0;      // m, Van der Waals
    double radius_perturber = 0.0; // m
    double lambda_signal = 0.0;    // m
    double lambda_control = 0.0;   // m
    double natural_linewidth = 0.0;  // Hz
};

// Barium memory with argon buffer gas, 553.5 nm signal / 1500 nm control.
PhysicalConstantsConfig barium_argon_defaults();

enum class DecayModel { Auto, Exponential, Gaussian };

// Fits eta0 exp(-t/T) or eta0 exp(-(t/T)^2); T is the 1/e time either way.
// Auto selects Gaussian below 25 mbar (Doppler-dominated) and exponential
// above. params = {eta0, T}. Constant data is flagged "infinite-lifetime".
FitResult fit_lifetime(const DecayScan& scan, DecayModel model = DecayModel::Auto);

// T(P) = a / P; params = {a}. Flagged "poor-fit" when the relative residual
// exceeds 20% (e.g. a low-pressure plateau).
FitResult fit_lifetime_vs_pressure(const std::vector<double>& pressure,
                                   const std::vector<double>& lifetime);

// 1/e time of the spin-wave Doppler dephasing exp(-(dk u t)^2 / 2) with
// dk = 2 pi |1/lambda_s - 1/lambda_c| and u = sqrt(kB T / m). Returns
// infinity when the wavelengths coincide (no phase grating).
double doppler_lifetime(double temp_k, double mass_kg, double lambda_s, double lambda_c);

// Straight line Gamma(P) = Gamma0 + slope * P. params = {Gamma0, slope}.
FitResult fit_linewidth_vs_pressure(const std::vector<double>& pressure_mbar,
                                    const std::vector<double>& linewidth_ghz);

struct CollisionKinetics {
    double mean_free_path;          // m
    double collision_time;          // s
    double diffusion_coefficient;   // m^2/s
};

// Hard-sphere kinetic theory with collision diameter = sum of Van der Waals
// radii and reduced-mass mean relative speed.
CollisionKinetics collision_kinetics(double pressure_pa, double temp_k,
                                     std::pair<double, double> radii_m,
                                     std::pair<double, double> masses_kg);

// F = 1 - 1/(SNR + 1).
double snr_to_fidelity(double snr);

// Least-squares line through (mean photon number, SNR); params = {intercept,
// slope}; returns the line evaluated at <n> = 1 as well.
struct SnrFit {
    FitResult fit;
    double snr_at_one_photon;
};
SnrFit fit_snr_linear(const std::vector<double>& photon_numbers,
                      const std::vector<double>& snr);

struct FiguresOfMerit {
    double tbp;      // lifetime x bandwidth
    double trp;      // lifetime x clock rate
    double cold_od;  // d Gamma / Gamma_nat
};
FiguresOfMerit figures_of_merit(double lifetime_s, double bandwidth_hz, double clock_rate_hz,
                                double d, double linewidth_hz, double natural_linewidth_hz);

// Gaussian a exp(-4 ln2 (x - x0)^2 / w^2); params = {amplitude, center, fwhm}.
// Flat input is flagged "zero-amplitude".
FitResult fit_frequency_response(const std::vector<double>& detunings,
                                 const std::vector<double>& efficiencies);

}  // namespace qmem
