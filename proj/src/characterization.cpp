#include "qmem/characterization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qmem {

DecayScan::DecayScan(std::vector<double> t, std::vector<double> eta, double pressure,
                     double temp)
    : storage_time(std::move(t)), efficiency(std::move(eta)), pressure_mbar(pressure),
      temperature_c(temp) {
    if (storage_time.size() != efficiency.size())
        throw DataError("DecayScan: column lengths differ");
    for (std::size_t i = 0; i < storage_time.size(); ++i) {
        if (storage_time[i] < 0.0) throw DataError("DecayScan: negative storage time");
        if (i > 0 && !(storage_time[i] > storage_time[i - 1]))
            throw DataError("DecayScan: storage times must be strictly increasing");
        if (efficiency[i] < 0.0) throw DataError("DecayScan: negative efficiency");
    }
}

PhysicalConstantsConfig barium_argon_defaults() {
    PhysicalConstantsConfig c;
    c.mass_atom = 137.327 * atomic_mass_unit;
    c.mass_perturber = 39.948 * atomic_mass_unit;
    c.radius_atom = 2.68e-10;
    c.radius_perturber = 1.88e-10;
    c.lambda_signal = 553.5e-9;
    c.lambda_control = 1500e-9;
    c.natural_linewidth = 120e6;
    return c;
}

FitResult fit_lifetime(const DecayScan& scan, DecayModel model) {
    const std::size_t n = scan.storage_time.size();
    if (n < 4) throw DataError("fit_lifetime: need at least 4 points");

    if (model == DecayModel::Auto)
        model = scan.pressure_mbar < 25.0 ? DecayModel::Gaussian : DecayModel::Exponential;
    const bool gaussian = model == DecayModel::Gaussian;
    const std::string name = gaussian ? "lifetime-gaussian" : "lifetime-exponential";

    const double e_max = *std::max_element(scan.efficiency.begin(), scan.efficiency.end());
    const double e_min = *std::min_element(scan.efficiency.begin(), scan.efficiency.end());
    if (e_max - e_min < 1e-12 * std::max(1.0, e_max)) {
        FitResult out;
        out.model = name;
        out.params = {e_max, std::numeric_limits<double>::infinity()};
        out.std_errs = {0.0, 0.0};
        out.converged = true;
        out.flags.push_back("infinite-lifetime");
        return out;
    }

    auto resid = [&, gaussian](const std::vector<double>& p, std::vector<double>& r) {
        for (std::size_t i = 0; i < n; ++i) {
            const double u = scan.storage_time[i] / p[1];
            const double m = gaussian ? p[0] * std::exp(-u * u) : p[0] * std::exp(-u);
            r[i] = m - scan.efficiency[i];
        }
    };
    const double t_span = scan.storage_time.back() - scan.storage_time.front();
    std::vector<std::vector<double>> starts;
    for (double frac : {0.5, 0.2, 1.0, 2.0, 0.1})
        starts.push_back({e_max, std::max(frac * t_span, 1e-9)});
    return fit_nonlinear(name, resid, static_cast<int>(n), starts);
}

FitResult fit_lifetime_vs_pressure(const std::vector<double>& pressure,
                                   const std::vector<double>& lifetime) {
    if (pressure.size() != lifetime.size() || pressure.size() < 3)
        throw DataError("fit_lifetime_vs_pressure: need at least 3 points");
    for (double p : pressure)
        if (!(p > 0.0)) throw DataError("fit_lifetime_vs_pressure: pressures must be positive");
    const double pmin = *std::min_element(pressure.begin(), pressure.end());
    const double pmax = *std::max_element(pressure.begin(), pressure.end());
    if (pmax - pmin < 1e-12 * pmax)
        throw DataError("fit_lifetime_vs_pressure: single repeated pressure is rank-deficient");

    // T = a/P is linear in a: closed-form least squares.
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < pressure.size(); ++i) {
        const double x = 1.0 / pressure[i];
        num += x * lifetime[i];
        den += x * x;
    }
    const double a = num / den;

    double ssr = 0.0, yy = 0.0;
    for (std::size_t i = 0; i < pressure.size(); ++i) {
        const double r = a / pressure[i] - lifetime[i];
        ssr += r * r;
        yy += lifetime[i] * lifetime[i];
    }
    FitResult out;
    out.model = "inverse-pressure";
    out.params = {a};
    out.residual_norm = std::sqrt(ssr);
    out.converged = true;
    const int dof = static_cast<int>(pressure.size()) - 1;
    out.std_errs = {dof > 0 ? std::sqrt(ssr / dof / den) : 0.0};
    if (out.residual_norm > 0.2 * std::sqrt(yy)) out.flags.push_back("poor-fit");
    return out;
}

double doppler_lifetime(double temp_k, double mass_kg, double lambda_s, double lambda_c) {
    if (!(temp_k > 0.0) || !(mass_kg > 0.0) || !(lambda_s > 0.0) || !(lambda_c > 0.0))
        throw GridError("doppler_lifetime: all arguments must be positive");
    const double dk = 2.0 * pi * std::abs(1.0 / lambda_s - 1.0 / lambda_c);
    if (dk == 0.0) return std::numeric_limits<double>::infinity();
    const double u = std::sqrt(k_boltzmann * temp_k / mass_kg);
    return std::sqrt(2.0) / (dk * u);
}

FitResult fit_linewidth_vs_pressure(const std::vector<double>& pressure_mbar,
                                    const std::vector<double>& linewidth_ghz) {
    FitResult out = fit_line(pressure_mbar, linewidth_ghz);
    out.model = "linewidth-linear";
    return out;
}

CollisionKinetics collision_kinetics(double pressure_pa, double temp_k,
                                     std::pair<double, double> radii_m,
                                     std::pair<double, double> masses_kg) {
    if (!(pressure_pa > 0.0) || !(temp_k > 0.0) || !(radii_m.first > 0.0) ||
        !(radii_m.second > 0.0) || !(masses_kg.first > 0.0) || !(masses_kg.second > 0.0))
        throw GridError("collision_kinetics: all arguments must be positive");
    const double diameter = radii_m.first + radii_m.second;
    const double sigma = pi * diameter * diameter;
    const double kt = k_boltzmann * temp_k;
    const double mu = masses_kg.first * masses_kg.second / (masses_kg.first + masses_kg.second);
    const double n_density = pressure_pa / kt;

    CollisionKinetics k;
    k.mean_free_path = kt / (std::sqrt(2.0) * sigma * pressure_pa);
    const double v_rel = std::sqrt(8.0 * kt / (pi * mu));
    k.collision_time = k.mean_free_path / v_rel;
    k.diffusion_coefficient = (3.0 / 16.0) * std::sqrt(2.0 * pi * kt / mu) / (n_density * sigma);
    return k;
}

double snr_to_fidelity(double snr) {
    if (snr < 0.0) throw GridError("snr_to_fidelity: SNR must be non-negative");
    return 1.0 - 1.0 / (snr + 1.0);
}

SnrFit fit_snr_linear(const std::vector<double>& photon_numbers,
                      const std::vector<double>& snr) {
    for (double v : photon_numbers)
        if (v < 0.0) throw DataError("fit_snr_linear: negative photon number");
    for (double v : snr)
        if (v < 0.0) throw DataError("fit_snr_linear: negative SNR");
    FitResult fit = fit_line(photon_numbers, snr);
    fit.model = "snr-linear";
    const double at_one = fit.params[0] + fit.params[1];
    return SnrFit{std::move(fit), at_one};
}

FiguresOfMerit figures_of_merit(double lifetime_s, double bandwidth_hz, double clock_rate_hz,
                                double d, double linewidth_hz, double natural_linewidth_hz) {
    if (!(lifetime_s > 0.0) || !(bandwidth_hz > 0.0) || !(clock_rate_hz > 0.0) ||
        !(d > 0.0) || !(linewidth_hz > 0.0) || !(natural_linewidth_hz > 0.0))
        throw GridError("figures_of_merit: all arguments must be positive");
    return FiguresOfMerit{lifetime_s * bandwidth_hz, lifetime_s * clock_rate_hz,
                          d * linewidth_hz / natural_linewidth_hz};
}

FitResult fit_frequency_response(const std::vector<double>& detunings,
                                 const std::vector<double>& efficiencies) {
    const std::size_t n = detunings.size();
    if (n < 4 || efficiencies.size() != n)
        throw DataError("fit_frequency_response: need at least 4 points");

    const double e_max = *std::max_element(efficiencies.begin(), efficiencies.end());
    const double e_min = *std::min_element(efficiencies.begin(), efficiencies.end());
    if (e_max - e_min < 1e-12 * std::max(1.0, std::abs(e_max))) {
        FitResult out;
        out.model = "frequency-response-gaussian";
        out.params = {0.0, 0.0, 0.0};
        out.std_errs = {0.0, 0.0, 0.0};
        out.converged = true;
        out.flags.push_back("zero-amplitude");
        return out;
    }

    auto resid = [&](const std::vector<double>& p, std::vector<double>& r) {
        for (std::size_t i = 0; i < n; ++i) {
            const double u = detunings[i] - p[1];
            r[i] = p[0] * std::exp(-four_ln2 * u * u / (p[2] * p[2])) - efficiencies[i];
        }
    };
    const std::size_t ipk = static_cast<std::size_t>(
        std::max_element(efficiencies.begin(), efficiencies.end()) - efficiencies.begin());
    const double span = detunings.back() - detunings.front();
    std::vector<std::vector<double>> starts;
    for (double wf : {0.25, 0.5, 0.1, 1.0, 0.05})
        starts.push_back({e_max, detunings[ipk], std::max(1e-9, wf * std::abs(span))});
    return fit_nonlinear("frequency-response-gaussian", resid, static_cast<int>(n), starts);
}

}  // namespace qmem
