#include "qmem/field.hpp"

#include <algorithm>
#include <cmath>

namespace qmem {

std::pair<double, double> parabolic_vertex(double x0, double y0, double x1, double y1,
                                           double x2, double y2) {
    const double d1 = (y1 - y0) / (x1 - x0);
    const double d2 = (y2 - y1) / (x2 - x1);
    const double curv = (d2 - d1) / (x2 - x0);
    if (std::abs(curv) < 1e-300) return {x1, y1};
    // Newton form through the three points: y0 + d1(x-x0) + curv(x-x0)(x-x1)
    const double xv = 0.5 * (x0 + x1 - d1 / curv);
    const double yv = y0 + d1 * (xv - x0) + curv * (xv - x0) * (xv - x1);
    return {xv, yv};
}

TimeGrid::TimeGrid(double start, double end, int n) : t_start(start), t_end(end), n_samples(n) {
    if (!(end > start)) throw GridError("TimeGrid: t_end must exceed t_start");
    if (n < 16) throw GridError("TimeGrid: need at least 16 samples");
}

int TimeGrid::index_of(double t) const {
    int i = static_cast<int>(std::lround((t - t_start) / dt()));
    return std::clamp(i, 0, n_samples - 1);
}

std::vector<double> TimeGrid::times() const {
    std::vector<double> v(static_cast<std::size_t>(n_samples));
    for (int i = 0; i < n_samples; ++i) v[static_cast<std::size_t>(i)] = at(i);
    return v;
}

bool TimeGrid::operator==(const TimeGrid& o) const {
    return n_samples == o.n_samples && std::abs(t_start - o.t_start) < 1e-12 * (1 + std::abs(t_start)) &&
           std::abs(t_end - o.t_end) < 1e-12 * (1 + std::abs(t_end));
}

TemporalField::TemporalField(TimeGrid g, std::vector<cplx> s) : grid(g), samples(std::move(s)) {
    if (samples.size() != static_cast<std::size_t>(grid.n_samples))
        throw GridError("TemporalField: sample count does not match grid");
}

double TemporalField::energy() const {
    std::vector<double> i2(samples.size());
    for (std::size_t k = 0; k < samples.size(); ++k) i2[k] = std::norm(samples[k]);
    return trapz(i2, grid.dt());
}

double TemporalField::centroid() const {
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < samples.size(); ++k) {
        const double w = std::norm(samples[k]);
        num += w * grid.at(static_cast<int>(k));
        den += w;
    }
    if (den <= 0.0) throw NumericalError("TemporalField: zero-energy field has no centroid");
    return num / den;
}

double TemporalField::intensity_fwhm() const {
    std::vector<double> i2(samples.size());
    for (std::size_t k = 0; k < samples.size(); ++k) i2[k] = std::norm(samples[k]);
    const auto it = std::max_element(i2.begin(), i2.end());
    const double half = 0.5 * *it;
    if (half <= 0.0) throw NumericalError("TemporalField: zero field has no FWHM");
    const int ipk = static_cast<int>(it - i2.begin());
    const double dt = grid.dt();
    auto cross = [&](int from, int step) {
        for (int i = from; i + step >= 0 && i + step < grid.n_samples; i += step) {
            const double a = i2[static_cast<std::size_t>(i)];
            const double b = i2[static_cast<std::size_t>(i + step)];
            if ((a >= half) != (b >= half)) {
                const double frac = (half - a) / (b - a);
                return grid.at(i) + frac * step * dt;
            }
        }
        throw GridError("TemporalField: pulse not contained in grid (FWHM crossing missing)");
    };
    return cross(ipk, +1) - cross(ipk, -1);
}

cplx TemporalField::interp(double t) const {
    const double dt = grid.dt();
    const double x = (t - grid.t_start) / dt;
    int i1 = static_cast<int>(std::floor(x));
    i1 = std::clamp(i1, 1, grid.n_samples - 3);
    const double u = x - i1;
    // 4-point Lagrange on nodes i1-1..i1+2
    const cplx f0 = samples[static_cast<std::size_t>(i1 - 1)];
    const cplx f1 = samples[static_cast<std::size_t>(i1)];
    const cplx f2 = samples[static_cast<std::size_t>(i1 + 1)];
    const cplx f3 = samples[static_cast<std::size_t>(i1 + 2)];
    const double um1 = u + 1.0, u1 = u - 1.0, u2 = u - 2.0;
    return f0 * (u * u1 * u2 / -6.0) + f1 * (um1 * u1 * u2 / 2.0) +
           f2 * (um1 * u * u2 / -2.0) + f3 * (um1 * u * u1 / 6.0);
}

SpectralField::SpectralField(std::vector<double> w, std::vector<double> amp, std::vector<double> ph)
    : omega(std::move(w)), amplitude(std::move(amp)), phase(std::move(ph)) {
    if (omega.size() != amplitude.size() || omega.size() != phase.size())
        throw GridError("SpectralField: column lengths differ");
    if (omega.size() < 2) throw GridError("SpectralField: need at least 2 samples");
    for (std::size_t i = 1; i < omega.size(); ++i)
        if (!(omega[i] > omega[i - 1]))
            throw GridError("SpectralField: omega must be strictly increasing");
    for (double a : amplitude)
        if (!(a >= 0.0)) throw GridError("SpectralField: amplitude must be non-negative");
}

double SpectralField::energy() const {
    std::vector<double> i2(amplitude.size());
    for (std::size_t k = 0; k < amplitude.size(); ++k) i2[k] = amplitude[k] * amplitude[k];
    return trapz(omega, i2);
}

bool SpectralField::uniform() const {
    const double dw = omega[1] - omega[0];
    for (std::size_t i = 1; i < omega.size(); ++i)
        if (std::abs((omega[i] - omega[i - 1]) - dw) > 1e-9 * std::abs(dw)) return false;
    return true;
}

cplx SpectralField::value(std::size_t i) const {
    return amplitude[i] * std::exp(cplx(0.0, phase[i]));
}

ControlPulse::ControlPulse(double area_, double delay_, double duration_)
    : area(area_), delay(delay_), duration(duration_) {
    if (area < 0.0) throw GridError("ControlPulse: area must be non-negative");
    if (!(duration > 0.0)) throw GridError("ControlPulse: duration must be positive");
}

MemoryParams::MemoryParams(double d_, double tau_gamma_, double detuning_, double gamma_b_)
    : d(d_), tau_gamma(tau_gamma_), detuning(detuning_), gamma_b(gamma_b_) {
    if (!(d > 0.0)) throw GridError("MemoryParams: optical depth must be positive");
    if (!(tau_gamma > 0.0)) throw GridError("MemoryParams: tau_gamma must be positive");
    if (gamma_b < 0.0) throw GridError("MemoryParams: gamma_b must be non-negative");
}

double default_signal_center(const TimeGrid& grid) {
    return grid.t_start + 0.25 * grid.span();
}

TemporalField gaussian_signal(double tau_gamma, const TimeGrid& grid, std::optional<double> center) {
    if (!(tau_gamma > 0.0)) throw GridError("gaussian_signal: tau_gamma must be positive");
    const double t0 = center.value_or(default_signal_center(grid));
    if (t0 - grid.t_start < 4.0 * tau_gamma || grid.t_end - t0 < 4.0 * tau_gamma)
        throw GridError("gaussian_signal: grid must span +-4 tau_gamma around the pulse center");
    std::vector<cplx> a(static_cast<std::size_t>(grid.n_samples));
    for (int i = 0; i < grid.n_samples; ++i) {
        const double u = grid.at(i) - t0;
        a[static_cast<std::size_t>(i)] = std::exp(-two_ln2 * u * u / (tau_gamma * tau_gamma));
    }
    TemporalField f(grid, std::move(a));
    const double norm = std::sqrt(f.energy());
    for (auto& s : f.samples) s /= norm;
    return f;
}

double control_amplitude_fwhm(const ControlPulse& pulse, double signal_tau_gamma) {
    return std::sqrt(2.0) * pulse.duration * signal_tau_gamma;
}

double control_peak_rabi(const ControlPulse& pulse, double signal_tau_gamma) {
    const double w = control_amplitude_fwhm(pulse, signal_tau_gamma);
    return pulse.area * pi * std::sqrt(four_ln2 / pi) / w;
}

TemporalField control_envelope(const ControlPulse& pulse, double signal_tau_gamma,
                               const TimeGrid& grid, std::optional<double> signal_center) {
    const double t0 = signal_center.value_or(default_signal_center(grid)) +
                      pulse.delay * signal_tau_gamma;
    const double w = control_amplitude_fwhm(pulse, signal_tau_gamma);
    const double omega0 = control_peak_rabi(pulse, signal_tau_gamma);
    std::vector<cplx> a(static_cast<std::size_t>(grid.n_samples));
    for (int i = 0; i < grid.n_samples; ++i) {
        const double u = grid.at(i) - t0;
        a[static_cast<std::size_t>(i)] = omega0 * std::exp(-four_ln2 * u * u / (w * w));
    }
    return TemporalField(grid, std::move(a));
}

}  // namespace qmem
