#include "qmem/interferometry.hpp"

#include <algorithm>
#include <cmath>

namespace qmem {

Interferogram::Interferogram(std::vector<double> w, std::vector<double> intensity, double dtau)
    : omega(std::move(w)), s(std::move(intensity)), delta_tau(dtau) {
    if (omega.size() != s.size() || omega.size() < 4)
        throw GridError("Interferogram: need matching omega/intensity columns");
    double max_dw = 0.0;
    for (std::size_t i = 1; i < omega.size(); ++i) {
        if (!(omega[i] > omega[i - 1]))
            throw GridError("Interferogram: omega must be strictly increasing");
        max_dw = std::max(max_dw, omega[i] - omega[i - 1]);
    }
    for (double v : s)
        if (!(v >= 0.0)) throw DataError("Interferogram: negative spectral intensity");
    // Fringe period 2 pi / |dtau| must span at least 4 samples.
    if (std::abs(delta_tau) > 0.0 && max_dw * std::abs(delta_tau) > 0.5 * pi)
        throw DataError("Interferogram: fringes not resolvable at this sampling");
}

static void check_shared_axis(const std::vector<double>& w1, const std::vector<double>& w2) {
    if (w1.size() != w2.size()) throw GridError("interferometry: frequency grids differ");
    for (std::size_t i = 0; i < w1.size(); ++i)
        if (std::abs(w1[i] - w2[i]) > 1e-9 * (1.0 + std::abs(w1[i])))
            throw GridError("interferometry: frequency grids differ");
}

Interferogram forward_interferogram(const SpectralField& a1, const SpectralField& a2,
                                    double delta_tau) {
    check_shared_axis(a1.omega, a2.omega);
    std::vector<double> s(a1.size());
    for (std::size_t i = 0; i < a1.size(); ++i) {
        const double m1 = a1.amplitude[i];
        const double m2 = a2.amplitude[i];
        const double phi_dif = a2.phase[i] - a1.phase[i];
        s[i] = m1 * m1 + m2 * m2 +
               2.0 * m1 * m2 * std::sin(a1.omega[i] * delta_tau + phi_dif);
    }
    return Interferogram(a1.omega, std::move(s), delta_tau);
}

Reconstruction reconstruct_phase(const Interferogram& ig, const std::vector<double>& a1_mag,
                                 const std::vector<double>& a2_mag,
                                 const std::vector<double>& phi1) {
    const std::size_t n = ig.omega.size();
    if (a1_mag.size() != n || a2_mag.size() != n || phi1.size() != n)
        throw GridError("reconstruct_phase: arm spectra do not match the interferogram grid");

    const double floor1 = 0.05 * *std::max_element(a1_mag.begin(), a1_mag.end());
    const double floor2 = 0.05 * *std::max_element(a2_mag.begin(), a2_mag.end());
    std::vector<bool> support(n, false);
    std::size_t n_support = 0;
    for (std::size_t i = 0; i < n; ++i) {
        support[i] = a1_mag[i] > floor1 && a2_mag[i] > floor2;
        if (support[i]) ++n_support;
    }
    if (n_support < 10)
        throw DataError("reconstruct_phase: support too small (" + std::to_string(n_support) +
                        " samples)");

    std::vector<double> phase2(n, 0.0);
    std::size_t clamped = 0;
    int n_prev = 0;
    double phi_prev = 0.0, phi_prev2 = 0.0;
    const double two_pi = 2.0 * pi;
    for (std::size_t i = 0; i < n; ++i) {
        if (!support[i]) continue;
        const double denom = 2.0 * a1_mag[i] * a2_mag[i];
        double sin_term = (ig.s[i] - a1_mag[i] * a1_mag[i] - a2_mag[i] * a2_mag[i]) / denom;
        if (std::abs(sin_term) > 1.0 + 1e-9) ++clamped;
        sin_term = std::clamp(sin_term, -1.0, 1.0);
        const double theta = std::asin(sin_term);
        const double carrier = ig.omega[i] * ig.delta_tau;
        // Linear prediction from the two previous support samples keeps the
        // tracker on the correct arcsine branch where the mirror branch
        // crosses it (sin_term near +-1, where both branches coincide).
        const double target = n_prev >= 2 ? 2.0 * phi_prev - phi_prev2
                              : n_prev == 1 ? phi_prev
                                            : 0.0;
        // Two arcsine branches, each up to a 2 pi k; keep the one closest to
        // the predicted continuation.
        double best = 0.0, best_dist = -1.0;
        for (double base : {theta, pi - theta}) {
            const double k = std::round((target + carrier - base) / two_pi);
            const double cand = base + two_pi * k - carrier;
            const double dist = std::abs(cand - target);
            if (best_dist < 0.0 || dist < best_dist) {
                best = cand;
                best_dist = dist;
            }
        }
        phi_prev2 = phi_prev;
        phi_prev = best;
        ++n_prev;
        phase2[i] = best + phi1[i];
    }

    Reconstruction out{SpectralField(ig.omega, a2_mag, std::move(phase2)), std::move(support),
                       static_cast<double>(clamped) / static_cast<double>(n_support), false};
    out.low_confidence = out.clamp_fraction > 0.05;
    return out;
}

TimeDomainReport reconstruct_time_domain(const SpectralField& a2, const TimeGrid& grid) {
    TemporalField field = to_time(a2, grid);

    std::vector<double> i2(field.samples.size());
    for (std::size_t k = 0; k < i2.size(); ++k) i2[k] = std::norm(field.samples[k]);
    const auto it_pk = std::max_element(i2.begin(), i2.end());
    if (!(*it_pk > 0.0)) throw DataError("reconstruct_time_domain: empty field");
    const double half = 0.5 * *it_pk;
    const int ipk = static_cast<int>(it_pk - i2.begin());
    int lo = ipk, hi = ipk;
    while (lo > 0 && i2[static_cast<std::size_t>(lo - 1)] >= half) --lo;
    while (hi + 1 < grid.n_samples && i2[static_cast<std::size_t>(hi + 1)] >= half) ++hi;
    if (hi - lo < 4)
        throw DataError("reconstruct_time_domain: FWHM window too narrow for a phase fit");

    std::vector<double> tau, phi;
    double prev = std::arg(field.samples[static_cast<std::size_t>(lo)]);
    double offset = 0.0;
    for (int i = lo; i <= hi; ++i) {
        double p = std::arg(field.samples[static_cast<std::size_t>(i)]);
        while (p + offset - prev > pi) offset -= 2.0 * pi;
        while (p + offset - prev < -pi) offset += 2.0 * pi;
        prev = p + offset;
        tau.push_back(grid.at(i));
        phi.push_back(prev);
    }
    const std::vector<double> c = polyfit(tau, phi, 2);
    return TimeDomainReport{std::move(field), c[1], c[2]};
}

double visibility_closed_form(const VisibilityModel& model, double t) {
    if (t < 0.0) throw GridError("visibility_closed_form: negative integration time");
    const double sigma = model.f1 * std::pow(t, model.f2);
    return std::exp(-2.0 * sigma * sigma);
}

double visibility_quadrature(double sigma) {
    if (sigma < 0.0) throw GridError("visibility_quadrature: negative sigma");
    if (sigma == 0.0) return 1.0;
    const double L = std::max(10.0 * sigma, 1.0);
    const int n = 8001;
    const double dphi = 2.0 * L / (n - 1);
    // V = <cos 2phi> over the Gaussian phase distribution; evaluate the
    // averaged fringe extrema explicitly.
    double i_max = 0.0, i_min = 0.0, norm = 0.0;
    for (int i = 0; i < n; ++i) {
        const double phi = -L + dphi * i;
        double w = std::exp(-phi * phi / (2.0 * sigma * sigma));
        if (i == 0 || i == n - 1) w *= 0.5;
        const double s = std::sin(phi);
        const double c = std::sin(phi + 0.5 * pi);
        i_max += w * c * c;
        i_min += w * s * s;
        norm += w;
    }
    (void)norm;
    return (i_max - i_min) / (i_max + i_min);
}

FitResult fit_visibility(const std::vector<double>& times,
                         const std::vector<double>& visibilities) {
    if (times.size() != visibilities.size() || times.size() < 3)
        throw DataError("fit_visibility: need at least 3 (time, visibility) points");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < 0.0) throw DataError("fit_visibility: negative integration time");
        if (!(visibilities[i] > 0.0 && visibilities[i] <= 1.0 + 1e-12))
            throw DataError("fit_visibility: visibilities must lie in (0, 1]");
    }

    const int n = static_cast<int>(times.size());
    auto resid = [&](const std::vector<double>& p, std::vector<double>& r) {
        for (int i = 0; i < n; ++i) {
            const double t = times[static_cast<std::size_t>(i)];
            const double sigma = p[0] * (t > 0.0 ? std::pow(t, p[1]) : 0.0);
            r[static_cast<std::size_t>(i)] =
                std::exp(-2.0 * sigma * sigma) - visibilities[static_cast<std::size_t>(i)];
        }
    };

    // Seed f1 from the lowest measured visibility.
    const double v_min =
        std::max(1e-6, *std::min_element(visibilities.begin(), visibilities.end()));
    const double t_max = std::max(1e-12, *std::max_element(times.begin(), times.end()));
    const double sigma_end = std::sqrt(std::max(0.0, -0.5 * std::log(v_min)));
    std::vector<std::vector<double>> starts;
    for (double f2 : {0.3, 0.5, 1.0, 0.1, 0.8})
        starts.push_back({sigma_end / std::pow(t_max, f2), f2});
    return fit_nonlinear("visibility", resid, n, starts);
}

}  // namespace qmem
