#include "qmem/spectral.hpp"

#include <algorithm>
#include <cmath>

namespace qmem {

namespace detail {

static bool is_pow2(std::size_t n) { return n && (n & (n - 1)) == 0; }

void dft(std::vector<cplx>& x, int sign) {
    const std::size_t n = x.size();
    if (n < 2) return;
    if (is_pow2(n)) {
        // iterative radix-2 Cooley-Tukey
        for (std::size_t i = 1, j = 0; i < n; ++i) {
            std::size_t bit = n >> 1;
            for (; j & bit; bit >>= 1) j ^= bit;
            j ^= bit;
            if (i < j) std::swap(x[i], x[j]);
        }
        for (std::size_t len = 2; len <= n; len <<= 1) {
            const double ang = sign * 2.0 * pi / static_cast<double>(len);
            const cplx wl(std::cos(ang), std::sin(ang));
            for (std::size_t i = 0; i < n; i += len) {
                cplx w(1.0, 0.0);
                for (std::size_t k = 0; k < len / 2; ++k) {
                    const cplx u = x[i + k];
                    const cplx v = x[i + k + len / 2] * w;
                    x[i + k] = u + v;
                    x[i + k + len / 2] = u - v;
                    w *= wl;
                }
            }
        }
        return;
    }
    // direct evaluation for awkward lengths
    std::vector<cplx> out(n);
    for (std::size_t m = 0; m < n; ++m) {
        cplx acc(0.0, 0.0);
        const double base = sign * 2.0 * pi * static_cast<double>(m) / static_cast<double>(n);
        cplx w(1.0, 0.0);
        const cplx step(std::cos(base), std::sin(base));
        for (std::size_t k = 0; k < n; ++k) {
            if (k % 64 == 0) {
                const double a = base * static_cast<double>(k);
                w = cplx(std::cos(a), std::sin(a));
            }
            acc += x[k] * w;
            w *= step;
        }
        out[m] = acc;
    }
    x = std::move(out);
}

}  // namespace detail

SpectralField to_spectrum(const TemporalField& field) {
    const int n = field.grid.n_samples;
    const double dt = field.grid.dt();
    const double t0 = field.grid.t_start;
    const double dw = 2.0 * pi / (n * dt);

    // Shift so the DFT bins map onto a zero-centered frequency axis.
    std::vector<cplx> y(field.samples);
    for (int k = 1; k < n; k += 2) y[static_cast<std::size_t>(k)] = -y[static_cast<std::size_t>(k)];
    detail::dft(y, -1);

    std::vector<double> omega(static_cast<std::size_t>(n)), amp(static_cast<std::size_t>(n)),
        phase(static_cast<std::size_t>(n));
    const double scale = dt / std::sqrt(2.0 * pi);
    for (int m = 0; m < n; ++m) {
        const double w = dw * (m - n / 2);
        const cplx v = y[static_cast<std::size_t>(m)] * scale *
                       std::exp(cplx(0.0, -w * t0));
        omega[static_cast<std::size_t>(m)] = w;
        amp[static_cast<std::size_t>(m)] = std::abs(v);
        phase[static_cast<std::size_t>(m)] = amp[static_cast<std::size_t>(m)] > 0.0
                                                 ? std::arg(v)
                                                 : 0.0;
    }
    return SpectralField(std::move(omega), std::move(amp), std::move(phase));
}

TemporalField to_time(const SpectralField& spec, const TimeGrid& grid) {
    const std::size_t m = spec.size();
    // Quadrature weights: rectangle for a uniform axis (exact inverse DFT),
    // midpoint intervals otherwise.
    std::vector<double> weight(m);
    if (spec.uniform()) {
        std::fill(weight.begin(), weight.end(), spec.omega[1] - spec.omega[0]);
    } else {
        weight[0] = 0.5 * (spec.omega[1] - spec.omega[0]);
        weight[m - 1] = 0.5 * (spec.omega[m - 1] - spec.omega[m - 2]);
        for (std::size_t i = 1; i + 1 < m; ++i)
            weight[i] = 0.5 * (spec.omega[i + 1] - spec.omega[i - 1]);
    }

    const int n = grid.n_samples;
    const double dt = grid.dt();
    std::vector<cplx> out(static_cast<std::size_t>(n), cplx(0.0, 0.0));
    const double norm = 1.0 / std::sqrt(2.0 * pi);
    for (std::size_t i = 0; i < m; ++i) {
        const cplx v = spec.value(i) * weight[i] * norm;
        if (v == cplx(0.0, 0.0)) continue;
        const double w = spec.omega[i];
        const cplx step(std::cos(w * dt), std::sin(w * dt));
        cplx ph = std::exp(cplx(0.0, w * grid.t_start));
        for (int k = 0; k < n; ++k) {
            if (k % 64 == 0) {
                const double a = w * grid.at(k);
                ph = cplx(std::cos(a), std::sin(a));
            }
            out[static_cast<std::size_t>(k)] += v * ph;
            ph *= step;
        }
    }
    return TemporalField(grid, std::move(out));
}

TemporalField signal_from_spectrum(const SpectralField& spec, bool flat_phase,
                                   const TimeGrid& grid) {
    double peak = 0.0;
    for (double a : spec.amplitude) peak = std::max(peak, a);
    if (peak <= 0.0) throw DataError("signal_from_spectrum: spectrum is all zero");
    SpectralField s = spec;
    if (flat_phase) std::fill(s.phase.begin(), s.phase.end(), 0.0);
    TemporalField f = to_time(s, grid);
    const double e = f.energy();
    if (!(e > 0.0)) throw NumericalError("signal_from_spectrum: synthesized field has no energy");
    const double inv = 1.0 / std::sqrt(e);
    for (auto& x : f.samples) x *= inv;
    return f;
}

}  // namespace qmem
