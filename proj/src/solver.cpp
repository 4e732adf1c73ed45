#include "qmem/solver.hpp"

#include <algorithm>
#include <cmath>

namespace qmem {

GridConfig::GridConfig(int nz, int nt, double start, double end)
    : n_z(nz), n_t(nt), t_start(start), t_end(end) {
    if (n_z < 32) throw GridError("GridConfig: need n_z >= 32");
    if (n_t < 512) throw GridError("GridConfig: need n_t >= 512");
    if (!(end > start)) throw GridError("GridConfig: t_end must exceed t_start");
}

double EnergyLedger::closure_error() const {
    const double accounted =
        e_out + e_pol_final + e_spin_final + e_pol_decay + e_spin_decay;
    return std::abs(e_in - accounted) / e_in;
}

namespace {

// Up to two Gaussian Rabi envelopes, evaluated analytically at stage times.
struct RabiDrive {
    struct Lobe {
        double peak, center, width;  // width = amplitude FWHM
    };
    std::vector<Lobe> lobes;

    double operator()(double tau) const {
        double om = 0.0;
        for (const auto& l : lobes) {
            const double u = (tau - l.center) / l.width;
            om += l.peak * std::exp(-four_ln2 * u * u);
        }
        return om;
    }
};

struct PulseWindow {
    double center = 0.0;
    double amp_fwhm = 0.0;
};

int next_pow2(int n) {
    int p = 512;
    while (p < n) p <<= 1;
    return p;
}

}  // namespace

GridConfig default_grid(const MemoryParams& memory, const ControlPulse& storage_pulse,
                        const std::optional<ControlPulse>& retrieval_pulse,
                        double retrieval_delay, int n_z) {
    const double tg = memory.tau_gamma;
    const double ws = control_amplitude_fwhm(storage_pulse, tg);
    const double cs = storage_pulse.delay * tg;
    double t_lo = std::min(-8.0 * tg, cs - 6.0 * ws);
    double t_hi = std::max(8.0 * tg, cs + 6.0 * ws);
    double peak = control_peak_rabi(storage_pulse, tg);
    if (retrieval_pulse) {
        const ControlPulse& r = *retrieval_pulse;
        const double wr = control_amplitude_fwhm(r, tg);
        const double cr = r.delay * tg + retrieval_delay;
        t_hi = std::max({t_hi, cr + 6.0 * wr, cr + 8.0 * tg});
        t_lo = std::min(t_lo, cr - 6.0 * wr);
        peak = std::max(peak, control_peak_rabi(r, tg));
    }
    const double rate = std::max({std::hypot(1.0, memory.detuning), 0.5 * peak, memory.gamma_b});
    const double dt = std::min(0.1 / rate, tg / 32.0);
    const int n_t = next_pow2(static_cast<int>(std::ceil((t_hi - t_lo) / dt)) + 1);
    return GridConfig(n_z, n_t, t_lo, t_hi);
}

SolveResult solve(const MemoryParams& memory, const TemporalField& signal,
                  const ControlPulse& storage_pulse,
                  const std::optional<ControlPulse>& retrieval_pulse,
                  double retrieval_delay, const GridConfig& grid,
                  const SolveOptions& options) {
    const double e_sig = signal.energy();
    if (!(e_sig > 0.0)) throw GridError("solve: signal energy must be positive");
    if (retrieval_pulse || retrieval_delay != 0.0) {
        if (retrieval_delay < 0.0) throw GridError("solve: retrieval_delay must be non-negative");
    }

    const TimeGrid tgrid = grid.time_grid();
    const double tg = memory.tau_gamma;
    const double t_sig = signal.centroid();

    // Pulse geometry and drive.
    RabiDrive drive;
    PulseWindow storage_win{t_sig + storage_pulse.delay * tg,
                            control_amplitude_fwhm(storage_pulse, tg)};
    if (storage_pulse.area > 0.0)
        drive.lobes.push_back({control_peak_rabi(storage_pulse, tg), storage_win.center,
                               storage_win.amp_fwhm});
    std::optional<PulseWindow> retrieval_win;
    if (retrieval_pulse) {
        const ControlPulse& r = *retrieval_pulse;
        retrieval_win = PulseWindow{t_sig + r.delay * tg + retrieval_delay,
                                    control_amplitude_fwhm(r, tg)};
        if (r.area > 0.0)
            drive.lobes.push_back(
                {control_peak_rabi(r, tg), retrieval_win->center, retrieval_win->amp_fwhm});
    }

    // Margin checks: signal and every control lobe must sit well inside the grid.
    auto require_margin = [&](double lo, double hi, const char* what) {
        if (lo < tgrid.t_start || hi > tgrid.t_end)
            throw GridError(std::string("solve: grid does not cover ") + what +
                            " with the required margin");
    };
    require_margin(t_sig - 4.0 * tg, t_sig + 4.0 * tg, "the signal pulse");
    require_margin(storage_win.center - 4.0 * storage_win.amp_fwhm,
                   storage_win.center + 4.0 * storage_win.amp_fwhm, "the storage control pulse");
    if (retrieval_win)
        require_margin(retrieval_win->center - 4.0 * retrieval_win->amp_fwhm,
                       retrieval_win->center + 4.0 * retrieval_win->amp_fwhm,
                       "the retrieval control pulse");

    const double storage_end = storage_win.center + 2.0 * storage_win.amp_fwhm;
    const double retrieval_start =
        retrieval_win ? retrieval_win->center - 2.0 * retrieval_win->amp_fwhm : tgrid.t_end;
    double tau_mid;
    if (retrieval_start > storage_end) {
        tau_mid = 0.5 * (storage_end + retrieval_start);
    } else if (retrieval_win) {
        tau_mid = 0.5 * (storage_win.center + retrieval_win->center);  // overlapping pulses
    } else {
        tau_mid = std::min(storage_end, tgrid.t_end);
    }

    const int nz = grid.n_z;
    const int nt = grid.n_t;
    const double dz = grid.dz();
    const double dt = tgrid.dt();
    const double sd = std::sqrt(memory.d);
    const cplx gbar(1.0, -memory.detuning);
    const double gb = memory.gamma_b;
    const cplx ihalf(0.0, -0.5);

    const bool signal_on_grid = signal.grid == tgrid;
    auto boundary = [&](double tau) -> cplx {
        if (tau < signal.grid.t_start || tau > signal.grid.t_end) return cplx(0.0, 0.0);
        return signal.interp(tau);
    };
    auto boundary_at = [&](int it) -> cplx {
        return signal_on_grid ? signal.samples[static_cast<std::size_t>(it)]
                              : boundary(tgrid.at(it));
    };

    const std::size_t n = static_cast<std::size_t>(nz);
    std::vector<cplx> P(n, cplx{}), B(n, cplx{});
    std::vector<cplx> k1p(n), k1b(n), k2p(n), k2b(n), k3p(n), k3b(n), k4p(n), k4b(n);
    std::vector<cplx> tp(n), tb(n), a(n);

    // dA/dz has no time derivative, so A is slaved to P by trapezoidal marching
    // from the boundary at every stage.
    auto deriv = [&](double tau, cplx a_in, const std::vector<cplx>& p,
                     const std::vector<cplx>& b, std::vector<cplx>& dp,
                     std::vector<cplx>& db) {
        const double om = drive(tau);
        a[0] = a_in;
        const double half = 0.5 * sd * dz;
        for (int j = 0; j + 1 < nz; ++j) {
            const std::size_t k = static_cast<std::size_t>(j);
            a[k + 1] = a[k] - half * (p[k] + p[k + 1]);
        }
        for (std::size_t k = 0; k < n; ++k) {
            dp[k] = -gbar * p[k] + sd * a[k] + ihalf * om * b[k];
            db[k] = -gb * b[k] + ihalf * om * p[k];
        }
    };

    auto z_norm = [&](const std::vector<cplx>& f) {
        std::vector<double> i2(n);
        for (std::size_t k = 0; k < n; ++k) i2[k] = std::norm(f[k]);
        return trapz(i2, dz);
    };

    std::vector<cplx> a_out(static_cast<std::size_t>(nt));
    std::vector<cplx> a_in_samples(static_cast<std::size_t>(nt));
    std::vector<double> spin_norm(static_cast<std::size_t>(nt));
    std::vector<double> pol_norm(static_cast<std::size_t>(nt));

    std::optional<FieldHistory> history;
    if (options.record_fields) {
        history = FieldHistory{};
        history->n_z = nz;
        history->n_t = nt;
        history->a.resize(static_cast<std::size_t>(nz) * nt);
        history->p.resize(static_cast<std::size_t>(nz) * nt);
        history->b.resize(static_cast<std::size_t>(nz) * nt);
    }

    for (int it = 0; it < nt; ++it) {
        const double tau = tgrid.at(it);
        const cplx a_in = boundary_at(it);
        deriv(tau, a_in, P, B, k1p, k1b);
        a_out[static_cast<std::size_t>(it)] = a[n - 1];
        a_in_samples[static_cast<std::size_t>(it)] = a_in;
        spin_norm[static_cast<std::size_t>(it)] = z_norm(B);
        pol_norm[static_cast<std::size_t>(it)] = z_norm(P);
        if (history) {
            std::copy(a.begin(), a.end(), history->a.begin() + static_cast<std::size_t>(it) * nz);
            std::copy(P.begin(), P.end(), history->p.begin() + static_cast<std::size_t>(it) * nz);
            std::copy(B.begin(), B.end(), history->b.begin() + static_cast<std::size_t>(it) * nz);
        }
        if (it % 32 == 0 || it == nt - 1) {
            for (std::size_t k = 0; k < n; ++k) {
                if (!std::isfinite(P[k].real()) || !std::isfinite(P[k].imag()) ||
                    !std::isfinite(B[k].real()) || !std::isfinite(B[k].imag()))
                    throw NumericalError("solve: non-finite field at z index " +
                                         std::to_string(k) + ", time step " + std::to_string(it));
            }
        }
        if (it == nt - 1) break;

        const double th = tau + 0.5 * dt;
        const cplx a_half = boundary(th);
        for (std::size_t k = 0; k < n; ++k) {
            tp[k] = P[k] + 0.5 * dt * k1p[k];
            tb[k] = B[k] + 0.5 * dt * k1b[k];
        }
        deriv(th, a_half, tp, tb, k2p, k2b);
        for (std::size_t k = 0; k < n; ++k) {
            tp[k] = P[k] + 0.5 * dt * k2p[k];
            tb[k] = B[k] + 0.5 * dt * k2b[k];
        }
        deriv(th, a_half, tp, tb, k3p, k3b);
        const double t1 = tau + dt;
        const cplx a_full = signal_on_grid ? signal.samples[static_cast<std::size_t>(it + 1)]
                                           : boundary(t1);
        for (std::size_t k = 0; k < n; ++k) {
            tp[k] = P[k] + dt * k3p[k];
            tb[k] = B[k] + dt * k3b[k];
        }
        deriv(t1, a_full, tp, tb, k4p, k4b);
        const double w = dt / 6.0;
        for (std::size_t k = 0; k < n; ++k) {
            P[k] += w * (k1p[k] + 2.0 * k2p[k] + 2.0 * k3p[k] + k4p[k]);
            B[k] += w * (k1b[k] + 2.0 * k2b[k] + 2.0 * k3b[k] + k4b[k]);
        }
    }

    // Efficiencies and ledger.
    std::vector<double> in_i2(static_cast<std::size_t>(nt)), out_i2(static_cast<std::size_t>(nt));
    for (int it = 0; it < nt; ++it) {
        in_i2[static_cast<std::size_t>(it)] = std::norm(a_in_samples[static_cast<std::size_t>(it)]);
        out_i2[static_cast<std::size_t>(it)] = std::norm(a_out[static_cast<std::size_t>(it)]);
    }
    const double e_in = trapz(in_i2, dt);
    if (!(e_in > 0.0)) throw GridError("solve: signal carries no energy on the solver grid");

    EnergyLedger ledger;
    ledger.e_in = e_in;
    ledger.e_out = trapz(out_i2, dt);
    ledger.e_pol_final = pol_norm.back();
    ledger.e_spin_final = spin_norm.back();
    ledger.e_pol_decay = 2.0 * trapz(pol_norm, dt);
    ledger.e_spin_decay = 2.0 * gb * trapz(spin_norm, dt);

    const int i_mid = tgrid.index_of(tau_mid);
    const double eta_store = spin_norm[static_cast<std::size_t>(i_mid)] / e_in;
    std::vector<double> tail(out_i2.begin() + i_mid, out_i2.end());
    const double eta_tot = trapz(tail, dt) / e_in;
    const double eta_ret = eta_store > 0.0 ? eta_tot / eta_store : 0.0;

    SolveResult result{TemporalField(tgrid, std::move(a_out)),
                       linspace(0.0, 1.0, nz),
                       std::move(B),
                       eta_store,
                       eta_ret,
                       eta_tot,
                       ledger,
                       tau_mid,
                       storage_end,
                       retrieval_start,
                       std::move(spin_norm),
                       std::move(history)};
    return result;
}

std::vector<cplx> transmission_spectrum_linear(const MemoryParams& memory,
                                               const std::vector<double>& omega) {
    std::vector<cplx> h(omega.size());
    for (std::size_t i = 0; i < omega.size(); ++i)
        h[i] = std::exp(-memory.d / cplx(1.0, omega[i] - memory.detuning));
    return h;
}

std::pair<double, double> photon_counting_efficiency(const SolveResult& result,
                                                     double storage_window_end) {
    const TimeGrid& g = result.transmitted.grid;
    if (storage_window_end < g.t_start || storage_window_end > g.t_end)
        throw GridError("photon_counting_efficiency: window end outside the grid");
    if (result.retrieval_start > result.storage_end &&
        (storage_window_end < result.storage_end || storage_window_end > result.retrieval_start))
        throw GridError("photon_counting_efficiency: window end must lie between the pulses");
    const int iw = g.index_of(storage_window_end);
    std::vector<double> i2(result.transmitted.samples.size());
    for (std::size_t k = 0; k < i2.size(); ++k) i2[k] = std::norm(result.transmitted.samples[k]);
    std::vector<double> head(i2.begin(), i2.begin() + iw + 1);
    std::vector<double> tail(i2.begin() + iw, i2.end());
    const double e_in = result.ledger.e_in;
    const double eta_store_pc = 1.0 - trapz(head, g.dt()) / e_in;
    const double eta_tot_pc = trapz(tail, g.dt()) / e_in;
    return {eta_store_pc, eta_tot_pc};
}

}  // namespace qmem
