#pragma once

#include <optional>

#include "qmem/field.hpp"

namespace qmem {

struct GridConfig {
    int n_z;
    int n_t;
    double t_start;
    double t_end;

    GridConfig(int nz, int nt, double start, double end);
    TimeGrid time_grid() const { return TimeGrid(t_start, t_end, n_t); }
    double dz() const { return 1.0 / (n_z - 1); }
};

// Normalized-energy bookkeeping for one solve. Coherent exchange through the
// control field conserves |P|^2 + |B|^2, so everything the signal puts in must
// end up transmitted, stored, or decayed.
struct EnergyLedger {
    double e_in = 0.0;
    double e_out = 0.0;
    double e_pol_final = 0.0;
    double e_spin_final = 0.0;
    double e_pol_decay = 0.0;
    double e_spin_decay = 0.0;

    double closure_error() const;  // relative imbalance
};

struct FieldHistory {
    int n_z = 0;
    int n_t = 0;
    std::vector<cplx> a, p, b;  // row-major [t][z]
    cplx at(const std::vector<cplx>& f, int it, int iz) const {
        return f[static_cast<std::size_t>(it) * n_z + iz];
    }
};

struct SolveResult {
    TemporalField transmitted;       // A(z=1, tau)
    std::vector<double> z;           // spatial samples
    std::vector<cplx> spin_wave;     // B(z) at final time
    double eta_store = 0.0;
    double eta_ret = 0.0;
    double eta_tot = 0.0;
    EnergyLedger ledger;
    double tau_mid = 0.0;            // photon-counting split time
    double storage_end = 0.0;
    double retrieval_start = 0.0;
    std::vector<double> spin_norm;   // \int |B|^2 dz per time step
    std::optional<FieldHistory> fields;
};

struct SolveOptions {
    bool record_fields = false;
};

// Integrates the Maxwell-Bloch equations
//   dA/dz = -sqrt(d) P
//   dP/dtau = -(1 - i Delta/gamma) P + sqrt(d) A - i (Omega/2) B
//   dB/dtau = -gamma_B B - i (Omega*/2) P
// with boundary A(0,tau) = signal, RK4 in time and trapezoidal marching in z.
// The retrieval pulse defaults to a copy of the storage pulse displaced by
// retrieval_delay (normalized time); pass std::nullopt with retrieval_delay
// ignored for storage-only runs.
SolveResult solve(const MemoryParams& memory, const TemporalField& signal,
                  const ControlPulse& storage_pulse,
                  const std::optional<ControlPulse>& retrieval_pulse,
                  double retrieval_delay, const GridConfig& grid,
                  const SolveOptions& options = {});

// Linear-response transfer function H(w) = exp(-d / (1 + i(w - Delta/gamma)))
// of the bare ensemble (Omega = 0); analytic oracle for the solver.
std::vector<cplx> transmission_spectrum_linear(const MemoryParams& memory,
                                               const std::vector<double>& omega);

// Photon-counting approximation to the efficiencies: storage efficiency as one
// minus the fraction transmitted before storage_window_end, total efficiency
// as the fraction transmitted after it.
std::pair<double, double> photon_counting_efficiency(const SolveResult& result,
                                                     double storage_window_end);

// Grid sized for the given configuration: covers signal and controls with 8
// signal durations of margin, time step limited by the stiffest rate present.
GridConfig default_grid(const MemoryParams& memory, const ControlPulse& storage_pulse,
                        const std::optional<ControlPulse>& retrieval_pulse,
                        double retrieval_delay, int n_z = 200);

}  // namespace qmem
