#pragma once

#include "qmem/field.hpp"

namespace qmem {

// Forward transform with the convention
//   A(tau) = (1/sqrt(2 pi)) \int dw |A(w)| e^{i[w tau + phi(w)]},
// i.e. A(w) = (1/sqrt(2 pi)) \int dtau A(tau) e^{-i w tau}.
// The returned frequency axis is uniform and centered on zero.
SpectralField to_spectrum(const TemporalField& field);

// Inverse of to_spectrum. For a uniform frequency axis this is the exact
// inverse DFT; for a non-uniform axis midpoint quadrature is used.
TemporalField to_time(const SpectralField& spec, const TimeGrid& grid);

// Synthesizes a pulse from an amplitude spectrum, optionally discarding the
// stored spectral phase; output is normalized to unit energy.
TemporalField signal_from_spectrum(const SpectralField& spec, bool flat_phase,
                                   const TimeGrid& grid);

namespace detail {
// In-place DFT, sign=-1 forward / +1 inverse (unnormalized). Radix-2 when the
// length is a power of two, direct evaluation otherwise.
void dft(std::vector<cplx>& x, int sign);
}  // namespace detail

}  // namespace qmem
