#pragma once

#include <span>

#include "wavepart/grid.hpp"

namespace wp {

// Discrete version of f^(k) = (2 pi)^{-3/2} \int e^{ikx} f(x) dx on a Grid3.
//
//   forward:  f^_m = h^3 (2 pi)^{-3/2} sum_x e^{i k_m x} f(x)
//   inverse:  f(x) = (2 pi)^{-3/2} (2 pi / L)^3 sum_m e^{-i k_m x} f^_m
//
// so that sum_x h^3 f g = sum_m (2 pi/L)^3 f^ conj(g^) (discrete Parseval).
// Plans are FFTW_ESTIMATE, which keeps results bit-reproducible run to run.

SpectralData forward(const Grid3& grid, std::span<const double> samples);
SpectralData forward(const Grid3& grid, std::span<const cplx> samples);

/// Inverse transform; returns the real part (imaginary part is round-off
/// for Hermitian input).
RealData inverse_real(const Grid3& grid, std::span<const cplx> spectrum);
std::vector<cplx> inverse(const Grid3& grid, std::span<const cplx> spectrum);

/// Largest |Im| of the inverse transform relative to max |Re|.
double imaginary_fraction(const Grid3& grid, std::span<const cplx> spectrum);

}  // namespace wp
