#pragma once

#include <initializer_list>
#include <span>
#include <vector>

#include "qiwave/spectral_field.hpp"

namespace qiwave {

// Smallest 2^a 3^b 5^c that is >= n.
int fft_size(int n);

// Grid on which the mean of a product of trigonometric polynomials with
// total bandwidth `bandwidth` (sum of the factors' max modes) equals its
// integral exactly: no nonzero frequency aliases onto n = 0.
inline int quadrature_grid(int bandwidth) { return fft_size(bandwidth + 1); }

// Grid that keeps π_N((π_N u)^3) alias-free: at least 4N+2 points.
inline int cubic_grid(int n) { return fft_size(4 * n + 2); }

// Values f(x_j) on a points × points grid, x_j = 2π j / points, stored
// row-major with x2 as the slow index.  Requires points >= 2·max_mode+1.
std::vector<double> to_grid(const SpectralField& f, int points);

// Inverse of to_grid restricted to the window `max_mode`; requires
// 2·max_mode+1 <= points.  The result is Hermitian by construction.
SpectralField from_grid(std::span<const double> values, int points,
                        int max_mode);

// (1/len) Σ_j Π_k a_k[j].
double grid_mean(std::span<const double> a);
double grid_mean(std::span<const double> a, std::span<const double> b);
double grid_mean(std::span<const double> a, std::span<const double> b,
                 std::span<const double> c, std::span<const double> d);

}  // namespace qiwave
