#pragma once

#include <span>
#include <vector>

#include "sdecoup/noise.hpp"
#include "sdecoup/piecewise_fn.hpp"

namespace sdecoup {

/// dX = mu(X) dt + dW with unit diffusion.
struct SdeSpec {
    PiecewiseLipschitzFn drift;
    double x0 = 0.0;
};

struct Trajectory {
    Grid grid;
    std::vector<double> values;
};

/// Euler scheme along the supplied Brownian values:
///   X_{j+1} = X_j + mu(X_j) dt_j + (W_{j+1} - W_j).
/// The drift is accumulated separately and the state formed as
/// x0 + (drift_sum + W_j), so the noise enters exactly: a zero drift gives
/// X_j = x0 + W_j bit for bit.
Trajectory euler(const SdeSpec& spec, const FinePath& path);

/// Final-time value of the Euler scheme (no trajectory storage).
double solve_at_one(const SdeSpec& spec, const FinePath& path);

namespace kernels {

/// Core Euler recursion on raw spans; returns the final value.
double euler_final(const PiecewiseLipschitzFn& mu, double x0, std::span<const double> t,
                   std::span<const double> w);

/// Left-endpoint sum of f along values on grid times t.
double left_riemann(const PiecewiseLipschitzFn& f, std::span<const double> t,
                    std::span<const double> values);

} // namespace kernels

/// n^{-1} sum_{i=1}^{n} f(w_i) for values w_0..w_{n-1} at the left endpoints
/// of an equidistant grid with n cells.
double occupation_riemann(const PiecewiseLipschitzFn& f, std::span<const double> w_at_left,
                          const Grid& coarse);

/// Left-endpoint Riemann sum of f along the whole path (the fine-grid
/// occupation functional).
double occupation_fine(const PiecewiseLipschitzFn& f, const FinePath& path);

} // namespace sdecoup
