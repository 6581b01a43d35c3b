#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sdecoup/piecewise_fn.hpp"
#include "sdecoup/rng.hpp"

namespace sdecoup {

struct MCEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    long replications = 0;
    std::uint64_t master_seed = 0;
    std::string tag;
};

/// Correlation plus the jump structure of two monotone piecewise-Lipschitz
/// transforms of a standard bivariate normal pair.
struct BivariateBoundInput {
    double rho = 0.0;
    std::vector<std::pair<double, double>> a_breaks;  // (position, jump) of f
    std::vector<std::pair<double, double>> b_breaks;  // (position, jump) of g
};

/// Inputs of the bridge-pair covariance floor: a piecewise function h, an
/// interval length t, the index of the jump of interest, and the two
/// location probabilities the floor is proportional to.
struct BrBrInput {
    const PiecewiseLipschitzFn* h = nullptr;
    double t = 1.0;
    std::size_t jump_index = 0;
    double p_u = 1.0;
    double p_v = 1.0;
};

/// kappa = 1/(16 pi) e^{-6} \int_0^{1/sqrt 3} (1-x^2)^{-1/2} e^{-24/(1-x^2)} dx,
/// evaluated by adaptive quadrature at the given relative tolerance.
double kappa(double rel_tol = 1e-6);

/// Covariance lower bound for monotone piecewise-Lipschitz transforms of a
/// nonnegatively correlated standard normal pair:
///   sum_ij jf_i jg_j (2 pi)^{-1} e^{-a_i^2/2}
///          \int_0^rho (1-u^2)^{-1/2} e^{-(b_j - a_i u)^2 / (2(1-u^2))} du.
/// The integral is computed after u = sin(theta), so rho = 1 is regular.
double tong_lower_bound(const BivariateBoundInput& in);

/// Exact Cov(1_{Z>a}, 1_{Y>b}) for (Z,Y) standard bivariate normal with
/// correlation rho in [0,1], via the single-integral identity
/// Cov = \int_0^rho phi2(a, b; r) dr.
double bivariate_step_cov(double a, double b, double rho, double rel_tol = 1e-10);

/// Monte Carlo estimate of Cov(f(Z), g(Y)) with correlation rho; Y is built
/// as rho Z + sqrt(1-rho^2) Z'. Reproducible from the seed stream.
MCEstimate mc_cov(const PiecewiseLipschitzFn& f, const PiecewiseLipschitzFn& g, double rho,
                  long reps, SeedStream seed);

/// kappa * jump^2 * t^2 * p_u * p_v.
double brbr_lower_bound(const BrBrInput& in);

/// Jump structure (position, jump size) of every breakpoint of f.
std::vector<std::pair<double, double>> breaks_and_jumps(const PiecewiseLipschitzFn& f);

} // namespace sdecoup
