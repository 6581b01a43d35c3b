#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sdecoup/estimate.hpp"
#include "sdecoup/solver.hpp"

namespace sdecoup {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Everything a rate experiment needs: the equation, the grid sizes, the
/// refinement factors, the error norm and the randomness contract.
struct ExperimentConfig {
    SdeSpec sde{PiecewiseLipschitzFn::indicator(0.0), 0.0};
    std::vector<long> n_list = {16, 32, 64, 128, 256, 512, 1024};
    int fine_factor = 64;   // fine grid cells per coarse cell
    int ref_factor = 256;   // reference grid cells per coarse cell
    int p = 2;              // error norm exponent
    long replications = 100000;
    std::uint64_t master_seed = 1;
    std::string tag = "experiment";
    int threads = 0;        // 0: hardware concurrency

    void validate() const;  // throws ConfigError on violated invariants
};

/// Log-log least-squares fit of error against n.
struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::vector<double> residuals;
};

RateFit fit_rate(const std::vector<std::pair<double, double>>& n_and_error);

/// Per-n moments of a signed error sample D; exposes both the L1 and L2
/// views of the same replications.
struct RateTable {
    std::string metric;
    std::string tag;
    long replications = 0;
    std::uint64_t master_seed = 0;
    int requested_p = 2;
    std::vector<long> ns;
    std::vector<MomentSums> moments;

    double estimate(std::size_t i, int p) const { return moments[i].lp(p); }
    double std_error(std::size_t i, int p) const { return moments[i].lp_stderr(p); }
    double holder_ratio(std::size_t i) const { return moments[i].holder_ratio(); }
    RateFit fit(int p) const;

    /// CSV rows (header n,p,metric,estimate,stderr,replications,master_seed)
    /// for the requested norm, followed by fit and diagnostic comment lines.
    std::string to_csv() const;
};

/// E[|X_1 - X~_1|^p]^{1/p} for the two solutions driven by coupled noise,
/// per n. Euler on the fine_factor-refined grid approximates both solutions.
RateTable coupled_sde_distance(const ExperimentConfig& cfg);

/// E[|I_mu(W) - I_mu(W~)|^p]^{1/p} with I_mu the fine-grid occupation
/// functional of the drift along the coupled pair.
RateTable coupled_occupation_distance(const ExperimentConfig& cfg);

/// E[|X_1^{ref} - X^_1(n)|^p]^{1/p}: coarse Euler against a reference Euler
/// on the ref_factor-refined grid built from the same noise by bridge
/// refinement.
RateTable scheme_error(const ExperimentConfig& cfg);

/// E[|I_mu(W) - n^{-1} sum mu(W_{(i-1)/n})|^p]^{1/p}: fine occupation
/// functional against its Riemann-sum estimator on the coarse values.
RateTable riemann_occupation_error(const ExperimentConfig& cfg);

/// Per-cell pieces of the distance recursion Delta_i = Delta_{i-1} + 2 m_i + d_i:
/// m_i couples the entering gap with the cell's drift-difference integral,
/// d_i is that integral's second moment.
struct CellDiagnostics {
    long n = 0;
    long replications = 0;
    std::uint64_t master_seed = 0;
    std::vector<MCEstimate> m;  // per cell
    std::vector<MCEstimate> d;  // per cell
    MCEstimate direct_sq;       // E[(X_1 - X~_1)^2] from the same replications
    MCEstimate telescoped;      // E[sum_i (2 m-term_i + d-term_i)]
    std::string to_csv() const;
};

CellDiagnostics cell_diagnostics(const ExperimentConfig& cfg, long n);

/// Per-cell second moments E[J_i^2] of the occupation drift-difference
/// integrals J_i along the coupled pair (the quantities the bridge-pair
/// covariance floor bounds from below).
std::vector<MCEstimate> occupation_cell_second_moments(const ExperimentConfig& cfg, long n);

} // namespace sdecoup
