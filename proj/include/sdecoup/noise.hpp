#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "sdecoup/rng.hpp"

namespace sdecoup {

/// Time grid 0 = t_0 < t_1 < ... < t_n = 1. Cheap to copy (shared storage).
class Grid {
public:
    explicit Grid(std::vector<double> times);

    static Grid equidistant(long n);

    /// Uniform refinement: every cell split into `factor` equal parts.
    /// Original grid points are preserved bit for bit.
    Grid refined(int factor) const;

    std::size_t size() const { return times_->size(); }
    std::size_t cells() const { return times_->size() - 1; }
    double time(std::size_t i) const { return (*times_)[i]; }
    std::span<const double> times() const { return {times_->data(), times_->size()}; }

    /// Positions of `coarse`'s points inside this grid; throws if `coarse`
    /// is not a (bitwise) subset.
    std::vector<std::size_t> locate(const Grid& coarse) const;

    bool operator==(const Grid& other) const { return *times_ == *other.times_; }

private:
    std::shared_ptr<const std::vector<double>> times_;
};

/// Brownian-motion values on a grid; starts at zero.
struct FinePath {
    Grid grid;
    std::vector<double> values;
};

/// Two Brownian motions on the fine grid that agree exactly at every coarse
/// point and are conditionally independent between them.
struct CoupledPathPair {
    Grid coarse;
    Grid fine;
    std::vector<double> w;
    std::vector<double> w_tilde;
};

/// Precomputed per-point coefficients for sampling, interpolating and
/// bridge-refining between one coarse/fine grid pair. Build once per grid
/// pair, then drive any number of replications; const and shareable across
/// threads.
class CoupleKernel {
public:
    CoupleKernel(const Grid& coarse, const Grid& fine);

    const Grid& coarse() const { return coarse_; }
    const Grid& fine() const { return fine_; }
    std::size_t fine_size() const { return fine_.size(); }

    /// Brownian values on the fine grid (w[0] = 0), sequential increments.
    void sample_w(Rng& rng, std::span<double> w) const;

    /// Builds w_tilde = (piecewise-linear interpolant of w at the coarse
    /// points) + a fresh Brownian bridge per coarse cell. Coarse values are
    /// copied bitwise.
    void couple_from(std::span<const double> w, Rng& rng, std::span<double> w_tilde) const;

    /// Conditional refinement: fills fine values that agree bitwise with the
    /// given coarse values and draws the interior from the bridge law.
    void refine_from(std::span<const double> w_coarse, Rng& rng, std::span<double> w_fine) const;

private:
    Grid coarse_;
    Grid fine_;
    std::vector<std::size_t> cpos_;     // coarse point positions in the fine grid
    std::vector<double> sqrt_dt_;       // per fine step
    std::vector<double> lam_;           // interpolation weight per fine point
    std::vector<double> shrink_;        // bridge mean factor per fine point
    std::vector<double> step_frac_;     // conditional step fraction per fine point
    std::vector<double> cond_sd_;       // conditional standard deviation per fine point
};

FinePath sample_brownian(const Grid& fine, SeedStream seed);

/// Piecewise-linear interpolant of `path` through the coarse points,
/// evaluated at all fine times.
FinePath piecewise_linear(const FinePath& path, const Grid& coarse);

CoupledPathPair couple(const FinePath& path, const Grid& coarse, SeedStream seed);

/// New path on `finer` agreeing bitwise with `path` at its own times; the
/// added interior points follow the Brownian bridge conditional law.
FinePath bridge_refine(const FinePath& path, const Grid& finer, SeedStream seed);

/// Debug dump: "time,w,w_tilde" rows at full precision.
std::string to_csv(const CoupledPathPair& pair);

} // namespace sdecoup
