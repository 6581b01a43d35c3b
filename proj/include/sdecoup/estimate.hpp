#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sdecoup/gaussian.hpp"  // MCEstimate
#include "sdecoup/rng.hpp"

namespace sdecoup {

/// Running sums of x, |x|, x^2 and x^4 over replications, accumulated in
/// replication-index order so results do not depend on thread scheduling.
struct MomentSums {
    long count = 0;
    double sum = 0.0;
    double sum_abs = 0.0;
    double sum_sq = 0.0;
    double sum_quad = 0.0;

    void add(double x) {
        ++count;
        sum += x;
        sum_abs += x < 0 ? -x : x;
        const double x2 = x * x;
        sum_sq += x2;
        sum_quad += x2 * x2;
    }
    void combine(const MomentSums& o) {
        count += o.count;
        sum += o.sum;
        sum_abs += o.sum_abs;
        sum_sq += o.sum_sq;
        sum_quad += o.sum_quad;
    }

    double mean() const { return sum / double(count); }
    double variance() const;         // unbiased sample variance of x
    double stderr_mean() const;      // stderr of mean(x)

    /// L_p norm estimate of the sampled quantity: mean|x| for p = 1,
    /// sqrt(mean x^2) for p = 2.
    double lp(int p) const;
    /// Standard error of lp(p); the p = 2 case uses the delta method.
    double lp_stderr(int p) const;

    /// E|x|^{2/3} E[x^4]^{1/3} / E[x^2]; at least 1 for any sample.
    double holder_ratio() const;
};

struct RunOptions {
    int threads = 0;       // 0: hardware concurrency
    long chunk_size = 256; // fixed-size chunks keep reductions scheduling-independent
};

/// Per-replication evaluator writing `dim` metrics; a factory produces one
/// evaluator (with its own scratch buffers) per worker thread.
using RepEvaluator = std::function<void(long rep, std::span<double> out)>;
using WorkerFactory = std::function<RepEvaluator()>;

/// Runs M replications, reduces each metric's moments in replication order.
std::vector<MomentSums> run_replications(long replications, std::size_t dim,
                                         const WorkerFactory& factory,
                                         const RunOptions& options = {});

/// Scalar Monte Carlo mean with standard error. The r-th replication draws
/// from SeedStream{master_seed, tag, r}.
MCEstimate mc_run(std::string_view tag, long replications,
                  const std::function<double(long rep, Rng& rng)>& evaluator,
                  std::uint64_t master_seed, const RunOptions& options = {});

} // namespace sdecoup
