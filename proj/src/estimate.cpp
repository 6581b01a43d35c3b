#include "sdecoup/estimate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace sdecoup {

double MomentSums::variance() const {
    if (count < 2) return 0.0;
    const double m = mean();
    const double v = (sum_sq - double(count) * m * m) / double(count - 1);
    return v > 0.0 ? v : 0.0;
}

double MomentSums::stderr_mean() const {
    if (count < 2) return 0.0;
    return std::sqrt(variance() / double(count));
}

double MomentSums::lp(int p) const {
    const double n = double(count);
    if (p == 1) return sum_abs / n;
    if (p == 2) return std::sqrt(sum_sq / n);
    throw std::invalid_argument("MomentSums::lp: p must be 1 or 2");
}

double MomentSums::lp_stderr(int p) const {
    if (count < 2) return 0.0;
    const double n = double(count);
    if (p == 1) {
        const double m = sum_abs / n;
        const double v = (sum_sq - n * m * m) / (n - 1.0);
        return std::sqrt((v > 0.0 ? v : 0.0) / n);
    }
    if (p == 2) {
        const double m2 = sum_sq / n;
        if (m2 <= 0.0) return 0.0;
        const double var_sq = (sum_quad - n * m2 * m2) / (n - 1.0);
        // delta method for sqrt(mean of squares)
        return std::sqrt((var_sq > 0.0 ? var_sq : 0.0) / n) / (2.0 * std::sqrt(m2));
    }
    throw std::invalid_argument("MomentSums::lp_stderr: p must be 1 or 2");
}

double MomentSums::holder_ratio() const {
    const double n = double(count);
    const double m1 = sum_abs / n, m2 = sum_sq / n, m4 = sum_quad / n;
    if (m2 <= 0.0) return 1.0;
    return std::pow(m1, 2.0 / 3.0) * std::pow(m4, 1.0 / 3.0) / m2;
}

std::vector<MomentSums> run_replications(long replications, std::size_t dim,
                                         const WorkerFactory& factory,
                                         const RunOptions& options) {
    if (replications < 1) throw std::invalid_argument("run_replications: need at least 1 replication");
    if (dim < 1) throw std::invalid_argument("run_replications: need at least 1 metric");
    const long chunk = options.chunk_size > 0 ? options.chunk_size : 256;
    const long n_chunks = (replications + chunk - 1) / chunk;

    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    const int threads = options.threads > 0 ? options.threads
                                            : int(std::min<long>(hw, n_chunks));

    // per-chunk partial sums; chunks are filled in replication order and
    // combined in chunk order, so any thread count yields identical bits
    std::vector<std::vector<MomentSums>> partials(static_cast<std::size_t>(n_chunks),
                                                  std::vector<MomentSums>(dim));
    std::atomic<long> next_chunk{0};
    std::exception_ptr error;
    std::mutex error_mutex;

    auto work = [&]() {
        try {
            RepEvaluator eval = factory();
            std::vector<double> out(dim);
            for (;;) {
                const long c = next_chunk.fetch_add(1);
                if (c >= n_chunks) break;
                auto& sums = partials[std::size_t(c)];
                const long lo = c * chunk;
                const long hi = std::min(replications, lo + chunk);
                for (long r = lo; r < hi; ++r) {
                    eval(r, out);
                    for (std::size_t d = 0; d < dim; ++d) sums[d].add(out[d]);
                }
            }
        } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
        }
    };

    if (threads <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(std::size_t(threads));
        for (int i = 0; i < threads; ++i) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    if (error) std::rethrow_exception(error);

    std::vector<MomentSums> total(dim);
    for (long c = 0; c < n_chunks; ++c)
        for (std::size_t d = 0; d < dim; ++d) total[d].combine(partials[std::size_t(c)][d]);
    return total;
}

MCEstimate mc_run(std::string_view tag, long replications,
                  const std::function<double(long, Rng&)>& evaluator,
                  std::uint64_t master_seed, const RunOptions& options) {
    const auto factory = [&]() -> RepEvaluator {
        return [&evaluator, tag, master_seed](long rep, std::span<double> out) {
            Rng rng = SeedStream{master_seed, tag, std::uint64_t(rep)}.rng();
            out[0] = evaluator(rep, rng);
        };
    };
    const auto sums = run_replications(replications, 1, factory, options);
    MCEstimate est;
    est.mean = sums[0].mean();
    est.std_error = sums[0].stderr_mean();
    est.replications = replications;
    est.master_seed = master_seed;
    est.tag = std::string(tag);
    return est;
}

} // namespace sdecoup
