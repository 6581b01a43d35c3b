#include "sdecoup/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace sdecoup {

namespace {

std::string per_n_tag(const std::string& base, long n) {
    return base + "/n=" + std::to_string(n);
}

struct Workspace {
    std::vector<double> w, wt;
};

std::string format_row(long n, int p, const std::string& metric, double est, double se,
                       long reps, std::uint64_t seed) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%ld,%d,%s,%.10e,%.10e,%ld,%llu\n", n, p, metric.c_str(), est,
                  se, reps, static_cast<unsigned long long>(seed));
    return buf;
}

} // namespace

void ExperimentConfig::validate() const {
    for (std::size_t i = 0; i + 1 < n_list.size(); ++i)
        if (!(n_list[i] < n_list[i + 1]))
            throw ConfigError("n_list must be strictly increasing");
    if (n_list.empty()) throw ConfigError("n_list must not be empty");
    for (long n : n_list)
        if (n < 1) throw ConfigError("n_list entries must be positive");
    if (fine_factor < 2) throw ConfigError("fine_factor must be at least 2");
    if (ref_factor < 2) throw ConfigError("ref_factor must be at least 2");
    if (p != 1 && p != 2) throw ConfigError("p must be 1 or 2");
    if (replications < 1000) throw ConfigError("replications must be at least 1000");
    if (threads < 0) throw ConfigError("threads must be nonnegative");
    const auto report = sde.drift.validate();
    if (!report.mu1.ok) throw ConfigError("drift fails the piecewise Lipschitz check: " + report.mu1.witness);
}

RateFit fit_rate(const std::vector<std::pair<double, double>>& n_and_error) {
    if (n_and_error.size() < 3) throw std::invalid_argument("fit_rate: need at least 3 points");
    std::vector<double> lx, ly;
    lx.reserve(n_and_error.size());
    ly.reserve(n_and_error.size());
    for (const auto& [n, e] : n_and_error) {
        if (!(e > 0.0)) throw std::invalid_argument("fit_rate: errors must be positive");
        if (!(n > 0.0)) throw std::invalid_argument("fit_rate: n must be positive");
        lx.push_back(std::log(n));
        ly.push_back(std::log(e));
    }
    const double m = double(lx.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    RateFit fit;
    const double denom = m * sxx - sx * sx;
    fit.slope = (m * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / m;
    double ss_res = 0, ss_tot = 0;
    const double ybar = sy / m;
    fit.residuals.resize(lx.size());
    for (std::size_t i = 0; i < lx.size(); ++i) {
        const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
        fit.residuals[i] = r;
        ss_res += r * r;
        ss_tot += (ly[i] - ybar) * (ly[i] - ybar);
    }
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

RateFit RateTable::fit(int p) const {
    std::vector<std::pair<double, double>> pts;
    pts.reserve(ns.size());
    for (std::size_t i = 0; i < ns.size(); ++i) pts.emplace_back(double(ns[i]), estimate(i, p));
    return fit_rate(pts);
}

std::string RateTable::to_csv() const {
    std::ostringstream os;
    os << "n,p,metric,estimate,stderr,replications,master_seed\n";
    for (std::size_t i = 0; i < ns.size(); ++i)
        os << format_row(ns[i], requested_p, metric, estimate(i, requested_p),
                         std_error(i, requested_p), replications, master_seed);
    char buf[192];
    if (ns.size() >= 3) {
        const RateFit f = fit(requested_p);
        std::snprintf(buf, sizeof buf, "# slope=%.10e intercept=%.10e r2=%.10e\n", f.slope,
                      f.intercept, f.r_squared);
        os << buf;
    }
    for (std::size_t i = 0; i < ns.size(); ++i) {
        std::snprintf(buf, sizeof buf, "# holder_ratio_n%ld=%.10e\n", ns[i], holder_ratio(i));
        os << buf;
    }
    return os.str();
}

namespace {

/// Shared driver: for each n, run M replications of a per-n evaluator
/// producing the signed error D, and collect its moments.
template <class MakeWorker>
RateTable run_rate_experiment(const ExperimentConfig& cfg, const std::string& metric,
                              const MakeWorker& make_worker) {
    cfg.validate();
    RateTable table;
    table.metric = metric;
    table.tag = cfg.tag;
    table.replications = cfg.replications;
    table.master_seed = cfg.master_seed;
    table.requested_p = cfg.p;
    RunOptions run{cfg.threads, 256};
    for (long n : cfg.n_list) {
        const auto sums =
            run_replications(cfg.replications, 1, make_worker(n), run);
        table.ns.push_back(n);
        table.moments.push_back(sums[0]);
    }
    return table;
}

} // namespace

RateTable coupled_sde_distance(const ExperimentConfig& cfg) {
    const auto make_worker = [&cfg](long n) -> WorkerFactory {
        const Grid coarse = Grid::equidistant(n);
        const Grid fine = coarse.refined(cfg.fine_factor);
        // the kernel is immutable; share it between the worker threads
        const auto kernel = std::make_shared<const CoupleKernel>(coarse, fine);
        const std::string tag = per_n_tag(cfg.tag, n);
        return [kernel, tag, &cfg]() -> RepEvaluator {
            auto ws = std::make_shared<Workspace>();
            ws->w.resize(kernel->fine_size());
            ws->wt.resize(kernel->fine_size());
            return [kernel, tag, &cfg, ws](long rep, std::span<double> out) {
                Rng rng = SeedStream{cfg.master_seed, tag, std::uint64_t(rep)}.rng();
                kernel->sample_w(rng, ws->w);
                kernel->couple_from(ws->w, rng, ws->wt);
                const auto t = kernel->fine().times();
                const double x1 = kernels::euler_final(cfg.sde.drift, cfg.sde.x0, t, ws->w);
                const double y1 = kernels::euler_final(cfg.sde.drift, cfg.sde.x0, t, ws->wt);
                out[0] = x1 - y1;
            };
        };
    };
    return run_rate_experiment(cfg, "coupled_sde_distance", make_worker);
}

RateTable coupled_occupation_distance(const ExperimentConfig& cfg) {
    const auto make_worker = [&cfg](long n) -> WorkerFactory {
        const Grid coarse = Grid::equidistant(n);
        const Grid fine = coarse.refined(cfg.fine_factor);
        const auto kernel = std::make_shared<const CoupleKernel>(coarse, fine);
        const std::string tag = per_n_tag(cfg.tag, n);
        return [kernel, tag, &cfg]() -> RepEvaluator {
            auto ws = std::make_shared<Workspace>();
            ws->w.resize(kernel->fine_size());
            ws->wt.resize(kernel->fine_size());
            return [kernel, tag, &cfg, ws](long rep, std::span<double> out) {
                Rng rng = SeedStream{cfg.master_seed, tag, std::uint64_t(rep)}.rng();
                kernel->sample_w(rng, ws->w);
                kernel->couple_from(ws->w, rng, ws->wt);
                const auto t = kernel->fine().times();
                const double a = kernels::left_riemann(cfg.sde.drift, t, ws->w);
                const double b = kernels::left_riemann(cfg.sde.drift, t, ws->wt);
                out[0] = a - b;
            };
        };
    };
    return run_rate_experiment(cfg, "coupled_occupation_distance", make_worker);
}

RateTable scheme_error(const ExperimentConfig& cfg) {
    const auto make_worker = [&cfg](long n) -> WorkerFactory {
        const Grid coarse = Grid::equidistant(n);
        const Grid fine = coarse.refined(cfg.ref_factor);
        const auto kernel = std::make_shared<const CoupleKernel>(coarse, fine);
        const auto coarse_kernel = std::make_shared<const CoupleKernel>(coarse, coarse);
        const std::string tag = per_n_tag(cfg.tag, n);
        return [kernel, coarse_kernel, tag, &cfg]() -> RepEvaluator {
            auto ws = std::make_shared<Workspace>();
            ws->w.resize(kernel->coarse().size());
            ws->wt.resize(kernel->fine_size());
            return [kernel, coarse_kernel, tag, &cfg, ws](long rep, std::span<double> out) {
                Rng rng = SeedStream{cfg.master_seed, tag, std::uint64_t(rep)}.rng();
                coarse_kernel->sample_w(rng, ws->w);               // W at the coarse points
                kernel->refine_from(ws->w, rng, ws->wt);           // same noise, bridge-refined
                const double coarse_final = kernels::euler_final(
                    cfg.sde.drift, cfg.sde.x0, kernel->coarse().times(), ws->w);
                const double ref_final = kernels::euler_final(
                    cfg.sde.drift, cfg.sde.x0, kernel->fine().times(), ws->wt);
                out[0] = ref_final - coarse_final;
            };
        };
    };
    return run_rate_experiment(cfg, "scheme_error", make_worker);
}

RateTable riemann_occupation_error(const ExperimentConfig& cfg) {
    const auto make_worker = [&cfg](long n) -> WorkerFactory {
        const Grid coarse = Grid::equidistant(n);
        const Grid fine = coarse.refined(cfg.fine_factor);
        const auto kernel = std::make_shared<const CoupleKernel>(coarse, fine);
        const std::string tag = per_n_tag(cfg.tag, n);
        const int factor = cfg.fine_factor;
        return [kernel, tag, &cfg, factor, n]() -> RepEvaluator {
            auto ws = std::make_shared<Workspace>();
            ws->w.resize(kernel->fine_size());
            return [kernel, tag, &cfg, factor, n, ws](long rep, std::span<double> out) {
                Rng rng = SeedStream{cfg.master_seed, tag, std::uint64_t(rep)}.rng();
                kernel->sample_w(rng, ws->w);
                const auto t = kernel->fine().times();
                const double fine_value = kernels::left_riemann(cfg.sde.drift, t, ws->w);
                double riemann = 0.0;
                for (long i = 0; i < n; ++i)
                    riemann += cfg.sde.drift.eval(ws->w[std::size_t(i) * std::size_t(factor)]);
                riemann /= double(n);
                out[0] = fine_value - riemann;
            };
        };
    };
    return run_rate_experiment(cfg, "riemann_occupation_error", make_worker);
}

CellDiagnostics cell_diagnostics(const ExperimentConfig& cfg, long n) {
    cfg.validate();
    const Grid coarse = Grid::equidistant(n);
    const Grid fine = coarse.refined(cfg.fine_factor);
    const auto kernel = std::make_shared<const CoupleKernel>(coarse, fine);
    const std::string tag = per_n_tag(cfg.tag + "/cells", n);
    const std::size_t cells = std::size_t(n);
    const int factor = cfg.fine_factor;

    // metrics: per-cell m-term and d-term, then the direct squared gap at
    // time one and the telescoped sum (the last two must agree)
    const std::size_t dim = 2 * cells + 2;
    const auto factory = [&]() -> RepEvaluator {
        auto ws = std::make_shared<Workspace>();
        ws->w.resize(kernel->fine_size());
        ws->wt.resize(kernel->fine_size());
        return [kernel, tag, &cfg, ws, cells, factor](long rep, std::span<double> out) {
            Rng rng = SeedStream{cfg.master_seed, tag, std::uint64_t(rep)}.rng();
            kernel->sample_w(rng, ws->w);
            kernel->couple_from(ws->w, rng, ws->wt);
            const auto t = kernel->fine().times();
            const auto& mu = cfg.sde.drift;
            const double x0 = cfg.sde.x0;

            double drift_x = 0.0, drift_y = 0.0;
            double x = x0, y = x0;
            double telescoped = 0.0;
            for (std::size_t i = 0; i < cells; ++i) {
                const double gap_in = x - y;  // X and X~ gap at the cell's left edge
                double cell_int = 0.0;        // integral of mu(X)-mu(X~) over the cell
                for (int j = 0; j < factor; ++j) {
                    const std::size_t idx = i * std::size_t(factor) + std::size_t(j);
                    const double dt = t[idx + 1] - t[idx];
                    const double mx = mu.eval(x);
                    const double my = mu.eval(y);
                    cell_int += (mx - my) * dt;
                    drift_x += mx * dt;
                    drift_y += my * dt;
                    x = x0 + (drift_x + ws->w[idx + 1]);
                    y = x0 + (drift_y + ws->wt[idx + 1]);
                }
                out[2 * i] = gap_in * cell_int;
                out[2 * i + 1] = cell_int * cell_int;
                telescoped += 2.0 * gap_in * cell_int + cell_int * cell_int;
            }
            const double gap = x - y;
            out[2 * cells] = gap * gap;
            out[2 * cells + 1] = telescoped;
        };
    };

    const auto sums = run_replications(cfg.replications, dim, factory, {cfg.threads, 64});
    CellDiagnostics diag;
    diag.n = n;
    diag.replications = cfg.replications;
    diag.master_seed = cfg.master_seed;
    const auto to_estimate = [&](const MomentSums& s) {
        MCEstimate e;
        e.mean = s.mean();
        e.std_error = s.stderr_mean();
        e.replications = cfg.replications;
        e.master_seed = cfg.master_seed;
        e.tag = tag;
        return e;
    };
    for (std::size_t i = 0; i < cells; ++i) {
        diag.m.push_back(to_estimate(sums[2 * i]));
        diag.d.push_back(to_estimate(sums[2 * i + 1]));
    }
    diag.direct_sq = to_estimate(sums[2 * cells]);
    diag.telescoped = to_estimate(sums[2 * cells + 1]);
    return diag;
}

std::string CellDiagnostics::to_csv() const {
    std::ostringstream os;
    os << "cell,m_estimate,m_stderr,d_estimate,d_stderr\n";
    char buf[192];
    for (std::size_t i = 0; i < m.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%zu,%.10e,%.10e,%.10e,%.10e\n", i + 1, m[i].mean,
                      m[i].std_error, d[i].mean, d[i].std_error);
        os << buf;
    }
    std::snprintf(buf, sizeof buf, "# direct_sq=%.10e stderr=%.10e\n", direct_sq.mean,
                  direct_sq.std_error);
    os << buf;
    std::snprintf(buf, sizeof buf, "# telescoped=%.10e stderr=%.10e\n", telescoped.mean,
                  telescoped.std_error);
    os << buf;
    return os.str();
}

std::vector<MCEstimate> occupation_cell_second_moments(const ExperimentConfig& cfg, long n) {
    cfg.validate();
    const Grid coarse = Grid::equidistant(n);
    const Grid fine = coarse.refined(cfg.fine_factor);
    const auto kernel = std::make_shared<const CoupleKernel>(coarse, fine);
    const std::string tag = per_n_tag(cfg.tag + "/occ-cells", n);
    const std::size_t cells = std::size_t(n);
    const int factor = cfg.fine_factor;

    const auto factory = [&]() -> RepEvaluator {
        auto ws = std::make_shared<Workspace>();
        ws->w.resize(kernel->fine_size());
        ws->wt.resize(kernel->fine_size());
        return [kernel, tag, &cfg, ws, cells, factor](long rep, std::span<double> out) {
            Rng rng = SeedStream{cfg.master_seed, tag, std::uint64_t(rep)}.rng();
            kernel->sample_w(rng, ws->w);
            kernel->couple_from(ws->w, rng, ws->wt);
            const auto t = kernel->fine().times();
            const auto& mu = cfg.sde.drift;
            for (std::size_t i = 0; i < cells; ++i) {
                double cell_int = 0.0;
                for (int j = 0; j < factor; ++j) {
                    const std::size_t idx = i * std::size_t(factor) + std::size_t(j);
                    cell_int += (mu.eval(ws->w[idx]) - mu.eval(ws->wt[idx])) * (t[idx + 1] - t[idx]);
                }
                out[i] = cell_int * cell_int;
            }
        };
    };

    const auto sums = run_replications(cfg.replications, cells, factory, {cfg.threads, 64});
    std::vector<MCEstimate> out;
    out.reserve(cells);
    for (std::size_t i = 0; i < cells; ++i) {
        MCEstimate e;
        e.mean = sums[i].mean();
        e.std_error = sums[i].stderr_mean();
        e.replications = cfg.replications;
        e.master_seed = cfg.master_seed;
        e.tag = tag;
        out.push_back(std::move(e));
    }
    return out;
}

} // namespace sdecoup
