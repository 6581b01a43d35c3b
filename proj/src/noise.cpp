#include "sdecoup/noise.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace sdecoup {

Grid::Grid(std::vector<double> times) {
    if (times.size() < 2) throw std::invalid_argument("Grid: need at least two times");
    if (times.front() != 0.0) throw std::invalid_argument("Grid: must start at 0");
    if (times.back() != 1.0) throw std::invalid_argument("Grid: must end at 1");
    for (std::size_t i = 0; i + 1 < times.size(); ++i)
        if (!(times[i] < times[i + 1]))
            throw std::invalid_argument("Grid: times must be strictly increasing");
    times_ = std::make_shared<const std::vector<double>>(std::move(times));
}

Grid Grid::equidistant(long n) {
    if (n < 1) throw std::invalid_argument("Grid::equidistant: n >= 1 required");
    std::vector<double> t(std::size_t(n) + 1);
    for (long i = 0; i <= n; ++i) t[std::size_t(i)] = double(i) / double(n);
    t.back() = 1.0;
    return Grid(std::move(t));
}

Grid Grid::refined(int factor) const {
    if (factor < 1) throw std::invalid_argument("Grid::refined: factor >= 1 required");
    const auto& t = *times_;
    std::vector<double> out;
    out.reserve((t.size() - 1) * std::size_t(factor) + 1);
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
        out.push_back(t[i]);
        for (int j = 1; j < factor; ++j)
            out.push_back(t[i] + (t[i + 1] - t[i]) * double(j) / double(factor));
    }
    out.push_back(t.back());
    return Grid(std::move(out));
}

std::vector<std::size_t> Grid::locate(const Grid& coarse) const {
    const auto& fine = *times_;
    std::vector<std::size_t> pos;
    pos.reserve(coarse.size());
    std::size_t j = 0;
    for (std::size_t i = 0; i < coarse.size(); ++i) {
        const double target = coarse.time(i);
        while (j < fine.size() && fine[j] < target) ++j;
        if (j >= fine.size() || fine[j] != target)
            throw std::invalid_argument("Grid::locate: not a subgrid");
        pos.push_back(j);
    }
    return pos;
}

CoupleKernel::CoupleKernel(const Grid& coarse, const Grid& fine)
    : coarse_(coarse), fine_(fine), cpos_(fine.locate(coarse)) {
    const auto t = fine.times();
    const std::size_t m = fine.size();
    sqrt_dt_.resize(m - 1);
    for (std::size_t j = 0; j + 1 < m; ++j) sqrt_dt_[j] = std::sqrt(t[j + 1] - t[j]);

    lam_.assign(m, 0.0);
    shrink_.assign(m, 0.0);
    step_frac_.assign(m, 0.0);
    cond_sd_.assign(m, 0.0);
    for (std::size_t i = 0; i + 1 < cpos_.size(); ++i) {
        const std::size_t j0 = cpos_[i], j1 = cpos_[i + 1];
        const double t0 = t[j0], t1 = t[j1];
        for (std::size_t j = j0 + 1; j < j1; ++j) {
            const double remaining = t1 - t[j - 1];
            const double step = t[j] - t[j - 1];
            lam_[j] = (t[j] - t0) / (t1 - t0);
            shrink_[j] = (t1 - t[j]) / remaining;
            step_frac_[j] = step / remaining;
            cond_sd_[j] = std::sqrt(step * (t1 - t[j]) / remaining);
        }
    }
}

void CoupleKernel::sample_w(Rng& rng, std::span<double> w) const {
    w[0] = 0.0;
    for (std::size_t j = 0; j + 1 < w.size(); ++j)
        w[j + 1] = w[j] + sqrt_dt_[j] * rng.normal();
}

void CoupleKernel::couple_from(std::span<const double> w, Rng& rng,
                               std::span<double> w_tilde) const {
    for (std::size_t i = 0; i + 1 < cpos_.size(); ++i) {
        const std::size_t j0 = cpos_[i], j1 = cpos_[i + 1];
        const double w0 = w[j0], dw = w[j1] - w0;
        w_tilde[j0] = w[j0];
        double b = 0.0;
        for (std::size_t j = j0 + 1; j < j1; ++j) {
            b = shrink_[j] * b + cond_sd_[j] * rng.normal();
            w_tilde[j] = w0 + lam_[j] * dw + b;
        }
    }
    w_tilde[cpos_.back()] = w[cpos_.back()];
}

void CoupleKernel::refine_from(std::span<const double> w_coarse, Rng& rng,
                               std::span<double> w_fine) const {
    for (std::size_t i = 0; i + 1 < cpos_.size(); ++i) {
        const std::size_t j0 = cpos_[i], j1 = cpos_[i + 1];
        const double target = w_coarse[i + 1];
        double v = w_coarse[i];
        w_fine[j0] = v;
        for (std::size_t j = j0 + 1; j < j1; ++j) {
            v += (target - v) * step_frac_[j] + cond_sd_[j] * rng.normal();
            w_fine[j] = v;
        }
    }
    w_fine[cpos_.back()] = w_coarse[w_coarse.size() - 1];
}

FinePath sample_brownian(const Grid& fine, SeedStream seed) {
    CoupleKernel kernel(fine, fine);
    FinePath path{fine, std::vector<double>(fine.size())};
    Rng rng = seed.rng();
    kernel.sample_w(rng, path.values);
    return path;
}

FinePath piecewise_linear(const FinePath& path, const Grid& coarse) {
    const auto cpos = path.grid.locate(coarse);
    const auto t = path.grid.times();
    FinePath out{path.grid, std::vector<double>(path.values.size())};
    for (std::size_t i = 0; i + 1 < cpos.size(); ++i) {
        const std::size_t j0 = cpos[i], j1 = cpos[i + 1];
        const double t0 = t[j0], t1 = t[j1];
        const double w0 = path.values[j0], w1 = path.values[j1];
        out.values[j0] = w0;
        for (std::size_t j = j0 + 1; j < j1; ++j) {
            const double s = t[j];
            out.values[j] = ((s - t0) * w1 + (t1 - s) * w0) / (t1 - t0);
        }
    }
    out.values[cpos.back()] = path.values[cpos.back()];
    return out;
}

CoupledPathPair couple(const FinePath& path, const Grid& coarse, SeedStream seed) {
    CoupleKernel kernel(coarse, path.grid);
    CoupledPathPair pair{coarse, path.grid, path.values, std::vector<double>(path.values.size())};
    Rng rng = seed.rng();
    kernel.couple_from(pair.w, rng, pair.w_tilde);
    return pair;
}

FinePath bridge_refine(const FinePath& path, const Grid& finer, SeedStream seed) {
    CoupleKernel kernel(path.grid, finer);
    FinePath out{finer, std::vector<double>(finer.size())};
    Rng rng = seed.rng();
    kernel.refine_from(path.values, rng, out.values);
    return out;
}

std::string to_csv(const CoupledPathPair& pair) {
    std::ostringstream os;
    os << "time,w,w_tilde\n";
    char buf[128];
    for (std::size_t j = 0; j < pair.w.size(); ++j) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", pair.fine.time(j), pair.w[j],
                      pair.w_tilde[j]);
        os << buf;
    }
    return os.str();
}

} // namespace sdecoup
