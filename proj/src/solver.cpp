#include "sdecoup/solver.hpp"

#include <cmath>
#include <stdexcept>

namespace sdecoup {

namespace kernels {

double euler_final(const PiecewiseLipschitzFn& mu, double x0, std::span<const double> t,
                   std::span<const double> w) {
    double drift_sum = 0.0;
    double x = x0;
    for (std::size_t j = 0; j + 1 < t.size(); ++j) {
        drift_sum += mu.eval(x) * (t[j + 1] - t[j]);
        x = x0 + (drift_sum + w[j + 1]);
    }
    return x;
}

double left_riemann(const PiecewiseLipschitzFn& f, std::span<const double> t,
                    std::span<const double> values) {
    double acc = 0.0;
    for (std::size_t j = 0; j + 1 < t.size(); ++j) acc += f.eval(values[j]) * (t[j + 1] - t[j]);
    return acc;
}

} // namespace kernels

Trajectory euler(const SdeSpec& spec, const FinePath& path) {
    const auto t = path.grid.times();
    Trajectory out{path.grid, std::vector<double>(t.size())};
    double drift_sum = 0.0;
    double x = spec.x0;
    out.values[0] = x;
    for (std::size_t j = 0; j + 1 < t.size(); ++j) {
        drift_sum += spec.drift.eval(x) * (t[j + 1] - t[j]);
        x = spec.x0 + (drift_sum + path.values[j + 1]);
        out.values[j + 1] = x;
    }
    return out;
}

double solve_at_one(const SdeSpec& spec, const FinePath& path) {
    return kernels::euler_final(spec.drift, spec.x0, path.grid.times(), path.values);
}

double occupation_riemann(const PiecewiseLipschitzFn& f, std::span<const double> w_at_left,
                          const Grid& coarse) {
    const std::size_t n = coarse.cells();
    if (w_at_left.size() != n)
        throw std::invalid_argument("occupation_riemann: need one value per cell's left endpoint");
    const double h = 1.0 / double(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double width = coarse.time(i + 1) - coarse.time(i);
        if (std::fabs(width - h) > 1e-12 * h)
            throw std::invalid_argument("occupation_riemann: grid is not equidistant");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += f.eval(w_at_left[i]);
    return acc / double(n);
}

double occupation_fine(const PiecewiseLipschitzFn& f, const FinePath& path) {
    return kernels::left_riemann(f, path.grid.times(), path.values);
}

} // namespace sdecoup
