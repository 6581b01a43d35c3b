#include "sdecoup/gaussian.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "sdecoup/quadrature.hpp"

namespace sdecoup {

namespace {

constexpr double kPi = std::numbers::pi;

void require_rho(double rho) {
    if (!(rho >= 0.0 && rho <= 1.0))
        throw std::invalid_argument("correlation must lie in [0,1]");
}

} // namespace

double kappa(double rel_tol) {
    const double upper = 1.0 / std::sqrt(3.0);
    const double integral = integrate(
        [](double x) {
            const double q = 1.0 - x * x;
            return std::exp(-24.0 / q) / std::sqrt(q);
        },
        0.0, upper, rel_tol);
    return integral * std::exp(-6.0) / (16.0 * kPi);
}

double tong_lower_bound(const BivariateBoundInput& in) {
    require_rho(in.rho);
    for (const auto& breaks : {in.a_breaks, in.b_breaks})
        for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
            if (!(breaks[i].first < breaks[i + 1].first))
                throw std::invalid_argument("tong_lower_bound: breakpoints must be strictly increasing");
    if (in.rho == 0.0) return 0.0;

    const double theta_max = std::asin(in.rho);
    double total = 0.0;
    for (const auto& [a, ja] : in.a_breaks) {
        if (ja == 0.0) continue;
        for (const auto& [b, jb] : in.b_breaks) {
            if (jb == 0.0) continue;
            // u = sin(theta) removes the (1-u^2)^{-1/2} endpoint singularity
            const double integral = integrate(
                [a = a, b = b](double theta) {
                    const double s = std::sin(theta);
                    const double c2 = 1.0 - s * s;
                    const double d = b - a * s;
                    return std::exp(-(d * d) / (2.0 * c2));
                },
                0.0, theta_max, 1e-12, 1e-250);
            total += ja * jb * std::exp(-0.5 * a * a) / (2.0 * kPi) * integral;
        }
    }
    return total;
}

double bivariate_step_cov(double a, double b, double rho, double rel_tol) {
    require_rho(rho);
    if (rho == 0.0) return 0.0;
    const double theta_max = std::asin(rho);
    // phi2(a,b;sin t) cos t = (2 pi)^{-1} exp(-(a^2 + b^2 - 2ab sin t)/(2 cos^2 t))
    const double integral = integrate(
        [a, b](double theta) {
            const double s = std::sin(theta);
            const double c2 = 1.0 - s * s;
            return std::exp(-(a * a + b * b - 2.0 * a * b * s) / (2.0 * c2));
        },
        0.0, theta_max, rel_tol, 1e-250);
    return integral / (2.0 * kPi);
}

MCEstimate mc_cov(const PiecewiseLipschitzFn& f, const PiecewiseLipschitzFn& g, double rho,
                  long reps, SeedStream seed) {
    require_rho(rho);
    if (reps < 2) throw std::invalid_argument("mc_cov: need at least 2 replications");
    const double mix = std::sqrt(1.0 - rho * rho);

    std::vector<double> fs(static_cast<std::size_t>(reps));
    std::vector<double> gs(static_cast<std::size_t>(reps));
    Rng rng = seed.rng();
    for (long r = 0; r < reps; ++r) {
        const double z = rng.normal();
        const double y = rho * z + mix * rng.normal();
        fs[std::size_t(r)] = f.eval(z);
        gs[std::size_t(r)] = g.eval(y);
    }
    double mf = 0.0, mg = 0.0;
    for (long r = 0; r < reps; ++r) {
        mf += fs[std::size_t(r)];
        mg += gs[std::size_t(r)];
    }
    mf /= double(reps);
    mg /= double(reps);
    // sample covariance and the spread of the per-draw products
    double cov = 0.0, ss = 0.0;
    for (long r = 0; r < reps; ++r) {
        const double c = (fs[std::size_t(r)] - mf) * (gs[std::size_t(r)] - mg);
        cov += c;
        ss += c * c;
    }
    const double mean_c = cov / double(reps);
    const double var_c = std::max(0.0, (ss - double(reps) * mean_c * mean_c) / double(reps - 1));
    MCEstimate out;
    out.mean = cov / double(reps - 1);
    out.std_error = std::sqrt(var_c / double(reps));
    out.replications = reps;
    out.master_seed = seed.master;
    out.tag = std::string(seed.tag);
    return out;
}

double brbr_lower_bound(const BrBrInput& in) {
    if (in.h == nullptr) throw std::invalid_argument("brbr_lower_bound: missing function");
    if (!(in.t > 0.0 && in.t <= 1.0)) throw std::invalid_argument("brbr_lower_bound: t must lie in (0,1]");
    if (!(in.p_u >= 0.0 && in.p_u <= 1.0 && in.p_v >= 0.0 && in.p_v <= 1.0))
        throw std::invalid_argument("brbr_lower_bound: probabilities must lie in [0,1]");
    const double j = in.h->jump(in.jump_index);
    return kappa() * j * j * in.t * in.t * in.p_u * in.p_v;
}

std::vector<std::pair<double, double>> breaks_and_jumps(const PiecewiseLipschitzFn& f) {
    std::vector<std::pair<double, double>> out;
    out.reserve(f.breakpoint_count());
    for (std::size_t i = 0; i < f.breakpoint_count(); ++i)
        out.emplace_back(f.breakpoint(i), f.jump(i));
    return out;
}

} // namespace sdecoup
