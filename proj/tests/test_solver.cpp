#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sdecoup/solver.hpp"
#include "test_util.hpp"

using namespace sdecoup;

TEST_CASE("euler: zero drift reproduces x0 + W bit for bit") {
    const Grid g = Grid::equidistant(32);
    const auto path = sample_brownian(g, {1, "euler0", 0});
    const SdeSpec spec{PiecewiseLipschitzFn::constant(0.0), 1.5};
    const auto traj = euler(spec, path);
    REQUIRE(traj.values.size() == path.values.size());
    CHECK(traj.values[0] == 1.5);
    for (std::size_t j = 0; j < traj.values.size(); ++j)
        CHECK(traj.values[j] == 1.5 + path.values[j]);
}

TEST_CASE("euler: constant drift telescopes to x0 + c + W1") {
    // dyadic constant and cell count keep the drift accumulation exact
    const Grid g = Grid::equidistant(64);
    const auto path = sample_brownian(g, {2, "eulerc", 0});
    const SdeSpec spec{PiecewiseLipschitzFn::constant(0.5), -0.25};
    CHECK(solve_at_one(spec, path) == -0.25 + 0.5 + path.values.back());

    const SdeSpec spec7{PiecewiseLipschitzFn::constant(0.7), 0.0};
    CHECK(solve_at_one(spec7, path) == doctest::Approx(0.7 + path.values.back()).epsilon(1e-13));
}

TEST_CASE("euler: indicator drift on the zero path") {
    const Grid g({0.0, 0.5, 1.0});
    const FinePath flat{g, {0.0, 0.0, 0.0}};
    const SdeSpec spec{PiecewiseLipschitzFn::indicator(0.0), 10.0};
    const auto traj = euler(spec, flat);
    CHECK(traj.values[0] == 10.0);
    CHECK(traj.values[1] == 10.5);
    CHECK(traj.values[2] == 11.0);
    CHECK(solve_at_one(spec, flat) == 11.0);
}

TEST_CASE("euler: order preservation for nondecreasing drift") {
    Rng meta(404);
    for (int trial = 0; trial < 300; ++trial) {
        const auto mu = test_util::random_step(meta);
        const Grid g = Grid::equidistant(1 + long(meta.next_u64() % 32));
        const auto path = sample_brownian(g, {meta.next_u64(), "order", 0});
        const double x0 = -2.0 + 4.0 * meta.uniform();
        const double y0 = x0 + 3.0 * meta.uniform();
        const auto tx = euler({mu, x0}, path);
        const auto ty = euler({mu, y0}, path);
        for (std::size_t j = 0; j < tx.values.size(); ++j) CHECK(tx.values[j] <= ty.values[j]);
    }
}

TEST_CASE("euler: shift equivariance for step drifts") {
    Rng meta(77);
    for (int trial = 0; trial < 50; ++trial) {
        const auto mu = test_util::random_step(meta);
        std::vector<double> breaks, levels;
        levels.push_back(mu.eval(mu.breakpoint(0) - 10.0));
        const double a = -3.0 + 6.0 * meta.uniform();
        for (std::size_t i = 0; i < mu.breakpoint_count(); ++i) {
            breaks.push_back(mu.breakpoint(i) + a);
            levels.push_back(mu.eval(mu.breakpoint(i) + 0.5 *
                (i + 1 < mu.breakpoint_count() ? mu.breakpoint(i + 1) - mu.breakpoint(i) : 1.0)));
        }
        const auto mu_shifted = PiecewiseLipschitzFn::step(breaks, levels);
        const Grid g = Grid::equidistant(16);
        const auto path = sample_brownian(g, {meta.next_u64(), "shift", 0});
        const auto base = euler({mu, 0.0}, path);
        const auto shifted = euler({mu_shifted, a}, path);
        for (std::size_t j = 0; j < base.values.size(); ++j)
            CHECK(shifted.values[j] == base.values[j] + a);
    }
}

TEST_CASE("grid consistency: refining the driving noise shrinks the gap") {
    // Euler at refinement R vs 2R of the same bridge-refined noise; the mean
    // gap decreases monotonically over R = 8,16,32,64 (2-stderr slack)
    const SdeSpec spec{PiecewiseLipschitzFn::indicator(0.0), 0.0};
    const long n = 16, M = 10000;
    const Grid coarse = Grid::equidistant(n);
    double prev_mean = 0, prev_se = 0;
    bool have_prev = false;
    for (int R : {8, 16, 32, 64}) {
        const Grid fine = coarse.refined(R);
        const Grid finer = coarse.refined(2 * R);
        double s1 = 0, s2 = 0;
        for (long r = 0; r < M; ++r) {
            const auto tag = "gridcons/R" + std::to_string(R);
            const auto path = sample_brownian(fine, {1234, tag, std::uint64_t(r)});
            const auto refined = bridge_refine(path, finer, {1235, tag, std::uint64_t(r)});
            const double gap = std::fabs(solve_at_one(spec, refined) - solve_at_one(spec, path));
            s1 += gap;
            s2 += gap * gap;
        }
        const double mean = s1 / double(M);
        const double se = std::sqrt((s2 / double(M) - mean * mean) / double(M));
        if (have_prev) CHECK(mean <= prev_mean + 2.0 * (se + prev_se));
        have_prev = true;
        prev_mean = mean;
        prev_se = se;
    }
    CHECK(prev_mean < 0.01);  // the R=64 gap is far below the n^{-3/4} scale
}

TEST_CASE("occupation_riemann: counting and constants") {
    const Grid g = Grid::equidistant(4);
    const auto one = PiecewiseLipschitzFn::constant(1.0);
    const std::vector<double> anything{3.0, -1.0, 0.5, 2.0};
    CHECK(occupation_riemann(one, anything, g) == 1.0);

    const auto id = PiecewiseLipschitzFn::identity();
    const std::vector<double> zeros{0.0, 0.0, 0.0, 0.0};
    CHECK(occupation_riemann(id, zeros, g) == 0.0);

    const auto ind = PiecewiseLipschitzFn::indicator(0.0);
    const std::vector<double> alt{-1.0, 1.0, -1.0, 1.0};
    CHECK(occupation_riemann(ind, alt, g) == 0.5);

    CHECK_THROWS(occupation_riemann(one, anything, Grid({0.0, 0.7, 1.0})));
    CHECK_THROWS(occupation_riemann(one, std::vector<double>{1.0}, g));
}

TEST_CASE("occupation_fine: exact cases") {
    const Grid g = Grid::equidistant(10);
    const auto path = sample_brownian(g, {5, "occ", 0});

    CHECK(occupation_fine(PiecewiseLipschitzFn::constant(1.0), path) == 1.0);
    CHECK(occupation_fine(PiecewiseLipschitzFn::constant(2.0), path) == 2.0);
    CHECK(occupation_fine(PiecewiseLipschitzFn::constant(0.7), path) ==
          doctest::Approx(0.7).epsilon(1e-14));

    // positive path: the indicator integrates to one
    FinePath positive{g, std::vector<double>(g.size(), 0.0)};
    for (std::size_t j = 0; j < positive.values.size(); ++j)
        positive.values[j] = 1.0 + 0.1 * double(j);
    positive.values[0] = 0.0;  // left endpoint still counts: 1_{[0,inf)}(0) = 1
    CHECK(occupation_fine(PiecewiseLipschitzFn::indicator(0.0), positive) == 1.0);

    // coinciding grids make the fine functional equal the Riemann estimator
    std::vector<double> left(path.values.begin(), path.values.end() - 1);
    const auto ind = PiecewiseLipschitzFn::indicator(0.0);
    CHECK(occupation_fine(ind, path) == doctest::Approx(occupation_riemann(ind, left, g)).epsilon(1e-15));
}
