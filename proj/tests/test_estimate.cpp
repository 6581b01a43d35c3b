#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sdecoup/estimate.hpp"

using namespace sdecoup;

TEST_CASE("moment sums: small-sample identities") {
    MomentSums s;
    for (double x : {1.0, -2.0, 3.0}) s.add(x);
    CHECK(s.count == 3);
    CHECK(s.mean() == doctest::Approx(2.0 / 3.0));
    CHECK(s.sum_abs == 6.0);
    CHECK(s.sum_sq == 14.0);
    CHECK(s.sum_quad == 1.0 + 16.0 + 81.0);
    // unbiased variance of {1,-2,3}
    CHECK(s.variance() == doctest::Approx((14.0 - 3.0 * (2.0 / 3.0) * (2.0 / 3.0)) / 2.0));
    CHECK(s.lp(1) == 2.0);
    CHECK(s.lp(2) == doctest::Approx(std::sqrt(14.0 / 3.0)));
    CHECK_THROWS(s.lp(3));

    MomentSums a, b;
    a.add(1.0);
    a.add(-2.0);
    b.add(3.0);
    a.combine(b);
    CHECK(a.sum == s.sum);
    CHECK(a.sum_quad == s.sum_quad);
}

TEST_CASE("holder ratio is at least one") {
    // literally Hoelder: E[x^2] <= E|x|^{2/3} E[x^4]^{1/3}
    Rng rng(9);
    for (int trial = 0; trial < 50; ++trial) {
        MomentSums s;
        for (int i = 0; i < 100; ++i) s.add(rng.normal() * (1.0 + rng.uniform()));
        CHECK(s.holder_ratio() >= 1.0 - 1e-12);
    }
}

TEST_CASE("mc_run: constant evaluator") {
    const auto est = mc_run("const", 5000, [](long, Rng&) { return 1.0; }, 42);
    CHECK(est.mean == 1.0);
    CHECK(est.std_error == 0.0);
    CHECK(est.replications == 5000);
    CHECK(est.tag == "const");
}

TEST_CASE("mc_run: normal draws center at zero") {
    const long M = 1000000;
    const auto est = mc_run("normals", M, [](long, Rng& rng) { return rng.normal(); }, 7);
    CHECK(std::fabs(est.mean) <= 4.0 / std::sqrt(double(M)));
    CHECK(est.std_error == doctest::Approx(1.0 / std::sqrt(double(M))).epsilon(0.05));
}

TEST_CASE("mc_run: identical seeds reproduce bitwise, distinct seeds differ") {
    const auto eval = [](long, Rng& rng) { return rng.normal(); };
    const auto a = mc_run("repro", 10000, eval, 99);
    const auto b = mc_run("repro", 10000, eval, 99);
    CHECK(a.mean == b.mean);
    CHECK(a.std_error == b.std_error);
    const auto c = mc_run("repro", 10000, eval, 100);
    CHECK(a.mean != c.mean);
}

TEST_CASE("run_replications: thread count does not change a single bit") {
    const auto factory = []() -> RepEvaluator {
        return [](long rep, std::span<double> out) {
            Rng rng = SeedStream{555, "threads", std::uint64_t(rep)}.rng();
            out[0] = rng.normal();
            out[1] = rng.uniform();
        };
    };
    const auto s1 = run_replications(20000, 2, factory, {1, 256});
    const auto s8 = run_replications(20000, 2, factory, {8, 256});
    for (std::size_t d = 0; d < 2; ++d) {
        CHECK(s1[d].sum == s8[d].sum);
        CHECK(s1[d].sum_sq == s8[d].sum_sq);
        CHECK(s1[d].sum_abs == s8[d].sum_abs);
        CHECK(s1[d].sum_quad == s8[d].sum_quad);
    }
}

TEST_CASE("run_replications: evaluator exceptions propagate") {
    const auto factory = []() -> RepEvaluator {
        return [](long rep, std::span<double>) {
            if (rep == 123) throw std::runtime_error("boom");
        };
    };
    CHECK_THROWS_WITH(run_replications(1000, 1, factory, {2, 64}), "boom");
}

TEST_CASE("lp stderr: delta method against a direct computation") {
    Rng rng(31337);
    MomentSums s;
    std::vector<double> xs(20000);
    for (auto& x : xs) {
        x = 0.3 + rng.normal();
        s.add(x);
    }
    // direct sample standard deviation of x^2, scaled per the delta method
    double m2 = 0, v2 = 0;
    for (double x : xs) m2 += x * x;
    m2 /= double(xs.size());
    for (double x : xs) v2 += (x * x - m2) * (x * x - m2);
    v2 /= double(xs.size() - 1);
    const double expected = std::sqrt(v2 / double(xs.size())) / (2.0 * std::sqrt(m2));
    CHECK(s.lp_stderr(2) == doctest::Approx(expected).epsilon(1e-9));
}
