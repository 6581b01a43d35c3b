#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sdecoup/piecewise_fn.hpp"
#include "sdecoup/rng.hpp"
#include "test_util.hpp"

using namespace sdecoup;
using test_util::random_step;

namespace {

PiecewiseLipschitzFn two_affine() {
    // x on (-inf,1), x+2 on (1,inf)
    return PiecewiseLipschitzFn({1.0}, {AffinePiece{0.0, 1.0}, AffinePiece{2.0, 1.0}});
}

} // namespace

TEST_CASE("eval: indicator and affine pieces") {
    const auto ind = PiecewiseLipschitzFn::indicator(0.0);
    CHECK(ind.eval(-0.5) == 0.0);
    CHECK(ind.eval(0.0) == 1.0);  // value at the breakpoint defaults to the right limit
    CHECK(ind.eval(0.5) == 1.0);

    const auto f = two_affine();
    CHECK(f.eval(3.0) == 5.0);
    CHECK(f.eval(0.0) == 0.0);
    CHECK(f.eval(1.0) == 3.0);  // declared value defaults to the right limit 1+2
}

TEST_CASE("eval: explicit breakpoint value wins") {
    const PiecewiseLipschitzFn f({0.0}, {AffinePiece{0.0, 0.0}, AffinePiece{1.0, 0.0}}, {0.25});
    CHECK(f.eval(0.0) == 0.25);
    CHECK(f.eval(-1e-300) == 0.0);
    CHECK(f.eval(1e-300) == 1.0);
}

TEST_CASE("one_sided_limits and jump") {
    const auto ind = PiecewiseLipschitzFn::indicator(0.0);
    CHECK(ind.one_sided_limits(0) == std::pair{0.0, 1.0});
    CHECK(ind.jump(0) == 1.0);

    const auto f = two_affine();
    CHECK(f.one_sided_limits(0) == std::pair{1.0, 3.0});
    CHECK(f.jump(0) == 2.0);

    // continuous join
    const PiecewiseLipschitzFn g({0.0}, {AffinePiece{0.0, 1.0}, AffinePiece{0.0, 1.0}});
    CHECK(g.one_sided_limits(0) == std::pair{0.0, 0.0});
    CHECK(g.jump(0) == 0.0);

    CHECK_THROWS_AS((void)ind.one_sided_limits(1), std::out_of_range);
    CHECK_THROWS_AS((void)ind.jump(7), std::out_of_range);
}

TEST_CASE("jump equals the difference of the one-sided limits") {
    Rng rng(123);
    for (int trial = 0; trial < 50; ++trial) {
        const auto f = random_step(rng);
        for (std::size_t i = 0; i < f.breakpoint_count(); ++i) {
            const auto [l, r] = f.one_sided_limits(i);
            CHECK(f.jump(i) == r - l);
        }
    }
}

TEST_CASE("validate: the drift family used everywhere") {
    const auto rep = PiecewiseLipschitzFn::indicator(0.0).validate();
    CHECK(rep.mu1.ok);
    CHECK(rep.mu2.ok);
    CHECK(rep.mu3.ok);
    CHECK(rep.mu4.ok);
    CHECK(rep.mu5.ok);
}

TEST_CASE("validate: unbounded affine pieces fail mu5 only") {
    const auto rep = two_affine().validate();
    CHECK(rep.mu1.ok);
    CHECK(rep.mu2.ok);
    CHECK(rep.mu3.ok);
    CHECK(rep.mu4.ok);
    CHECK_FALSE(rep.mu5.ok);
    CHECK(!rep.mu5.witness.empty());
}

TEST_CASE("validate: negative jump fails mu4") {
    const auto f = PiecewiseLipschitzFn::step({0.0}, {0.0, -1.0});
    const auto rep = f.validate();
    CHECK_FALSE(rep.mu4.ok);
    CHECK(rep.mu3.ok);
    CHECK(rep.mu5.ok);
}

TEST_CASE("validate: continuous function reports mu3 false") {
    const auto rep = PiecewiseLipschitzFn::constant(2.0).validate();
    CHECK_FALSE(rep.mu3.ok);
    CHECK(rep.mu1.ok);
    CHECK(rep.mu5.ok);
}

TEST_CASE("validate: generic piece against its declared Lipschitz constant") {
    GenericPiece honest;
    honest.eval = [](double x) { return std::sin(x); };
    honest.lipschitz = 1.0;
    honest.left_limit = std::sin(0.0);
    honest.bound = 1.0;
    GenericPiece left;
    left.eval = [](double) { return 0.0; };
    left.lipschitz = 0.0;
    left.right_limit = 0.0;
    left.bound = 0.0;
    const PiecewiseLipschitzFn f({0.0}, {left, honest});
    const auto rep = f.validate();
    CHECK(rep.mu1.ok);
    CHECK(rep.mu2.ok);

    GenericPiece lying = honest;
    lying.lipschitz = 0.5;  // sin has slope 1 near 0
    const PiecewiseLipschitzFn g({0.0}, {left, lying});
    const auto rep2 = g.validate();
    CHECK_FALSE(rep2.mu1.ok);
    CHECK(rep2.mu1.witness.find("piece 1") != std::string::npos);
}

TEST_CASE("validate: breakpoint value outside the limit interval fails mu4") {
    const PiecewiseLipschitzFn f({0.0}, {AffinePiece{0.0, 0.0}, AffinePiece{1.0, 0.0}}, {2.0});
    CHECK_FALSE(f.validate().mu4.ok);
}

TEST_CASE("linear growth constant") {
    const auto ind = PiecewiseLipschitzFn::indicator(0.0);
    const double c1 = ind.linear_growth_constant();
    CHECK(c1 >= 1.0);

    const double c0 = PiecewiseLipschitzFn::constant(0.0).linear_growth_constant();
    CHECK(c0 >= 0.0);

    const auto id = PiecewiseLipschitzFn::identity();
    const double cid = id.linear_growth_constant();
    CHECK(cid >= 1.0);

    // the sampled inequality on [-100,100]
    for (const auto* f : {&ind, &id}) {
        const double c = f->linear_growth_constant();
        for (int j = 0; j <= 2000; ++j) {
            const double x = -100.0 + 0.1 * j;
            CHECK(std::fabs(f->eval(x)) <= c * (1.0 + std::fabs(x)) * (1 + 1e-12));
        }
    }
}

TEST_CASE("straddles") {
    const auto f = PiecewiseLipschitzFn::indicator(0.0);
    CHECK(f.straddles(-1.0, 1.0) == std::vector<std::size_t>{0});
    CHECK(f.straddles(5.0, 5.0).empty());

    const auto g = PiecewiseLipschitzFn::step({0.0, 2.0}, {0.0, 1.0, 2.0});
    CHECK(g.straddles(1.0, 3.0) == std::vector<std::size_t>{1});
    CHECK(g.straddles(-1.0, 3.0) == (std::vector<std::size_t>{0, 1}));
    CHECK(g.straddles(0.0, 0.0) == std::vector<std::size_t>{0});  // touching counts
}

TEST_CASE("piecewise Lipschitz bound with straddle count") {
    // |f(x)-f(y)| <= c (|x-y| + #straddled breakpoints) with
    // c = max(piece Lipschitz constants, max |jump|)
    Rng rng(99);
    for (int trial = 0; trial < 30; ++trial) {
        const auto f = random_step(rng);
        double c = 0.0;
        for (std::size_t i = 0; i < f.breakpoint_count(); ++i)
            c = std::max(c, std::fabs(f.jump(i)));
        for (int s = 0; s < 200; ++s) {
            const double x = -6.0 + 12.0 * rng.uniform();
            const double y = -6.0 + 12.0 * rng.uniform();
            const double lhs = std::fabs(f.eval(x) - f.eval(y));
            const double rhs = c * (std::fabs(x - y) + double(f.straddles(x, y).size()));
            CHECK(lhs <= rhs * (1 + 1e-12));
        }
    }
}

TEST_CASE("monotone functions evaluate monotonically") {
    Rng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const auto f = random_step(rng);
        REQUIRE(f.validate().mu4.ok);
        for (int s = 0; s < 200; ++s) {
            double x = -6.0 + 12.0 * rng.uniform();
            double y = -6.0 + 12.0 * rng.uniform();
            if (x > y) std::swap(x, y);
            CHECK(f.eval(x) <= f.eval(y));
        }
    }
}

TEST_CASE("text serialization round trip") {
    const auto check_roundtrip = [](const PiecewiseLipschitzFn& f) {
        const auto g = PiecewiseLipschitzFn::from_text(f.to_text());
        CHECK(f.same_structure(g));
        CHECK(f.to_text() == g.to_text());
    };
    check_roundtrip(PiecewiseLipschitzFn::indicator(0.0));
    check_roundtrip(PiecewiseLipschitzFn::constant(-3.25));
    check_roundtrip(two_affine());
    check_roundtrip(PiecewiseLipschitzFn::step({-1.5, 0.0, 0.7}, {0.0, 0.25, 1.0, 1.125}));

    GenericPiece g;
    g.lipschitz = 2.0;
    g.left_limit = 0.5;
    g.right_limit = 0.0;
    check_roundtrip(PiecewiseLipschitzFn({0.0}, {AffinePiece{0, 0}, g}, {0.3}));

    Rng rng(2024);
    for (int trial = 0; trial < 20; ++trial) check_roundtrip(random_step(rng));
}

TEST_CASE("text parser rejects malformed input") {
    CHECK_THROWS(PiecewiseLipschitzFn::from_text(""));
    CHECK_THROWS(PiecewiseLipschitzFn::from_text("piece 0 1 affine 0 0\n"));  // not -inf..inf
    CHECK_THROWS(PiecewiseLipschitzFn::from_text(
        "piece -inf 0 affine 0 0\npiece 1 inf affine 1 0\n"));  // gap between pieces
    CHECK_THROWS(PiecewiseLipschitzFn::from_text("piece -inf inf cubic 1\n"));
    CHECK_THROWS(PiecewiseLipschitzFn::from_text(
        "piece -inf 0 affine 0 0\npiece 0 inf affine 1 0\nbreakpoint 0.5 1\n"));
    CHECK_THROWS(PiecewiseLipschitzFn::from_text("piece -inf inf affine 0 0 7\n"));  // trailing token
}

TEST_CASE("construction rejects bad inputs") {
    CHECK_THROWS(PiecewiseLipschitzFn({1.0, 1.0},
                                      {AffinePiece{}, AffinePiece{}, AffinePiece{}}));
    CHECK_THROWS(PiecewiseLipschitzFn({0.0}, {AffinePiece{}}));  // piece count mismatch
    CHECK_THROWS(PiecewiseLipschitzFn::step({0.0}, {1.0}));
}

TEST_CASE("linear growth constant needs declared Lipschitz constants") {
    GenericPiece g;
    g.left_limit = 0.0;  // no lipschitz declaration
    const PiecewiseLipschitzFn f({0.0}, {AffinePiece{0, 0}, g});
    CHECK_THROWS(f.linear_growth_constant());
    CHECK_FALSE(f.validate().mu1.ok);
}

TEST_CASE("declaration-only generic pieces refuse pointwise evaluation") {
    GenericPiece g;
    g.lipschitz = 1.0;
    g.left_limit = 0.0;
    const PiecewiseLipschitzFn f({0.0}, {AffinePiece{0, 0}, g});
    CHECK(f.eval(-1.0) == 0.0);
    CHECK_THROWS(f.eval(1.0));
}
