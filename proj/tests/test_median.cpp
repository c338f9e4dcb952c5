#include "doctest.h"

#include <cmath>

#include "dyadic/median.hpp"
#include "dyadic/numeric.hpp"
#include "dyadic/positive_operator.hpp"
#include "dyadic/reference.hpp"
#include "dyadic/rng.hpp"
#include "test_util.hpp"

using namespace dyadic;

TEST_CASE("median fixtures") {
    const CubeId root = testutil::g1().root();

    const WeightedGrid wu = testutil::g1_uniform();
    CHECK(median(wu, {7.5, 7.5, 7.5, 7.5}, root) == 7.5);
    CHECK(median(wu, {0, 1, 2, 3}, root) == 1.0);

    const WeightedGrid ws = testutil::g1_masses({1. / 16, 1. / 16, 1. / 16, 13. / 16});
    CHECK(median(ws, {0, 1, 2, 3}, root) == 3.0);

    const WeightedGrid none = testutil::g1_masses({0, 0, 1, 1});
    CHECK_THROWS_AS(median(none, {0, 1, 2, 3}, testutil::left_half()), ZeroMassCube);
}

TEST_CASE("relative oscillation fixtures") {
    const CubeId root = testutil::g1().root();

    const WeightedGrid wu = testutil::g1_uniform();
    CHECK(relative_oscillation(wu, {0, 0, 0, 0}, root, 0.3) == 0.0);
    CHECK(relative_oscillation(wu, {1, 2, 3, 4}, root, 0.3) == 3.0);

    const WeightedGrid ws = testutil::g1_masses({1. / 16, 1. / 16, 1. / 16, 13. / 16});
    CHECK(relative_oscillation(ws, {1, 2, 3, 4}, root, 0.3) == 4.0);

    CHECK_THROWS_AS(relative_oscillation(wu, {1, 2, 3, 4}, root, 0.7), BadLambda);
    CHECK_THROWS_AS(relative_oscillation(wu, {1, 2, 3, 4}, root, 0.0), BadLambda);
}

TEST_CASE("median oscillation fixtures") {
    const CubeId root = testutil::g1().root();
    const WeightedGrid wu = testutil::g1_uniform();

    const auto constant = median_oscillation(wu, {4, 4, 4, 4}, root, 0.3);
    CHECK(constant.radius == 0.0);
    CHECK(constant.center == 4.0);

    CHECK(median_oscillation(wu, {1, 2, 3, 4}, root, 0.3).radius == 1.0);
    const auto half = median_oscillation(wu, {0, 0, 1, 1}, root, 0.3);
    CHECK(half.radius == 0.5);
    CHECK(half.center == 0.5);
}

namespace {

struct Tuple {
    WeightedGrid w;
    GridFunction f;
    CubeId q;
    double lambda;
};

Tuple random_tuple(SplitMix64& rng) {
    const int depth = 1 + static_cast<int>(rng.below(5));
    WeightedGrid w = testutil::random_weighted(rng, depth);
    GridFunction f = testutil::random_function(rng, w.grid(), -2.0, 2.0);
    // Coarse value lattice sometimes, to exercise ties.
    if (rng.u01() < 0.3)
        for (auto& v : f) v = std::floor(v * 4) / 4;
    // Pick a positive-mass cube.
    const DyadicGrid& g = w.grid();
    CubeId q = g.root();
    for (int tries = 0; tries < 64; ++tries) {
        const CubeId cand = g.from_flat(static_cast<std::int64_t>(rng.below(
            static_cast<std::uint64_t>(g.cube_count()))));
        if (w.cube_mass(cand) > 0.0) {
            q = cand;
            break;
        }
    }
    const double lambda = rng.uniform(0.05, 0.45);
    return Tuple{std::move(w), std::move(f), q, lambda};
}

}  // namespace

TEST_CASE("median machinery agrees with plain-definition oracles") {
    SplitMix64 rng(2024);
    for (int trial = 0; trial < 400; ++trial) {
        const Tuple t = random_tuple(rng);

        CHECK(median(t.w, t.f, t.q) == ref::median(t.w, t.f, t.q));
        const MedianInterval mi = median_interval(t.w, t.f, t.q);
        CHECK(mi.lo == ref::median(t.w, t.f, t.q));
        CHECK(mi.hi == ref::median_max(t.w, t.f, t.q));

        CHECK(relative_oscillation(t.w, t.f, t.q, t.lambda) ==
              ref::relative_oscillation(t.w, t.f, t.q, t.lambda));

        const auto fast = median_oscillation(t.w, t.f, t.q, t.lambda);
        const auto brute = ref::median_oscillation(t.w, t.f, t.q, t.lambda);
        CHECK(fast.radius == brute.radius);
        // The center witnesses an admissible interval of that radius.
        const double need = (1.0 - t.lambda) * ref::mass_of(t.w, t.q);
        const double slack = 1e-12 * (1.0 + std::abs(fast.center) + fast.radius);
        const double inside = ref::mass_where(t.w, t.q, [&](std::int64_t c) {
            const double v = t.f[static_cast<std::size_t>(c)];
            return v >= fast.center - fast.radius - slack &&
                   v <= fast.center + fast.radius + slack;
        });
        CHECK(inside >= need - 1e-12);
    }
}

TEST_CASE("median inequalities on a randomized corpus") {
    SplitMix64 rng(5150);
    for (int trial = 0; trial < 400; ++trial) {
        const Tuple t = random_tuple(rng);
        const MedianInterval mi = median_interval(t.w, t.f, t.q);
        const auto osc = median_oscillation(t.w, t.f, t.q, t.lambda);

        // Every median quasiminimizes the oscillation: r(f - m) <= 2 omega.
        for (double m : {mi.lo, mi.hi}) {
            GridFunction shifted = t.f;
            for (auto& v : shifted) v -= m;
            CHECK(rel_leq(relative_oscillation(t.w, shifted, t.q, t.lambda),
                          2 * osc.radius));
        }

        // Translation: medians of f + c are medians of f shifted by c.
        const double c = rng.uniform(-3.0, 3.0);
        GridFunction plus = t.f;
        for (auto& v : plus) v += c;
        const MedianInterval mc = median_interval(t.w, plus, t.q);
        CHECK(mc.lo == mi.lo + c);
        CHECK(mc.hi == mi.hi + c);

        // Median is within 3 relative oscillations of any recentering.
        const double about = rng.uniform(-3.0, 3.0);
        GridFunction rec = t.f;
        for (auto& v : rec) v -= about;
        const double r = relative_oscillation(t.w, rec, t.q, t.lambda);
        CHECK(rel_leq(std::abs(mi.lo - about), 3 * r));
        CHECK(rel_leq(std::abs(mi.hi - about), 3 * r));

        // Weak-L1 control: r(f; Q) <= (1/lambda) ||1_Q f||_weak / mu(Q).
        GridFunction localized(t.f.size(), 0.0);
        t.w.grid().for_each_cell(t.q, [&](std::int64_t cell) {
            localized[static_cast<std::size_t>(cell)] = t.f[static_cast<std::size_t>(cell)];
        });
        const double weak = weak_l1_quasinorm(t.w, localized);
        CHECK(rel_leq(relative_oscillation(t.w, t.f, t.q, t.lambda),
                      weak / (t.lambda * t.w.cube_mass(t.q))));

        // Monotone in lambda.
        const double lam2 = rng.uniform(t.lambda, 0.49);
        if (lam2 < 0.5) {
            CHECK(relative_oscillation(t.w, t.f, t.q, lam2) <=
                  relative_oscillation(t.w, t.f, t.q, t.lambda));
            CHECK(median_oscillation(t.w, t.f, t.q, lam2).radius <=
                  median_oscillation(t.w, t.f, t.q, t.lambda).radius);
        }
    }
}

TEST_CASE("discrete Fujii: the cell median is the cell value") {
    SplitMix64 rng(99);
    for (int trial = 0; trial < 50; ++trial) {
        const WeightedGrid w = testutil::random_weighted(rng, 4);
        const GridFunction f = testutil::random_function(rng, w.grid());
        for (std::int64_t c = 0; c < w.grid().cell_count(); ++c) {
            if (w.cell_mass(c) <= 0.0) continue;
            CHECK(median(w, f, w.grid().cell_cube(c)) == f[static_cast<std::size_t>(c)]);
        }
    }
}
