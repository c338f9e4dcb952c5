#include "doctest.h"

#include <cmath>

#include "dyadic/numeric.hpp"
#include "dyadic/positive_operator.hpp"
#include "dyadic/reference.hpp"
#include "test_util.hpp"

using namespace dyadic;

TEST_CASE("fiber indicators") {
    const DyadicGrid g = testutil::g1();

    const PositiveOperator halves(g, {testutil::left_half(), testutil::right_half()}, 1);
    CHECK(fiber_indicator(halves, g.root()) == GridFunction{1, 1, 1, 1});

    const PositiveOperator leaf(g, {testutil::e(0)}, 2);
    CHECK(fiber_indicator(leaf, g.root()) == GridFunction{1, 0, 0, 0});
    CHECK(fiber_indicator(leaf, testutil::left_half()) == GridFunction{0, 0, 0, 0});
}

TEST_CASE("collection members must be deep enough for the complexity") {
    const DyadicGrid g = testutil::g1();
    CHECK_THROWS_AS(PositiveOperator(g, {g.root()}, 1), AncestorOutOfGrid);
}

TEST_CASE("apply fixtures") {
    const DyadicGrid g = testutil::g1();
    const WeightedGrid w = testutil::g1_uniform();

    const PositiveOperator a0(g, {g.root()}, 0);
    const GridFunction f{3, 1, 0, 4};
    const double avg = average(w, f, g.root());
    for (double v : apply(a0, w, f)) CHECK(v == doctest::Approx(avg).epsilon(1e-12));

    const PositiveOperator cells1(
        g, {testutil::e(0), testutil::e(1), testutil::e(2), testutil::e(3)}, 1);
    const GridFunction spike{4, 0, 0, 0};
    const GridFunction out = apply(cells1, w, spike);
    CHECK(out[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(out[1] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(out[2] == 0.0);
    CHECK(out[3] == 0.0);

    const PositiveOperator stack(g, {g.root(), testutil::left_half(), testutil::e(0)}, 0);
    const GridFunction ones{1, 1, 1, 1};
    const GridFunction stacked = apply(stack, w, ones);
    CHECK(stacked[0] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(stacked[1] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(stacked[2] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(stacked[3] == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(apply(a0, w, GridFunction{-1, 0, 0, 0}), NotNonnegative);
}

TEST_CASE("weak quasinorm fixtures") {
    const WeightedGrid w = testutil::g1_uniform();
    CHECK(weak_l1_quasinorm(w, {0, 0, 0, 0}) == 0.0);
    // Single level set: a * 1_E has quasinorm |a| mu(E).
    CHECK(weak_l1_quasinorm(w, {0, -3, -3, 0}) == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(weak_l1_quasinorm(w, {2, 1, 1, 0}) == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("weak norm probing fixtures") {
    const DyadicGrid g = testutil::g1();
    const WeightedGrid w = testutil::g1_uniform();

    const PositiveOperator empty(g, {}, 0);
    CHECK(estimate_weak_norm(empty, w) == 0.0);

    const PositiveOperator a0(g, {g.root()}, 0);
    CHECK(estimate_weak_norm(a0, w) == doctest::Approx(1.0).epsilon(1e-12));

    const PositiveOperator stack(g, {g.root(), testutil::left_half(), testutil::e(0)}, 0);
    // The point mass at e0 already drives the quasinorm to 1.75.
    CHECK(estimate_weak_norm(stack, w) >= 1.75 - 1e-12);

    const WeightedGrid dead = testutil::g1_masses({0, 0, 0, 0});
    CHECK_THROWS_AS(estimate_weak_norm(a0, dead), DegenerateMeasure);
}

namespace {

PositiveOperator random_operator(SplitMix64& rng, const DyadicGrid& g, int k) {
    std::vector<CubeId> cubes;
    for (std::int64_t id = 0; id < g.cube_count(); ++id) {
        const CubeId q = g.from_flat(id);
        if (q.level >= k && rng.u01() < 0.3) cubes.push_back(q);
    }
    return PositiveOperator(g, std::move(cubes), k);
}

}  // namespace

TEST_CASE("operator properties on random instances") {
    SplitMix64 rng(314);
    for (int trial = 0; trial < 60; ++trial) {
        const WeightedGrid w = testutil::random_weighted(rng, 4);
        const DyadicGrid& g = w.grid();
        const int k = static_cast<int>(rng.below(3));
        const PositiveOperator op = random_operator(rng, g, k);

        GridFunction f = testutil::random_function(rng, g, 0.0, 2.0);
        GridFunction h = testutil::random_function(rng, g, 0.0, 1.0);

        // apply matches the literal member-by-member sum
        const GridFunction fast = apply(op, w, f);
        const GridFunction slow = ref::apply_positive(w, f, op.collection(), k);
        for (std::size_t i = 0; i < fast.size(); ++i)
            CHECK(close_at_scale(fast[i], slow[i], std::abs(slow[i]) + 1.0, 1e-12));

        // linearity and monotonicity on nonnegative combinations
        const double a = rng.uniform(0.0, 2.0), b = rng.uniform(0.0, 2.0);
        GridFunction combo(f.size());
        for (std::size_t i = 0; i < f.size(); ++i) combo[i] = a * f[i] + b * h[i];
        const GridFunction lhs = apply(op, w, combo);
        const GridFunction fa = apply(op, w, f), ha = apply(op, w, h);
        for (std::size_t i = 0; i < lhs.size(); ++i) {
            if (w.cell_mass(static_cast<std::int64_t>(i)) <= 0.0) continue;
            CHECK(close_at_scale(lhs[i], a * fa[i] + b * ha[i],
                                 std::abs(lhs[i]) + a + b, 1e-12));
        }
        GridFunction bigger(f.size());
        for (std::size_t i = 0; i < f.size(); ++i) bigger[i] = f[i] + h[i];
        const GridFunction ba = apply(op, w, bigger);
        for (std::size_t i = 0; i < ba.size(); ++i)
            if (w.cell_mass(static_cast<std::int64_t>(i)) > 0.0)
                CHECK(ba[i] >= fa[i] - 1e-12 * (1.0 + std::abs(ba[i])));

        // fiber indicators: 0 <= eta_Q <= 1_Q, constant on k-th descendants
        for (std::int64_t id = 0; id < g.cube_count(); ++id) {
            const CubeId q = g.from_flat(id);
            if (q.level + k > g.depth()) continue;
            const GridFunction eta = fiber_indicator(op, q);
            for (std::int64_t c = 0; c < g.cell_count(); ++c) {
                CHECK(eta[static_cast<std::size_t>(c)] >= 0.0);
                CHECK(eta[static_cast<std::size_t>(c)] <= 1.0);
                if (eta[static_cast<std::size_t>(c)] != 0.0)
                    CHECK(g.covers(q, g.cell_cube(c)));
            }
            // constancy on each cube whose k-th ancestor is q
            const std::int64_t down = g.cubes_at_level(q.level + k);
            for (std::int64_t j = 0; j < down; ++j) {
                const CubeId d = g.cube_at(q.level + k, j);
                if (!g.covers(q, d)) continue;
                double first = -1.0;
                bool constant = true;
                g.for_each_cell(d, [&](std::int64_t c) {
                    const double v = eta[static_cast<std::size_t>(c)];
                    if (first < 0.0) first = v;
                    constant = constant && v == first;
                });
                CHECK(constant);
            }
        }

        // weak quasinorm: against the oracle, below the L1 norm, homogeneous
        const GridFunction sf = testutil::random_function(rng, g, -2.0, 2.0);
        const double quasi = weak_l1_quasinorm(w, sf);
        CHECK(quasi == doctest::Approx(ref::weak_l1(w, sf)).epsilon(1e-12));
        double norm1 = 0.0;
        for (std::size_t i = 0; i < sf.size(); ++i)
            norm1 += std::abs(sf[i]) * w.cell_mass(static_cast<std::int64_t>(i));
        CHECK(rel_leq(quasi, norm1));
        const double scale = rng.uniform(0.1, 5.0);
        GridFunction scaled(sf.size());
        for (std::size_t i = 0; i < sf.size(); ++i) scaled[i] = scale * sf[i];
        CHECK(weak_l1_quasinorm(w, scaled) ==
              doctest::Approx(scale * quasi).epsilon(1e-12));
    }
}
