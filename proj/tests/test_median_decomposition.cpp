#include "doctest.h"

#include <cmath>

#include "dyadic/median_decomposition.hpp"
#include "dyadic/numeric.hpp"
#include "dyadic/reference.hpp"
#include "dyadic/rng.hpp"
#include "test_util.hpp"

using namespace dyadic;

TEST_CASE("constant functions decompose trivially") {
    const WeightedGrid w = testutil::g1_uniform();
    const auto cert = build_median_decomposition(w, {5, 5, 5, 5}, w.grid().root(), 0.3);
    CHECK(cert.family.size() == 1);
    CHECK(cert.measured_constant == 0.0);
    CHECK(cert.base_median == 5.0);
}

TEST_CASE("spike fixture: family {root, e3}") {
    const DyadicGrid g = testutil::g1();
    const WeightedGrid w = testutil::g1_uniform();
    const GridFunction f{0, 0, 0, 100};

    const auto cert = build_median_decomposition(w, f, g.root(), 0.3);
    REQUIRE(cert.family.size() == 2);
    CHECK(cert.family.cube(0) == g.root());
    CHECK(cert.family.cube(1) == testutil::e(3));
    CHECK(cert.base_median == 0.0);

    const int root_idx = cert.family.index_of_flat(g.flat(g.root()));
    const int e3_idx = cert.family.index_of_flat(g.flat(testutil::e(3)));
    CHECK(cert.payload[root_idx].omega == 0.0);
    CHECK(cert.payload[root_idx].jump == 0.0);
    CHECK(cert.payload[root_idx].rel_osc == 0.0);
    CHECK(cert.payload[e3_idx].omega == 0.0);
    CHECK(cert.payload[e3_idx].jump == 100.0);  // |100 - median on right half|

    CHECK(cert.measured_constant == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(verify_sparse(w, cert.family.cubes(), 2 * 0.3).ok);
}

TEST_CASE("argument checking") {
    const WeightedGrid w = testutil::g1_uniform();
    CHECK_THROWS_AS(build_median_decomposition(w, {1, 2, 3, 4}, w.grid().root(), 0.6),
                    BadLambda);
    CHECK_THROWS_AS(build_median_decomposition(w, {1, 2, 3, 4}, w.grid().root(), 0.3,
                                               RootParentRule::forbid),
                    AncestorOutOfGrid);
    const WeightedGrid right_only = testutil::g1_masses({0, 0, 1, 1});
    CHECK_THROWS_AS(
        build_median_decomposition(right_only, {1, 2, 3, 4}, testutil::left_half(), 0.3),
        ZeroMassCube);
}

TEST_CASE("initial cube below the root uses the true parent") {
    const DyadicGrid g = testutil::g1();
    const WeightedGrid w = testutil::g1_uniform();
    const GridFunction f{3, 7, 100, 100};
    const auto cert = build_median_decomposition(w, f, testutil::left_half(), 0.3,
                                                 RootParentRule::forbid);
    CHECK(cert.base_median == median(w, f, g.root()));
}

TEST_CASE("random corpus: structure, bounds and the Fujii step") {
    SplitMix64 rng(90210);
    for (int trial = 0; trial < 80; ++trial) {
        const int depth = 2 + static_cast<int>(rng.below(4));
        const WeightedGrid w = testutil::random_weighted(rng, depth);
        GridFunction f = testutil::random_function(rng, w.grid(), -5.0, 5.0);
        if (rng.u01() < 0.4)
            for (auto& v : f) v = std::floor(v);
        const double lambda = rng.uniform(0.05, 0.45);
        const DyadicGrid& g = w.grid();

        const auto cert = build_median_decomposition(w, f, g.root(), lambda);

        // gamma = 2 lambda sparseness, exactly
        CHECK(verify_sparse(w, cert.family.cubes(), 2 * lambda).ok);
        // pointwise constant never above the proof-chain bound
        CHECK(cert.measured_constant <= 6.0 * (1.0 + 1e-9));
        // payload chain: r <= 2 omega + jump
        for (const auto& p : cert.payload)
            CHECK(rel_leq(p.rel_osc, 2 * p.omega + p.jump));

        const auto med = all_cube_medians(w, f);
        const auto owner = cert.family.cell_owner(g);
        const auto parent_median = [&](int idx) {
            const CubeId q = cert.family.cube(idx);
            const CubeId p = q.level > 0 ? g.parent(q) : q;
            return med[static_cast<std::size_t>(g.flat(p))];
        };

        for (int i = 0; i < cert.family.size(); ++i) {
            const double center = parent_median(i);
            const double r = cert.payload[i].rel_osc;

            // residual cells: |f - median(parent F)| <= 3 r via leaf medians
            g.for_each_cell(cert.family.cube(i), [&](std::int64_t c) {
                if (w.cell_mass(c) <= 0.0) return;
                if (owner[static_cast<std::size_t>(c)] != i) return;
                CHECK(rel_leq(std::abs(f[static_cast<std::size_t>(c)] - center), 3 * r));
            });

            // each stopping child's mass is at least half inside the level set
            // (the kappa -> 1/2 step), and its grid parent fails the condition
            for (int cidx : cert.family.children_of(i)) {
                const CubeId child = cert.family.cube(cidx);
                double inside = 0.0;
                g.for_each_cell(child, [&](std::int64_t c) {
                    if (w.cell_mass(c) > 0.0 &&
                        std::abs(f[static_cast<std::size_t>(c)] - center) > r)
                        inside += w.cell_mass(c);
                });
                CHECK(rel_leq(0.5 * w.cube_mass(child), inside));

                const CubeId gp = g.parent(child);
                const double gp_med = med[static_cast<std::size_t>(g.flat(gp))];
                CHECK(rel_leq(std::abs(gp_med - center), 3 * r));
            }
        }

        // verify agrees when recomputed
        CHECK(verify_median_decomposition(w, f, cert) == cert.measured_constant);
    }
}
