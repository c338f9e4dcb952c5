#include "doctest.h"

#include "dyadic/measure.hpp"
#include "dyadic/numeric.hpp"
#include "dyadic/rng.hpp"
#include "dyadic/sparse_family.hpp"
#include "test_util.hpp"

using namespace dyadic;

TEST_CASE("cube measures on the fixture grid") {
    const WeightedGrid w = testutil::g1_masses({1, 1, 1, 3});
    CHECK(cube_measure(w, w.grid().root()) == 6.0);
    CHECK(cube_measure(w, testutil::left_half()) == 2.0);
    CHECK(cube_measure(w, testutil::e(3)) == 3.0);

    const WeightedGrid none = testutil::g1_masses({0, 0, 1, 3});
    CHECK(cube_measure(none, testutil::left_half()) == 0.0);
}

TEST_CASE("averages") {
    const WeightedGrid w = testutil::g1_masses({1, 1, 1, 3});
    const GridFunction f{1, 0, 0, 0};
    CHECK(average(w, f, w.grid().root()) == doctest::Approx(1.0 / 6).epsilon(1e-12));
    CHECK(average(w, f, testutil::left_half()) == doctest::Approx(0.5).epsilon(1e-12));

    const GridFunction c{2.5, 2.5, 2.5, 2.5};
    CHECK(average(w, c, testutil::right_half()) == doctest::Approx(2.5).epsilon(1e-12));

    const WeightedGrid none = testutil::g1_masses({0, 0, 1, 3});
    CHECK_THROWS_AS(average(none, f, testutil::left_half()), ZeroMassCube);
}

TEST_CASE("mass additivity and average consistency") {
    SplitMix64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const WeightedGrid w = testutil::random_weighted(rng, 5);
        const GridFunction f = testutil::random_function(rng, w.grid());
        const auto ints = cube_integrals(w, f);
        const DyadicGrid& g = w.grid();
        for (std::int64_t id = 0; id < g.cube_count(); ++id) {
            const CubeId q = g.from_flat(id);
            if (g.is_leaf(q)) continue;
            double mass_sum = 0.0, int_sum = 0.0;
            for (int j = 0; j < g.child_count(); ++j) {
                mass_sum += w.cube_mass(g.child(q, j));
                int_sum += ints[static_cast<std::size_t>(g.flat(g.child(q, j)))];
            }
            CHECK(rel_close(mass_sum, w.cube_mass(q), 1e-12));
            // mu(Q) <f>_Q == sum over children of mu(Q') <f>_{Q'}
            CHECK(close_at_scale(int_sum, ints[static_cast<std::size_t>(id)],
                                 std::abs(int_sum) + w.cube_mass(q), 1e-12));
        }
    }
}

TEST_CASE("negative masses rejected") {
    CHECK_THROWS_AS(testutil::g1_masses({1, -1, 0, 0}), NotNonnegative);
}

TEST_CASE("verify_sparse on fixture families") {
    const WeightedGrid w = testutil::g1_masses({1, 1, 1, 3});
    const CubeId root = w.grid().root();

    CHECK(verify_sparse(w, {root}, 0.5).ok);
    CHECK_FALSE(verify_sparse(w, {root, testutil::left_half(), testutil::right_half()}, 0.5).ok);
    CHECK(verify_sparse(w, {root, testutil::e(3)}, 0.5).ok);  // 3 <= 3 boundary

    const auto rep = verify_sparse(w, {root, testutil::left_half(), testutil::right_half()}, 0.5);
    REQUIRE(rep.entries.size() == 3);
    CHECK(rep.entries[0].children_mass == 6.0);
}

TEST_CASE("zero-mass family cubes pass vacuously") {
    const WeightedGrid w = testutil::g1_masses({0, 0, 1, 3});
    CHECK(verify_sparse(w, {testutil::left_half(), testutil::e(0)}, 0.5).ok);
}

TEST_CASE("stopping structure and residual partition") {
    SplitMix64 rng(11);
    for (int trial = 0; trial < 30; ++trial) {
        const WeightedGrid w = testutil::random_weighted(rng, 5);
        const DyadicGrid& g = w.grid();
        // Random family, always containing the root.
        std::vector<CubeId> cubes{g.root()};
        for (std::int64_t id = 1; id < g.cube_count(); ++id)
            if (rng.u01() < 0.2) cubes.push_back(g.from_flat(id));
        const SparseFamily fam = SparseFamily::build(g, cubes, 0.5);

        const auto owner = fam.cell_owner(g);
        for (int i = 0; i < fam.size(); ++i) {
            // children are strictly inside the parent and pairwise disjoint
            for (int c : fam.children_of(i)) {
                CHECK(fam.cube(c).level > fam.cube(i).level);
                CHECK(g.covers(fam.cube(i), fam.cube(c)));
            }
            // mu(E(F)) + sum children masses == mu(F)
            double echeck = 0.0;
            g.for_each_cell(fam.cube(i), [&](std::int64_t cell) {
                if (owner[static_cast<std::size_t>(cell)] == i) echeck += w.cell_mass(cell);
            });
            CHECK(close_at_scale(echeck, fam.residual_mass(w, i), w.cube_mass(fam.cube(i)),
                                 1e-12));
        }
    }
}
