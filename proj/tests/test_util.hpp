#pragma once

#include <cstdint>
#include <vector>

#include "dyadic/grid.hpp"
#include "dyadic/measure.hpp"
#include "dyadic/rng.hpp"

namespace testutil {

// The hand-worked fixture grid: one dimension, depth 2, cells e0..e3.
inline dyadic::DyadicGrid g1() { return dyadic::DyadicGrid(1, 2); }

inline dyadic::WeightedGrid g1_uniform() {
    return dyadic::WeightedGrid(g1(), {0.25, 0.25, 0.25, 0.25});
}

inline dyadic::WeightedGrid g1_masses(std::vector<double> m) {
    return dyadic::WeightedGrid(g1(), std::move(m));
}

inline dyadic::CubeId e(int i) { return dyadic::CubeId{2, {i, 0}}; }
inline dyadic::CubeId left_half() { return dyadic::CubeId{1, {0, 0}}; }
inline dyadic::CubeId right_half() { return dyadic::CubeId{1, {1, 0}}; }

// Random weighted grid with a sprinkling of zero-mass cells.
inline dyadic::WeightedGrid random_weighted(dyadic::SplitMix64& rng, int depth,
                                            double zero_prob = 0.15) {
    dyadic::DyadicGrid grid(1, depth);
    std::vector<double> masses(static_cast<std::size_t>(grid.cell_count()));
    bool any = false;
    for (auto& m : masses) {
        m = rng.u01() < zero_prob ? 0.0 : rng.u01();
        any = any || m > 0.0;
    }
    if (!any) masses[0] = 1.0;
    return dyadic::WeightedGrid(grid, std::move(masses));
}

inline dyadic::GridFunction random_function(dyadic::SplitMix64& rng,
                                            const dyadic::DyadicGrid& grid,
                                            double lo = -1.0, double hi = 1.0) {
    dyadic::GridFunction f(static_cast<std::size_t>(grid.cell_count()));
    for (auto& v : f) v = lo + (hi - lo) * rng.u01();
    return f;
}

}  // namespace testutil
