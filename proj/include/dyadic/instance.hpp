#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dyadic/errors.hpp"
#include "dyadic/grid.hpp"
#include "dyadic/measure.hpp"

namespace dyadic {

// One problem instance as exchanged through JSON files: a grid, a measure,
// a function, a cube collection and the two scalar parameters. Cell arrays
// are row-major.
struct Instance {
    int dimension = 1;
    int depth = 0;
    GridFunction masses;
    GridFunction f;
    std::vector<CubeId> collection;
    int k = 0;
    double lambda = 0.3;

    DyadicGrid grid() const { return DyadicGrid(dimension, depth); }
    WeightedGrid weighted() const { return WeightedGrid(grid(), masses); }
};

}  // namespace dyadic
