#pragma once

#include <stdexcept>
#include <string>

namespace dyadic {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Navigation above the root of the finite lattice.
struct AncestorOutOfGrid : Error {
    using Error::Error;
};

// An average, median or oscillation was requested on a cube of measure zero.
struct ZeroMassCube : Error {
    using Error::Error;
};

// A nonnegative input carried a negative value on a cell of positive mass.
struct NotNonnegative : Error {
    using Error::Error;
};

// Every cell of the grid has zero mass.
struct DegenerateMeasure : Error {
    using Error::Error;
};

// The operator collection has no member containing all the others.
struct NoMaximalCube : Error {
    using Error::Error;
};

// The input function carries mass outside the maximal cube of the collection
// in a configuration where the domination bound cannot absorb it.
struct SupportOutsideMaximalCube : Error {
    using Error::Error;
};

struct BadLambda : Error {
    using Error::Error;
};

// Calderon-Zygmund height below the root average.
struct RootAboveHeight : Error {
    using Error::Error;
};

struct CoefficientOutOfRange : Error {
    using Error::Error;
};

struct ZeroBmoNorm : Error {
    using Error::Error;
};

// The generator could not satisfy the requested constraints.
struct GenInfeasible : Error {
    using Error::Error;
};

// Malformed instance or certificate file.
struct BadInstance : Error {
    using Error::Error;
};

}  // namespace dyadic
