#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dyadic/errors.hpp"
#include "dyadic/grid.hpp"

namespace dyadic {

// Piecewise-constant function: one value per finest cell, row-major.
// Values on zero-mass cells are carried along but never enter any
// measure-theoretic statement.
using GridFunction = std::vector<double>;

inline void check_cell_sized(const DyadicGrid& grid, const GridFunction& f,
                             const char* what) {
    if (static_cast<std::int64_t>(f.size()) != grid.cell_count())
        throw Error(std::string(what) + ": expected " +
                    std::to_string(grid.cell_count()) + " cell values, got " +
                    std::to_string(f.size()));
}

// Aggregates per-cell data into one value per cube, children before parents.
// The summation order is fixed (children in row-major order), so results are
// reproducible bit for bit.
inline std::vector<double> aggregate_cells(const DyadicGrid& grid,
                                           const GridFunction& cell_values) {
    std::vector<double> out(static_cast<std::size_t>(grid.cube_count()), 0.0);
    const std::int64_t leaf_off = grid.level_offset(grid.depth());
    for (std::int64_t c = 0; c < grid.cell_count(); ++c)
        out[static_cast<std::size_t>(leaf_off + c)] = cell_values[static_cast<std::size_t>(c)];
    for (int level = grid.depth() - 1; level >= 0; --level) {
        const std::int64_t off = grid.level_offset(level);
        const std::int64_t n = grid.cubes_at_level(level);
        for (std::int64_t i = 0; i < n; ++i) {
            const CubeId q = grid.cube_at(level, i);
            double s = 0.0;
            for (int j = 0; j < grid.child_count(); ++j)
                s += out[static_cast<std::size_t>(grid.flat(grid.child(q, j)))];
            out[static_cast<std::size_t>(off + i)] = s;
        }
    }
    return out;
}

// Discrete measure on the grid: a nonnegative mass per cell, with the mass of
// every cube precomputed so that cube_measure is O(1).
class WeightedGrid {
  public:
    WeightedGrid(DyadicGrid grid, GridFunction cell_mass)
        : grid_(std::move(grid)), cell_mass_(std::move(cell_mass)) {
        check_cell_sized(grid_, cell_mass_, "cell masses");
        for (double m : cell_mass_)
            if (!(m >= 0.0)) throw NotNonnegative("cell masses must be >= 0");
        cube_mass_ = aggregate_cells(grid_, cell_mass_);
    }

    const DyadicGrid& grid() const { return grid_; }
    const GridFunction& cell_masses() const { return cell_mass_; }

    double cell_mass(std::int64_t cell) const {
        return cell_mass_[static_cast<std::size_t>(cell)];
    }
    double cube_mass(const CubeId& q) const {
        return cube_mass_[static_cast<std::size_t>(grid_.flat(q))];
    }
    double cube_mass_flat(std::int64_t id) const {
        return cube_mass_[static_cast<std::size_t>(id)];
    }
    double total_mass() const { return cube_mass(grid_.root()); }

  private:
    DyadicGrid grid_;
    GridFunction cell_mass_;
    std::vector<double> cube_mass_;
};

inline double cube_measure(const WeightedGrid& w, const CubeId& q) {
    return w.cube_mass(q);
}

// Integral of f against the measure, one value per cube (flat-indexed).
inline std::vector<double> cube_integrals(const WeightedGrid& w, const GridFunction& f) {
    check_cell_sized(w.grid(), f, "function values");
    GridFunction weighted(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) weighted[i] = f[i] * w.cell_mass(static_cast<std::int64_t>(i));
    return aggregate_cells(w.grid(), weighted);
}

inline double integral_over(const WeightedGrid& w, const GridFunction& f, const CubeId& q) {
    double s = 0.0;
    w.grid().for_each_cell(q, [&](std::int64_t c) {
        s += f[static_cast<std::size_t>(c)] * w.cell_mass(c);
    });
    return s;
}

inline double average(const WeightedGrid& w, const GridFunction& f, const CubeId& q) {
    const double mass = w.cube_mass(q);
    if (mass <= 0.0) throw ZeroMassCube("average over a cube of measure zero");
    return integral_over(w, f, q) / mass;
}

// Average from a precomputed integral table; the workhorse of the builders.
inline double average_from(const WeightedGrid& w, const std::vector<double>& integrals,
                           const CubeId& q) {
    const double mass = w.cube_mass(q);
    if (mass <= 0.0) throw ZeroMassCube("average over a cube of measure zero");
    return integrals[static_cast<std::size_t>(w.grid().flat(q))] / mass;
}

}  // namespace dyadic
