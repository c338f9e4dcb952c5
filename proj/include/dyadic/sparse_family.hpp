#pragma once

#include <algorithm>
#include <cstdint>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "dyadic/errors.hpp"
#include "dyadic/grid.hpp"
#include "dyadic/measure.hpp"
#include "dyadic/numeric.hpp"

namespace dyadic {

// A collection of cubes with its stopping structure: for each member F, its
// stopping children are the maximal members strictly inside F. The gamma
// parameter is the sparseness budget the family is supposed to satisfy:
// sum of children masses <= gamma * mass(F) at every member.
class SparseFamily {
  public:
    static SparseFamily build(const DyadicGrid& grid, std::vector<CubeId> cubes,
                              double gamma) {
        SparseFamily fam;
        fam.gamma_ = gamma;
        std::sort(cubes.begin(), cubes.end());
        cubes.erase(std::unique(cubes.begin(), cubes.end()), cubes.end());
        fam.cubes_ = std::move(cubes);

        std::unordered_map<std::int64_t, int> by_flat;
        by_flat.reserve(fam.cubes_.size());
        for (int i = 0; i < static_cast<int>(fam.cubes_.size()); ++i) {
            if (!grid.contains(fam.cubes_[static_cast<std::size_t>(i)]))
                throw Error("family cube outside the grid");
            by_flat.emplace(grid.flat(fam.cubes_[static_cast<std::size_t>(i)]), i);
        }

        fam.parent_.assign(fam.cubes_.size(), -1);
        fam.children_.assign(fam.cubes_.size(), {});
        for (int i = 0; i < static_cast<int>(fam.cubes_.size()); ++i) {
            CubeId q = fam.cubes_[static_cast<std::size_t>(i)];
            for (int up = 1; up <= q.level; ++up) {
                const CubeId anc = grid.ancestor(q, up);
                auto it = by_flat.find(grid.flat(anc));
                if (it != by_flat.end()) {
                    fam.parent_[static_cast<std::size_t>(i)] = it->second;
                    fam.children_[static_cast<std::size_t>(it->second)].push_back(i);
                    break;
                }
            }
        }
        fam.by_flat_ = std::move(by_flat);
        return fam;
    }

    double gamma() const { return gamma_; }
    int size() const { return static_cast<int>(cubes_.size()); }
    const std::vector<CubeId>& cubes() const { return cubes_; }
    const CubeId& cube(int i) const { return cubes_[static_cast<std::size_t>(i)]; }
    int parent_of(int i) const { return parent_[static_cast<std::size_t>(i)]; }
    const std::vector<int>& children_of(int i) const {
        return children_[static_cast<std::size_t>(i)];
    }
    bool contains_flat(std::int64_t flat) const { return by_flat_.count(flat) > 0; }
    int index_of_flat(std::int64_t flat) const {
        auto it = by_flat_.find(flat);
        return it == by_flat_.end() ? -1 : it->second;
    }

    // Index of the innermost family cube containing each cell, -1 if none.
    std::vector<int> cell_owner(const DyadicGrid& grid) const {
        std::vector<int> owner(static_cast<std::size_t>(grid.cell_count()), -1);
        for (std::int64_t c = 0; c < grid.cell_count(); ++c) {
            for (int level = grid.depth(); level >= 0; --level) {
                auto it = by_flat_.find(grid.flat(grid.cell_ancestor(c, level)));
                if (it != by_flat_.end()) {
                    owner[static_cast<std::size_t>(c)] = it->second;
                    break;
                }
            }
        }
        return owner;
    }

    // Mass of E(F) = F minus its stopping children.
    double residual_mass(const WeightedGrid& w, int i) const {
        double m = w.cube_mass(cube(i));
        for (int c : children_of(i)) m -= w.cube_mass(cube(c));
        return m;
    }

  private:
    double gamma_ = 0.5;
    std::vector<CubeId> cubes_;
    std::vector<int> parent_;
    std::vector<std::vector<int>> children_;
    std::unordered_map<std::int64_t, int> by_flat_;
};

struct SparsenessEntry {
    CubeId cube;
    double mass = 0.0;
    double children_mass = 0.0;
    double ratio = 0.0;  // children_mass / mass, 0 when mass == 0
    bool ok = true;
};

struct SparsenessReport {
    bool ok = true;
    double gamma = 0.0;
    std::vector<SparsenessEntry> entries;
};

// Checks the stopping-children measure condition at every family cube.
// Zero-mass members pass vacuously.
inline SparsenessReport verify_sparse(const WeightedGrid& w,
                                      const std::vector<CubeId>& cubes, double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw BadLambda("gamma must lie in (0,1)");
    const SparseFamily fam = SparseFamily::build(w.grid(), cubes, gamma);
    SparsenessReport report;
    report.gamma = gamma;
    report.entries.reserve(static_cast<std::size_t>(fam.size()));
    for (int i = 0; i < fam.size(); ++i) {
        SparsenessEntry e;
        e.cube = fam.cube(i);
        e.mass = w.cube_mass(e.cube);
        for (int c : fam.children_of(i)) e.children_mass += w.cube_mass(fam.cube(c));
        if (e.mass > 0.0) {
            e.ratio = e.children_mass / e.mass;
            e.ok = rel_leq(e.children_mass, gamma * e.mass);
        }
        report.ok = report.ok && e.ok;
        report.entries.push_back(e);
    }
    return report;
}

}  // namespace dyadic
