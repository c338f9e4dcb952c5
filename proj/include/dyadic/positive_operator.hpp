#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <unordered_set>
#include <utility>
#include <vector>

#include "dyadic/errors.hpp"
#include "dyadic/grid.hpp"
#include "dyadic/measure.hpp"
#include "dyadic/rng.hpp"

namespace dyadic {

// Positive dyadic operator of complexity k over a collection of cubes:
// each member S contributes the average of f on the k-th ancestor of S,
// spread over S. Every member must sit at least k levels deep so that the
// averaging cube exists in the grid.
class PositiveOperator {
  public:
    PositiveOperator(DyadicGrid grid, std::vector<CubeId> collection, int complexity)
        : grid_(std::move(grid)), collection_(std::move(collection)), k_(complexity) {
        if (k_ < 0) throw Error("complexity must be nonnegative");
        std::sort(collection_.begin(), collection_.end());
        collection_.erase(std::unique(collection_.begin(), collection_.end()),
                          collection_.end());
        for (const CubeId& s : collection_) {
            if (!grid_.contains(s)) throw Error("collection cube outside the grid");
            if (s.level < k_)
                throw AncestorOutOfGrid(
                    "collection cube at level " + std::to_string(s.level) +
                    " has no ancestor " + std::to_string(k_) + " levels up");
            members_.insert(grid_.flat(s));
        }
    }

    const DyadicGrid& grid() const { return grid_; }
    const std::vector<CubeId>& collection() const { return collection_; }
    int complexity() const { return k_; }
    bool contains(const CubeId& q) const { return members_.count(grid_.flat(q)) > 0; }
    bool contains_flat(std::int64_t id) const { return members_.count(id) > 0; }

    // The member containing every other member, when there is one.
    std::optional<CubeId> maximal_cube() const {
        if (collection_.empty()) return std::nullopt;
        const CubeId& top = collection_.front();  // sorted: lowest level first
        for (const CubeId& s : collection_)
            if (!grid_.covers(top, s)) return std::nullopt;
        return top;
    }

  private:
    DyadicGrid grid_;
    std::vector<CubeId> collection_;
    int k_;
    std::unordered_set<std::int64_t> members_;
};

// Indicator sum of the members whose k-th ancestor is Q. The members in that
// fiber all live at level(Q) + k, so they are pairwise disjoint and the sum
// is a 0/1 function supported on Q.
inline GridFunction fiber_indicator(const PositiveOperator& op, const CubeId& q) {
    GridFunction out(static_cast<std::size_t>(op.grid().cell_count()), 0.0);
    for (const CubeId& s : op.collection()) {
        if (s.level != q.level + op.complexity()) continue;
        if (!op.grid().covers(q, s)) continue;
        op.grid().for_each_cell(s, [&](std::int64_t c) {
            out[static_cast<std::size_t>(c)] += 1.0;
        });
    }
    return out;
}

inline void check_nonnegative(const WeightedGrid& w, const GridFunction& f) {
    for (std::int64_t c = 0; c < w.grid().cell_count(); ++c)
        if (w.cell_mass(c) > 0.0 && f[static_cast<std::size_t>(c)] < 0.0)
            throw NotNonnegative("function must be nonnegative on cells of positive mass");
}

// A_k f. Each member deposits one coefficient on itself; a single top-down
// pass then accumulates the coefficients along ancestor chains, so the cost
// is one tree sweep regardless of the collection size.
inline GridFunction apply(const PositiveOperator& op, const WeightedGrid& w,
                          const GridFunction& f) {
    check_cell_sized(w.grid(), f, "function values");
    check_nonnegative(w, f);
    const DyadicGrid& g = op.grid();
    const auto integrals = cube_integrals(w, f);

    std::vector<double> coeff(static_cast<std::size_t>(g.cube_count()), 0.0);
    for (const CubeId& s : op.collection()) {
        const CubeId anc = g.ancestor(s, op.complexity());
        const double mass = w.cube_mass(anc);
        if (mass <= 0.0) continue;  // then S is null as well
        coeff[static_cast<std::size_t>(g.flat(s))] +=
            integrals[static_cast<std::size_t>(g.flat(anc))] / mass;
    }

    for (int level = 1; level <= g.depth(); ++level) {
        const std::int64_t off = g.level_offset(level);
        const std::int64_t n = g.cubes_at_level(level);
        for (std::int64_t i = 0; i < n; ++i) {
            const CubeId q = g.cube_at(level, i);
            coeff[static_cast<std::size_t>(off + i)] +=
                coeff[static_cast<std::size_t>(g.flat(g.parent(q)))];
        }
    }

    const std::int64_t leaf_off = g.level_offset(g.depth());
    GridFunction out(static_cast<std::size_t>(g.cell_count()));
    for (std::int64_t c = 0; c < g.cell_count(); ++c)
        out[static_cast<std::size_t>(c)] = coeff[static_cast<std::size_t>(leaf_off + c)];
    return out;
}

// sup_{t>0} t * mass({|g| > t}), computed exactly: the supremum is attained
// in the limit t -> v from below, so it equals the maximum over attained
// values v of v * mass({|g| >= v}).
inline double weak_l1_quasinorm(const WeightedGrid& w, const GridFunction& g) {
    check_cell_sized(w.grid(), g, "function values");
    std::vector<std::pair<double, double>> vm;
    for (std::int64_t c = 0; c < w.grid().cell_count(); ++c) {
        const double m = w.cell_mass(c);
        if (m > 0.0) vm.emplace_back(std::abs(g[static_cast<std::size_t>(c)]), m);
    }
    std::sort(vm.begin(), vm.end(), std::greater<>());
    double best = 0.0, cum = 0.0;
    for (std::size_t i = 0; i < vm.size(); ++i) {
        cum += vm[i].second;
        if (i + 1 < vm.size() && vm[i + 1].first == vm[i].first) continue;
        if (vm[i].first > 0.0) best = std::max(best, vm[i].first * cum);
    }
    return best;
}

struct ProbePolicy {
    int random_count = 64;
    std::uint64_t seed = 1;
};

// Empirical lower bound for the weak (1,1) norm of the operator: the best
// quasinorm-to-mass ratio over all normalized point masses plus a batch of
// seeded random nonnegative functions.
inline double estimate_weak_norm(const PositiveOperator& op, const WeightedGrid& w,
                                 const ProbePolicy& probes = {}) {
    const DyadicGrid& g = op.grid();
    if (w.total_mass() <= 0.0) throw DegenerateMeasure("measure is identically zero");

    double best = 0.0;
    GridFunction f(static_cast<std::size_t>(g.cell_count()), 0.0);
    for (std::int64_t c = 0; c < g.cell_count(); ++c) {
        const double m = w.cell_mass(c);
        if (m <= 0.0) continue;
        f.assign(f.size(), 0.0);
        f[static_cast<std::size_t>(c)] = 1.0 / m;
        best = std::max(best, weak_l1_quasinorm(w, apply(op, w, f)));
    }

    SplitMix64 rng(probes.seed);
    for (int t = 0; t < probes.random_count; ++t) {
        double norm1 = 0.0;
        for (std::int64_t c = 0; c < g.cell_count(); ++c) {
            f[static_cast<std::size_t>(c)] = rng.u01();
            norm1 += f[static_cast<std::size_t>(c)] * w.cell_mass(c);
        }
        if (norm1 <= 0.0) continue;
        best = std::max(best, weak_l1_quasinorm(w, apply(op, w, f)) / norm1);
    }
    return best;
}

}  // namespace dyadic
