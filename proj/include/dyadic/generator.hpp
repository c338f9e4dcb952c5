#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <string>
#include <vector>

#include "dyadic/errors.hpp"
#include "dyadic/grid.hpp"
#include "dyadic/instance.hpp"
#include "dyadic/measure.hpp"
#include "dyadic/rng.hpp"

namespace dyadic {

enum class MeasureKind { uniform, random, skewed, atomic };
enum class FunctionKind { random, spike, haar_like };
enum class CollectionKind { nested_chain, random_sparse, full_grid };

// Everything the generator needs; the seed fully determines the instance.
struct GenSpec {
    std::uint64_t seed = 1;
    int dimension = 1;
    int depth = 4;
    MeasureKind measure = MeasureKind::random;
    double skew = 16.0;  // max/min child mass ratio for skewed splits
    FunctionKind f_kind = FunctionKind::random;
    CollectionKind collection = CollectionKind::random_sparse;
    double collection_gamma = 0.5;
    int k = 0;
    double lambda = 0.3;
};

namespace detail {

inline GridFunction gen_masses(SplitMix64& rng, const DyadicGrid& g, MeasureKind kind,
                               double skew) {
    const std::size_t n = static_cast<std::size_t>(g.cell_count());
    GridFunction m(n, 0.0);
    switch (kind) {
        case MeasureKind::uniform:
            m.assign(n, 1.0 / static_cast<double>(n));
            break;
        case MeasureKind::random:
            for (auto& v : m) v = rng.u01() < 0.1 ? 0.0 : rng.u01();
            break;
        case MeasureKind::skewed: {
            // split the unit mass level by level, one heavy child per split
            std::vector<double> level_mass{1.0};
            for (int level = 0; level < g.depth(); ++level) {
                std::vector<double> next(static_cast<std::size_t>(g.cubes_at_level(level + 1)),
                                         0.0);
                for (std::int64_t i = 0; i < g.cubes_at_level(level); ++i) {
                    const CubeId q = g.cube_at(level, i);
                    const int heavy = static_cast<int>(rng.below(
                        static_cast<std::uint64_t>(g.child_count())));
                    const double denom = skew + (g.child_count() - 1);
                    for (int j = 0; j < g.child_count(); ++j) {
                        const CubeId c = g.child(q, j);
                        const double share = (j == heavy ? skew : 1.0) / denom;
                        next[static_cast<std::size_t>(g.linear_in_level(c))] =
                            level_mass[static_cast<std::size_t>(i)] * share;
                    }
                }
                level_mass = std::move(next);
            }
            m = std::move(level_mass);
            break;
        }
        case MeasureKind::atomic:
            for (int atoms = 0; atoms < 3; ++atoms)
                m[static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(n)))] =
                    0.25 + rng.u01();
            break;
    }
    return m;
}

inline GridFunction gen_function(SplitMix64& rng, const DyadicGrid& g, FunctionKind kind) {
    const std::size_t n = static_cast<std::size_t>(g.cell_count());
    GridFunction f(n, 0.0);
    switch (kind) {
        case FunctionKind::random:
            for (auto& v : f) v = rng.uniform(-1.0, 1.0);
            break;
        case FunctionKind::spike:
            for (int s = 0; s < 2; ++s)
                f[static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(n)))] =
                    rng.u01() < 0.5 ? -10.0 : 10.0;
            break;
        case FunctionKind::haar_like:
            for (int bump = 0; bump < 4 * g.depth(); ++bump) {
                const int level = static_cast<int>(rng.below(
                    static_cast<std::uint64_t>(g.depth())));
                const CubeId q = g.cube_at(
                    level, static_cast<std::int64_t>(rng.below(
                               static_cast<std::uint64_t>(g.cubes_at_level(level)))));
                const double amp = rng.uniform(0.25, 1.0) *
                                   std::pow(0.8, level) * (rng.u01() < 0.5 ? -1 : 1);
                for (int j = 0; j < g.child_count(); ++j) {
                    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
                    g.for_each_cell(g.child(q, j), [&](std::int64_t c) {
                        f[static_cast<std::size_t>(c)] += sign * amp;
                    });
                }
            }
            break;
    }
    return f;
}

inline std::vector<CubeId> gen_collection(SplitMix64& rng, const WeightedGrid& w,
                                          const CubeId& top, CollectionKind kind,
                                          double gamma) {
    const DyadicGrid& g = w.grid();
    std::vector<CubeId> cubes{top};
    switch (kind) {
        case CollectionKind::nested_chain: {
            CubeId q = top;
            while (!g.is_leaf(q)) {
                q = g.child(q, static_cast<int>(rng.below(
                                   static_cast<std::uint64_t>(g.child_count()))));
                cubes.push_back(q);
            }
            break;
        }
        case CollectionKind::random_sparse: {
            std::deque<CubeId> queue{top};
            while (!queue.empty()) {
                const CubeId f_cube = queue.front();
                queue.pop_front();
                if (g.is_leaf(f_cube)) continue;
                const double budget = gamma * w.cube_mass(f_cube);
                double used = 0.0;
                // candidates one or two levels down, in random order
                std::vector<CubeId> cands;
                for (int j = 0; j < g.child_count(); ++j) {
                    const CubeId c = g.child(f_cube, j);
                    cands.push_back(c);
                    if (!g.is_leaf(c))
                        for (int i = 0; i < g.child_count(); ++i)
                            cands.push_back(g.child(c, i));
                }
                for (std::size_t i = cands.size(); i > 1; --i)
                    std::swap(cands[i - 1], cands[static_cast<std::size_t>(rng.below(i))]);
                for (const CubeId& c : cands) {
                    const double mass = w.cube_mass(c);
                    if (mass <= 0.0 || rng.u01() < 0.4) continue;
                    bool nested = false;
                    for (const CubeId& chosen : cubes)
                        if (chosen.level > f_cube.level &&
                            (g.covers(chosen, c) || g.covers(c, chosen)))
                            nested = true;
                    if (nested) continue;
                    if (used + mass > budget) continue;
                    used += mass;
                    cubes.push_back(c);
                    queue.push_back(c);
                }
            }
            break;
        }
        case CollectionKind::full_grid:
            for (std::int64_t id = 0; id < g.cube_count(); ++id) {
                const CubeId q = g.from_flat(id);
                if (g.covers(top, q) && !(q == top)) cubes.push_back(q);
            }
            break;
    }
    // collections are sets of cubes
    std::sort(cubes.begin(), cubes.end());
    cubes.erase(std::unique(cubes.begin(), cubes.end()), cubes.end());
    return cubes;
}

}  // namespace detail

// Deterministic instance generation; identical seeds give identical
// instances. The collection always contains its maximal cube, placed at
// level k so that every member sits at least k levels deep; with positive
// complexity the function is supported there.
inline Instance generate(const GenSpec& spec) {
    if (spec.k < 0 || spec.k > spec.depth)
        throw GenInfeasible("complexity must lie within the grid depth");
    if (!(spec.collection_gamma > 0.0 && spec.collection_gamma < 1.0))
        throw GenInfeasible("collection gamma must lie in (0,1)");

    SplitMix64 rng(spec.seed);
    const DyadicGrid g(spec.dimension, spec.depth);
    const CubeId top{spec.k, {0, 0}};

    Instance inst;
    inst.dimension = spec.dimension;
    inst.depth = spec.depth;
    inst.k = spec.k;
    inst.lambda = spec.lambda;

    GridFunction masses;
    for (int tries = 0;; ++tries) {
        if (tries >= 200)
            throw GenInfeasible("could not place mass on the maximal cube");
        masses = detail::gen_masses(rng, g, spec.measure, spec.skew);
        double top_mass = 0.0;
        g.for_each_cell(top, [&](std::int64_t c) {
            top_mass += masses[static_cast<std::size_t>(c)];
        });
        if (top_mass > 0.0) break;
    }
    inst.masses = std::move(masses);
    const WeightedGrid w(g, inst.masses);

    inst.f = detail::gen_function(rng, g, spec.f_kind);
    if (spec.k >= 1)
        for (std::int64_t c = 0; c < g.cell_count(); ++c)
            if (!g.covers(top, g.cell_cube(c))) inst.f[static_cast<std::size_t>(c)] = 0.0;
    // spikes must land on cells the measure can see
    if (spec.f_kind == FunctionKind::spike) {
        bool visible = false;
        for (std::int64_t c = 0; c < g.cell_count(); ++c)
            visible = visible ||
                      (inst.f[static_cast<std::size_t>(c)] != 0.0 && w.cell_mass(c) > 0.0);
        if (!visible) {
            bool placed = false;
            g.for_each_cell(top, [&](std::int64_t c) {
                if (!placed && w.cell_mass(c) > 0.0) {
                    inst.f[static_cast<std::size_t>(c)] = 10.0;
                    placed = true;
                }
            });
        }
    }

    inst.collection = detail::gen_collection(rng, w, top, spec.collection,
                                             spec.collection_gamma);
    return inst;
}

inline MeasureKind measure_kind_from_string(const std::string& s, double& skew) {
    if (s == "uniform") return MeasureKind::uniform;
    if (s == "random") return MeasureKind::random;
    if (s == "atomic") return MeasureKind::atomic;
    if (s.rfind("skewed", 0) == 0) {
        const auto colon = s.find(':');
        if (colon != std::string::npos) skew = std::stod(s.substr(colon + 1));
        return MeasureKind::skewed;
    }
    throw GenInfeasible("unknown measure kind: " + s);
}

inline FunctionKind function_kind_from_string(const std::string& s) {
    if (s == "random") return FunctionKind::random;
    if (s == "spike") return FunctionKind::spike;
    if (s == "haar-like" || s == "haar") return FunctionKind::haar_like;
    throw GenInfeasible("unknown function kind: " + s);
}

inline CollectionKind collection_kind_from_string(const std::string& s, double& gamma) {
    if (s == "nested-chain") return CollectionKind::nested_chain;
    if (s == "full-grid") return CollectionKind::full_grid;
    if (s.rfind("random-sparse", 0) == 0) {
        const auto colon = s.find(':');
        if (colon != std::string::npos) gamma = std::stod(s.substr(colon + 1));
        return CollectionKind::random_sparse;
    }
    throw GenInfeasible("unknown collection kind: " + s);
}

}  // namespace dyadic
