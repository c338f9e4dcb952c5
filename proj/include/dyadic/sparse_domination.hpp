#pragma once

#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <vector>

#include "dyadic/errors.hpp"
#include "dyadic/grid.hpp"
#include "dyadic/measure.hpp"
#include "dyadic/numeric.hpp"
#include "dyadic/positive_operator.hpp"
#include "dyadic/sparse_family.hpp"

namespace dyadic {

struct DominationConfig {
    ProbePolicy probes{};
    // When set, the weak-type threshold starts here instead of at four times
    // the probe estimate. Doubling on a failed measure check still applies.
    std::optional<double> tau1_override;
    // A caller that already probed the weak norm can pass it in and skip the
    // probing pass inside the build.
    std::optional<double> weak_norm_hint;
    int max_adaptation_rounds = 200;
};

struct DominationCertificate {
    SparseFamily family{};
    double tau1 = 0.0;
    double tau2 = 4.0;
    double cert_constant = 0.0;      // tau1 + tau2 * k
    double measured_constant = 0.0;  // max cellwise ratio, re-measured
    int adaptation_rounds = 0;
    double weak_norm_estimate = 0.0;
    int complexity = 0;
};

// Largest ratio lhs(x) / sum_{T owning x} <f>_T over positive-mass cells,
// with 0/0 counted as 0. Returns +infinity when lhs is positive somewhere
// the family sum vanishes.
inline double verify_pointwise_domination(const WeightedGrid& w, const GridFunction& lhs,
                                          const SparseFamily& family,
                                          const GridFunction& f) {
    const DyadicGrid& g = w.grid();
    check_cell_sized(g, lhs, "lhs values");
    check_cell_sized(g, f, "function values");
    const auto integrals = cube_integrals(w, f);

    std::vector<double> avg(static_cast<std::size_t>(family.size()), 0.0);
    for (int i = 0; i < family.size(); ++i) {
        const double mass = w.cube_mass(family.cube(i));
        if (mass > 0.0)
            avg[static_cast<std::size_t>(i)] =
                integrals[static_cast<std::size_t>(g.flat(family.cube(i)))] / mass;
    }

    double worst = 0.0;
    for (std::int64_t c = 0; c < g.cell_count(); ++c) {
        if (w.cell_mass(c) <= 0.0) continue;
        double rhs = 0.0;
        for (int level = 0; level <= g.depth(); ++level) {
            const int idx = family.index_of_flat(g.flat(g.cell_ancestor(c, level)));
            if (idx >= 0) rhs += avg[static_cast<std::size_t>(idx)];
        }
        const double num = lhs[static_cast<std::size_t>(c)];
        if (rhs > 0.0) {
            worst = std::max(worst, num / rhs);
        } else if (num > 0.0) {
            return std::numeric_limits<double>::infinity();
        }
    }
    return worst;
}

namespace detail {

// Sum over the ancestors P of `c` inside `f_cube` that belong to the
// collection of the average of f on the k-th ancestor of P. At the top cube
// of the construction the averaging cubes may overshoot it; everywhere else
// they are required to stay inside `f_cube`.
inline double stopping_partial_sum(const PositiveOperator& op, const WeightedGrid& w,
                                   const std::vector<double>& integrals, const CubeId& c,
                                   const CubeId& f_cube, bool top) {
    const DyadicGrid& g = op.grid();
    double sum = 0.0;
    for (int i = 0; c.level - i >= f_cube.level; ++i) {
        const CubeId p = g.ancestor(c, i);
        if (!op.contains(p)) continue;
        if (!top && p.level - op.complexity() < f_cube.level) continue;
        const CubeId anc = g.ancestor(p, op.complexity());
        const double mass = w.cube_mass(anc);
        if (mass <= 0.0) continue;
        sum += integrals[static_cast<std::size_t>(g.flat(anc))] / mass;
    }
    return sum;
}

}  // namespace detail

// Builds the stopping family certifying pointwise domination of A_k f by the
// zero-complexity sum over the family. Stopping children of F are the maximal
// positive-mass cubes strictly inside F on which either the accumulated
// partial sums exceed tau1 <f>_F or the plain average exceeds 4 <f>_F. If the
// children of some F carry more than half its mass, tau1 doubles and that F
// is redone; only averages-driven children then remain, and those obey the
// quarter bound by disjointness.
inline DominationCertificate build_sparse_domination(const PositiveOperator& op,
                                                     const WeightedGrid& w,
                                                     const GridFunction& f,
                                                     const DominationConfig& config = {}) {
    const DyadicGrid& g = op.grid();
    check_cell_sized(g, f, "function values");
    check_nonnegative(w, f);

    const auto top = op.maximal_cube();
    if (!top) throw NoMaximalCube("collection has no member containing all others");
    const CubeId f0 = *top;
    if (w.cube_mass(f0) <= 0.0)
        throw ZeroMassCube("maximal cube of the collection has measure zero");

    // With positive complexity the averaging cubes of the top members reach
    // above the maximal cube; mass of f out there cannot be dominated by
    // averages inside it.
    if (op.complexity() >= 1 && f0 != g.root()) {
        for (std::int64_t c = 0; c < g.cell_count(); ++c)
            if (w.cell_mass(c) > 0.0 && f[static_cast<std::size_t>(c)] != 0.0 &&
                !g.covers(f0, g.cell_cube(c)))
                throw SupportOutsideMaximalCube(
                    "f must vanish outside the maximal cube when complexity >= 1");
    }

    DominationCertificate cert;
    cert.complexity = op.complexity();
    cert.weak_norm_estimate =
        config.weak_norm_hint ? *config.weak_norm_hint
                              : estimate_weak_norm(op, w, config.probes);
    double tau1 = config.tau1_override.value_or(4.0 * cert.weak_norm_estimate);

    const auto integrals = cube_integrals(w, f);
    const auto avg_of = [&](const CubeId& q) {
        return integrals[static_cast<std::size_t>(g.flat(q))] / w.cube_mass(q);
    };

    std::vector<CubeId> family{f0};
    std::deque<CubeId> queue{f0};
    int rounds = 0;
    while (!queue.empty()) {
        const CubeId f_cube = queue.front();
        queue.pop_front();
        const double favg = avg_of(f_cube);
        if (favg <= 0.0 || g.is_leaf(f_cube)) continue;
        const bool is_top = f_cube == f0;

        std::vector<CubeId> children;
        while (true) {
            children.clear();
            double children_mass = 0.0;
            std::vector<CubeId> stack;
            for (int j = 0; j < g.child_count(); ++j) stack.push_back(g.child(f_cube, j));
            while (!stack.empty()) {
                const CubeId c = stack.back();
                stack.pop_back();
                if (w.cube_mass(c) <= 0.0) continue;
                const bool stop_weak =
                    detail::stopping_partial_sum(op, w, integrals, c, f_cube, is_top) >
                    tau1 * favg;
                const bool stop_avg = avg_of(c) > 4.0 * favg;
                if (stop_weak || stop_avg) {
                    children.push_back(c);
                    children_mass += w.cube_mass(c);
                } else if (!g.is_leaf(c)) {
                    for (int j = 0; j < g.child_count(); ++j) stack.push_back(g.child(c, j));
                }
            }
            if (children_mass <= 0.5 * w.cube_mass(f_cube) * (1.0 + 1e-12)) break;
            tau1 = tau1 > 0.0 ? 2.0 * tau1 : 1.0;
            if (++rounds > config.max_adaptation_rounds)
                throw Error("stopping threshold adaptation did not settle");
        }
        for (const CubeId& c : children) {
            family.push_back(c);
            queue.push_back(c);
        }
    }

    cert.family = SparseFamily::build(g, family, 0.5);
    cert.tau1 = tau1;
    cert.tau2 = 4.0;
    cert.cert_constant = tau1 + cert.tau2 * op.complexity();
    cert.adaptation_rounds = rounds;
    cert.measured_constant = verify_pointwise_domination(w, apply(op, w, f), cert.family, f);
    return cert;
}

}  // namespace dyadic
