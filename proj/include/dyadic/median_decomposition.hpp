#pragma once

#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <vector>

#include "dyadic/errors.hpp"
#include "dyadic/grid.hpp"
#include "dyadic/measure.hpp"
#include "dyadic/median.hpp"
#include "dyadic/numeric.hpp"
#include "dyadic/sparse_family.hpp"

namespace dyadic {

// How to read "the parent of F" when F is the grid root. The self rule makes
// the decomposition degrade to the classical local form at the root; the
// forbid rule insists on an initial cube of level >= 1.
enum class RootParentRule { self, forbid };

struct OscillationPayload {
    CubeId cube{};
    double omega = 0.0;    // oscillation of f on the cube
    double jump = 0.0;     // |median(F) - median(parent F)|
    double rel_osc = 0.0;  // relative oscillation of f about median(parent F)
};

struct DecompositionCertificate {
    SparseFamily family{};     // gamma = 2 lambda
    double lambda = 0.0;
    CubeId f0{};
    RootParentRule rule = RootParentRule::self;
    double base_median = 0.0;  // median of f on the parent of f0
    std::vector<OscillationPayload> payload;  // parallel to family.cubes()
    double measured_constant = 0.0;
};

// Medians of f on every positive-mass cube, NaN elsewhere.
inline std::vector<double> all_cube_medians(const WeightedGrid& w, const GridFunction& f) {
    const DyadicGrid& g = w.grid();
    std::vector<double> med(static_cast<std::size_t>(g.cube_count()),
                            std::numeric_limits<double>::quiet_NaN());
    for (std::int64_t id = 0; id < g.cube_count(); ++id) {
        const CubeId q = g.from_flat(id);
        if (w.cube_mass(q) > 0.0) med[static_cast<std::size_t>(id)] = median(w, f, q);
    }
    return med;
}

inline double verify_median_decomposition(const WeightedGrid& w, const GridFunction& f,
                                          const DecompositionCertificate& cert) {
    const DyadicGrid& g = w.grid();
    double worst = 0.0;
    g.for_each_cell(cert.f0, [&](std::int64_t c) {
        if (w.cell_mass(c) <= 0.0) return;
        double rhs = 0.0;
        for (int level = 0; level <= g.depth(); ++level) {
            const int idx = cert.family.index_of_flat(g.flat(g.cell_ancestor(c, level)));
            if (idx >= 0)
                rhs += cert.payload[static_cast<std::size_t>(idx)].omega +
                       cert.payload[static_cast<std::size_t>(idx)].jump;
        }
        const double lhs = std::abs(f[static_cast<std::size_t>(c)] - cert.base_median);
        if (rhs > 0.0)
            worst = std::max(worst, lhs / rhs);
        else if (lhs > 0.0)
            worst = std::numeric_limits<double>::infinity();
    });
    return worst;
}

// Builds the oscillation stopping family: children of F are the maximal
// positive-mass cubes strictly inside F whose median has jumped by more than
// three relative oscillations of f about the median on the parent of F. The
// construction gives the 2*lambda measure bound per cube and a pointwise
// constant of at most 6 via the quasiminimizer and 3r inequalities.
inline DecompositionCertificate build_median_decomposition(
    const WeightedGrid& w, const GridFunction& f, const CubeId& f0, double lambda,
    RootParentRule rule = RootParentRule::self) {
    check_lambda(lambda);
    const DyadicGrid& g = w.grid();
    check_cell_sized(g, f, "function values");
    if (!g.contains(f0)) throw Error("initial cube outside the grid");
    if (w.cube_mass(f0) <= 0.0) throw ZeroMassCube("initial cube has measure zero");

    const auto parent_of = [&](const CubeId& q) -> CubeId {
        if (q.level > 0) return g.parent(q);
        if (rule == RootParentRule::self) return q;
        throw AncestorOutOfGrid("initial cube must have a parent under this rule");
    };

    const auto med = all_cube_medians(w, f);
    const auto med_at = [&](const CubeId& q) {
        return med[static_cast<std::size_t>(g.flat(q))];
    };

    DecompositionCertificate cert;
    cert.lambda = lambda;
    cert.f0 = f0;
    cert.rule = rule;
    cert.base_median = med_at(parent_of(f0));

    std::vector<CubeId> family{f0};
    std::deque<CubeId> queue{f0};
    std::vector<OscillationPayload> payload;
    std::vector<CubeId> order;
    while (!queue.empty()) {
        const CubeId f_cube = queue.front();
        queue.pop_front();
        const double center = med_at(parent_of(f_cube));
        const double r = relative_oscillation(w, f, f_cube, lambda, center);

        OscillationPayload p;
        p.cube = f_cube;
        p.omega = median_oscillation(w, f, f_cube, lambda).radius;
        p.jump = std::abs(med_at(f_cube) - center);
        p.rel_osc = r;
        order.push_back(f_cube);
        payload.push_back(p);

        if (g.is_leaf(f_cube)) continue;
        std::vector<CubeId> stack;
        for (int j = 0; j < g.child_count(); ++j) stack.push_back(g.child(f_cube, j));
        while (!stack.empty()) {
            const CubeId c = stack.back();
            stack.pop_back();
            if (w.cube_mass(c) <= 0.0) continue;
            if (std::abs(med_at(c) - center) > 3.0 * r) {
                family.push_back(c);
                queue.push_back(c);
            } else if (!g.is_leaf(c)) {
                for (int j = 0; j < g.child_count(); ++j) stack.push_back(g.child(c, j));
            }
        }
    }

    cert.family = SparseFamily::build(g, family, 2.0 * lambda);
    // Payloads were produced in queue order; re-align with the family order.
    cert.payload.assign(static_cast<std::size_t>(cert.family.size()), {});
    for (std::size_t i = 0; i < order.size(); ++i) {
        const int idx = cert.family.index_of_flat(g.flat(order[i]));
        cert.payload[static_cast<std::size_t>(idx)] = payload[i];
    }
    cert.measured_constant = verify_median_decomposition(w, f, cert);
    return cert;
}

}  // namespace dyadic
