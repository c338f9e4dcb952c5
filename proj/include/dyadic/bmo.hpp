#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "dyadic/errors.hpp"
#include "dyadic/grid.hpp"
#include "dyadic/measure.hpp"
#include "dyadic/median_decomposition.hpp"

namespace dyadic {

// Martingale BMO norm: sup over positive-mass cubes of the mean deviation of
// f from the average on the parent cube (the root is its own parent). The
// parent-centered form stays meaningful for badly non-doubling measures.
struct BmoNorm {
    double value = 0.0;
    CubeId witness{};
};

inline BmoNorm bmo_norm(const WeightedGrid& w, const GridFunction& f) {
    const DyadicGrid& g = w.grid();
    check_cell_sized(g, f, "function values");
    if (w.total_mass() <= 0.0) throw ZeroMassCube("measure is identically zero");
    const auto integrals = cube_integrals(w, f);

    BmoNorm best;
    best.witness = g.root();
    for (std::int64_t id = 0; id < g.cube_count(); ++id) {
        const CubeId q = g.from_flat(id);
        const double mass = w.cube_mass(q);
        if (mass <= 0.0) continue;
        const CubeId parent = q.level > 0 ? g.parent(q) : q;
        const double parent_avg =
            integrals[static_cast<std::size_t>(g.flat(parent))] / w.cube_mass(parent);
        double dev = 0.0;
        g.for_each_cell(q, [&](std::int64_t c) {
            dev += std::abs(f[static_cast<std::size_t>(c)] - parent_avg) * w.cell_mass(c);
        });
        dev /= mass;
        if (dev > best.value) {
            best.value = dev;
            best.witness = q;
        }
    }
    return best;
}

struct BmoReport {
    double bmo_norm = 0.0;
    CubeId witness{};
    // Stopping-tree masses per generation of the median decomposition of f.
    std::vector<double> generation_mass;
    double decay_base = 0.0;  // max over k >= 1 of (mass_k / mass_0)^(1/k)
    double c_param = 0.0;
    double exp_moment = 0.0;  // normalized integral of exp(c |f - <f>_parent| / bmo)
    double fitted_c = 0.0;    // largest grid candidate keeping the moment under cap
    double moment_cap = 0.0;
    DecompositionCertificate decomposition;
};

inline double exp_moment(const WeightedGrid& w, const GridFunction& f, const CubeId& q,
                         double c, double bmo) {
    const DyadicGrid& g = w.grid();
    const CubeId parent = q.level > 0 ? g.parent(q) : q;
    const double parent_avg = average(w, f, parent);
    double moment = 0.0;
    g.for_each_cell(q, [&](std::int64_t cell) {
        moment += std::exp(c * std::abs(f[static_cast<std::size_t>(cell)] - parent_avg) /
                           bmo) *
                  w.cell_mass(cell);
    });
    return moment / w.cube_mass(q);
}

// Exponential-integrability profile behind the John-Nirenberg inequality:
// builds the median decomposition of f on Q, reports the stopping-tree mass
// per generation (geometric with base 2 lambda), evaluates the exponential
// moment at c_param, and fits the largest c on a grid keeping the moment
// under the cap.
inline BmoReport jn_profile(const WeightedGrid& w, const GridFunction& f, const CubeId& q,
                            double lambda, double c_param, double moment_cap = 10.0) {
    const DyadicGrid& g = w.grid();
    check_cell_sized(g, f, "function values");
    if (w.cube_mass(q) <= 0.0) throw ZeroMassCube("cube of measure zero");

    BmoReport report;
    const BmoNorm norm = bmo_norm(w, f);
    report.bmo_norm = norm.value;
    report.witness = norm.witness;
    if (!(norm.value > 0.0)) throw ZeroBmoNorm("f has zero oscillation");

    report.decomposition = build_median_decomposition(w, f, q, lambda);
    const SparseFamily& fam = report.decomposition.family;
    std::vector<int> generation(static_cast<std::size_t>(fam.size()), 0);
    int deepest = 0;
    for (int i = 0; i < fam.size(); ++i) {  // parents precede children in family order
        const int p = fam.parent_of(i);
        generation[static_cast<std::size_t>(i)] =
            p < 0 ? 0 : generation[static_cast<std::size_t>(p)] + 1;
        deepest = std::max(deepest, generation[static_cast<std::size_t>(i)]);
    }
    report.generation_mass.assign(static_cast<std::size_t>(deepest) + 1, 0.0);
    for (int i = 0; i < fam.size(); ++i)
        report.generation_mass[static_cast<std::size_t>(generation[static_cast<std::size_t>(i)])] +=
            w.cube_mass(fam.cube(i));
    for (int k = 1; k <= deepest; ++k)
        report.decay_base = std::max(
            report.decay_base,
            std::pow(report.generation_mass[static_cast<std::size_t>(k)] /
                         report.generation_mass[0],
                     1.0 / k));

    report.c_param = c_param;
    report.moment_cap = moment_cap;
    report.exp_moment = exp_moment(w, f, q, c_param, norm.value);
    for (int step = 1; step <= 200; ++step) {
        const double c = 0.01 * step;
        if (exp_moment(w, f, q, c, norm.value) <= moment_cap)
            report.fitted_c = c;
        else
            break;
    }
    return report;
}

}  // namespace dyadic
