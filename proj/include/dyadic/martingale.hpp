#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "dyadic/errors.hpp"
#include "dyadic/grid.hpp"
#include "dyadic/measure.hpp"
#include "dyadic/median.hpp"
#include "dyadic/median_decomposition.hpp"
#include "dyadic/positive_operator.hpp"
#include "dyadic/rng.hpp"
#include "dyadic/sparse_domination.hpp"

namespace dyadic {

// One multiplier per non-leaf cube, each in [-1, 1]. Missing entries are 0.
class TransformCoefficients {
  public:
    TransformCoefficients(const DyadicGrid& grid, std::vector<double> by_flat)
        : eps_(std::move(by_flat)) {
        if (static_cast<std::int64_t>(eps_.size()) != grid.cube_count())
            throw Error("coefficient table must cover every cube");
        for (double e : eps_)
            if (!(std::abs(e) <= 1.0))
                throw CoefficientOutOfRange("multipliers must lie in [-1, 1]");
    }

    static TransformCoefficients constant(const DyadicGrid& grid, double value) {
        return TransformCoefficients(
            grid, std::vector<double>(static_cast<std::size_t>(grid.cube_count()), value));
    }

    static TransformCoefficients random_signs(const DyadicGrid& grid, std::uint64_t seed) {
        SplitMix64 rng(seed);
        std::vector<double> eps(static_cast<std::size_t>(grid.cube_count()));
        for (auto& e : eps) e = rng.u01() < 0.5 ? -1.0 : 1.0;
        return TransformCoefficients(grid, std::move(eps));
    }

    double at_flat(std::int64_t id) const { return eps_[static_cast<std::size_t>(id)]; }
    const std::vector<double>& table() const { return eps_; }

  private:
    std::vector<double> eps_;
};

// Martingale difference at Q: jump from the average on Q to the averages on
// its positive-mass children, supported on those children. Integrates to
// zero against the measure.
inline GridFunction martingale_difference(const WeightedGrid& w, const GridFunction& f,
                                          const CubeId& q) {
    const DyadicGrid& g = w.grid();
    check_cell_sized(g, f, "function values");
    if (g.is_leaf(q)) throw Error("martingale difference needs a non-leaf cube");
    if (w.cube_mass(q) <= 0.0) throw ZeroMassCube("cube of measure zero");

    const double q_avg = average(w, f, q);
    GridFunction out(static_cast<std::size_t>(g.cell_count()), 0.0);
    for (int j = 0; j < g.child_count(); ++j) {
        const CubeId child = g.child(q, j);
        if (w.cube_mass(child) <= 0.0) continue;
        const double delta = average(w, f, child) - q_avg;
        g.for_each_cell(child, [&](std::int64_t c) {
            out[static_cast<std::size_t>(c)] = delta;
        });
    }
    return out;
}

// Sum of the weighted martingale differences over every positive-mass
// non-leaf cube, evaluated cell by cell along ancestor chains.
inline GridFunction martingale_transform(const WeightedGrid& w, const GridFunction& f,
                                         const TransformCoefficients& eps) {
    const DyadicGrid& g = w.grid();
    check_cell_sized(g, f, "function values");
    const auto integrals = cube_integrals(w, f);

    GridFunction out(static_cast<std::size_t>(g.cell_count()), 0.0);
    for (std::int64_t c = 0; c < g.cell_count(); ++c) {
        if (w.cell_mass(c) <= 0.0) continue;
        double prev_avg =
            integrals[static_cast<std::size_t>(g.flat(g.cell_ancestor(c, 0)))] /
            w.cube_mass(g.cell_ancestor(c, 0));
        double acc = 0.0;
        for (int level = 1; level <= g.depth(); ++level) {
            const CubeId q = g.cell_ancestor(c, level);
            const double avg =
                integrals[static_cast<std::size_t>(g.flat(q))] / w.cube_mass(q);
            acc += eps.at_flat(g.flat(g.cell_ancestor(c, level - 1))) * (avg - prev_avg);
            prev_avg = avg;
        }
        out[static_cast<std::size_t>(c)] = acc;
    }
    return out;
}

// Probe-based lower bound for the weak (1,1) norm of the transform.
inline double transform_weak_norm_estimate(const WeightedGrid& w,
                                           const TransformCoefficients& eps,
                                           const ProbePolicy& probes = {}) {
    const DyadicGrid& g = w.grid();
    if (w.total_mass() <= 0.0) throw DegenerateMeasure("measure is identically zero");

    double best = 0.0;
    GridFunction f(static_cast<std::size_t>(g.cell_count()), 0.0);
    for (std::int64_t c = 0; c < g.cell_count(); ++c) {
        const double m = w.cell_mass(c);
        if (m <= 0.0) continue;
        f.assign(f.size(), 0.0);
        f[static_cast<std::size_t>(c)] = 1.0 / m;
        best = std::max(best, weak_l1_quasinorm(w, martingale_transform(w, f, eps)));
    }
    SplitMix64 rng(probes.seed);
    for (int t = 0; t < probes.random_count; ++t) {
        double norm1 = 0.0;
        for (std::int64_t c = 0; c < g.cell_count(); ++c) {
            f[static_cast<std::size_t>(c)] = rng.uniform(-1.0, 1.0);
            norm1 += std::abs(f[static_cast<std::size_t>(c)]) * w.cell_mass(c);
        }
        if (norm1 <= 0.0) continue;
        best = std::max(best,
                        weak_l1_quasinorm(w, martingale_transform(w, f, eps)) / norm1);
    }
    return best;
}

// Dense search for the weak norm on small grids: all signed point masses,
// all signed two-point combinations on an alpha grid, and a batch of random
// signed functions. Intended for cell counts small enough to search well.
struct DenseSearchPolicy {
    int alpha_steps = 19;
    int random_count = 2000;
    std::uint64_t seed = 7;
};

inline double transform_weak_norm_dense(const WeightedGrid& w,
                                        const TransformCoefficients& eps,
                                        const DenseSearchPolicy& policy = {}) {
    const DyadicGrid& g = w.grid();
    std::vector<std::int64_t> cells;
    for (std::int64_t c = 0; c < g.cell_count(); ++c)
        if (w.cell_mass(c) > 0.0) cells.push_back(c);
    if (cells.empty()) throw DegenerateMeasure("measure is identically zero");

    GridFunction f(static_cast<std::size_t>(g.cell_count()), 0.0);
    double best = 0.0;
    const auto probe = [&](double norm1) {
        if (norm1 <= 0.0) return;
        best = std::max(best,
                        weak_l1_quasinorm(w, martingale_transform(w, f, eps)) / norm1);
    };

    for (std::int64_t c : cells) {
        f.assign(f.size(), 0.0);
        f[static_cast<std::size_t>(c)] = 1.0 / w.cell_mass(c);
        probe(1.0);
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
        for (std::size_t j = i + 1; j < cells.size(); ++j) {
            for (int sign = -1; sign <= 1; sign += 2) {
                for (int a = 1; a <= policy.alpha_steps; ++a) {
                    const double alpha =
                        static_cast<double>(a) / (policy.alpha_steps + 1);
                    f.assign(f.size(), 0.0);
                    f[static_cast<std::size_t>(cells[i])] = alpha / w.cell_mass(cells[i]);
                    f[static_cast<std::size_t>(cells[j])] =
                        sign * (1.0 - alpha) / w.cell_mass(cells[j]);
                    probe(1.0);
                }
            }
        }
    }
    SplitMix64 rng(policy.seed);
    for (int t = 0; t < policy.random_count; ++t) {
        double norm1 = 0.0;
        for (std::int64_t c : cells) {
            f[static_cast<std::size_t>(c)] = rng.uniform(-1.0, 1.0);
            norm1 += std::abs(f[static_cast<std::size_t>(c)]) * w.cell_mass(c);
        }
        probe(norm1);
    }
    return best;
}

struct OscillationCheck {
    double lhs = 0.0;    // relative oscillation of Tf about its parent median
    double rhs = 0.0;    // (c_w + 1)(<|f|>_R + <|f|>_parent R)
    double ratio = 0.0;  // 0 when both vanish
};

// The oscillation estimate for a martingale transform on one cube, with the
// weak norm supplied by the caller (probe estimate or dense search).
inline OscillationCheck oscillation_estimate_check(const WeightedGrid& w,
                                                   const GridFunction& f,
                                                   const TransformCoefficients& eps,
                                                   const CubeId& r_cube, double lambda,
                                                   double c_w) {
    const DyadicGrid& g = w.grid();
    const CubeId parent = g.parent(r_cube);  // throws AncestorOutOfGrid at the root
    if (w.cube_mass(r_cube) <= 0.0 || w.cube_mass(parent) <= 0.0)
        throw ZeroMassCube("oscillation check needs positive mass on the cube and parent");

    const GridFunction tf = martingale_transform(w, f, eps);
    const double center = median(w, tf, parent);

    GridFunction absf(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) absf[i] = std::abs(f[i]);

    OscillationCheck check;
    check.lhs = relative_oscillation(w, tf, r_cube, lambda, center);
    check.rhs = (c_w + 1.0) * (average(w, absf, r_cube) + average(w, absf, parent));
    if (check.rhs > 0.0)
        check.ratio = check.lhs / check.rhs;
    else if (check.lhs > 0.0)
        check.ratio = std::numeric_limits<double>::infinity();
    return check;
}

struct MartingalePipelineConfig {
    double lambda = 0.3;
    ProbePolicy probes{};
    DominationConfig domination{};
};

struct MartingaleDominationCertificate {
    GridFunction tf;
    DecompositionCertificate mod;  // median decomposition of Tf, gamma = 2 lambda
    double c1 = 0.0;               // |Tf| against sum (<|f|>_F + <|f|>_parent F) 1_F
    double chat_w = 0.0;           // probe estimate of the transform weak norm
    double c1_normalized = 0.0;    // c1 / (chat_w + 1)
    DominationCertificate reduced;  // complexity-1 part reduced to complexity 0
    double final_constant = 0.0;    // |Tf| against the combined zero-complexity sum
};

// Domination pipeline for a martingale transform: decompose Tf on the
// initial cube, measure the constant against the averages of |f| on family
// cubes and their parents, then reduce the parent-average term (a positive
// operator of complexity one over the family) to complexity zero. The
// initial cube must sit below the root so that every parent exists.
inline MartingaleDominationCertificate dominate_martingale_transform(
    const WeightedGrid& w, const GridFunction& f, const TransformCoefficients& eps,
    const CubeId& f0, const MartingalePipelineConfig& config = {}) {
    const DyadicGrid& g = w.grid();
    check_cell_sized(g, f, "function values");
    if (f0.level < 1)
        throw AncestorOutOfGrid(
            "the domination pipeline needs an initial cube below the root");
    if (w.cube_mass(f0) <= 0.0) throw ZeroMassCube("initial cube has measure zero");
    for (std::int64_t c = 0; c < g.cell_count(); ++c)
        if (w.cell_mass(c) > 0.0 && f[static_cast<std::size_t>(c)] != 0.0 &&
            !g.covers(f0, g.cell_cube(c)))
            throw SupportOutsideMaximalCube("f must be supported on the initial cube");

    MartingaleDominationCertificate cert;
    cert.tf = martingale_transform(w, f, eps);
    cert.mod = build_median_decomposition(w, cert.tf, f0, config.lambda);

    GridFunction absf(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) absf[i] = std::abs(f[i]);
    const auto integrals = cube_integrals(w, absf);
    const auto avg_at = [&](const CubeId& q) {
        return integrals[static_cast<std::size_t>(g.flat(q))] / w.cube_mass(q);
    };

    const SparseFamily& fam = cert.mod.family;
    std::vector<double> fam_term(static_cast<std::size_t>(fam.size()), 0.0);
    for (int i = 0; i < fam.size(); ++i) {
        const CubeId q = fam.cube(i);
        fam_term[static_cast<std::size_t>(i)] = avg_at(q) + avg_at(g.parent(q));
    }
    double c1 = 0.0;
    g.for_each_cell(f0, [&](std::int64_t c) {
        if (w.cell_mass(c) <= 0.0) return;
        double rhs = 0.0;
        for (int level = 0; level <= g.depth(); ++level) {
            const int idx = fam.index_of_flat(g.flat(g.cell_ancestor(c, level)));
            if (idx >= 0) rhs += fam_term[static_cast<std::size_t>(idx)];
        }
        const double lhs = std::abs(cert.tf[static_cast<std::size_t>(c)]);
        if (rhs > 0.0)
            c1 = std::max(c1, lhs / rhs);
        else if (lhs > 0.0)
            c1 = std::numeric_limits<double>::infinity();
    });
    cert.c1 = c1;

    cert.chat_w = transform_weak_norm_estimate(w, eps, config.probes);
    cert.c1_normalized = cert.c1 / (cert.chat_w + 1.0);

    // The parent-average term is the complexity-one positive operator over
    // the family; the stopping construction reduces it to complexity zero.
    const PositiveOperator parent_term(g, fam.cubes(), 1);
    cert.reduced = build_sparse_domination(parent_term, w, absf, config.domination);

    const SparseFamily& red = cert.reduced.family;
    std::vector<double> red_avg(static_cast<std::size_t>(red.size()), 0.0);
    for (int i = 0; i < red.size(); ++i)
        red_avg[static_cast<std::size_t>(i)] = avg_at(red.cube(i));
    double final_constant = 0.0;
    g.for_each_cell(f0, [&](std::int64_t c) {
        if (w.cell_mass(c) <= 0.0) return;
        double rhs = 0.0;
        for (int level = 0; level <= g.depth(); ++level) {
            const std::int64_t id = g.flat(g.cell_ancestor(c, level));
            const int i = fam.index_of_flat(id);
            if (i >= 0) rhs += avg_at(fam.cube(i));
            const int j = red.index_of_flat(id);
            if (j >= 0) rhs += red_avg[static_cast<std::size_t>(j)];
        }
        const double lhs = std::abs(cert.tf[static_cast<std::size_t>(c)]);
        if (rhs > 0.0)
            final_constant = std::max(final_constant, lhs / rhs);
        else if (lhs > 0.0)
            final_constant = std::numeric_limits<double>::infinity();
    });
    cert.final_constant = final_constant;
    return cert;
}

}  // namespace dyadic
