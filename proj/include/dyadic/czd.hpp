#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dyadic/errors.hpp"
#include "dyadic/grid.hpp"
#include "dyadic/measure.hpp"
#include "dyadic/numeric.hpp"

namespace dyadic {

// One stopping cube's correction term: constant on the cube itself and on the
// rest of its parent, with zero integral.
struct BetaContribution {
    CubeId t{};
    double on_t = 0.0;
    double on_annulus = 0.0;  // value on parent(T) minus T
};

struct CZDecomposition {
    double lambda_cz = 0.0;
    std::vector<CubeId> stopping_cubes;  // maximal with <|f|>_T > lambda
    GridFunction g;
    std::vector<std::pair<CubeId, GridFunction>> b_parts;     // per T
    std::vector<std::pair<CubeId, GridFunction>> beta_parts;  // per distinct parent
    std::vector<BetaContribution> beta_contributions;         // per T, pre-accumulation
    double omega_mass = 0.0;                                  // mass of the union of the T
};

// Height-lambda splitting f = g + b + beta. The stopping cubes are the
// maximal cubes whose |f|-average exceeds the height; requiring the root
// average to stay at or below the height forces every stopping cube to be a
// proper subcube, so its parent exists in the grid. Each b_T strips the mean
// from f on T; the beta term moves that mean onto the sibling region of the
// parent, keeping every piece mean-zero.
inline CZDecomposition cz_decompose(const WeightedGrid& w, const GridFunction& f,
                                    double lambda_cz) {
    const DyadicGrid& g = w.grid();
    check_cell_sized(g, f, "function values");
    if (w.total_mass() <= 0.0) throw ZeroMassCube("measure is identically zero");

    GridFunction absf(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) absf[i] = std::abs(f[i]);
    const auto abs_integrals = cube_integrals(w, absf);
    const auto integrals = cube_integrals(w, f);
    const auto abs_avg = [&](const CubeId& q) {
        return abs_integrals[static_cast<std::size_t>(g.flat(q))] / w.cube_mass(q);
    };

    if (abs_avg(g.root()) > lambda_cz)
        throw RootAboveHeight("height is below the root average of |f|");

    CZDecomposition dec;
    dec.lambda_cz = lambda_cz;

    std::vector<CubeId> stack{g.root()};
    while (!stack.empty()) {
        const CubeId q = stack.back();
        stack.pop_back();
        if (g.is_leaf(q)) continue;
        for (int j = 0; j < g.child_count(); ++j) {
            const CubeId c = g.child(q, j);
            if (w.cube_mass(c) <= 0.0) continue;
            if (abs_avg(c) > lambda_cz) {
                dec.stopping_cubes.push_back(c);
                dec.omega_mass += w.cube_mass(c);
            } else if (!g.is_leaf(c)) {
                stack.push_back(c);
            }
        }
    }

    dec.g = f;
    const auto zero_function = [&] {
        return GridFunction(static_cast<std::size_t>(g.cell_count()), 0.0);
    };
    for (const CubeId& t : dec.stopping_cubes)
        g.for_each_cell(t, [&](std::int64_t c) { dec.g[static_cast<std::size_t>(c)] = 0.0; });

    std::vector<std::pair<CubeId, std::size_t>> beta_index;  // parent -> slot
    for (const CubeId& t : dec.stopping_cubes) {
        const CubeId parent = g.parent(t);
        const double t_mass = w.cube_mass(t);
        const double t_integral = integrals[static_cast<std::size_t>(g.flat(t))];
        const double t_avg = t_integral / t_mass;

        double annulus_mass = 0.0;
        for (int j = 0; j < g.child_count(); ++j) {
            const CubeId sib = g.child(parent, j);
            if (!(sib == t)) annulus_mass += w.cube_mass(sib);
        }
        if (annulus_mass <= 0.0)
            throw Error("empty annulus contradicts maximality of a stopping cube");
        const double transfer = t_integral / annulus_mass;

        GridFunction b = zero_function();
        g.for_each_cell(t, [&](std::int64_t c) {
            b[static_cast<std::size_t>(c)] = f[static_cast<std::size_t>(c)] - t_avg;
        });
        dec.b_parts.emplace_back(t, std::move(b));
        dec.beta_contributions.push_back(BetaContribution{t, t_avg, -transfer});

        std::size_t slot = beta_index.size();
        for (std::size_t i = 0; i < beta_index.size(); ++i)
            if (beta_index[i].first == parent) slot = i;
        if (slot == beta_index.size()) {
            beta_index.emplace_back(parent, dec.beta_parts.size());
            dec.beta_parts.emplace_back(parent, zero_function());
        }
        GridFunction& beta = dec.beta_parts[beta_index[slot].second].second;
        g.for_each_cell(parent, [&](std::int64_t c) {
            const bool inside = g.covers(t, g.cell_cube(c));
            beta[static_cast<std::size_t>(c)] += inside ? t_avg : -transfer;
            if (!inside) dec.g[static_cast<std::size_t>(c)] += transfer;
        });
    }
    return dec;
}

struct CzdReport {
    bool ok = true;
    std::vector<std::string> violations;
    double f_l1 = 0.0;
    double omega_mass = 0.0;
    double b_mass_ratio = 0.0;     // sum ||b_T||_1 / ||f||_1
    double beta_mass_ratio = 0.0;  // sum of contribution L1 masses / ||f||_1
    std::vector<std::pair<double, double>> c_p;  // (p, ||g||_p^p / lambda^(p-1) ||f||_1)
};

// Re-checks every stated property of a decomposition against (w, f) and
// measures the L^p constants of the good part.
inline CzdReport verify_czd_contract(const WeightedGrid& w, const GridFunction& f,
                                     const CZDecomposition& dec,
                                     const std::vector<double>& p_list = {2.0}) {
    const DyadicGrid& g = w.grid();
    CzdReport report;
    const auto fail = [&](const std::string& msg) {
        report.ok = false;
        report.violations.push_back(msg);
    };

    for (std::size_t i = 0; i < f.size(); ++i)
        report.f_l1 += std::abs(f[i]) * w.cell_mass(static_cast<std::int64_t>(i));
    report.omega_mass = dec.omega_mass;

    // Reconstruction g + sum b + sum beta == f, cellwise.
    GridFunction sum = dec.g;
    for (const auto& [t, b] : dec.b_parts)
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += b[i];
    for (const auto& [p, beta] : dec.beta_parts)
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += beta[i];
    for (std::size_t i = 0; i < sum.size(); ++i) {
        double scale = std::abs(f[i]) + std::abs(dec.g[i]);
        for (const auto& [t, b] : dec.b_parts) scale += std::abs(b[i]);
        for (const auto& [p, beta] : dec.beta_parts) scale += std::abs(beta[i]);
        if (!close_at_scale(sum[i], f[i], scale)) {
            fail("reconstruction fails at cell " + std::to_string(i));
            break;
        }
    }

    // Supports and vanishing means. The integral of b_T is a difference of
    // two terms of size up to the |f|-mass of T, so that is the scale the
    // cancellation is measured against.
    for (const auto& [t, b] : dec.b_parts) {
        double integral = 0.0, mass_l1 = 0.0, f_scale = 0.0;
        for (std::int64_t c = 0; c < g.cell_count(); ++c) {
            if (!g.covers(t, g.cell_cube(c))) {
                if (b[static_cast<std::size_t>(c)] != 0.0) fail("b part leaks outside its cube");
                continue;
            }
            integral += b[static_cast<std::size_t>(c)] * w.cell_mass(c);
            mass_l1 += std::abs(b[static_cast<std::size_t>(c)]) * w.cell_mass(c);
            f_scale += std::abs(f[static_cast<std::size_t>(c)]) * w.cell_mass(c);
        }
        if (!close_at_scale(integral, 0.0, 2.0 * f_scale + mass_l1))
            fail("b part has nonzero mean");
        report.b_mass_ratio += mass_l1;
    }
    for (const auto& [parent, beta] : dec.beta_parts) {
        double integral = 0.0, scale = 0.0;
        for (std::int64_t c = 0; c < g.cell_count(); ++c) {
            if (!g.covers(parent, g.cell_cube(c))) {
                if (beta[static_cast<std::size_t>(c)] != 0.0)
                    fail("beta part leaks outside its parent cube");
                continue;
            }
            integral += beta[static_cast<std::size_t>(c)] * w.cell_mass(c);
            scale += std::abs(beta[static_cast<std::size_t>(c)]) * w.cell_mass(c);
        }
        for (const auto& contrib : dec.beta_contributions)
            if (g.parent(contrib.t) == parent)
                scale += std::abs(contrib.on_t) * w.cube_mass(contrib.t);
        if (!close_at_scale(integral, 0.0, scale)) fail("beta part has nonzero mean");
    }

    // Per-contribution checks, before accumulation over shared parents.
    for (const auto& contrib : dec.beta_contributions) {
        const CubeId parent = g.parent(contrib.t);
        double annulus_mass = 0.0;
        for (int j = 0; j < g.child_count(); ++j) {
            const CubeId sib = g.child(parent, j);
            if (!(sib == contrib.t)) annulus_mass += w.cube_mass(sib);
        }
        const double t_mass = w.cube_mass(contrib.t);
        const double integral =
            contrib.on_t * t_mass + contrib.on_annulus * annulus_mass;
        const double l1 = std::abs(contrib.on_t) * t_mass +
                          std::abs(contrib.on_annulus) * annulus_mass;
        if (!close_at_scale(integral, 0.0, l1)) fail("beta contribution has nonzero mean");
        report.beta_mass_ratio += l1;
    }

    if (report.f_l1 > 0.0) {
        report.b_mass_ratio /= report.f_l1;
        report.beta_mass_ratio /= report.f_l1;
        if (!rel_leq(report.b_mass_ratio, 2.0)) fail("b mass exceeds twice ||f||_1");
        if (!rel_leq(report.beta_mass_ratio, 2.0)) fail("beta mass exceeds twice ||f||_1");
        if (!rel_leq(dec.omega_mass, report.f_l1 / dec.lambda_cz))
            fail("stopping region mass exceeds ||f||_1 / lambda");
    }

    // Height bound off the stopping region, exact by leaf maximality.
    std::vector<char> in_omega(static_cast<std::size_t>(g.cell_count()), 0);
    for (const CubeId& t : dec.stopping_cubes)
        g.for_each_cell(t, [&](std::int64_t c) { in_omega[static_cast<std::size_t>(c)] = 1; });
    for (std::int64_t c = 0; c < g.cell_count(); ++c)
        if (!in_omega[static_cast<std::size_t>(c)] && w.cell_mass(c) > 0.0 &&
            std::abs(f[static_cast<std::size_t>(c)]) > dec.lambda_cz) {
            fail("|f| above the height outside the stopping region");
            break;
        }

    for (double p : p_list) {
        double gp = 0.0;
        for (std::size_t i = 0; i < dec.g.size(); ++i)
            gp += std::pow(std::abs(dec.g[i]), p) * w.cell_mass(static_cast<std::int64_t>(i));
        const double denom = std::pow(dec.lambda_cz, p - 1.0) * report.f_l1;
        report.c_p.emplace_back(p, denom > 0.0 ? gp / denom : 0.0);
    }
    return report;
}

}  // namespace dyadic
