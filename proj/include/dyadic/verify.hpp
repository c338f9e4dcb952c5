#pragma once

// Certificate re-verification for the CLI. Everything is recomputed from the
// instance file through the plain-definition reference routines and the core
// grid/measure primitives; none of the construction code is consulted.

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "dyadic/io.hpp"
#include "dyadic/numeric.hpp"
#include "dyadic/reference.hpp"

namespace dyadic::io {

struct VerifyReport {
    bool ok = true;
    std::vector<std::string> notes;

    void fail(const std::string& msg) {
        ok = false;
        notes.push_back(msg);
    }
};

namespace detail {

// Ratio of lhs to the family-average sum, recomputed cell by cell.
inline double recompute_ratio(const WeightedGrid& w, const GridFunction& lhs,
                              const std::vector<CubeId>& cubes, const GridFunction& f) {
    const DyadicGrid& g = w.grid();
    double worst = 0.0;
    for (std::int64_t c = 0; c < g.cell_count(); ++c) {
        if (w.cell_mass(c) <= 0.0) continue;
        double rhs = 0.0;
        for (const CubeId& t : cubes) {
            if (!g.covers(t, g.cell_cube(c)) || w.cube_mass(t) <= 0.0) continue;
            double integral = 0.0;
            g.for_each_cell(t, [&](std::int64_t cc) {
                integral += f[static_cast<std::size_t>(cc)] * w.cell_mass(cc);
            });
            rhs += integral / w.cube_mass(t);
        }
        const double num = lhs[static_cast<std::size_t>(c)];
        if (rhs > 0.0)
            worst = std::max(worst, num / rhs);
        else if (num > 0.0)
            return std::numeric_limits<double>::infinity();
    }
    return worst;
}

// Stopping-children mass check straight from the cube list.
inline void check_sparse(const WeightedGrid& w, const std::vector<CubeId>& cubes,
                         double gamma, VerifyReport& report) {
    const DyadicGrid& g = w.grid();
    for (const CubeId& f_cube : cubes) {
        const double mass = w.cube_mass(f_cube);
        if (mass <= 0.0) continue;
        double children = 0.0;
        for (const CubeId& c : cubes) {
            if (c.level <= f_cube.level || !g.covers(f_cube, c)) continue;
            bool maximal = true;
            for (const CubeId& mid : cubes)
                if (mid.level > f_cube.level && mid.level < c.level &&
                    g.covers(f_cube, mid) && g.covers(mid, c))
                    maximal = false;
            if (maximal) children += w.cube_mass(c);
        }
        if (!rel_leq(children, gamma * mass))
            report.fail("sparseness fails at a family cube (ratio " +
                        std::to_string(children / mass) + " > " + std::to_string(gamma) +
                        ")");
    }
}

}  // namespace detail

inline VerifyReport verify_domination_file(const Instance& inst, const json& cert) {
    VerifyReport report;
    const WeightedGrid w = inst.weighted();
    const DyadicGrid& g = w.grid();

    const int k = cert.at("k").get<int>();
    const auto family = cubes_from_json(cert.at("family"), inst.dimension);
    const double tau1 = cert.at("tau1").get<double>();
    const double tau2 = cert.at("tau2").get<double>();
    const double cert_constant = cert.at("cert_constant").get<double>();
    const double measured = cert.at("measured_constant").get<double>();

    for (const CubeId& q : family)
        if (!g.contains(q)) report.fail("family cube outside the grid");
    if (!report.ok) return report;

    detail::check_sparse(w, family, 0.5, report);

    if (!rel_close(cert_constant, tau1 + tau2 * k, 1e-12))
        report.fail("certified constant is not tau1 + tau2 k");

    GridFunction absf(inst.f.size());
    for (std::size_t i = 0; i < inst.f.size(); ++i) absf[i] = std::abs(inst.f[i]);
    const GridFunction lhs = ref::apply_positive(w, absf, inst.collection, k);
    const double again = detail::recompute_ratio(w, lhs, family, absf);
    if (!rel_close(again, measured) && !(again == 0.0 && measured == 0.0))
        report.fail("measured constant does not reproduce: stored " +
                    std::to_string(measured) + ", recomputed " + std::to_string(again));
    if (!rel_leq(again, cert_constant))
        report.fail("pointwise domination exceeds the certified constant");
    return report;
}

inline VerifyReport verify_decomposition_file(const Instance& inst, const json& cert) {
    VerifyReport report;
    const WeightedGrid w = inst.weighted();
    const DyadicGrid& g = w.grid();

    const double lambda = cert.at("lambda").get<double>();
    const CubeId f0 = cube_from_json(cert.at("f0"), inst.dimension);
    const auto family = cubes_from_json(cert.at("family"), inst.dimension);
    const double base_median = cert.at("base_median").get<double>();
    const double measured = cert.at("measured_constant").get<double>();
    const bool root_self = cert.at("root_parent_rule").get<std::string>() == "self";

    const auto parent_of = [&](const CubeId& q) {
        if (q.level > 0) return g.parent(q);
        if (root_self) return q;
        throw BadInstance("certificate uses a root parent that the rule forbids");
    };

    detail::check_sparse(w, family, 2.0 * lambda, report);

    if (base_median != ref::median(w, inst.f, parent_of(f0)))
        report.fail("base median does not reproduce");

    // Recompute the payload and the pointwise ratio from scratch.
    double worst = 0.0;
    std::vector<double> omega(family.size()), jump(family.size()), rosc(family.size());
    for (std::size_t i = 0; i < family.size(); ++i) {
        const CubeId q = family[i];
        const double center = ref::median(w, inst.f, parent_of(q));
        GridFunction shifted(inst.f.size());
        for (std::size_t c = 0; c < shifted.size(); ++c)
            shifted[c] = inst.f[c] - center;
        omega[i] = ref::median_oscillation(w, inst.f, q, lambda).radius;
        jump[i] = std::abs(ref::median(w, inst.f, q) - center);
        rosc[i] = ref::relative_oscillation(w, shifted, q, lambda);
        if (!rel_leq(rosc[i], 2.0 * omega[i] + jump[i]))
            report.fail("payload chain inequality fails at a family cube");
    }
    const json& payload = cert.at("payload");
    if (payload.size() != family.size()) {
        report.fail("payload size does not match the family");
        return report;
    }
    for (std::size_t i = 0; i < family.size(); ++i) {
        if (!rel_close(payload[i].at("omega").get<double>(), omega[i], 1e-9) &&
            payload[i].at("omega").get<double>() != omega[i])
            report.fail("stored oscillation does not reproduce");
        if (!rel_close(payload[i].at("jump").get<double>(), jump[i], 1e-9) &&
            payload[i].at("jump").get<double>() != jump[i])
            report.fail("stored median jump does not reproduce");
        if (!rel_close(payload[i].at("rel_osc").get<double>(), rosc[i], 1e-9) &&
            payload[i].at("rel_osc").get<double>() != rosc[i])
            report.fail("stored relative oscillation does not reproduce");
    }

    g.for_each_cell(f0, [&](std::int64_t c) {
        if (w.cell_mass(c) <= 0.0) return;
        double rhs = 0.0;
        for (std::size_t i = 0; i < family.size(); ++i)
            if (g.covers(family[i], g.cell_cube(c))) rhs += omega[i] + jump[i];
        const double lhs = std::abs(inst.f[static_cast<std::size_t>(c)] - base_median);
        if (rhs > 0.0)
            worst = std::max(worst, lhs / rhs);
        else if (lhs > 0.0)
            worst = std::numeric_limits<double>::infinity();
    });
    if (!rel_close(worst, measured) && !(worst == 0.0 && measured == 0.0))
        report.fail("measured constant does not reproduce: stored " +
                    std::to_string(measured) + ", recomputed " + std::to_string(worst));
    if (!rel_leq(worst, 6.0)) report.fail("pointwise constant exceeds 6");
    return report;
}

inline VerifyReport verify_czd_file(const Instance& inst, const json& cert) {
    VerifyReport report;
    const WeightedGrid w = inst.weighted();

    CZDecomposition dec;
    dec.lambda_cz = cert.at("lambda_cz").get<double>();
    dec.stopping_cubes = cubes_from_json(cert.at("stopping_cubes"), inst.dimension);
    dec.g = cert.at("g").get<GridFunction>();
    for (const auto& entry : cert.at("b_parts"))
        dec.b_parts.emplace_back(cube_from_json(entry.at("cube"), inst.dimension),
                                 entry.at("values").get<GridFunction>());
    for (const auto& entry : cert.at("beta_parts"))
        dec.beta_parts.emplace_back(cube_from_json(entry.at("cube"), inst.dimension),
                                    entry.at("values").get<GridFunction>());
    for (const auto& entry : cert.at("beta_contributions"))
        dec.beta_contributions.push_back(
            BetaContribution{cube_from_json(entry.at("cube"), inst.dimension),
                             entry.at("on_t").get<double>(),
                             entry.at("on_annulus").get<double>()});
    dec.omega_mass = cert.at("omega_mass").get<double>();

    double omega_mass = 0.0;
    for (const CubeId& t : dec.stopping_cubes) omega_mass += w.cube_mass(t);
    if (!rel_close(omega_mass, dec.omega_mass) && omega_mass != dec.omega_mass)
        report.fail("stopping-region mass does not reproduce");

    const CzdReport contract = verify_czd_contract(w, inst.f, dec, {2.0});
    if (!contract.ok) {
        for (const auto& v : contract.violations) report.fail(v);
    }

    // The stopping cubes must be exactly the maximal ones above the height.
    const DyadicGrid& g = w.grid();
    GridFunction absf(inst.f.size());
    for (std::size_t i = 0; i < inst.f.size(); ++i) absf[i] = std::abs(inst.f[i]);
    const auto fires = [&](const CubeId& q) {
        return w.cube_mass(q) > 0.0 && average(w, absf, q) > dec.lambda_cz;
    };
    std::size_t expected = 0;
    for (std::int64_t id = 0; id < g.cube_count(); ++id) {
        const CubeId q = g.from_flat(id);
        if (!fires(q)) continue;
        bool ancestor_fires = false;
        for (int up = 1; up <= q.level; ++up)
            ancestor_fires = ancestor_fires || fires(g.ancestor(q, up));
        if (ancestor_fires) continue;
        ++expected;
        bool listed = false;
        for (const CubeId& t : dec.stopping_cubes) listed = listed || t == q;
        if (!listed) report.fail("a maximal cube above the height is missing");
    }
    if (expected != dec.stopping_cubes.size())
        report.fail("stopping cubes are not exactly the maximal ones above the height");
    return report;
}

inline VerifyReport verify_certificate(const Instance& inst, const json& cert) {
    const std::string type = cert.value("type", "");
    if (type == "domination") return verify_domination_file(inst, cert);
    if (type == "median_decomposition") return verify_decomposition_file(inst, cert);
    if (type == "czd") return verify_czd_file(inst, cert);
    VerifyReport report;
    report.fail("unknown certificate type: " + type);
    return report;
}

}  // namespace dyadic::io
