#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "dyadic/czd.hpp"
#include "dyadic/errors.hpp"
#include "dyadic/grid.hpp"
#include "dyadic/instance.hpp"
#include "dyadic/martingale.hpp"
#include "dyadic/median_decomposition.hpp"
#include "dyadic/sparse_domination.hpp"

namespace dyadic::io {

using nlohmann::json;

inline json cube_to_json(const CubeId& q, int dimension) {
    json arr = json::array();
    arr.push_back(q.level);
    arr.push_back(q.index[0]);
    if (dimension == 2) arr.push_back(q.index[1]);
    return arr;
}

inline CubeId cube_from_json(const json& arr, int dimension) {
    if (!arr.is_array() || arr.size() != static_cast<std::size_t>(1 + dimension))
        throw BadInstance("cube entries must be [level, index...]");
    CubeId q;
    q.level = arr[0].get<int>();
    q.index[0] = arr[1].get<std::int64_t>();
    if (dimension == 2) q.index[1] = arr[2].get<std::int64_t>();
    return q;
}

inline json instance_to_json(const Instance& inst) {
    json j;
    j["dimension"] = inst.dimension;
    j["depth"] = inst.depth;
    j["masses"] = inst.masses;
    j["f"] = inst.f;
    json coll = json::array();
    for (const CubeId& q : inst.collection) coll.push_back(cube_to_json(q, inst.dimension));
    j["collection"] = coll;
    j["k"] = inst.k;
    j["lambda"] = inst.lambda;
    return j;
}

inline Instance instance_from_json(const json& j) {
    Instance inst;
    try {
        inst.dimension = j.at("dimension").get<int>();
        inst.depth = j.at("depth").get<int>();
        inst.masses = j.at("masses").get<GridFunction>();
        inst.f = j.at("f").get<GridFunction>();
        for (const auto& entry : j.at("collection"))
            inst.collection.push_back(cube_from_json(entry, inst.dimension));
        inst.k = j.at("k").get<int>();
        inst.lambda = j.at("lambda").get<double>();
    } catch (const json::exception& e) {
        throw BadInstance(std::string("malformed instance: ") + e.what());
    }
    const DyadicGrid g = inst.grid();
    if (static_cast<std::int64_t>(inst.masses.size()) != g.cell_count() ||
        static_cast<std::int64_t>(inst.f.size()) != g.cell_count())
        throw BadInstance("cell arrays do not match the grid size");
    for (const CubeId& q : inst.collection)
        if (!g.contains(q)) throw BadInstance("collection cube outside the grid");
    // the collection is a set of cubes; canonicalize once on entry
    std::sort(inst.collection.begin(), inst.collection.end());
    inst.collection.erase(std::unique(inst.collection.begin(), inst.collection.end()),
                          inst.collection.end());
    return inst;
}

// FNV-1a over the canonical serialization; used to key sweep rows.
inline std::string digest(const json& j) {
    const std::string s = j.dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    std::ostringstream out;
    out << std::hex << h;
    return out.str();
}

inline json family_to_json(const SparseFamily& fam, int dimension) {
    json arr = json::array();
    for (const CubeId& q : fam.cubes()) arr.push_back(cube_to_json(q, dimension));
    return arr;
}

inline std::vector<CubeId> cubes_from_json(const json& arr, int dimension) {
    std::vector<CubeId> cubes;
    for (const auto& entry : arr) cubes.push_back(cube_from_json(entry, dimension));
    return cubes;
}

inline json domination_to_json(const DominationCertificate& cert, int dimension) {
    json j;
    j["type"] = "domination";
    j["k"] = cert.complexity;
    j["gamma"] = 0.5;
    j["family"] = family_to_json(cert.family, dimension);
    j["tau1"] = cert.tau1;
    j["tau2"] = cert.tau2;
    j["cert_constant"] = cert.cert_constant;
    j["measured_constant"] = cert.measured_constant;
    j["adaptation_rounds"] = cert.adaptation_rounds;
    j["weak_norm_estimate"] = cert.weak_norm_estimate;
    return j;
}

inline json decomposition_to_json(const DecompositionCertificate& cert, int dimension) {
    json j;
    j["type"] = "median_decomposition";
    j["lambda"] = cert.lambda;
    j["gamma"] = 2.0 * cert.lambda;
    j["f0"] = cube_to_json(cert.f0, dimension);
    j["root_parent_rule"] = cert.rule == RootParentRule::self ? "self" : "forbid";
    j["base_median"] = cert.base_median;
    j["family"] = family_to_json(cert.family, dimension);
    json payload = json::array();
    for (const auto& p : cert.payload) {
        json entry;
        entry["cube"] = cube_to_json(p.cube, dimension);
        entry["omega"] = p.omega;
        entry["jump"] = p.jump;
        entry["rel_osc"] = p.rel_osc;
        payload.push_back(entry);
    }
    j["payload"] = payload;
    j["measured_constant"] = cert.measured_constant;
    return j;
}

inline json czd_to_json(const CZDecomposition& dec, const CzdReport& report,
                        int dimension) {
    json j;
    j["type"] = "czd";
    j["lambda_cz"] = dec.lambda_cz;
    json cubes = json::array();
    for (const CubeId& t : dec.stopping_cubes) cubes.push_back(cube_to_json(t, dimension));
    j["stopping_cubes"] = cubes;
    j["g"] = dec.g;
    json b = json::array();
    for (const auto& [t, values] : dec.b_parts) {
        json entry;
        entry["cube"] = cube_to_json(t, dimension);
        entry["values"] = values;
        b.push_back(entry);
    }
    j["b_parts"] = b;
    json beta = json::array();
    for (const auto& [parent, values] : dec.beta_parts) {
        json entry;
        entry["cube"] = cube_to_json(parent, dimension);
        entry["values"] = values;
        beta.push_back(entry);
    }
    j["beta_parts"] = beta;
    json contribs = json::array();
    for (const auto& c : dec.beta_contributions) {
        json entry;
        entry["cube"] = cube_to_json(c.t, dimension);
        entry["on_t"] = c.on_t;
        entry["on_annulus"] = c.on_annulus;
        contribs.push_back(entry);
    }
    j["beta_contributions"] = contribs;
    j["omega_mass"] = dec.omega_mass;
    j["ok"] = report.ok;
    j["violations"] = report.violations;
    j["b_mass_ratio"] = report.b_mass_ratio;
    j["beta_mass_ratio"] = report.beta_mass_ratio;
    json cp = json::array();
    for (const auto& [p, value] : report.c_p) cp.push_back({{"p", p}, {"C_p", value}});
    j["c_p"] = cp;
    return j;
}

inline json martingale_to_json(const MartingaleDominationCertificate& cert,
                               int dimension) {
    json j;
    j["type"] = "martingale_domination";
    j["tf"] = cert.tf;
    j["mod"] = decomposition_to_json(cert.mod, dimension);
    j["c1"] = cert.c1;
    j["weak_norm_estimate"] = cert.chat_w;
    j["c1_normalized"] = cert.c1_normalized;
    j["reduced"] = domination_to_json(cert.reduced, dimension);
    j["final_constant"] = cert.final_constant;
    return j;
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw BadInstance("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw BadInstance("cannot parse " + path + ": " + e.what());
    }
    return j;
}

inline void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw BadInstance("cannot open " + path + " for writing");
    out << j.dump(2) << "\n";
}

}  // namespace dyadic::io
