// Command-line front end: generates instances, runs the constructions, and
// re-verifies certificates. Exit codes: 0 success, 1 verification failure,
// 2 input error.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <future>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "dyadic/bmo.hpp"
#include "dyadic/czd.hpp"
#include "dyadic/generator.hpp"
#include "dyadic/io.hpp"
#include "dyadic/martingale.hpp"
#include "dyadic/median_decomposition.hpp"
#include "dyadic/sparse_domination.hpp"
#include "dyadic/verify.hpp"

namespace {

using namespace dyadic;

std::string fmt17(double v) {
    std::ostringstream out;
    out << std::setprecision(17) << v;
    return out.str();
}

// Run metadata on every report; wall time is informational and excluded from
// reproducibility comparisons.
void stamp(nlohmann::json& out, const std::string& command, const nlohmann::json& instance,
           std::chrono::steady_clock::time_point start) {
    out["command"] = command;
    out["instance_digest"] = dyadic::io::digest(instance);
    out["wall_ms"] = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - start)
                         .count();
}

CubeId parse_cube(const std::string& text, int dimension) {
    std::istringstream in(text);
    CubeId q;
    char sep = ',';
    if (!(in >> q.level)) throw BadInstance("bad cube spec: " + text);
    if (!(in >> sep >> q.index[0])) throw BadInstance("bad cube spec: " + text);
    if (dimension == 2 && !(in >> sep >> q.index[1]))
        throw BadInstance("bad cube spec: " + text);
    return q;
}

TransformCoefficients load_eps(const DyadicGrid& grid, const std::string& eps_file,
                               double eps_const, std::uint64_t eps_seed) {
    if (!eps_file.empty()) {
        const auto j = io::read_json_file(eps_file);
        std::vector<double> table(static_cast<std::size_t>(grid.cube_count()),
                                  j.value("default", 0.0));
        if (j.contains("entries"))
            for (const auto& entry : j.at("entries")) {
                CubeId q;
                q.level = entry.at(0).get<int>();
                q.index[0] = entry.at(1).get<std::int64_t>();
                if (grid.dimension() == 2) q.index[1] = entry.at(2).get<std::int64_t>();
                const double value = entry.back().get<double>();
                if (!grid.contains(q)) throw BadInstance("eps entry outside the grid");
                table[static_cast<std::size_t>(grid.flat(q))] = value;
            }
        return TransformCoefficients(grid, std::move(table));
    }
    if (eps_seed != 0) return TransformCoefficients::random_signs(grid, eps_seed);
    return TransformCoefficients::constant(grid, eps_const);
}

struct SweepRow {
    std::string digest;
    std::string file;
    int k = 0;
    DominationCertificate cert;
    double millis = 0.0;
    std::string status = "ok";
};

int run_sweep(const std::vector<std::string>& files, int k_min, int k_max,
              int probe_count, std::uint64_t probe_seed, int jobs,
              const std::string& out_path) {
    std::vector<SweepRow> rows;
    std::vector<std::future<std::vector<SweepRow>>> futures;
    std::atomic<std::size_t> next{0};

    const auto worker = [&]() {
        std::vector<SweepRow> local;
        for (std::size_t i = next.fetch_add(1); i < files.size(); i = next.fetch_add(1)) {
            const auto j = io::read_json_file(files[i]);
            const Instance inst = io::instance_from_json(j);
            const std::string digest = io::digest(j);
            const WeightedGrid w = inst.weighted();
            GridFunction absf(inst.f.size());
            for (std::size_t c = 0; c < inst.f.size(); ++c) absf[c] = std::abs(inst.f[c]);

            // One threshold per instance across the feasible part of the
            // range keeps the certified constant affine in k.
            double shared_estimate = 0.0;
            std::vector<std::string> infeasible(static_cast<std::size_t>(k_max - k_min + 1));
            for (int k = k_min; k <= k_max; ++k) {
                try {
                    const PositiveOperator op(w.grid(), inst.collection, k);
                    shared_estimate = std::max(
                        shared_estimate,
                        estimate_weak_norm(op, w, ProbePolicy{probe_count, probe_seed}));
                } catch (const Error& e) {
                    infeasible[static_cast<std::size_t>(k - k_min)] = e.what();
                }
            }
            for (int k = k_min; k <= k_max; ++k) {
                SweepRow row;
                row.digest = digest;
                row.file = files[i];
                row.k = k;
                const auto start = std::chrono::steady_clock::now();
                try {
                    const std::string& why = infeasible[static_cast<std::size_t>(k - k_min)];
                    if (!why.empty()) throw Error(why);
                    const PositiveOperator op(w.grid(), inst.collection, k);
                    DominationConfig config;
                    config.probes = ProbePolicy{probe_count, probe_seed};
                    config.tau1_override = 4.0 * shared_estimate;
                    row.cert = build_sparse_domination(op, w, absf, config);
                } catch (const Error& e) {
                    row.status = std::string("error: ") + e.what();
                }
                row.millis = std::chrono::duration<double, std::milli>(
                                 std::chrono::steady_clock::now() - start)
                                 .count();
                local.push_back(std::move(row));
            }
        }
        return local;
    };

    const int worker_count = std::max(1, jobs);
    futures.reserve(static_cast<std::size_t>(worker_count));
    for (int t = 0; t < worker_count; ++t)
        futures.push_back(std::async(std::launch::async, worker));
    for (auto& f : futures) {
        auto local = f.get();
        rows.insert(rows.end(), local.begin(), local.end());
    }
    std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
        return std::tie(a.digest, a.k) < std::tie(b.digest, b.k);
    });

    std::ostringstream csv;
    csv << "digest,file,k,tau1,tau2,cert_constant,measured_constant,adaptation_rounds,"
           "weak_norm_estimate,family_size,wall_ms,status\n";
    for (const auto& row : rows) {
        csv << row.digest << ',' << row.file << ',' << row.k << ',' << fmt17(row.cert.tau1)
            << ',' << fmt17(row.cert.tau2) << ',' << fmt17(row.cert.cert_constant) << ','
            << fmt17(row.cert.measured_constant) << ',' << row.cert.adaptation_rounds
            << ',' << fmt17(row.cert.weak_norm_estimate) << ',' << row.cert.family.size()
            << ',' << fmt17(row.millis) << ',' << row.status << '\n';
    }
    if (out_path.empty()) {
        std::cout << csv.str();
    } else {
        std::ofstream out(out_path);
        if (!out) throw BadInstance("cannot open " + out_path + " for writing");
        out << csv.str();
    }
    const bool any_error = std::any_of(rows.begin(), rows.end(), [](const SweepRow& r) {
        return r.status != "ok";
    });
    return any_error ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sparse domination and median oscillation toolkit on finite dyadic grids"};
    app.require_subcommand(1);

    auto* gen = app.add_subcommand("gen", "generate a deterministic instance file");
    std::uint64_t seed = 1;
    int dimension = 1, depth = 4, k = 0;
    double lambda = 0.3;
    std::string measure = "random", f_kind = "random", collection = "random-sparse:0.5";
    std::string out_path;
    gen->add_option("--seed", seed, "generator seed");
    gen->add_option("--dim", dimension, "grid dimension (1 or 2)");
    gen->add_option("--depth", depth, "grid depth");
    gen->add_option("--measure", measure, "uniform | random | skewed:S | atomic");
    gen->add_option("--f-kind", f_kind, "random | spike | haar-like");
    gen->add_option("--collection", collection, "nested-chain | random-sparse:G | full-grid");
    gen->add_option("--k", k, "operator complexity (places the maximal cube at level k)");
    gen->add_option("--lambda", lambda, "oscillation parameter in (0, 1/2)");
    gen->add_option("--out", out_path, "output instance file")->required();

    auto* dominate = app.add_subcommand("dominate", "build a sparse domination certificate");
    std::string instance_path, cert_path;
    int probe_count = 64;
    std::uint64_t probe_seed = 1;
    double tau1_override = -1.0;
    dominate->add_option("--instance", instance_path, "instance file")->required();
    dominate->add_option("--out", cert_path, "certificate file")->required();
    dominate->add_option("--probe-count", probe_count, "random probes for the weak norm");
    dominate->add_option("--probe-seed", probe_seed, "probe seed");
    dominate->add_option("--tau1", tau1_override, "weak-threshold override");

    auto* mod = app.add_subcommand("mod", "build a median oscillation decomposition");
    std::string mod_instance, mod_out, f0_spec, root_rule = "self";
    double mod_lambda = -1.0;
    mod->add_option("--instance", mod_instance, "instance file")->required();
    mod->add_option("--lambda", mod_lambda, "override the instance lambda");
    mod->add_option("--f0", f0_spec, "initial cube as level,ix[,iy] (default: root)");
    mod->add_option("--root-rule", root_rule, "self | forbid");
    mod->add_option("--out", mod_out, "certificate file")->required();

    auto* czd = app.add_subcommand("czd", "Calderon-Zygmund decomposition report");
    std::string czd_instance, czd_out, p_list_text = "2";
    double height = 0.0;
    czd->add_option("--instance", czd_instance, "instance file")->required();
    czd->add_option("--height", height, "decomposition height")->required();
    czd->add_option("--p", p_list_text, "comma-separated exponents for the g bound");
    czd->add_option("--out", czd_out, "report file")->required();

    auto* mart = app.add_subcommand("martingale", "martingale transform domination pipeline");
    std::string mart_instance, mart_out, eps_file;
    double eps_const = 1.0, mart_lambda = -1.0;
    std::uint64_t eps_seed = 0;
    mart->add_option("--instance", mart_instance, "instance file")->required();
    mart->add_option("--eps", eps_file, "coefficient file");
    mart->add_option("--eps-const", eps_const, "constant coefficients (default 1)");
    mart->add_option("--eps-seed", eps_seed, "random sign coefficients from this seed");
    mart->add_option("--lambda", mart_lambda, "override the instance lambda");
    mart->add_option("--out", mart_out, "certificate file")->required();

    auto* jn = app.add_subcommand("jn", "John-Nirenberg exponential moment profile");
    std::string jn_instance, jn_out;
    double jn_lambda = -1.0, jn_c = 0.1, jn_cap = 10.0;
    jn->add_option("--instance", jn_instance, "instance file")->required();
    jn->add_option("--lambda", jn_lambda, "override the instance lambda");
    jn->add_option("--c", jn_c, "exponential moment parameter");
    jn->add_option("--cap", jn_cap, "moment cap for the fitted constant");
    jn->add_option("--out", jn_out, "report file")->required();

    auto* sweep = app.add_subcommand("sweep", "domination certificates across complexities");
    std::vector<std::string> sweep_files;
    int k_min = 0, k_max = 6, jobs = 1;
    std::string sweep_out;
    sweep->add_option("--instance", sweep_files, "instance files")->required();
    sweep->add_option("--k-min", k_min, "lowest complexity");
    sweep->add_option("--k-max", k_max, "highest complexity");
    sweep->add_option("--jobs", jobs, "parallel workers");
    sweep->add_option("--probe-count", probe_count, "random probes for the weak norm");
    sweep->add_option("--probe-seed", probe_seed, "probe seed");
    sweep->add_option("--out", sweep_out, "CSV output (default stdout)");

    auto* verify = app.add_subcommand("verify", "re-check certificates against an instance");
    std::string verify_instance;
    std::vector<std::string> cert_files;
    verify->add_option("--instance", verify_instance, "instance file")->required();
    verify->add_option("--cert", cert_files, "certificate files")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            GenSpec spec;
            spec.seed = seed;
            spec.dimension = dimension;
            spec.depth = depth;
            spec.measure = measure_kind_from_string(measure, spec.skew);
            spec.f_kind = function_kind_from_string(f_kind);
            spec.collection = collection_kind_from_string(collection, spec.collection_gamma);
            spec.k = k;
            spec.lambda = lambda;
            io::write_json_file(out_path, io::instance_to_json(generate(spec)));
            return 0;
        }

        if (dominate->parsed()) {
            const auto start = std::chrono::steady_clock::now();
            const auto j = io::read_json_file(instance_path);
            const Instance inst = io::instance_from_json(j);
            const WeightedGrid w = inst.weighted();
            GridFunction absf(inst.f.size());
            for (std::size_t i = 0; i < inst.f.size(); ++i) absf[i] = std::abs(inst.f[i]);
            const PositiveOperator op(w.grid(), inst.collection, inst.k);
            DominationConfig config;
            config.probes = ProbePolicy{probe_count, probe_seed};
            if (tau1_override >= 0.0) config.tau1_override = tau1_override;
            const auto cert = build_sparse_domination(op, w, absf, config);
            auto out = io::domination_to_json(cert, inst.dimension);
            stamp(out, "dominate", j, start);
            io::write_json_file(cert_path, out);
            std::cout << "cert_constant " << fmt17(cert.cert_constant)
                      << " measured_constant " << fmt17(cert.measured_constant)
                      << " family " << cert.family.size() << "\n";
            return 0;
        }

        if (mod->parsed()) {
            const auto start = std::chrono::steady_clock::now();
            const auto j = io::read_json_file(mod_instance);
            const Instance inst = io::instance_from_json(j);
            const WeightedGrid w = inst.weighted();
            const double lam = mod_lambda > 0.0 ? mod_lambda : inst.lambda;
            const CubeId f0 = f0_spec.empty() ? w.grid().root()
                                              : parse_cube(f0_spec, inst.dimension);
            const RootParentRule rule =
                root_rule == "forbid" ? RootParentRule::forbid : RootParentRule::self;
            const auto cert = build_median_decomposition(w, inst.f, f0, lam, rule);
            auto out = io::decomposition_to_json(cert, inst.dimension);
            stamp(out, "mod", j, start);
            io::write_json_file(mod_out, out);
            std::cout << "measured_constant " << fmt17(cert.measured_constant)
                      << " family " << cert.family.size() << "\n";
            return 0;
        }

        if (czd->parsed()) {
            const auto start = std::chrono::steady_clock::now();
            const auto j = io::read_json_file(czd_instance);
            const Instance inst = io::instance_from_json(j);
            const WeightedGrid w = inst.weighted();
            std::vector<double> p_list;
            std::istringstream in(p_list_text);
            for (std::string tok; std::getline(in, tok, ',');)
                if (!tok.empty()) p_list.push_back(std::stod(tok));
            const auto dec = cz_decompose(w, inst.f, height);
            const auto report = verify_czd_contract(w, inst.f, dec, p_list);
            auto out = io::czd_to_json(dec, report, inst.dimension);
            stamp(out, "czd", j, start);
            io::write_json_file(czd_out, out);
            std::cout << "stopping_cubes " << dec.stopping_cubes.size() << " ok "
                      << (report.ok ? "yes" : "no") << "\n";
            return report.ok ? 0 : 1;
        }

        if (mart->parsed()) {
            const auto start = std::chrono::steady_clock::now();
            const auto j = io::read_json_file(mart_instance);
            const Instance inst = io::instance_from_json(j);
            const WeightedGrid w = inst.weighted();
            const PositiveOperator op(w.grid(), inst.collection, std::max(inst.k, 1));
            const auto top = op.maximal_cube();
            if (!top) throw BadInstance("instance collection has no maximal cube");
            MartingalePipelineConfig config;
            config.lambda = mart_lambda > 0.0 ? mart_lambda : inst.lambda;
            const auto eps = load_eps(w.grid(), eps_file, eps_const, eps_seed);
            const auto cert = dominate_martingale_transform(w, inst.f, eps, *top, config);
            auto out = io::martingale_to_json(cert, inst.dimension);
            stamp(out, "martingale", j, start);
            io::write_json_file(mart_out, out);
            std::cout << "c1 " << fmt17(cert.c1) << " final_constant "
                      << fmt17(cert.final_constant) << "\n";
            return 0;
        }

        if (jn->parsed()) {
            const auto start = std::chrono::steady_clock::now();
            const auto j = io::read_json_file(jn_instance);
            const Instance inst = io::instance_from_json(j);
            const WeightedGrid w = inst.weighted();
            const double lam = jn_lambda > 0.0 ? jn_lambda : inst.lambda;
            const auto report = jn_profile(w, inst.f, w.grid().root(), lam, jn_c, jn_cap);
            nlohmann::json out;
            out["type"] = "jn";
            out["lambda"] = lam;
            out["bmo_norm"] = report.bmo_norm;
            out["witness"] = io::cube_to_json(report.witness, inst.dimension);
            out["generation_mass"] = report.generation_mass;
            out["decay_base"] = report.decay_base;
            out["c"] = report.c_param;
            out["exp_moment"] = report.exp_moment;
            out["fitted_c"] = report.fitted_c;
            out["moment_cap"] = report.moment_cap;
            stamp(out, "jn", j, start);
            io::write_json_file(jn_out, out);
            std::cout << "bmo " << fmt17(report.bmo_norm) << " fitted_c "
                      << fmt17(report.fitted_c) << "\n";
            return 0;
        }

        if (sweep->parsed())
            return run_sweep(sweep_files, k_min, k_max, probe_count, probe_seed, jobs,
                             sweep_out);

        if (verify->parsed()) {
            const auto j = io::read_json_file(verify_instance);
            const Instance inst = io::instance_from_json(j);
            bool ok = true;
            for (const auto& path : cert_files) {
                const auto report = io::verify_certificate(inst, io::read_json_file(path));
                for (const auto& note : report.notes)
                    std::cerr << path << ": " << note << "\n";
                std::cout << path << ": " << (report.ok ? "ok" : "FAILED") << "\n";
                ok = ok && report.ok;
            }
            return ok ? 0 : 1;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
