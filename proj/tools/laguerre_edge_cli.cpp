// laguerre-edge: command-line front end over the laguerre_edge C API.
//
// Exit codes: 0 success, 1 usage error, 2 numerical/guard/I-O error,
// 3 acceptance failure.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "laguerre_edge/laguerre_edge.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitAcceptance = 3;

struct ParamFlags {
    std::int64_t n = 0;
    double lambda = 1.0;
    double alpha = 2.0;
    std::optional<double> sigma;

    void attach(CLI::App* cmd, bool n_required = true) {
        auto* opt_n = cmd->add_option("--n", n, "matrix size n");
        if (n_required) opt_n->required();
        cmd->add_option("--lambda", lambda, "aspect ratio n/m target, in (0,1]")
            ->check(CLI::Range(1e-12, 1.0));
        cmd->add_option("--alpha", alpha, "alpha = 2/beta (1 = LUE, 2 = LOE)");
        cmd->add_option("--sigma", sigma, "edge offset sigma_n (default (log n)^(3/2))");
    }
};

class ParamsHandle {
  public:
    int create(const ParamFlags& f) {
        const double* sp = f.sigma ? &*f.sigma : nullptr;
        if (le_params_create(f.n, f.lambda, f.alpha, sp, &p_) != LE_OK) {
            std::cerr << "error: " << le_last_error() << "\n";
            return kExitNumerical;
        }
        return kExitOk;
    }
    ~ParamsHandle() { le_params_destroy(p_); }
    le_params* get() const { return p_; }

  private:
    le_params* p_ = nullptr;
};

int status_to_exit(le_status st) {
    if (st == LE_OK) return kExitOk;
    std::cerr << "error: " << le_last_error() << "\n";
    return st == LE_ERR_INVALID_ARGUMENT ? kExitUsage : kExitNumerical;
}

int print_json_result(le_status st, char* json) {
    if (st != LE_OK) return status_to_exit(st);
    std::cout << json << "\n";
    le_string_free(json);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Laguerre beta-ensemble edge log-determinant toolkit"};
    app.require_subcommand(1);

    // constants
    auto* cmd_constants = app.add_subcommand("constants", "print CLT constants as JSON");
    ParamFlags constants_flags;
    constants_flags.attach(cmd_constants);

    // geometry dump
    auto* cmd_geometry = app.add_subcommand("geometry", "deterministic per-index tables");
    auto* cmd_geom_dump = cmd_geometry->add_subcommand("dump", "emit geometry as CSV");
    ParamFlags geom_flags;
    geom_flags.attach(cmd_geom_dump);
    std::string geom_out = "-";
    cmd_geom_dump->add_option("--output", geom_out, "output path, - for stdout");

    // sample
    auto* cmd_sample = app.add_subcommand("sample", "draw one bidiagonal realization as CSV");
    ParamFlags sample_flags;
    sample_flags.attach(cmd_sample);
    std::uint64_t sample_seed = 0;
    std::uint64_t sample_replica = 0;
    std::string sample_out = "-";
    cmd_sample->add_option("--seed", sample_seed, "master seed");
    cmd_sample->add_option("--replica", sample_replica, "replica index");
    cmd_sample->add_option("--output", sample_out, "output path, - for stdout");

    // logdet
    auto* cmd_logdet = app.add_subcommand("logdet", "single-replica log determinant as JSON");
    ParamFlags logdet_flags;
    logdet_flags.attach(cmd_logdet);
    std::uint64_t logdet_seed = 0;
    bool with_oracle = false;
    cmd_logdet->add_option("--seed", logdet_seed, "master seed");
    cmd_logdet->add_flag("--oracle", with_oracle, "also run the eigenvalue oracle (n <= 5000)");

    // simulate
    auto* cmd_sim = app.add_subcommand("simulate", "Monte Carlo batch of CLT statistics");
    ParamFlags sim_flags;
    sim_flags.attach(cmd_sim, /*n_required=*/false);  // --config may supply n
    std::int64_t replicas = 1000;
    std::uint64_t sim_seed = 0;
    int workers = 0;
    bool sim_oracle = false;
    std::string sim_out = "-";
    std::string sim_summary, sim_csv, sim_config;
    cmd_sim->add_option("--replicas", replicas, "number of replicas");
    cmd_sim->add_option("--seed", sim_seed, "master seed");
    cmd_sim->add_option("--workers", workers, "worker threads (0 = auto)");
    cmd_sim->add_flag("--oracle", sim_oracle, "run the eigenvalue oracle per replica");
    cmd_sim->add_option("--output", sim_out, "JSONL output path, - for stdout");
    cmd_sim->add_option("--summary", sim_summary, "summary JSON path");
    cmd_sim->add_option("--csv", sim_csv, "CSV export path");
    cmd_sim->add_option("--config", sim_config, "JSON config file (flags override it)");

    // diagnose
    auto* cmd_diag = app.add_subcommand("diagnose", "lemma-conclusion report as JSON");
    ParamFlags diag_flags;
    diag_flags.attach(cmd_diag);
    std::int64_t diag_replicas = 200;
    std::uint64_t diag_seed = 0;
    std::string diag_manifest;
    cmd_diag->add_option("--replicas", diag_replicas, "replicas for the sampled checks");
    cmd_diag->add_option("--seed", diag_seed, "master seed");
    cmd_diag->add_option("--tolerance-manifest", diag_manifest, "JSON tolerance overrides");

    // verify
    auto* cmd_verify = app.add_subcommand("verify", "run the acceptance suite");
    std::string verify_manifest;
    cmd_verify->add_option("--tolerance-manifest", verify_manifest, "JSON tolerance overrides");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    if (cmd_constants->parsed()) {
        ParamsHandle p;
        if (int rc = p.create(constants_flags)) return rc;
        char* json = nullptr;
        const le_status st = le_constants_json(p.get(), &json);
        return print_json_result(st, json);
    }

    if (cmd_geom_dump->parsed()) {
        ParamsHandle p;
        if (int rc = p.create(geom_flags)) return rc;
        le_geometry* geo = nullptr;
        if (le_status st = le_geometry_build(p.get(), &geo)) return status_to_exit(st);
        const le_status st = le_geometry_dump_csv(geo, geom_out.c_str());
        le_geometry_destroy(geo);
        return status_to_exit(st);
    }
    if (cmd_geometry->parsed()) {
        std::cerr << "error: geometry requires the 'dump' subcommand\n";
        return kExitUsage;
    }

    if (cmd_sample->parsed()) {
        ParamsHandle p;
        if (int rc = p.create(sample_flags)) return rc;
        le_sample* s = nullptr;
        if (le_status st = le_sample_draw(p.get(), sample_seed, sample_replica, &s))
            return status_to_exit(st);
        const le_status st = le_sample_dump_csv(s, sample_out.c_str());
        le_sample_destroy(s);
        return status_to_exit(st);
    }

    if (cmd_logdet->parsed()) {
        ParamsHandle p;
        if (int rc = p.create(logdet_flags)) return rc;
        char* json = nullptr;
        const le_status st = le_logdet_json(p.get(), logdet_seed, with_oracle ? 1 : 0, &json);
        return print_json_result(st, json);
    }

    if (cmd_sim->parsed()) {
        if (!sim_config.empty()) {
            std::ifstream in(sim_config);
            if (!in) {
                std::cerr << "error: cannot open config " << sim_config << "\n";
                return kExitUsage;
            }
            nlohmann::json j;
            try {
                in >> j;
            } catch (const std::exception& e) {
                std::cerr << "error: bad config: " << e.what() << "\n";
                return kExitUsage;
            }
            auto maybe = [&](const char* key, auto& slot) {
                using T = std::decay_t<decltype(slot)>;
                if (j.contains(key)) slot = j.at(key).get<T>();
            };
            if (!cmd_sim->count("--n") && j.contains("n")) sim_flags.n = j.at("n").get<std::int64_t>();
            if (!cmd_sim->count("--lambda") && j.contains("lambda"))
                sim_flags.lambda = j.at("lambda").get<double>();
            if (!cmd_sim->count("--alpha") && j.contains("alpha"))
                sim_flags.alpha = j.at("alpha").get<double>();
            if (!cmd_sim->count("--sigma") && j.contains("sigma"))
                sim_flags.sigma = j.at("sigma").get<double>();
            if (!cmd_sim->count("--replicas")) maybe("replicas", replicas);
            if (!cmd_sim->count("--seed")) maybe("master_seed", sim_seed);
            if (!cmd_sim->count("--workers")) maybe("workers", workers);
            if (!cmd_sim->count("--output")) maybe("output", sim_out);
            if (!cmd_sim->count("--summary")) maybe("summary", sim_summary);
            if (!cmd_sim->count("--csv")) maybe("csv", sim_csv);
        }
        if (sim_flags.n <= 0) {
            std::cerr << "error: simulate needs --n or a config file providing n\n";
            return kExitUsage;
        }
        ParamsHandle p;
        if (int rc = p.create(sim_flags)) return rc;
        const bool progress = true;  // progress to stderr, data to stdout
        const le_status st = le_simulate(
            p.get(), replicas, sim_seed, workers, sim_oracle ? 1 : 0, sim_out.c_str(),
            sim_summary.empty() ? nullptr : sim_summary.c_str(),
            sim_csv.empty() ? nullptr : sim_csv.c_str(), progress ? 1 : 0);
        return status_to_exit(st);
    }

    if (cmd_diag->parsed()) {
        ParamsHandle p;
        if (int rc = p.create(diag_flags)) return rc;
        char* json = nullptr;
        const le_status st =
            le_diagnose_json(p.get(), diag_replicas, diag_seed,
                             diag_manifest.empty() ? nullptr : diag_manifest.c_str(), &json);
        return print_json_result(st, json);
    }

    if (cmd_verify->parsed()) {
        int failures = 0;
        const le_status st =
            le_verify(verify_manifest.empty() ? nullptr : verify_manifest.c_str(), &failures);
        if (st != LE_OK) return status_to_exit(st);
        return failures == 0 ? kExitOk : kExitAcceptance;
    }

    std::cerr << "error: no subcommand\n";
    return kExitUsage;
}
