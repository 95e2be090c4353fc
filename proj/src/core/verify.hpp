#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "core/ensemble.hpp"

namespace lagedge {

// Every tolerance and threshold used by the acceptance suite and the lemma
// diagnostics, kept in one auditable place. Defaults are compiled in; a JSON
// manifest can override any field by name.
struct ToleranceManifest {
    // 1. oracle equivalence
    double oracle_rel_tol = 1e-8;
    double oracle_runtime_s = 30.0;
    // 2. geometry identities
    double root_product_rel_tol = 1e-10;
    double geometry_runtime_s = 5.0;
    // 3. CLT desk scale
    double clt_mean_abs = 0.3;
    double clt_var_lo = 0.7;
    double clt_var_hi = 1.3;
    double clt_ks = 0.08;
    double clt_runtime_s = 120.0;
    // 4. variance lemma
    double variance_ratio_lo = 0.75;
    double variance_ratio_hi = 1.25;
    double variance_runtime_s = 10.0;
    // 5. A0-sum lemma
    double a0_rel_tol = 0.25;
    double a0_runtime_s = 10.0;
    // 6. uniform R bound
    double unif_r_abs = 1.0;
    // 7. Marchenko-Pastur bulk
    double mp_ks = 0.05;
    // diagnostics-only tolerances
    double b3_rel_tol = 0.30;
    double gap_p90_max = 10.0;
    double e2_median_max = 5.0;
    double gamma_minus_omega_c = 4.0;  // fitted envelope constant

    static ToleranceManifest from_json_file(const std::string& path);
};

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string details;
    double seconds = 0.0;
};

// Runs the nine acceptance criteria. Progress notes go to `progress` when
// non-null (one line per criterion as it finishes).
std::vector<CriterionResult> run_acceptance(const ToleranceManifest& tol,
                                            std::ostream* progress = nullptr);

struct LemmaReport {
    std::string lemma_id;
    double predicted = 0.0;
    double observed = 0.0;
    double ratio = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

// Numerically checks the conclusions of the paper-level lemmas at the given
// parameters; sampled checks use `replicas` replicas.
std::vector<LemmaReport> diagnose(const EnsembleParams& params, std::int64_t replicas,
                                  std::uint64_t master_seed, const ToleranceManifest& tol);

std::string lemma_report_json(const std::vector<LemmaReport>& reports);

}  // namespace lagedge
