#include "core/verify.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "core/clt.hpp"
#include "core/decomposition.hpp"
#include "core/errors.hpp"
#include "core/geometry.hpp"
#include "core/jsonfmt.hpp"
#include "core/logdet.hpp"
#include "core/montecarlo.hpp"

namespace lagedge {

namespace {

constexpr std::uint64_t kVerifySeed = 0x1A60ED6E5EEDULL;

void parallel_for_index(std::int64_t total, const std::function<void(std::int64_t)>& fn) {
    const int workers = static_cast<int>(std::min<std::int64_t>(resolve_workers(0), total));
    if (workers <= 1) {
        for (std::int64_t i = 0; i < total; ++i) fn(i);
        return;
    }
    std::atomic<std::int64_t> next{0};
    std::atomic<bool> failed{false};
    std::string msg;
    std::mutex mu;
    auto body = [&]() {
        for (;;) {
            const std::int64_t i = next.fetch_add(1);
            if (i >= total || failed.load(std::memory_order_relaxed)) return;
            try {
                fn(i);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(mu);
                failed = true;
                if (msg.empty()) msg = e.what();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
    if (failed) throw NumericalError("parallel task failed: " + msg);
}

std::string fmt4(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", x);
    return buf;
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

// --- criterion 1: recursion vs eigenvalue oracle on the seeded grid ---------
CriterionResult criterion_oracle(const ToleranceManifest& tol) {
    Timer timer;
    const std::int64_t ns[] = {5, 20, 100, 200};
    const double lambdas[] = {0.3, 0.7, 1.0};
    const double alphas[] = {1.0, 2.0};
    const std::int64_t replicas = 100;

    struct Case {
        EnsembleParams p;
        std::int64_t rep;
    };
    std::vector<Case> cases;
    for (auto n : ns)
        for (auto lam : lambdas)
            for (auto al : alphas)
                for (std::int64_t r = 0; r < replicas; ++r)
                    cases.push_back({edge_params(n, lam, al), r});

    std::atomic<double> worst{0.0};
    // geometry cache per distinct params (24 of them); rebuild per case is
    // cheap at these sizes, keep it simple.
    parallel_for_index(static_cast<std::int64_t>(cases.size()), [&](std::int64_t k) {
        const auto& c = cases[k];
        const EdgeGeometry geo = build_geometry(c.p);
        const TridiagonalSample s =
            sample_bidiagonal(c.p, kVerifySeed + 1, static_cast<std::uint64_t>(k));
        const RecursionTrace tr = run_recursion(s, geo);
        const double oracle = eigen_oracle(s, c.p);
        const double rel = std::abs(tr.log_abs_D - oracle) / std::abs(oracle);
        double cur = worst.load();
        while (rel > cur && !worst.compare_exchange_weak(cur, rel)) {}
    });

    CriterionResult res;
    res.id = 1;
    res.name = "oracle-equivalence";
    res.seconds = timer.seconds();
    const bool ok = worst.load() < tol.oracle_rel_tol && res.seconds < tol.oracle_runtime_s;
    res.pass = ok;
    res.details = "max rel diff " + fmt4(worst.load()) + " (tol " + fmt4(tol.oracle_rel_tol) +
                  "), " + fmt4(res.seconds) + " s";
    return res;
}

// --- criterion 2: geometry identities at n = 1e5 ----------------------------
CriterionResult criterion_geometry(const ToleranceManifest& tol) {
    Timer timer;
    bool ok = true;
    std::string detail;
    for (double lam : {0.5, 1.0}) {
        const EnsembleParams p = edge_params(100000, lam, 2.0);
        const EdgeGeometry geo = build_geometry(p);
        const std::int64_t n = p.n;
        double worst_prod = 0.0;
        bool monotone = true, in_range = true, g_ok = true;
        const double g_slack = 1.0 + std::pow(p.sigma_n, -1.5);
        for (std::int64_t i = 2; i <= n; ++i) {
            const double expect =
                static_cast<double>(p.m - p.n + i - 1) * (static_cast<double>(i) - 1.0);
            const double prod = geo.rho_plus[i] * geo.rho_minus[i];
            worst_prod = std::max(worst_prod, std::abs(prod - expect) / expect);
            if (!(geo.omega[i] > 0.0 && geo.omega[i] < 1.0)) in_range = false;
            if (i > 2 && !(geo.omega[i] > geo.omega[i - 1])) monotone = false;
            if (i >= 3 && !(geo.g[i] < g_slack / (1.0 - geo.omega[i]))) g_ok = false;
        }
        const bool lam_ok =
            worst_prod < tol.root_product_rel_tol && monotone && in_range && g_ok;
        ok = ok && lam_ok;
        detail += "lambda=" + fmt4(lam) + ": prod " + fmt4(worst_prod) +
                  (monotone ? ", omega monotone" : ", OMEGA NOT MONOTONE") +
                  (g_ok ? ", g bound ok; " : ", G BOUND VIOLATED; ");
    }
    CriterionResult res;
    res.id = 2;
    res.name = "geometry-identities";
    res.seconds = timer.seconds();
    res.pass = ok && res.seconds < tol.geometry_runtime_s;
    res.details = detail + fmt4(res.seconds) + " s";
    return res;
}

// --- criterion 3: CLT desk scale ---------------------------------------------
CriterionResult criterion_clt(const ToleranceManifest& tol) {
    Timer timer;
    bool ok = true;
    std::string detail;
    for (double al : {1.0, 2.0}) {
        SimulationConfig cfg;
        cfg.params = edge_params(4000, 0.5, al);
        cfg.replicas = 2000;
        cfg.master_seed = kVerifySeed + 3;
        const SimulationBatch b = run_batch(cfg);
        const bool this_ok = std::abs(b.mean) <= tol.clt_mean_abs &&
                             b.variance >= tol.clt_var_lo && b.variance <= tol.clt_var_hi &&
                             b.ks_stat < tol.clt_ks;
        ok = ok && this_ok;
        detail += "alpha=" + fmt4(al) + ": mean " + fmt4(b.mean) + ", var " + fmt4(b.variance) +
                  ", ks " + fmt4(b.ks_stat) + "; ";
    }
    CriterionResult res;
    res.id = 3;
    res.name = "clt-desk-scale";
    res.seconds = timer.seconds();
    res.pass = ok && res.seconds < tol.clt_runtime_s;
    res.details = detail + fmt4(res.seconds) + " s";
    return res;
}

// --- criteria 4 and 5: deterministic lemma sums ------------------------------
CriterionResult criterion_variance_lemma(const ToleranceManifest& tol) {
    Timer timer;
    bool ok = true;
    std::string detail;
    for (double lam : {0.5, 1.0}) {
        double ratio[2];
        int k = 0;
        for (std::int64_t n : {std::int64_t{10000}, std::int64_t{1000000}}) {
            const EnsembleParams p = edge_params(n, lam, 2.0);
            const EdgeGeometry geo = build_geometry(p);
            ratio[k++] = variance_sum(geo) /
                         (p.alpha / 3.0 * std::log(static_cast<double>(n)));
        }
        const bool band = ratio[1] >= tol.variance_ratio_lo && ratio[1] <= tol.variance_ratio_hi;
        const bool trend = std::abs(ratio[1] - 1.0) < std::abs(ratio[0] - 1.0);
        ok = ok && band && trend;
        detail += "lambda=" + fmt4(lam) + ": ratio(1e4) " + fmt4(ratio[0]) + ", ratio(1e6) " +
                  fmt4(ratio[1]) + (trend ? " (improving)" : " (NOT IMPROVING)") + "; ";
    }
    CriterionResult res;
    res.id = 4;
    res.name = "variance-lemma";
    res.seconds = timer.seconds();
    res.pass = ok && res.seconds < tol.variance_runtime_s;
    res.details = detail + fmt4(res.seconds) + " s";
    return res;
}

CriterionResult criterion_a0_lemma(const ToleranceManifest& tol) {
    Timer timer;
    bool ok = true;
    std::string detail;
    for (double lam : {0.5, 1.0}) {
        double ratio[2];
        double target = 0.0;
        int k = 0;
        for (std::int64_t n : {std::int64_t{10000}, std::int64_t{1000000}}) {
            const EnsembleParams p = edge_params(n, lam, 2.0);
            const EdgeGeometry geo = build_geometry(p);
            target = clt_constants(p).a0_constant;
            ratio[k++] = a0_sum(geo) / std::log(static_cast<double>(n)) / target;
        }
        const bool band = std::abs(ratio[1] - 1.0) <= tol.a0_rel_tol;
        const bool trend = std::abs(ratio[1] - 1.0) < std::abs(ratio[0] - 1.0);
        ok = ok && band && trend;
        detail += "lambda=" + fmt4(lam) + ": ratio-to-const(1e4) " + fmt4(ratio[0]) +
                  ", (1e6) " + fmt4(ratio[1]) + (trend ? " (improving)" : " (NOT IMPROVING)") +
                  "; ";
    }
    CriterionResult res;
    res.id = 5;
    res.name = "a0-sum-lemma";
    res.seconds = timer.seconds();
    res.pass = ok && res.seconds < tol.a0_runtime_s;
    res.details = detail + fmt4(res.seconds) + " s";
    return res;
}

// --- criterion 6: uniform R bound trend --------------------------------------
CriterionResult criterion_unif_r(const ToleranceManifest& tol) {
    Timer timer;
    double med[2];
    int k = 0;
    for (std::int64_t n : {std::int64_t{1000}, std::int64_t{100000}}) {
        const EnsembleParams p = edge_params(n, 0.5, 2.0);
        const EdgeGeometry geo = build_geometry(p);
        std::vector<double> vals(100);
        parallel_for_index(100, [&](std::int64_t r) {
            const TridiagonalSample s =
                sample_bidiagonal(p, kVerifySeed + 6, static_cast<std::uint64_t>(r));
            vals[r] = run_recursion(s, geo).max_abs_r * std::cbrt(static_cast<double>(n));
        });
        med[k++] = median_of(vals);
    }
    CriterionResult res;
    res.id = 6;
    res.name = "uniform-r-bound";
    res.seconds = timer.seconds();
    res.pass = med[1] < med[0] && med[1] < tol.unif_r_abs;
    res.details = "median max|R| n^(1/3): n=1e3 " + fmt4(med[0]) + ", n=1e5 " + fmt4(med[1]) +
                  " (need decreasing and < " + fmt4(tol.unif_r_abs) + "), " + fmt4(res.seconds) +
                  " s";
    return res;
}

// --- criterion 7: Marchenko-Pastur bulk --------------------------------------
CriterionResult criterion_mp(const ToleranceManifest& tol) {
    Timer timer;
    const EnsembleParams p = edge_params(2000, 0.5, 2.0);
    const TridiagonalSample s = sample_bidiagonal(p, kVerifySeed + 7, 0);
    const std::vector<double> mu = eigenvalues_scaled(s, p);
    double d = 0.0;
    const double n = static_cast<double>(mu.size());
    for (std::size_t k = 0; k < mu.size(); ++k) {
        const double cdf = mp_cdf(mu[k], p.lambda);
        d = std::max(d, std::abs(static_cast<double>(k + 1) / n - cdf));
        d = std::max(d, std::abs(static_cast<double>(k) / n - cdf));
    }
    CriterionResult res;
    res.id = 7;
    res.name = "marchenko-pastur-bulk";
    res.seconds = timer.seconds();
    res.pass = d < tol.mp_ks;
    res.details = "spectral KS " + fmt4(d) + " (tol " + fmt4(tol.mp_ks) + "), " +
                  fmt4(res.seconds) + " s";
    return res;
}

// --- criterion 8: sub-gamma tail bounds --------------------------------------
CriterionResult criterion_tails(const ToleranceManifest&) {
    Timer timer;
    const std::int64_t draws = 1000000;
    bool ok = true;
    std::string detail;
    double worst_margin = 1e300;

    struct Check {
        SubGammaParams sg;
        std::function<double(Rng&)> sampler;
    };
    std::vector<Check> checks;
    checks.push_back({{8.0, 2.0}, [](Rng& r) { return r.chi_squared(4.0) - 4.0; }});

    const EnsembleParams p = edge_params(1000, 0.5, 2.0);
    const EdgeGeometry geo = build_geometry(p);
    for (std::int64_t i : {std::int64_t{250}, std::int64_t{500}, std::int64_t{1000}}) {
        const double scale_a = (static_cast<double>(p.m - p.n + i)) ;
        checks.push_back({subgamma_params(i, geo, SgTarget::alpha_i),
                          [&p, &geo, i, scale_a](Rng& r) {
                              const double a2 = 0.5 * p.alpha *
                                                r.chi_squared(2.0 * scale_a / p.alpha);
                              return (a2 - scale_a) / geo.rho_plus[i];
                          }});
        const double ka = static_cast<double>(p.m - p.n + i - 1);
        const double kb = static_cast<double>(i) - 1.0;
        checks.push_back({subgamma_params(i, geo, SgTarget::x_i),
                          [&p, &geo, i, ka, kb](Rng& r) {
                              const double a2 = 0.5 * p.alpha * r.chi_squared(2.0 * ka / p.alpha);
                              const double b2 = 0.5 * p.alpha * r.chi_squared(2.0 * kb / p.alpha);
                              const double av = (a2 - ka) / geo.rho_plus[i - 1];
                              const double bv = (b2 - kb) / geo.rho_plus[i];
                              return (1.0 + geo.tau[i - 1]) * (geo.delta[i] * av + bv);
                          }});
    }

    std::uint64_t stream = 0;
    for (const auto& chk : checks) {
        for (double t : {1.0, 3.0, 5.0}) {
            Rng rng(derive_stream_seed(kVerifySeed + 8, stream++));
            const TailCheckResult r = tail_check(chk.sg, chk.sampler, t, draws, rng);
            ok = ok && r.pass;
            worst_margin = std::min(worst_margin, r.bound + 3.0 * r.std_error - r.estimate);
        }
    }
    CriterionResult res;
    res.id = 8;
    res.name = "subgamma-tails";
    res.seconds = timer.seconds();
    res.pass = ok;
    res.details = std::string(ok ? "all tail bounds hold" : "TAIL BOUND VIOLATED") +
                  ", min margin " + fmt4(worst_margin) + ", " + fmt4(res.seconds) + " s";
    return res;
}

// --- criterion 9: determinism across worker counts ---------------------------
CriterionResult criterion_determinism(const ToleranceManifest&) {
    Timer timer;
    std::string first;
    bool ok = true;
    for (int workers : {1, 4, 8}) {
        SimulationConfig cfg;
        cfg.params = edge_params(1000, 0.5, 2.0);
        cfg.replicas = 200;
        cfg.master_seed = kVerifySeed + 9;
        cfg.workers = workers;
        const SimulationBatch b = run_batch(cfg);
        std::ostringstream os;
        write_jsonl(b, os);
        if (first.empty())
            first = os.str();
        else
            ok = ok && (os.str() == first);
    }
    CriterionResult res;
    res.id = 9;
    res.name = "determinism";
    res.seconds = timer.seconds();
    res.pass = ok;
    res.details = std::string(ok ? "byte-identical JSONL for workers {1,4,8}"
                                 : "JSONL DIFFERS ACROSS WORKER COUNTS") +
                  ", " + fmt4(res.seconds) + " s";
    return res;
}

}  // namespace

ToleranceManifest ToleranceManifest::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("tolerance manifest: cannot open " + path);
    nlohmann::json j;
    in >> j;
    ToleranceManifest t;
    auto get = [&](const char* key, double& slot) {
        if (j.contains(key)) slot = j.at(key).get<double>();
    };
    get("oracle_rel_tol", t.oracle_rel_tol);
    get("oracle_runtime_s", t.oracle_runtime_s);
    get("root_product_rel_tol", t.root_product_rel_tol);
    get("geometry_runtime_s", t.geometry_runtime_s);
    get("clt_mean_abs", t.clt_mean_abs);
    get("clt_var_lo", t.clt_var_lo);
    get("clt_var_hi", t.clt_var_hi);
    get("clt_ks", t.clt_ks);
    get("clt_runtime_s", t.clt_runtime_s);
    get("variance_ratio_lo", t.variance_ratio_lo);
    get("variance_ratio_hi", t.variance_ratio_hi);
    get("variance_runtime_s", t.variance_runtime_s);
    get("a0_rel_tol", t.a0_rel_tol);
    get("a0_runtime_s", t.a0_runtime_s);
    get("unif_r_abs", t.unif_r_abs);
    get("mp_ks", t.mp_ks);
    get("b3_rel_tol", t.b3_rel_tol);
    get("gap_p90_max", t.gap_p90_max);
    get("e2_median_max", t.e2_median_max);
    get("gamma_minus_omega_c", t.gamma_minus_omega_c);
    return t;
}

std::vector<CriterionResult> run_acceptance(const ToleranceManifest& tol, std::ostream* progress) {
    std::vector<CriterionResult> out;
    const std::vector<std::function<CriterionResult()>> steps = {
        [&] { return criterion_oracle(tol); },      [&] { return criterion_geometry(tol); },
        [&] { return criterion_clt(tol); },         [&] { return criterion_variance_lemma(tol); },
        [&] { return criterion_a0_lemma(tol); },    [&] { return criterion_unif_r(tol); },
        [&] { return criterion_mp(tol); },          [&] { return criterion_tails(tol); },
        [&] { return criterion_determinism(tol); },
    };
    for (const auto& step : steps) {
        CriterionResult r = step();
        if (progress)
            *progress << "criterion " << r.id << " (" << r.name << ") finished in "
                      << fmt4(r.seconds) << " s\n";
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<LemmaReport> diagnose(const EnsembleParams& params, std::int64_t replicas,
                                  std::uint64_t master_seed, const ToleranceManifest& tol) {
    if (replicas < 2) throw InvalidArgumentError("diagnose: need at least 2 replicas");
    const EdgeGeometry geo = build_geometry(params);
    const double n = static_cast<double>(params.n);
    const double logn = std::log(n);
    const CltConstants cc = clt_constants(params);
    std::vector<LemmaReport> out;

    auto push = [&out](const std::string& id, double predicted, double observed, double tolerance,
                       bool pass) {
        LemmaReport r;
        r.lemma_id = id;
        r.predicted = predicted;
        r.observed = observed;
        r.ratio = predicted != 0.0 ? observed / predicted : 0.0;
        r.tolerance = tolerance;
        r.pass = pass;
        out.push_back(r);
    };

    {  // root product identity
        double worst = 0.0;
        for (std::int64_t i = 2; i <= params.n; ++i) {
            const double expect =
                static_cast<double>(params.m - params.n + i - 1) * (static_cast<double>(i) - 1.0);
            worst = std::max(worst, std::abs(geo.rho_plus[i] * geo.rho_minus[i] - expect) / expect);
        }
        push("rho_root_product", 0.0, worst, 1e-10, worst < 1e-10);
    }
    {  // omega monotone in (0,1)
        double min_diff = 1e300;
        bool in_range = true;
        for (std::int64_t i = 2; i <= params.n; ++i) {
            if (!(geo.omega[i] > 0.0 && geo.omega[i] < 1.0)) in_range = false;
            if (i > 2) min_diff = std::min(min_diff, geo.omega[i] - geo.omega[i - 1]);
        }
        push("omega_monotone", 0.0, min_diff, 0.0, in_range && min_diff > 0.0);
    }
    {  // g_i < (1+sigma^{-3/2})/(1-omega_i)
        double worst = 0.0;
        const double slack = 1.0 + std::pow(params.sigma_n, -1.5);
        for (std::int64_t i = 3; i <= params.n; ++i)
            worst = std::max(worst, geo.g[i] * (1.0 - geo.omega[i]) / slack);
        push("gi_upper_bound", 1.0, worst, 0.0, worst < 1.0);
    }
    {  // gamma_i - omega_i < C / (n (1-omega_i))
        double worst = 0.0;
        for (std::int64_t i = 2; i <= params.n; ++i)
            worst = std::max(worst, geo.gamma_minus_omega[i] * n * (1.0 - geo.omega[i]));
        push("gamma_minus_omega_envelope", tol.gamma_minus_omega_c, worst, 0.0,
             worst < tol.gamma_minus_omega_c);
    }
    {  // deterministic lemma sums
        const double a0r = a0_sum(geo) / logn / cc.a0_constant;
        push("sum_a0i_leading_term", 1.0, a0r, tol.a0_rel_tol,
             std::abs(a0r - 1.0) <= tol.a0_rel_tol);
        const double vr = variance_sum(geo) / (cc.variance_constant * logn);
        push("variance_leading_term", 1.0, vr, tol.a0_rel_tol,
             vr >= tol.variance_ratio_lo && vr <= tol.variance_ratio_hi);
        const double ly = lyapunov_ratio(geo);
        const double thresh = std::pow(n, -0.25);
        push("lyapunov_condition", thresh, ly, 0.0, ly < thresh);
    }

    // sampled checks
    std::vector<double> b3(replicas), gap(replicas), maxr(replicas), r2(replicas), loge2(replicas);
    parallel_for_index(replicas, [&](std::int64_t r) {
        const TridiagonalSample s =
            sample_bidiagonal(params, master_seed, static_cast<std::uint64_t>(r));
        const RecursionTrace tr = run_recursion(s, geo);
        const DecompositionTrace dt = build_decomposition(s, geo);
        b3[r] = dt.b3_star_sum;
        gap[r] = std::abs(linearization_gap(tr, dt));
        maxr[r] = tr.max_abs_r * std::cbrt(n);
        r2[r] = std::abs(tr.r[2]);
        const double a1 = (s.a_sq[0] - static_cast<double>(params.m - params.n + 1)) /
                          geo.rho_plus[1];
        loge2[r] = std::abs(std::log(std::abs(1.0 - a1)) + std::log(std::abs(1.0 - tr.r[2])));
    });

    {
        double mean_b3 = 0.0;
        for (double v : b3) mean_b3 += v;
        mean_b3 /= static_cast<double>(replicas);
        const double pred = cc.b3_constant * logn;
        push("b3_star_leading_term", pred, mean_b3, tol.b3_rel_tol,
             std::abs(mean_b3 / pred - 1.0) <= tol.b3_rel_tol);
    }
    {
        std::sort(gap.begin(), gap.end());
        const double p90 = gap[static_cast<std::size_t>(0.9 * (replicas - 1))];
        push("linearization_gap_p90", tol.gap_p90_max, p90, 0.0, p90 < tol.gap_p90_max);
    }
    push("uniform_ri_scaled_median", tol.unif_r_abs, median_of(maxr), 0.0,
         median_of(maxr) < tol.unif_r_abs);
    {
        const double bound = 5.0 / std::sqrt(n) * std::sqrt(logn);
        push("r2_magnitude_median", bound, median_of(r2), 0.0, median_of(r2) < bound);
    }
    push("log_e2_order_one", tol.e2_median_max, median_of(loge2), 0.0,
         median_of(loge2) < tol.e2_median_max);

    return out;
}

std::string lemma_report_json(const std::vector<LemmaReport>& reports) {
    std::string s = "[";
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const auto& r = reports[i];
        JsonObject obj;
        obj.field_str("lemma_id", r.lemma_id)
            .field("predicted", r.predicted)
            .field("observed", r.observed)
            .field("ratio", r.ratio)
            .field("tolerance", r.tolerance)
            .field_bool("pass", r.pass);
        if (i) s += ",";
        s += "\n  " + obj.str();
    }
    s += "\n]";
    return s;
}

}  // namespace lagedge
