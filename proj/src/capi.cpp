#include "laguerre_edge/laguerre_edge.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include "core/clt.hpp"
#include "core/decomposition.hpp"
#include "core/ensemble.hpp"
#include "core/errors.hpp"
#include "core/geometry.hpp"
#include "core/jsonfmt.hpp"
#include "core/logdet.hpp"
#include "core/montecarlo.hpp"
#include "core/verify.hpp"

using namespace lagedge;

struct le_params {
    EnsembleParams v;
};
struct le_geometry {
    EdgeGeometry v;
};
struct le_sample {
    TridiagonalSample v;
    EnsembleParams params;
};
struct le_trace {
    RecursionTrace v;
};

namespace {

thread_local std::string g_last_error;

le_status set_error(const std::exception& e) {
    g_last_error = e.what();
    if (const auto* err = dynamic_cast<const Error*>(&e))
        return static_cast<le_status>(static_cast<int>(err->code()));
    return LE_ERR_INTERNAL;
}

template <typename Fn>
le_status guarded(Fn&& fn) {
    try {
        fn();
        return LE_OK;
    } catch (const std::exception& e) {
        return set_error(e);
    } catch (...) {
        g_last_error = "unknown error";
        return LE_ERR_INTERNAL;
    }
}

le_status require(bool cond, const char* msg) {
    if (cond) return LE_OK;
    g_last_error = msg;
    return LE_ERR_INVALID_ARGUMENT;
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

// Writes through `fn` to the file at `path`, or to stdout for NULL/"-".
template <typename Fn>
void with_output(const char* path, Fn&& fn) {
    if (path == nullptr || std::strcmp(path, "-") == 0) {
        fn(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream out(path);
    if (!out) throw IoError(std::string("cannot open for writing: ") + path);
    fn(out);
    if (!out) throw IoError(std::string("write failure: ") + path);
}

}  // namespace

extern "C" {

const char* le_last_error(void) { return g_last_error.c_str(); }

void le_string_free(char* s) { std::free(s); }

le_status le_params_create(int64_t n, double lambda, double alpha, const double* sigma_override,
                           le_params** out) {
    if (le_status st = require(out != nullptr, "le_params_create: out is NULL")) return st;
    return guarded([&] {
        std::optional<double> sigma;
        if (sigma_override) sigma = *sigma_override;
        *out = new le_params{edge_params(n, lambda, alpha, sigma)};
    });
}

void le_params_destroy(le_params* p) { delete p; }

int64_t le_params_n(const le_params* p) { return p->v.n; }
int64_t le_params_m(const le_params* p) { return p->v.m; }
double le_params_alpha(const le_params* p) { return p->v.alpha; }
double le_params_lambda(const le_params* p) { return p->v.lambda; }
double le_params_sigma(const le_params* p) { return p->v.sigma_n; }
double le_params_gamma(const le_params* p) { return p->v.gamma; }
double le_params_d_plus(const le_params* p) { return p->v.d_plus; }
double le_params_d_minus(const le_params* p) { return p->v.d_minus; }

le_status le_constants_json(const le_params* p, char** out_json) {
    if (le_status st = require(p && out_json, "le_constants_json: NULL argument")) return st;
    return guarded([&] {
        const CltConstants c = clt_constants(p->v);
        JsonObject obj;
        obj.field("n", fmt_i64(p->v.n))
            .field("m", fmt_i64(p->v.m))
            .field("lambda", p->v.lambda)
            .field("alpha", p->v.alpha)
            .field("sigma_n", p->v.sigma_n)
            .field("gamma", p->v.gamma)
            .field("d_plus", p->v.d_plus)
            .field("d_minus", p->v.d_minus)
            .field("c_lambda", c.c_lambda)
            .field("coef_n13", c.coef_n13)
            .field("coef_sigma32", c.coef_sigma32)
            .field("coef_logn", c.coef_logn)
            .field("scale", c.scale)
            .field("a0_constant", c.a0_constant)
            .field("b3_constant", c.b3_constant)
            .field("variance_constant", c.variance_constant)
            .field("centering", centering(p->v));
        *out_json = dup_string(obj.str());
    });
}

le_status le_geometry_build(const le_params* p, le_geometry** out) {
    if (le_status st = require(p && out, "le_geometry_build: NULL argument")) return st;
    return guarded([&] { *out = new le_geometry{build_geometry(p->v)}; });
}

void le_geometry_destroy(le_geometry* g) { delete g; }

const double* le_geometry_view(const le_geometry* g, le_geom_col col, int64_t* count) {
    if (!g) return nullptr;
    const std::vector<double>* v = nullptr;
    switch (col) {
        case LE_GEOM_RHO_PLUS: v = &g->v.rho_plus; break;
        case LE_GEOM_RHO_MINUS: v = &g->v.rho_minus; break;
        case LE_GEOM_TAU: v = &g->v.tau; break;
        case LE_GEOM_DELTA: v = &g->v.delta; break;
        case LE_GEOM_OMEGA: v = &g->v.omega; break;
        case LE_GEOM_GAMMA_RATIO: v = &g->v.gamma_ratio; break;
        case LE_GEOM_GAMMA_MINUS_OMEGA: v = &g->v.gamma_minus_omega; break;
        case LE_GEOM_G: v = &g->v.g; break;
    }
    if (!v) return nullptr;
    if (count) *count = static_cast<int64_t>(v->size());
    return v->data();
}

le_status le_geometry_dump_csv(const le_geometry* g, const char* path) {
    if (le_status st = require(g != nullptr, "le_geometry_dump_csv: NULL geometry")) return st;
    return guarded([&] {
        with_output(path, [&](std::ostream& os) {
            const auto& geo = g->v;
            const std::int64_t n = geo.params.n;
            os << "i,rho_plus,rho_minus,omega,gamma_ratio,tau,delta,g\n";
            auto cell = [](double x) { return std::isnan(x) ? std::string() : fmt_g17(x); };
            for (std::int64_t i = 1; i <= n + 1; ++i) {
                os << fmt_i64(i);
                if (i <= n)
                    os << ',' << cell(geo.rho_plus[i]) << ',' << cell(geo.rho_minus[i]) << ','
                       << cell(geo.omega[i]) << ',' << cell(geo.gamma_ratio[i]) << ','
                       << cell(geo.tau[i]) << ',' << cell(geo.delta[i]);
                else
                    os << ",,,,,,";
                os << ',' << cell(geo.g[i]) << '\n';
            }
        });
    });
}

le_status le_sample_draw(const le_params* p, uint64_t master_seed, uint64_t replica_index,
                         le_sample** out) {
    if (le_status st = require(p && out, "le_sample_draw: NULL argument")) return st;
    return guarded(
        [&] { *out = new le_sample{sample_bidiagonal(p->v, master_seed, replica_index), p->v}; });
}

void le_sample_destroy(le_sample* s) { delete s; }

uint64_t le_sample_seed(const le_sample* s) { return s->v.seed; }

#define LE_SAMPLE_VIEW(field)                                            \
    const double* le_sample_##field(const le_sample* s, int64_t* count) { \
        if (!s) return nullptr;                                           \
        if (count) *count = static_cast<int64_t>(s->v.field.size());      \
        return s->v.field.data();                                         \
    }
LE_SAMPLE_VIEW(a_sq)
LE_SAMPLE_VIEW(b_sq)
LE_SAMPLE_VIEW(d)
LE_SAMPLE_VIEW(c)
#undef LE_SAMPLE_VIEW

le_status le_sample_dump_csv(const le_sample* s, const char* path) {
    if (le_status st = require(s != nullptr, "le_sample_dump_csv: NULL sample")) return st;
    return guarded([&] {
        with_output(path, [&](std::ostream& os) {
            const auto& v = s->v;
            os << "i,a_sq,b_sq,d,c\n";
            for (std::size_t i = 0; i < v.a_sq.size(); ++i) {
                os << fmt_i64(static_cast<std::int64_t>(i + 1)) << ',' << fmt_g17(v.a_sq[i]) << ',';
                if (i < v.b_sq.size())
                    os << fmt_g17(v.b_sq[i]) << ',' << fmt_g17(v.d[i]) << ',' << fmt_g17(v.c[i]);
                else
                    os << ',' << fmt_g17(v.d[i]) << ',';
                os << '\n';
            }
        });
    });
}

le_status le_logdet_run(const le_sample* s, const le_geometry* g, le_trace** out) {
    if (le_status st = require(s && g && out, "le_logdet_run: NULL argument")) return st;
    return guarded([&] { *out = new le_trace{run_recursion(s->v, g->v)}; });
}

void le_trace_destroy(le_trace* t) { delete t; }

double le_trace_log_abs_e(const le_trace* t) { return t->v.log_abs_E; }
double le_trace_log_abs_d(const le_trace* t) { return t->v.log_abs_D; }
double le_trace_log_abs_cal_d(const le_trace* t) { return t->v.log_abs_calD; }
int le_trace_sign(const le_trace* t) { return t->v.sign_E; }
double le_trace_max_abs_r(const le_trace* t) { return t->v.max_abs_r; }
int64_t le_trace_guard_events(const le_trace* t) { return t->v.guard_events; }
double le_trace_r(const le_trace* t, int64_t i) {
    if (!t || i < 2 || i >= static_cast<int64_t>(t->v.r.size()))
        return std::numeric_limits<double>::quiet_NaN();
    return t->v.r[i];
}

le_status le_eigen_oracle(const le_sample* s, const le_params* p, double* out_log_abs) {
    if (le_status st = require(s && p && out_log_abs, "le_eigen_oracle: NULL argument")) return st;
    return guarded([&] { *out_log_abs = eigen_oracle(s->v, p->v); });
}

le_status le_standardize(const le_params* p, double log_abs_cal_d, double* out_z) {
    if (le_status st = require(p && out_z, "le_standardize: NULL argument")) return st;
    return guarded([&] { *out_z = standardize(log_abs_cal_d, p->v); });
}

le_status le_logdet_json(const le_params* p, uint64_t seed, int with_oracle, char** out_json) {
    if (le_status st = require(p && out_json, "le_logdet_json: NULL argument")) return st;
    return guarded([&] {
        const EdgeGeometry geo = build_geometry(p->v);
        const TridiagonalSample sample = sample_bidiagonal(p->v, seed, 0);
        const RecursionTrace tr = run_recursion(sample, geo);
        JsonObject obj;
        obj.field("n", fmt_i64(p->v.n))
            .field("seed", fmt_u64(sample.seed))
            .field("log_abs_calD", tr.log_abs_calD)
            .field("sign", fmt_i64(tr.sign_E))
            .field("max_abs_r", tr.max_abs_r)
            .field("z", standardize(tr.log_abs_calD, p->v));
        if (with_oracle) {
            const double oracle = eigen_oracle(sample, p->v);
            obj.field("oracle_value", oracle);
            obj.field("oracle_rel_diff",
                      std::abs(tr.log_abs_D - oracle) / std::abs(oracle));
        }
        *out_json = dup_string(obj.str());
    });
}

le_status le_simulate(const le_params* p, int64_t replicas, uint64_t master_seed, int workers,
                      int run_oracle, const char* jsonl_path, const char* summary_path,
                      const char* csv_path, int progress) {
    if (le_status st = require(p != nullptr, "le_simulate: NULL params")) return st;
    return guarded([&] {
        SimulationConfig cfg;
        cfg.params = p->v;
        cfg.replicas = replicas;
        cfg.master_seed = master_seed;
        cfg.workers = workers;
        cfg.run_oracle = run_oracle != 0;
        ProgressFn pf;
        if (progress) {
            pf = [](std::int64_t done, std::int64_t total) {
                std::fprintf(stderr, "\rreplicas %lld/%lld", static_cast<long long>(done),
                             static_cast<long long>(total));
                if (done == total) std::fprintf(stderr, "\n");
            };
        }
        const SimulationBatch batch = run_batch(cfg, pf);
        if (jsonl_path) with_output(jsonl_path, [&](std::ostream& os) { write_jsonl(batch, os); });
        if (summary_path)
            with_output(summary_path, [&](std::ostream& os) { write_summary_json(batch, cfg, os); });
        if (csv_path) with_output(csv_path, [&](std::ostream& os) { write_csv(batch, os); });
    });
}

le_status le_diagnose_json(const le_params* p, int64_t replicas, uint64_t master_seed,
                           const char* tolerance_manifest_path, char** out_json) {
    if (le_status st = require(p && out_json, "le_diagnose_json: NULL argument")) return st;
    return guarded([&] {
        const ToleranceManifest tol = tolerance_manifest_path
                                          ? ToleranceManifest::from_json_file(tolerance_manifest_path)
                                          : ToleranceManifest{};
        const auto reports = diagnose(p->v, replicas, master_seed, tol);
        *out_json = dup_string(lemma_report_json(reports));
    });
}

le_status le_verify(const char* tolerance_manifest_path, int* out_failures) {
    if (le_status st = require(out_failures != nullptr, "le_verify: out_failures is NULL"))
        return st;
    return guarded([&] {
        const ToleranceManifest tol = tolerance_manifest_path
                                          ? ToleranceManifest::from_json_file(tolerance_manifest_path)
                                          : ToleranceManifest{};
        const auto results = run_acceptance(tol, &std::cerr);
        int failures = 0;
        for (const auto& r : results) {
            if (!r.pass) ++failures;
            std::printf("[%s] %d. %s: %s\n", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(),
                        r.details.c_str());
        }
        std::fflush(stdout);
        *out_failures = failures;
    });
}

}  // extern "C"
