#include "core/logdet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/errors.hpp"

namespace lagedge {

namespace {

double alpha_at(const TridiagonalSample& s, const EdgeGeometry& geo, std::int64_t i) {
    const double k = static_cast<double>(geo.params.m - geo.params.n + i);
    return (s.a_sq[i - 1] - k) / geo.rho_plus[i];
}

double beta_at(const TridiagonalSample& s, const EdgeGeometry& geo, std::int64_t i) {
    const double k = static_cast<double>(i) - 1.0;
    return (s.b_sq[i - 2] - k) / geo.rho_plus[i];
}

}  // namespace

double r2_initial(const TridiagonalSample& sample, const EdgeGeometry& geometry) {
    const auto& geo = geometry;
    const double a1 = alpha_at(sample, geo, 1);
    if (std::abs(1.0 - a1) < kNearSingularGuard)
        throw NumericalError("r2_initial: degenerate draw, |1 - alpha_1| below guard", 1);
    const double a2 = alpha_at(sample, geo, 2);
    const double b2 = beta_at(sample, geo, 2);
    const double w = (a1 + geo.tau[1]) / (1.0 - a1);
    // omega_2 - gamma_2 plus the noise terms; the delta_2 coefficient is
    // alpha_1 (1 + tau_1)/(1 - alpha_1), which keeps the deterministic
    // omega_2 out of the stochastic part.
    return -geo.gamma_minus_omega[2] + a2 + (1.0 + w) * b2 +
           (a1 * (1.0 + geo.tau[1]) / (1.0 - a1)) * geo.delta[2];
}

RecursionTrace run_recursion(const TridiagonalSample& sample, const EdgeGeometry& geometry) {
    const auto& geo = geometry;
    const std::int64_t n = geo.params.n;
    if (static_cast<std::int64_t>(sample.a_sq.size()) != n)
        throw InvalidArgumentError("run_recursion: sample/geometry size mismatch");

    RecursionTrace tr;
    tr.r.assign(n + 1, std::numeric_limits<double>::quiet_NaN());

    const double a1 = alpha_at(sample, geo, 1);
    if (std::abs(1.0 - a1) < kNearSingularGuard)
        throw NumericalError("run_recursion: degenerate draw at the 1x1 minor", 1);

    double r_prev = r2_initial(sample, geo);
    tr.r[2] = r_prev;
    tr.max_abs_r = std::abs(r_prev);

    // log|E_2| = log|1-alpha_1| + log|1-R_2| since E_1 = alpha_1 - 1.
    double log_sum = std::log(std::abs(1.0 - a1)) + std::log(std::abs(1.0 - r_prev));
    double comp = 0.0;
    int sign = 1;
    if (1.0 - a1 < 0.0) sign = -sign;
    if (1.0 - r_prev < 0.0) sign = -sign;

    double a_prev = alpha_at(sample, geo, 2);
    for (std::int64_t i = 3; i <= n; ++i) {
        const double one_minus = 1.0 - r_prev;
        if (std::abs(one_minus) < kNearSingularGuard)
            throw NumericalError("run_recursion: near-singular minor", i);
        if (std::abs(one_minus) < kSoftGuard) ++tr.guard_events;

        const double ai = alpha_at(sample, geo, i);
        const double bi = beta_at(sample, geo, i);
        const double r_new = -geo.gamma_minus_omega[i] + ai + bi +
                             geo.omega[i] * (r_prev / one_minus) +
                             (a_prev * bi + a_prev * geo.delta[i] + geo.tau[i - 1] * bi) / one_minus;

        tr.r[i] = r_new;
        tr.max_abs_r = std::max(tr.max_abs_r, std::abs(r_new));
        const double term = std::log(std::abs(1.0 - r_new));
        const double y = term - comp;
        const double t = log_sum + y;
        comp = (t - log_sum) - y;
        log_sum = t;
        if (1.0 - r_new < 0.0) sign = -sign;

        r_prev = r_new;
        a_prev = ai;
    }

    tr.log_abs_E = log_sum;
    tr.sign_E = sign;
    tr.log_abs_D = tr.log_abs_E + geo.sum_log_rho_plus;
    tr.log_abs_calD =
        tr.log_abs_D - static_cast<double>(n) * std::log(static_cast<double>(geo.params.m));
    return tr;
}

// ---------------------------------------------------------------------------
// Sturm-count bisection eigensolver.

namespace {

// Number of eigenvalues strictly below x (standard Sturm sequence with the
// LAPACK-style pivot clamp).
std::int64_t sturm_count(const std::vector<double>& d, const std::vector<double>& e2, double x,
                         double pivmin) {
    std::int64_t cnt = 0;
    double q = 1.0;
    const std::size_t n = d.size();
    for (std::size_t i = 0; i < n; ++i) {
        q = (i == 0) ? d[0] - x : d[i] - x - e2[i - 1] / q;
        if (std::abs(q) < pivmin) q = -pivmin;
        if (q < 0.0) ++cnt;
    }
    return cnt;
}

struct SturmProblem {
    std::vector<double> d, e2;
    double pivmin = 0.0;
    double gl = 0.0, gu = 0.0;  // Gershgorin bounds
};

SturmProblem sturm_setup(const std::vector<double>& diag, const std::vector<double>& offdiag) {
    const std::size_t n = diag.size();
    if (n == 0) throw InvalidArgumentError("tridiagonal_eigenvalues: empty matrix");
    if (offdiag.size() + 1 != n)
        throw InvalidArgumentError("tridiagonal_eigenvalues: offdiag size mismatch");
    SturmProblem p;
    p.d = diag;
    p.e2.resize(n > 1 ? n - 1 : 0);
    double max_e2 = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        p.e2[i] = offdiag[i] * offdiag[i];
        max_e2 = std::max(max_e2, p.e2[i]);
    }
    p.pivmin = std::numeric_limits<double>::min() * std::max(1.0, max_e2);
    double gl = diag[0], gu = diag[0];
    for (std::size_t i = 0; i < n; ++i) {
        const double r = (i > 0 ? std::abs(offdiag[i - 1]) : 0.0) +
                         (i + 1 < n ? std::abs(offdiag[i]) : 0.0);
        gl = std::min(gl, diag[i] - r);
        gu = std::max(gu, diag[i] + r);
    }
    const double pad = 2.0 * std::numeric_limits<double>::epsilon() *
                           std::max(std::abs(gl), std::abs(gu)) +
                       2.0 * p.pivmin;
    p.gl = gl - pad;
    p.gu = gu + pad;
    return p;
}

double bisect_tol(double lo, double hi) {
    return 8.0 * std::numeric_limits<double>::epsilon() *
               std::max(std::abs(lo), std::abs(hi)) +
           1e-300;
}

}  // namespace

std::vector<double> tridiagonal_eigenvalues(const std::vector<double>& diag,
                                            const std::vector<double>& offdiag) {
    const SturmProblem p = sturm_setup(diag, offdiag);
    const std::int64_t n = static_cast<std::int64_t>(diag.size());
    if (n == 1) return {diag[0]};

    struct Interval {
        double lo, hi;
        std::int64_t clo, chi;
    };
    std::vector<double> out;
    out.reserve(n);
    std::vector<Interval> stack;
    stack.push_back({p.gl, p.gu, 0, n});
    // Each split halves an interval; 2100 levels bounds the work far beyond
    // what convergence needs, so hitting the cap means a genuine failure.
    std::int64_t steps = 0;
    const std::int64_t max_steps = 4096 * n;
    while (!stack.empty()) {
        const Interval iv = stack.back();
        stack.pop_back();
        if (iv.chi <= iv.clo) continue;
        if (++steps > max_steps)
            throw NumericalError("tridiagonal_eigenvalues: bisection failed to converge");
        const double mid = 0.5 * (iv.lo + iv.hi);
        if (iv.hi - iv.lo < bisect_tol(iv.lo, iv.hi) || mid <= iv.lo || mid >= iv.hi) {
            for (std::int64_t k = iv.clo; k < iv.chi; ++k) out.push_back(mid);
            continue;
        }
        const std::int64_t cmid =
            std::clamp<std::int64_t>(sturm_count(p.d, p.e2, mid, p.pivmin), iv.clo, iv.chi);
        stack.push_back({iv.lo, mid, iv.clo, cmid});
        stack.push_back({mid, iv.hi, cmid, iv.chi});
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

void check_oracle_scale(const EnsembleParams& params) {
    if (params.n > 5000)
        throw InvalidArgumentError("eigen oracle: n must be at most 5000 (O(n^2) path)");
}

}  // namespace

double eigen_oracle(const TridiagonalSample& sample, const EnsembleParams& params) {
    check_oracle_scale(params);
    const Tridiagonal t = build_tridiagonal(sample);
    const std::vector<double> mu = tridiagonal_eigenvalues(t.diag, t.offdiag);
    const double gm = params.gamma * static_cast<double>(params.m);
    double sum = 0.0, comp = 0.0;
    for (double x : mu) {
        const double term = std::log(std::abs(x - gm));
        const double y = term - comp;
        const double s = sum + y;
        comp = (s - sum) - y;
        sum = s;
    }
    return sum;
}

std::vector<double> eigenvalues_scaled(const TridiagonalSample& sample,
                                       const EnsembleParams& params) {
    check_oracle_scale(params);
    const Tridiagonal t = build_tridiagonal(sample);
    std::vector<double> mu = tridiagonal_eigenvalues(t.diag, t.offdiag);
    const double m = static_cast<double>(params.m);
    for (double& x : mu) x /= m;
    return mu;
}

double largest_eigenvalue_scaled(const TridiagonalSample& sample, const EnsembleParams& params) {
    const Tridiagonal t = build_tridiagonal(sample);
    const SturmProblem p = sturm_setup(t.diag, t.offdiag);
    const std::int64_t n = static_cast<std::int64_t>(t.diag.size());
    double lo = p.gl, hi = p.gu;
    while (hi - lo > bisect_tol(lo, hi)) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (sturm_count(p.d, p.e2, mid, p.pivmin) < n)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi) / static_cast<double>(params.m);
}

}  // namespace lagedge
