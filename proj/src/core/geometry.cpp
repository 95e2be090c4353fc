#include "core/geometry.hpp"

#include <cmath>
#include <limits>

#include "core/errors.hpp"

namespace lagedge {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct RootParts {
    double rho_plus;
    double rho_minus;
    double sqrt_disc;  // sqrt(A^2 - 4B)
};

RootParts roots_at(std::int64_t i, const EnsembleParams& p) {
    const double n = static_cast<double>(p.n);
    const double m = static_cast<double>(p.m);
    const double gm = p.gamma * m;
    const double u = m - n + static_cast<double>(i) - 1.0;
    const double v = static_cast<double>(i) - 1.0;
    const double A = gm - (m - n + 2.0 * static_cast<double>(i) - 1.0);
    const double su = std::sqrt(u), sv = std::sqrt(v);
    const double above_edge = gm - 1.0 - (su + sv) * (su + sv);
    const double other = gm - 1.0 - (su - sv) * (su - sv);
    if (!(above_edge > 0.0) || !(other > 0.0))
        throw NumericalError("rho_pair: shift inside spectrum support", i);
    const double sqrt_disc = std::sqrt(above_edge) * std::sqrt(other);
    const double rho_plus = 0.5 * (A + sqrt_disc);
    const double rho_minus = v > 0.0 ? (u * v) / rho_plus : 0.0;
    return {rho_plus, rho_minus, sqrt_disc};
}

}  // namespace

std::pair<double, double> rho_pair(std::int64_t i, const EnsembleParams& params) {
    if (i < 1 || i > params.n) throw InvalidArgumentError("rho_pair: index out of range");
    const RootParts r = roots_at(i, params);
    return {r.rho_plus, r.rho_minus};
}

EdgeGeometry build_geometry(const EnsembleParams& params) {
    const std::int64_t n = params.n;
    if (n < 3) throw InvalidArgumentError("build_geometry: n must be at least 3");
    const double gm = params.gamma * static_cast<double>(params.m);

    EdgeGeometry geo;
    geo.params = params;
    geo.rho_plus.assign(n + 2, kNaN);
    geo.rho_minus.assign(n + 2, kNaN);
    geo.tau.assign(n + 2, kNaN);
    geo.delta.assign(n + 2, kNaN);
    geo.omega.assign(n + 2, kNaN);
    geo.gamma_ratio.assign(n + 2, kNaN);
    geo.gamma_minus_omega.assign(n + 2, kNaN);
    geo.g.assign(n + 2, kNaN);

    double prev_sqrt_disc = 0.0;
    double log_sum = 0.0, log_comp = 0.0;  // Kahan
    for (std::int64_t i = 1; i <= n; ++i) {
        const RootParts r = roots_at(i, params);
        geo.rho_plus[i] = r.rho_plus;
        geo.rho_minus[i] = r.rho_minus;
        geo.tau[i] = (static_cast<double>(params.m - params.n + i)) / r.rho_plus;
        geo.delta[i] = (static_cast<double>(i) - 1.0) / r.rho_plus;
        if (i >= 2) {
            geo.omega[i] = r.rho_minus / geo.rho_plus[i - 1];
            geo.gamma_ratio[i] = r.rho_minus / r.rho_plus;
            // |rho_{i-1}^+| - |rho_i^+| = 1 + 2(gm-1)/(sqrt disc_{i-1} + sqrt disc_i):
            // a sum of positive terms, so the tiny gap gamma_i - omega_i keeps
            // full relative precision.
            const double rho_step = 1.0 + 2.0 * (gm - 1.0) / (prev_sqrt_disc + r.sqrt_disc);
            geo.gamma_minus_omega[i] = geo.omega[i] * rho_step / r.rho_plus;
        }
        const double y = std::log(r.rho_plus) - log_comp;
        const double t = log_sum + y;
        log_comp = (t - log_sum) - y;
        log_sum = t;
        prev_sqrt_disc = r.sqrt_disc;
    }
    geo.sum_log_rho_plus = log_sum;

    geo.g[n + 1] = 1.0;
    for (std::int64_t i = n; i >= 3; --i) geo.g[i] = 1.0 + geo.omega[i] * geo.g[i + 1];
    return geo;
}

double omega_asymptote(std::int64_t i, const EnsembleParams& params) {
    if (i < 2 || i > params.n) throw InvalidArgumentError("omega_asymptote: index out of range");
    const double n = static_cast<double>(params.n);
    const double lam = params.lambda;
    const double sl = std::sqrt(lam);
    const double gap = n - static_cast<double>(i);
    const double x = gap / n;
    const double s = gap / (std::cbrt(n) * params.sigma_n);
    const double edge_scale = std::pow(n, -1.0 / 3.0) * std::sqrt(params.sigma_n);

    if (x > 0.1) {
        const double sx = std::sqrt(x);
        const double num = 1.0 / sl + x - (1.0 / sl + 1.0) * sx;
        const double den = 1.0 / sl + x + (1.0 / sl + 1.0) * sx;
        return num / den;
    }
    if (s >= 1.0) return 1.0 - 2.0 * (1.0 + sl) * std::sqrt(x);
    if (s > 0.1) return 1.0 - 2.0 * std::sqrt(1.0 / sl + (sl + 1.0) * (sl + 1.0) * s) * edge_scale;
    return 1.0 - 2.0 * std::pow(lam, -0.25) * edge_scale;
}

}  // namespace lagedge
