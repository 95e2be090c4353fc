#include "core/decomposition.hpp"

#include <cmath>
#include <limits>

#include "core/errors.hpp"

namespace lagedge {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

DecompositionTrace build_decomposition(const TridiagonalSample& sample,
                                       const EdgeGeometry& geo) {
    const std::int64_t n = geo.params.n;
    const std::int64_t m = geo.params.m;
    if (static_cast<std::int64_t>(sample.a_sq.size()) != n)
        throw InvalidArgumentError("build_decomposition: sample/geometry size mismatch");

    DecompositionTrace tr;
    tr.alpha_v.assign(n + 1, kNaN);
    tr.beta_v.assign(n + 1, kNaN);
    tr.xi.assign(n + 1, kNaN);
    tr.x.assign(n + 1, kNaN);
    tr.l.assign(n + 1, kNaN);
    tr.y.assign(n + 1, kNaN);

    for (std::int64_t i = 1; i <= n; ++i) {
        tr.alpha_v[i] = (sample.a_sq[i - 1] - static_cast<double>(m - n + i)) / geo.rho_plus[i];
        if (i >= 2)
            tr.beta_v[i] = (sample.b_sq[i - 2] - (static_cast<double>(i) - 1.0)) / geo.rho_plus[i];
    }

    double sum_l = 0.0, comp = 0.0;
    double b3 = 0.0, b3_comp = 0.0;
    for (std::int64_t i = 3; i <= n; ++i) {
        const double one_tau = 1.0 + geo.tau[i - 1];
        tr.xi[i] = tr.alpha_v[i] + tr.beta_v[i] * one_tau + tr.alpha_v[i - 1] * geo.delta[i];
        tr.x[i] = one_tau * (geo.delta[i] * tr.alpha_v[i - 1] + tr.beta_v[i]);
        tr.l[i] = (i == 3) ? tr.xi[i] : tr.xi[i] + geo.omega[i] * tr.l[i - 1];
        tr.y[i] = (i == 3) ? tr.x[i] : tr.x[i] + geo.omega[i] * tr.y[i - 1];
        if (i >= 4) {
            const double t = (geo.g[i] - 1.0) * tr.l[i - 1] * tr.l[i - 1] - b3_comp;
            const double s = b3 + t;
            b3_comp = (s - b3) - t;
            b3 = s;
        }
        const double y = tr.l[i] - comp;
        const double s = sum_l + y;
        comp = (s - sum_l) - y;
        sum_l = s;
    }
    tr.sum_l = sum_l;
    tr.b3_star_sum = b3;
    tr.a0_sum = a0_sum(geo);
    return tr;
}

double a0_sum(const EdgeGeometry& geo) {
    const std::int64_t n = geo.params.n;
    double sum = 0.0, comp = 0.0;
    for (std::int64_t i = 3; i <= n; ++i) {
        const double t = geo.g[i + 1] * geo.gamma_minus_omega[i] - comp;
        const double s = sum + t;
        comp = (s - sum) - t;
        sum = s;
    }
    return sum;
}

double x_second_moment(std::int64_t i, const EdgeGeometry& geo) {
    const double one_tau = 1.0 + geo.tau[i - 1];
    return geo.params.alpha * geo.delta[i] * one_tau * one_tau *
           (geo.omega[i] / geo.rho_plus[i - 1] + 1.0 / geo.rho_plus[i]);
}

double variance_sum(const EdgeGeometry& geo) {
    const std::int64_t n = geo.params.n;
    double sum = 0.0, comp = 0.0;
    for (std::int64_t i = 3; i <= n; ++i) {
        const double t = geo.g[i + 1] * geo.g[i + 1] * x_second_moment(i, geo) - comp;
        const double s = sum + t;
        comp = (s - sum) - t;
        sum = s;
    }
    return sum;
}

double b3_star_sum(const DecompositionTrace& trace, const EdgeGeometry& geo) {
    const std::int64_t n = geo.params.n;
    double sum = 0.0;
    for (std::int64_t i = 4; i <= n; ++i)
        sum += (geo.g[i] - 1.0) * trace.l[i - 1] * trace.l[i - 1];
    return sum;
}

double lyapunov_ratio(const EdgeGeometry& geo) {
    const std::int64_t n = geo.params.n;
    double num = 0.0, den = 0.0;
    for (std::int64_t i = 3; i <= n; ++i) {
        const SubGammaParams sg = subgamma_params(i, geo, SgTarget::x_i);
        const double ex4 = 2.0 * (8.0 * sg.v) * (8.0 * sg.v) +
                           24.0 * (4.0 * sg.u) * (4.0 * sg.u) * (4.0 * sg.u) * (4.0 * sg.u);
        const double g2 = geo.g[i + 1] * geo.g[i + 1];
        num += g2 * g2 * ex4;
        den += g2 * x_second_moment(i, geo);
    }
    return num / (den * den);
}

SubGammaParams subgamma_params(std::int64_t i, const EdgeGeometry& geo, SgTarget target) {
    if (i < 1 || i > geo.params.n) throw InvalidArgumentError("subgamma_params: index out of range");
    const double alpha = geo.params.alpha;
    SubGammaParams sg;
    switch (target) {
        case SgTarget::alpha_i:
            sg.v = alpha * geo.tau[i] / geo.rho_plus[i];
            sg.u = alpha / geo.rho_plus[i];
            break;
        case SgTarget::beta_i:
            sg.v = alpha * geo.delta[i] / geo.rho_plus[i];
            sg.u = alpha / geo.rho_plus[i];
            break;
        case SgTarget::x_i: {
            if (i < 2) throw InvalidArgumentError("subgamma_params: x_i needs i >= 2");
            const double one_tau = 1.0 + geo.tau[i - 1];
            sg.v = alpha * geo.delta[i] / geo.rho_plus[i] * (geo.omega[i] + 1.0) * one_tau * one_tau;
            sg.u = alpha * one_tau / geo.rho_plus[i];
            break;
        }
    }
    return sg;
}

TailCheckResult tail_check(const SubGammaParams& params,
                           const std::function<double(Rng&)>& sampler, double t,
                           std::int64_t n_draws, Rng& rng) {
    if (!(t > 0.0)) throw InvalidArgumentError("tail_check: t must be positive");
    if (n_draws < 1) throw InvalidArgumentError("tail_check: need at least one draw");
    TailCheckResult res;
    res.threshold = std::sqrt(2.0 * params.v * t) + params.u * t;
    res.bound = 2.0 * std::exp(-t);
    std::int64_t exceed = 0;
    for (std::int64_t k = 0; k < n_draws; ++k)
        if (std::abs(sampler(rng)) > res.threshold) ++exceed;
    res.estimate = static_cast<double>(exceed) / static_cast<double>(n_draws);
    res.std_error = std::sqrt(res.estimate * (1.0 - res.estimate) / static_cast<double>(n_draws));
    res.pass = res.estimate <= res.bound + 3.0 * res.std_error;
    return res;
}

double linearization_gap(const RecursionTrace& rec_trace,
                         const DecompositionTrace& decomp_trace) {
    return rec_trace.log_abs_E -
           (-decomp_trace.sum_l + decomp_trace.a0_sum - decomp_trace.b3_star_sum);
}

}  // namespace lagedge
