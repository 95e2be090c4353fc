#include "core/ensemble.hpp"

#include <cmath>

#include "core/errors.hpp"

namespace lagedge {

EnsembleParams edge_params(std::int64_t n, double lambda, double alpha,
                           std::optional<double> sigma_override) {
    if (n < 5) throw InvalidArgumentError("edge_params: n must be at least 5");
    if (!(lambda > 0.0) || lambda > 1.0)
        throw InvalidArgumentError("edge_params: lambda must lie in (0,1]");
    if (!(alpha > 0.0)) throw InvalidArgumentError("edge_params: alpha must be positive");
    if (sigma_override && !(*sigma_override > 0.0))
        throw InvalidArgumentError("edge_params: sigma_n must be positive");

    EnsembleParams p;
    p.n = n;
    p.m = std::max<std::int64_t>(n, std::llround(static_cast<double>(n) / lambda));
    p.alpha = alpha;
    p.lambda = lambda;
    const double nn = static_cast<double>(n);
    p.sigma_n = sigma_override ? *sigma_override : std::pow(std::log(nn), 1.5);
    const double sl = std::sqrt(lambda);
    p.d_plus = (1.0 + sl) * (1.0 + sl);
    p.d_minus = (1.0 - sl) * (1.0 - sl);
    p.gamma = p.d_plus + p.sigma_n * std::pow(nn, -2.0 / 3.0);
    return p;
}

double sample_chi_squared(double dof, Rng& rng) {
    if (!(dof > 0.0)) throw InvalidArgumentError("sample_chi_squared: dof must be positive");
    return rng.chi_squared(dof);
}

TridiagonalSample sample_bidiagonal(const EnsembleParams& params, std::uint64_t master_seed,
                                    std::uint64_t replica_index, std::uint64_t attempt) {
    const std::int64_t n = params.n, m = params.m;
    const double alpha = params.alpha;
    if (n < 1 || m < n) throw InvalidArgumentError("sample_bidiagonal: invalid params");

    TridiagonalSample s;
    s.seed = derive_stream_seed(master_seed, replica_index, attempt);
    Rng rng(s.seed);

    s.a_sq.resize(n);
    s.b_sq.resize(n - 1);
    s.d.resize(n);
    s.c.resize(n - 1);
    for (std::int64_t i = 1; i <= n; ++i) {
        const double k = static_cast<double>(m - n + i);
        const double a2 = 0.5 * alpha * rng.chi_squared(2.0 * k / alpha);
        s.a_sq[i - 1] = a2;
        s.d[i - 1] = (a2 - k) / std::sqrt(k);
    }
    for (std::int64_t i = 1; i <= n - 1; ++i) {
        const double k = static_cast<double>(i);
        const double b2 = 0.5 * alpha * rng.chi_squared(2.0 * k / alpha);
        s.b_sq[i - 1] = b2;
        s.c[i - 1] = (b2 - k) / std::sqrt(k);
    }
    return s;
}

TridiagonalSample noise_free_sample(const EnsembleParams& params) {
    const std::int64_t n = params.n, m = params.m;
    TridiagonalSample s;
    s.seed = 0;
    s.a_sq.resize(n);
    s.b_sq.resize(n - 1);
    s.d.assign(n, 0.0);
    s.c.assign(n - 1, 0.0);
    for (std::int64_t i = 1; i <= n; ++i) s.a_sq[i - 1] = static_cast<double>(m - n + i);
    for (std::int64_t i = 1; i <= n - 1; ++i) s.b_sq[i - 1] = static_cast<double>(i);
    return s;
}

Tridiagonal build_tridiagonal(const TridiagonalSample& sample) {
    const std::size_t n = sample.a_sq.size();
    Tridiagonal t;
    t.diag.resize(n);
    t.offdiag.resize(n > 0 ? n - 1 : 0);
    for (std::size_t i = 0; i < n; ++i) {
        t.diag[i] = sample.a_sq[i];
        if (i > 0) t.diag[i] += sample.b_sq[i - 1];
        if (i + 1 < n) t.offdiag[i] = std::sqrt(sample.a_sq[i] * sample.b_sq[i]);
    }
    return t;
}

}  // namespace lagedge
