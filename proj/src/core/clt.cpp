#include "core/clt.hpp"

#include <cmath>

#include "core/errors.hpp"
#include "core/quadrature.hpp"

namespace lagedge {

double c_lambda(double lambda) {
    if (!(lambda > 0.0) || lambda > 1.0)
        throw InvalidArgumentError("c_lambda: lambda must lie in (0,1]");
    const double sl = std::sqrt(lambda);
    return (1.0 - 1.0 / lambda) * std::log1p(sl) + std::log(sl) + 1.0 / sl;
}

CltConstants clt_constants(const EnsembleParams& params) {
    const double lam = params.lambda;
    const double alpha = params.alpha;
    if (!(lam > 0.0) || lam > 1.0) throw InvalidArgumentError("clt_constants: bad lambda");
    if (!(alpha > 0.0)) throw InvalidArgumentError("clt_constants: bad alpha");
    const double sl = std::sqrt(lam);
    CltConstants c;
    c.c_lambda = c_lambda(lam);
    c.coef_n13 = 1.0 / (sl * (1.0 + sl));
    c.coef_sigma32 = 2.0 / (3.0 * std::pow(lam, 0.75) * (1.0 + sl) * (1.0 + sl));
    c.coef_logn = (alpha - (0.25 + 3.0 * sl / (2.0 * (sl + 1.0) * (sl + 1.0)))) / 6.0;
    c.scale = std::sqrt(alpha / 3.0 * std::log(static_cast<double>(params.n)));
    c.a0_constant = ((sl + 1.0) * (sl + 1.0) + 6.0 * sl) / (24.0 * (sl + 1.0) * (sl + 1.0));
    c.b3_constant = alpha / 6.0;
    c.variance_constant = alpha / 3.0;
    return c;
}

double centering(const EnsembleParams& params) {
    const CltConstants c = clt_constants(params);
    const double n = static_cast<double>(params.n);
    const double s = params.sigma_n;
    return c.c_lambda * n + c.coef_n13 * s * std::cbrt(n) - c.coef_sigma32 * std::pow(s, 1.5) -
           c.coef_logn * std::log(n);
}

double standardize(double log_abs_calD, const EnsembleParams& params) {
    const CltConstants c = clt_constants(params);
    return (log_abs_calD - centering(params)) / c.scale;
}

double mp_density(double x, double lambda) {
    if (!(lambda > 0.0) || lambda > 1.0)
        throw InvalidArgumentError("mp_density: lambda must lie in (0,1]");
    const double sl = std::sqrt(lambda);
    const double dp = (1.0 + sl) * (1.0 + sl);
    const double dm = (1.0 - sl) * (1.0 - sl);
    if (x <= dm || x >= dp) return 0.0;
    return std::sqrt((dp - x) * (x - dm)) / (2.0 * M_PI * lambda * x);
}

double mp_cdf(double x, double lambda) {
    if (!(lambda > 0.0) || lambda > 1.0)
        throw InvalidArgumentError("mp_cdf: lambda must lie in (0,1]");
    const double sl = std::sqrt(lambda);
    const double dp = (1.0 + sl) * (1.0 + sl);
    const double dm = (1.0 - sl) * (1.0 - sl);
    if (x <= dm) return 0.0;
    if (x >= dp) return 1.0;
    const double width = dp - dm;
    const double theta_hi = std::asin(std::sqrt((x - dm) / width));
    auto integrand = [&](double t) {
        const double st = std::sin(t), ct = std::cos(t);
        const double xt = dm + width * st * st;
        const double s2 = 2.0 * st * ct;  // sin(2t)
        // width^2 sin^2(2t) / (4 pi lambda x(t)); at lambda=1 the x->0 pole
        // cancels against sin^2(t) in the numerator, leaving width cos^2(t)/(pi lambda).
        if (xt <= 0.0) return width * ct * ct / (M_PI * lambda);
        return width * width * s2 * s2 / (4.0 * M_PI * lambda * xt);
    };
    return adaptive_simpson(integrand, 0.0, theta_hi, 1e-13);
}

}  // namespace lagedge
