#pragma once

#include "core/ensemble.hpp"

namespace lagedge {

// Closed-form constants of the edge CLT for given (n, lambda, alpha, sigma_n).
//
//   z = (log|det(T/m - gamma)| - centering) / scale,   scale = sqrt((alpha/3) log n)
//   centering = c_lambda*n + coef_n13*sigma_n*n^(1/3)
//               - coef_sigma32*sigma_n^(3/2) - coef_logn*log n
//
// a0_constant and b3_constant are the two log-n coefficients of the
// decomposition of log|E_n|; they tie to coef_logn through
// coef_logn = b3_constant - a0_constant.
struct CltConstants {
    double c_lambda;
    double coef_n13;            // 1/(sqrt(lam)(1+sqrt(lam)))
    double coef_sigma32;        // 2/(3 lam^(3/4) (1+sqrt(lam))^2)
    double coef_logn;           // (1/6)(alpha - 1/4 - 3 sqrt(lam)/(2(sqrt(lam)+1)^2))
    double scale;               // sqrt((alpha/3) log n)
    double a0_constant;         // ((sqrt(lam)+1)^2 + 6 sqrt(lam)) / (24 (sqrt(lam)+1)^2)
    double b3_constant;         // alpha/6
    double variance_constant;   // alpha/3
};

double c_lambda(double lambda);

CltConstants clt_constants(const EnsembleParams& params);

double centering(const EnsembleParams& params);

double standardize(double log_abs_calD, const EnsembleParams& params);

// Marchenko-Pastur density and CDF for aspect lambda in (0,1]. The CDF is
// evaluated by quadrature after the substitution x = d_- + (d_+-d_-) sin^2(t),
// which removes the square-root endpoint singularities (and the 1/x pole at
// lambda = 1).
double mp_density(double x, double lambda);
double mp_cdf(double x, double lambda);

}  // namespace lagedge
