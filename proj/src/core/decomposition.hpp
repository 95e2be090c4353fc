#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "core/geometry.hpp"
#include "core/logdet.hpp"

namespace lagedge {

// Materialized linearization of the minor recursion for one replica. Arrays
// are 1-based like EdgeGeometry; valid ranges:
//   alpha_v : i = 1..n      beta_v : i = 2..n
//   xi, x, l, y : i = 3..n
// with xi_i = alpha_i + beta_i(1+tau_{i-1}) + alpha_{i-1} delta_i,
// X_i = (1+tau_{i-1})(delta_i alpha_{i-1} + beta_i), L_3 = xi_3,
// L_i = xi_i + omega_i L_{i-1}, and Y the same recursion driven by X.
struct DecompositionTrace {
    std::vector<double> alpha_v;
    std::vector<double> beta_v;
    std::vector<double> xi;
    std::vector<double> x;
    std::vector<double> l;
    std::vector<double> y;
    double sum_l = 0.0;
    double a0_sum = 0.0;       // deterministic, copied from the geometry sum
    double b3_star_sum = 0.0;  // sum_{i=4..n} (g_i - 1) L_{i-1}^2
};

DecompositionTrace build_decomposition(const TridiagonalSample& sample,
                                       const EdgeGeometry& geometry);

// sum_{i=3..n} g_{i+1} (gamma_i - omega_i); the leading term is
// a0_constant * log n with an O(sqrt(log log n)) error.
double a0_sum(const EdgeGeometry& geometry);

// Closed form E X_i^2 = alpha delta_i (1+tau_{i-1})^2 (omega_i/|rho_{i-1}^+| + 1/|rho_i^+|).
double x_second_moment(std::int64_t i, const EdgeGeometry& geometry);

// sum_{i=3..n} g_{i+1}^2 E X_i^2; tends to (alpha/3) log n.
double variance_sum(const EdgeGeometry& geometry);

double b3_star_sum(const DecompositionTrace& trace, const EdgeGeometry& geometry);

// Lyapunov diagnostic ratio sum g^4 EX^4 / (sum g^2 EX^2)^2 with EX^4 bounded
// through the sub-gamma moment inequality (2(8v)^2 + 24(4u)^4).
double lyapunov_ratio(const EdgeGeometry& geometry);

struct SubGammaParams {
    double v = 0.0;
    double u = 0.0;
};

enum class SgTarget { alpha_i, beta_i, x_i };

SubGammaParams subgamma_params(std::int64_t i, const EdgeGeometry& geometry, SgTarget target);

struct TailCheckResult {
    double threshold = 0.0;    // sqrt(2vt) + ut
    double bound = 0.0;        // 2 e^-t
    double estimate = 0.0;     // empirical tail probability
    double std_error = 0.0;    // binomial standard error of the estimate
    bool pass = false;         // estimate <= bound + 3 se
};

// Monte Carlo check of P(|X| > sqrt(2vt) + ut) <= 2 e^-t for centered draws
// produced by the sampler.
TailCheckResult tail_check(const SubGammaParams& params,
                           const std::function<double(Rng&)>& sampler, double t,
                           std::int64_t n_draws, Rng& rng);

// log|E_n| - (-sum L_i + a0_sum - b3_star_sum); the residual the proof shows
// to be O_P(1).
double linearization_gap(const RecursionTrace& rec_trace, const DecompositionTrace& decomp_trace);

}  // namespace lagedge
