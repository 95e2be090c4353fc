#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "core/ensemble.hpp"

namespace lagedge {

// Deterministic per-index tables for the minor recursion of T - gamma*m.
// All arrays are addressed by the logical index i (1-based); slot 0 and any
// slot outside a quantity's range hold NaN. Valid ranges:
//   rho_plus, rho_minus, tau, delta : i = 1..n
//   omega, gamma_ratio, gamma_minus_omega : i = 2..n
//   g : i = 3..n+1, with g[n+1] = 1
//
// omega_i = |rho_i^-| / |rho_{i-1}^+| equals tau_{i-1)*delta_i through the
// root product; gamma_minus_omega stores gamma_i - omega_i in the factored
// form omega_i * (|rho_{i-1}^+| - |rho_i^+|) / |rho_i^+|, whose difference
// term is evaluated without cancellation.
struct EdgeGeometry {
    EnsembleParams params;
    std::vector<double> rho_plus;
    std::vector<double> rho_minus;
    std::vector<double> tau;
    std::vector<double> delta;
    std::vector<double> omega;
    std::vector<double> gamma_ratio;
    std::vector<double> gamma_minus_omega;
    std::vector<double> g;
    double sum_log_rho_plus = 0.0;
};

// |rho_i^+|, |rho_i^-| for one index. The discriminant A^2 - 4B factors as
// (gm - 1 - (sqrt(u)+sqrt(v))^2)(gm - 1 - (sqrt(u)-sqrt(v))^2) with
// u = m-n+i-1, v = i-1; that form keeps full precision where the naive
// subtraction A - 2 sqrt(B) cancels near the spectral edge. The minus root
// comes from the root product B / rho_plus, never the subtractive formula.
std::pair<double, double> rho_pair(std::int64_t i, const EnsembleParams& params);

EdgeGeometry build_geometry(const EnsembleParams& params);

// Case-matched leading-order prediction for omega_i (diagnostics and tests
// only). Regimes are classified on s = (n-i)/(n^(1/3) sigma_n) and
// x = (n-i)/n: x > 0.1 is the deep-bulk case, s >= 1 the intermediate-bulk
// case, s > 0.1 the crossover case, smaller s the near-edge case.
double omega_asymptote(std::int64_t i, const EnsembleParams& params);

}  // namespace lagedge
