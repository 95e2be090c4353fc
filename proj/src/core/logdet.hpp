#pragma once

#include <cstdint>
#include <vector>

#include "core/ensemble.hpp"
#include "core/geometry.hpp"

namespace lagedge {

// Output of the normalized minor recursion. E_i = D_i / prod |rho_j^+| and
// R_i = 1 + E_i/E_{i-1}; the log determinant accumulates as
// log|E_n| = log|E_2| + sum_{i>=3} log|1-R_i|. The three log fields satisfy
//   log_abs_D    = log_abs_E + sum log|rho_i^+|
//   log_abs_calD = log_abs_D - n log m     (calD = det(T/m - gamma))
struct RecursionTrace {
    std::vector<double> r;  // r[i] for i = 2..n (1-based slots, r[0..1] NaN)
    double log_abs_E = 0.0;
    double log_abs_D = 0.0;
    double log_abs_calD = 0.0;
    int sign_E = 1;
    double max_abs_r = 0.0;
    std::int64_t guard_events = 0;  // steps with |1-R| below the soft guard
};

// Hard guard: |1 - R_{i-1}| (or |1 - alpha_1|) below this throws a
// NumericalError carrying the index; the caller resamples. The singular set
// has probability zero, so retries are essentially free.
inline constexpr double kNearSingularGuard = 1e-13;
inline constexpr double kSoftGuard = 1e-6;

// Closed form for R_2 from the 1x1 and 2x2 minors.
double r2_initial(const TridiagonalSample& sample, const EdgeGeometry& geometry);

// Runs the exact nonlinear recursion for R_i. The deterministic part of each
// step uses the identity tau_i + delta_i(1+tau_{i-1}) + 1 - gm/|rho_i^+|
// = -(gamma_i - omega_i), which sidesteps a catastrophic cancellation; the
// iteration itself is exact (no linearization).
RecursionTrace run_recursion(const TridiagonalSample& sample, const EdgeGeometry& geometry);

// Independent verification path: sum of log|mu_j - gamma*m| over all
// eigenvalues of T, computed by Sturm-count bisection. Desk scale only
// (n <= 5000).
double eigen_oracle(const TridiagonalSample& sample, const EnsembleParams& params);

// Eigenvalues of T/m, ascending. Same n <= 5000 limit.
std::vector<double> eigenvalues_scaled(const TridiagonalSample& sample,
                                       const EnsembleParams& params);

// Largest eigenvalue of T/m only (cheap; no full decomposition).
double largest_eigenvalue_scaled(const TridiagonalSample& sample, const EnsembleParams& params);

// All eigenvalues of a symmetric tridiagonal matrix by bisection with Sturm
// counts; deterministic across platforms. Exposed for reuse and testing.
std::vector<double> tridiagonal_eigenvalues(const std::vector<double>& diag,
                                            const std::vector<double>& offdiag);

}  // namespace lagedge
