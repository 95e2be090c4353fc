#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "core/rng.hpp"

namespace lagedge {

// Ensemble description plus the derived edge quantities. gamma is stored
// exactly as d_plus + sigma_n * n^(-2/3); everything downstream reads it from
// here rather than recomputing.
struct EnsembleParams {
    std::int64_t n = 0;
    std::int64_t m = 0;
    double alpha = 0.0;    // alpha = 2/beta; 1 <-> LUE, 2 <-> LOE
    double lambda = 0.0;   // target aspect n/m, in (0,1]
    double sigma_n = 0.0;  // edge offset, default (log n)^(3/2)
    double gamma = 0.0;    // d_plus + sigma_n * n^(-2/3)
    double d_plus = 0.0;   // (1+sqrt(lambda))^2
    double d_minus = 0.0;  // (1-sqrt(lambda))^2
};

// Builds EnsembleParams with m = round(n/lambda), m >= n. sigma_override
// replaces the default (log n)^(3/2).
EnsembleParams edge_params(std::int64_t n, double lambda, double alpha,
                           std::optional<double> sigma_override = std::nullopt);

// One bidiagonal realization. d and c are the centered rescaled entries
// d_i = (a_i^2-(m-n+i))/sqrt(m-n+i), c_i = (b_i^2-i)/sqrt(i); both have mean 0
// and variance alpha. Squares are stored because every downstream formula
// consumes squares.
struct TridiagonalSample {
    std::vector<double> a_sq;  // size n, a_sq[i-1] = a_i^2
    std::vector<double> b_sq;  // size n-1, b_sq[i-1] = b_i^2
    std::vector<double> d;     // size n
    std::vector<double> c;     // size n-1
    std::uint64_t seed = 0;    // derived per-replica seed
};

double sample_chi_squared(double dof, Rng& rng);

// Draws a_i^2 ~ (alpha/2) chi^2(2(m-n+i)/alpha), b_i^2 ~ (alpha/2) chi^2(2i/alpha),
// all independent, from the stream derived from (master_seed, replica, attempt).
TridiagonalSample sample_bidiagonal(const EnsembleParams& params, std::uint64_t master_seed,
                                    std::uint64_t replica_index, std::uint64_t attempt = 0);

// The noise-free sample: a_i^2, b_i^2 at their means, d = c = 0.
TridiagonalSample noise_free_sample(const EnsembleParams& params);

struct Tridiagonal {
    std::vector<double> diag;     // size n
    std::vector<double> offdiag;  // size n-1, positive root of a_i^2 b_i^2
};

Tridiagonal build_tridiagonal(const TridiagonalSample& sample);

}  // namespace lagedge
