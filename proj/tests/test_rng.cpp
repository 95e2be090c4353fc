#include <doctest.h>

#include <cmath>
#include <vector>

#include "core/ensemble.hpp"
#include "core/montecarlo.hpp"
#include "core/rng.hpp"
#include "support/test_oracles.hpp"

using namespace lagedge;

TEST_CASE("stream derivation is a pure function and separates streams") {
    CHECK(derive_stream_seed(1, 2, 0) == derive_stream_seed(1, 2, 0));
    CHECK(derive_stream_seed(1, 2, 0) != derive_stream_seed(1, 3, 0));
    CHECK(derive_stream_seed(1, 2, 0) != derive_stream_seed(2, 2, 0));
    CHECK(derive_stream_seed(1, 2, 0) != derive_stream_seed(1, 2, 1));

    Rng a(42), b(42), c(43);
    bool all_equal = true, any_diff = false;
    for (int k = 0; k < 64; ++k) {
        const auto va = a.next_u64();
        all_equal = all_equal && (va == b.next_u64());
        any_diff = any_diff || (va != c.next_u64());
    }
    CHECK(all_equal);
    CHECK(any_diff);
}

TEST_CASE("uniform lies in (0,1) with the right mean") {
    Rng rng(7);
    double sum = 0.0;
    bool in_range = true;
    const int n = 200000;
    for (int k = 0; k < n; ++k) {
        const double u = rng.uniform();
        in_range = in_range && u > 0.0 && u < 1.0;
        sum += u;
    }
    CHECK(in_range);
    CHECK(std::abs(sum / n - 0.5) < 0.005);
}

TEST_CASE("normal sampler matches the standard normal CDF") {
    Rng rng(2024);
    const int n = 1000000;
    std::vector<double> draws(n);
    for (auto& x : draws) x = rng.normal();
    CHECK(ks_statistic(draws) < 0.002);
}

TEST_CASE("chi-squared moments at dof 4") {
    Rng rng(99);
    const int n = 1000000;
    double sum = 0.0, sumsq = 0.0;
    for (int k = 0; k < n; ++k) {
        const double x = sample_chi_squared(4.0, rng);
        sum += x;
        sumsq += x * x;
    }
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    CHECK(std::abs(mean - 4.0) < 0.02);
    CHECK(std::abs(var - 8.0) < 0.03 * 8.0);
}

TEST_CASE("fractional dof chi-squared matches the Gamma(0.25, 2) quadrature CDF") {
    Rng rng(12345);
    const int n = 1000000;
    std::vector<double> draws(n);
    for (auto& x : draws) x = sample_chi_squared(0.5, rng);
    const double ks =
        oracle::ks_vs_cdf(std::move(draws),
                          [](double x) { return oracle::gamma_cdf_quadrature(x, 0.25, 2.0); });
    CHECK(ks < 0.005);
}

TEST_CASE("gamma moments for a mid-range shape") {
    Rng rng(5);
    const int n = 400000;
    const double shape = 3.5, scale = 2.0;
    double sum = 0.0, sumsq = 0.0;
    for (int k = 0; k < n; ++k) {
        const double x = rng.gamma(shape, scale);
        sum += x;
        sumsq += x * x;
    }
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    CHECK(std::abs(mean - shape * scale) < 0.05);
    CHECK(std::abs(var - shape * scale * scale) < 0.05 * shape * scale * scale);
}

TEST_CASE("invalid distribution parameters are rejected") {
    Rng rng(1);
    CHECK_THROWS_AS(sample_chi_squared(0.0, rng), InvalidArgumentError);
    CHECK_THROWS_AS(sample_chi_squared(-1.0, rng), InvalidArgumentError);
    CHECK_THROWS_AS(rng.gamma(0.0, 1.0), InvalidArgumentError);
}
