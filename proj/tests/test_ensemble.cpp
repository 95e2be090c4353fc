#include <doctest.h>

#include <cmath>

#include "core/ensemble.hpp"
#include "core/errors.hpp"
#include "core/logdet.hpp"
#include "support/test_oracles.hpp"

using namespace lagedge;

TEST_CASE("edge_params derived quantities") {
    SUBCASE("lambda = 1 collapses the support to [0,4]") {
        const EnsembleParams p = edge_params(100, 1.0, 2.0);
        CHECK(p.d_plus == doctest::Approx(4.0).epsilon(1e-15));
        CHECK(p.d_minus == doctest::Approx(0.0).epsilon(1e-15));
        CHECK(p.m == 100);
    }
    SUBCASE("lambda = 0.25") {
        const EnsembleParams p = edge_params(100, 0.25, 1.0);
        CHECK(p.d_plus == doctest::Approx(2.25).epsilon(1e-15));
        CHECK(p.d_minus == doctest::Approx(0.25).epsilon(1e-15));
        CHECK(p.m == 400);
    }
    SUBCASE("default sigma sits inside the admissible window") {
        const EnsembleParams p = edge_params(8103, 1.0, 2.0);  // log n ~ 9
        CHECK(p.sigma_n == doctest::Approx(27.0).epsilon(1e-4));
        const double loglog2 = std::pow(std::log(std::log(8103.0)), 2.0);
        const double log2 = std::pow(std::log(8103.0), 2.0);
        CHECK(loglog2 < p.sigma_n);
        CHECK(p.sigma_n < log2);
        CHECK(p.gamma == p.d_plus + p.sigma_n * std::pow(8103.0, -2.0 / 3.0));
    }
    SUBCASE("m tracks n/lambda within rounding") {
        for (double lam : {0.1, 0.3, 0.5, 0.77, 1.0}) {
            const EnsembleParams p = edge_params(997, lam, 2.0);
            CHECK(p.m >= p.n);
            CHECK(std::abs(static_cast<double>(p.n) / static_cast<double>(p.m) - lam) <=
                  1.0 / static_cast<double>(p.m));
        }
    }
    SUBCASE("invalid arguments") {
        CHECK_THROWS_AS(edge_params(4, 1.0, 2.0), InvalidArgumentError);
        CHECK_THROWS_AS(edge_params(100, 0.0, 2.0), InvalidArgumentError);
        CHECK_THROWS_AS(edge_params(100, 1.5, 2.0), InvalidArgumentError);
        CHECK_THROWS_AS(edge_params(100, 0.5, -1.0), InvalidArgumentError);
        CHECK_THROWS_AS(edge_params(100, 0.5, 2.0, -3.0), InvalidArgumentError);
    }
}

TEST_CASE("sampling is reproducible and order independent") {
    const EnsembleParams p = edge_params(64, 0.5, 2.0);
    const TridiagonalSample s1 = sample_bidiagonal(p, 11, 5);
    const TridiagonalSample s2 = sample_bidiagonal(p, 11, 5);
    CHECK(s1.seed == s2.seed);
    CHECK(s1.a_sq == s2.a_sq);
    CHECK(s1.b_sq == s2.b_sq);
    CHECK(s1.d == s2.d);
    CHECK(s1.c == s2.c);

    const TridiagonalSample s3 = sample_bidiagonal(p, 11, 6);
    CHECK(s1.a_sq != s3.a_sq);
    const TridiagonalSample s4 = sample_bidiagonal(p, 11, 5, 1);  // retry stream
    CHECK(s1.a_sq != s4.a_sq);
}

TEST_CASE("centered variables have mean zero and variance alpha") {
    const EnsembleParams p = edge_params(100, 0.5, 2.0);
    REQUIRE(p.m == 200);
    const int replicas = 10000;
    double sum = 0.0, sumsq = 0.0;
    std::int64_t count = 0;
    for (int r = 0; r < replicas; ++r) {
        const TridiagonalSample s = sample_bidiagonal(p, 77, r);
        for (double v : s.d) {
            sum += v;
            sumsq += v * v;
            ++count;
        }
    }
    const double mean = sum / static_cast<double>(count);
    const double var = sumsq / static_cast<double>(count) - mean * mean;
    CHECK(std::abs(mean) < 0.05);
    CHECK(std::abs(mean) < 4.0 * std::sqrt(p.alpha / static_cast<double>(count)));
    CHECK(std::abs(var - p.alpha) < 0.10 * p.alpha);
}

TEST_CASE("square chi entries have the right means at alpha = 1") {
    const EnsembleParams p = edge_params(50, 1.0, 1.0);
    REQUIRE(p.m == 50);
    const int replicas = 100000;
    double sum_a1 = 0.0;
    for (int r = 0; r < replicas; ++r)
        sum_a1 += sample_bidiagonal(p, 3, r).a_sq[0];
    // E a_1^2 = m - n + 1 = 1
    CHECK(std::abs(sum_a1 / replicas - 1.0) < 0.02);
}

TEST_CASE("build_tridiagonal") {
    SUBCASE("1x1") {
        TridiagonalSample s;
        s.a_sq = {3.5};
        const Tridiagonal t = build_tridiagonal(s);
        CHECK(t.diag == std::vector<double>{3.5});
        CHECK(t.offdiag.empty());
    }
    SUBCASE("3x3 with unit entries") {
        TridiagonalSample s;
        s.a_sq = {1.0, 1.0, 1.0};
        s.b_sq = {1.0, 1.0};
        const Tridiagonal t = build_tridiagonal(s);
        CHECK(t.diag == std::vector<double>{1.0, 2.0, 2.0});
        CHECK(t.offdiag == std::vector<double>{1.0, 1.0});
    }
    SUBCASE("spectrum matches the dense BB^T at n = 5") {
        const EnsembleParams p = edge_params(5, 0.5, 2.0);
        const TridiagonalSample s = sample_bidiagonal(p, 31, 0);
        const Tridiagonal t = build_tridiagonal(s);
        const std::vector<double> ev = tridiagonal_eigenvalues(t.diag, t.offdiag);

        // dense B B^T from the bidiagonal factor
        std::vector<std::vector<double>> bbt(5, std::vector<double>(5, 0.0));
        std::vector<double> a(5), b(4);
        for (int i = 0; i < 5; ++i) a[i] = std::sqrt(s.a_sq[i]);
        for (int i = 0; i < 4; ++i) b[i] = std::sqrt(s.b_sq[i]);
        for (int i = 0; i < 5; ++i) {
            bbt[i][i] = a[i] * a[i] + (i > 0 ? b[i - 1] * b[i - 1] : 0.0);
            if (i + 1 < 5) bbt[i][i + 1] = bbt[i + 1][i] = a[i] * b[i];
        }
        const std::vector<double> ev_dense = oracle::jacobi_eigenvalues(bbt);
        REQUIRE(ev.size() == ev_dense.size());
        for (std::size_t k = 0; k < ev.size(); ++k)
            CHECK(ev[k] == doctest::Approx(ev_dense[k]).epsilon(1e-12));
    }
    SUBCASE("Gram spectrum is nonnegative across seeds") {
        const EnsembleParams p = edge_params(40, 0.7, 1.0);
        for (int r = 0; r < 25; ++r) {
            const Tridiagonal t = build_tridiagonal(sample_bidiagonal(p, 13, r));
            const std::vector<double> ev = tridiagonal_eigenvalues(t.diag, t.offdiag);
            CHECK(ev.front() >= -1e-10 * ev.back());
        }
    }
}
