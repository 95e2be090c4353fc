#include <doctest.h>

#include <cmath>
#include <sstream>

#include "core/clt.hpp"
#include "core/ensemble.hpp"
#include "core/errors.hpp"
#include "core/geometry.hpp"
#include "core/logdet.hpp"
#include "core/montecarlo.hpp"
#include "support/test_oracles.hpp"

using namespace lagedge;

TEST_CASE("moment accumulator") {
    SUBCASE("constant inputs have zero variance") {
        MomentAccumulator acc;
        for (int i = 0; i < 100; ++i) acc.add(3.0);
        CHECK(acc.variance() == 0.0);
        CHECK(acc.mean == 3.0);
    }
    SUBCASE("alternating +-1 batch") {
        MomentAccumulator acc;
        const int n = 1000;
        for (int i = 0; i < n; ++i) acc.add(i % 2 == 0 ? 1.0 : -1.0);
        CHECK(acc.mean == doctest::Approx(0.0).epsilon(1e-15));
        CHECK(acc.variance() ==
              doctest::Approx(static_cast<double>(n) / (n - 1)).epsilon(1e-12));
        CHECK(acc.skewness() == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("merge equals joint accumulation") {
        Rng rng(77);
        std::vector<double> xs(5000);
        for (auto& x : xs) x = rng.normal() * 2.5 + 0.3;
        for (std::size_t split : {std::size_t{1}, std::size_t{1234}, std::size_t{4999}}) {
            MomentAccumulator a, b, whole;
            for (std::size_t k = 0; k < xs.size(); ++k) {
                (k < split ? a : b).add(xs[k]);
                whole.add(xs[k]);
            }
            a.merge(b);
            CHECK(a.count == whole.count);
            CHECK(a.mean == doctest::Approx(whole.mean).epsilon(1e-12));
            CHECK(a.variance() == doctest::Approx(whole.variance()).epsilon(1e-12));
            CHECK(a.skewness() == doctest::Approx(whole.skewness()).epsilon(1e-9));
        }
    }
}

TEST_CASE("summarize quantiles and moments") {
    std::vector<double> v(101);
    for (int i = 0; i <= 100; ++i) v[i] = static_cast<double>(i);
    const Summary s = summarize(v);
    CHECK(s.count == 101);
    CHECK(s.mean == doctest::Approx(50.0));
    CHECK(s.median == doctest::Approx(50.0));
    CHECK(s.q05 == doctest::Approx(5.0));
    CHECK(s.q95 == doctest::Approx(95.0));
    CHECK(s.min == 0.0);
    CHECK(s.max == 100.0);
}

TEST_CASE("ks statistic") {
    SUBCASE("exact normal quantile grid achieves 0.5/N") {
        const int n = 100;
        std::vector<double> v(n);
        for (int k = 1; k <= n; ++k)
            v[k - 1] = oracle::normal_quantile((k - 0.5) / n);
        CHECK(ks_statistic(v) == doctest::Approx(0.5 / n).epsilon(1e-6));
    }
    SUBCASE("point mass at zero gives 0.5") {
        std::vector<double> v(10, 0.0);
        CHECK(ks_statistic(v) == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("own normal sampler at large N") {
        Rng rng(555);
        std::vector<double> v(1000000);
        for (auto& x : v) x = rng.normal();
        CHECK(ks_statistic(v) < 0.002);
    }
    SUBCASE("empty input is rejected") {
        CHECK_THROWS_AS(ks_statistic(std::vector<double>{}), InvalidArgumentError);
    }
}

TEST_CASE("run_batch composes the single-replica pipeline") {
    SimulationConfig cfg;
    cfg.params = edge_params(200, 0.5, 2.0);
    cfg.replicas = 1;
    cfg.master_seed = 42;
    const SimulationBatch b = run_batch(cfg);
    REQUIRE(b.records.size() == 1);

    const EdgeGeometry geo = build_geometry(cfg.params);
    const TridiagonalSample s = sample_bidiagonal(cfg.params, 42, 0);
    const RecursionTrace tr = run_recursion(s, geo);
    CHECK(b.records[0].seed == s.seed);
    CHECK(b.records[0].log_abs_calD == tr.log_abs_calD);
    CHECK(b.records[0].z == standardize(tr.log_abs_calD, cfg.params));
    CHECK(b.resample_count == 0);
}

TEST_CASE("worker count never changes the numbers") {
    SimulationConfig cfg;
    cfg.params = edge_params(500, 0.5, 2.0);
    cfg.replicas = 100;
    cfg.master_seed = 777;
    cfg.workers = 1;
    const SimulationBatch b1 = run_batch(cfg);
    cfg.workers = 8;
    const SimulationBatch b8 = run_batch(cfg);
    REQUIRE(b1.records.size() == b8.records.size());
    for (std::size_t k = 0; k < b1.records.size(); ++k) {
        CHECK(b1.records[k].z == b8.records[k].z);
        CHECK(b1.records[k].seed == b8.records[k].seed);
    }
    CHECK(b1.mean == b8.mean);
    CHECK(b1.ks_stat == b8.ks_stat);
}

TEST_CASE("jsonl output is byte-stable and round-trips bit-exactly") {
    SimulationConfig cfg;
    cfg.params = edge_params(300, 0.7, 1.0);
    cfg.replicas = 50;
    cfg.master_seed = 1001;
    cfg.workers = 4;
    const SimulationBatch b = run_batch(cfg);

    std::ostringstream os1, os2;
    write_jsonl(b, os1);
    write_jsonl(b, os2);
    CHECK(os1.str() == os2.str());

    std::istringstream is(os1.str());
    const std::vector<ReplicaRecord> back = read_jsonl(is);
    REQUIRE(back.size() == b.records.size());
    for (std::size_t k = 0; k < back.size(); ++k) {
        CHECK(back[k].z == b.records[k].z);
        CHECK(back[k].log_abs_calD == b.records[k].log_abs_calD);
        CHECK(back[k].max_abs_r == b.records[k].max_abs_r);
        CHECK(back[k].seed == b.records[k].seed);
    }

    std::ostringstream csv;
    write_csv(b, csv);
    CHECK(csv.str().rfind("replica,seed,z,log_abs_calD,max_abs_r,oracle\n", 0) == 0);

    std::ostringstream summary;
    write_summary_json(b, cfg, summary);
    CHECK(summary.str().find("\"ks_stat\"") != std::string::npos);
}

TEST_CASE("oracle replica records match the direct oracle") {
    SimulationConfig cfg;
    cfg.params = edge_params(100, 0.5, 2.0);
    cfg.replicas = 5;
    cfg.master_seed = 2;
    cfg.run_oracle = true;
    const SimulationBatch b = run_batch(cfg);
    for (const auto& rec : b.records) {
        REQUIRE(rec.oracle.has_value());
        const TridiagonalSample s =
            sample_bidiagonal(cfg.params, 2, static_cast<std::uint64_t>(rec.replica));
        CHECK(*rec.oracle == eigen_oracle(s, cfg.params));
    }
}

TEST_CASE("config validation") {
    SimulationConfig cfg;
    cfg.params = edge_params(6000, 0.5, 2.0);
    cfg.replicas = 1;
    cfg.run_oracle = true;
    CHECK_THROWS_AS(run_batch(cfg), InvalidArgumentError);
    cfg.run_oracle = false;
    cfg.replicas = 0;
    CHECK_THROWS_AS(run_batch(cfg), InvalidArgumentError);
}

TEST_CASE("worker resolution prefers explicit, then environment") {
    CHECK(resolve_workers(3) == 3);
    CHECK(resolve_workers(0) >= 1);
}
