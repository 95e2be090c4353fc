#include "core/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <mutex>
#include <ostream>
#include <thread>

#include <json.hpp>

#include "core/errors.hpp"
#include "core/jsonfmt.hpp"
#include "core/logdet.hpp"

namespace lagedge {

std::vector<double> SimulationBatch::z_values() const {
    std::vector<double> z;
    z.reserve(records.size());
    for (const auto& r : records) z.push_back(r.z);
    return z;
}

void MomentAccumulator::add(double x) {
    const std::int64_t n1 = count;
    ++count;
    const double delta = x - mean;
    const double delta_n = delta / static_cast<double>(count);
    const double term = delta * delta_n * static_cast<double>(n1);
    m3 += term * delta_n * static_cast<double>(count - 2) - 3.0 * delta_n * m2;
    m2 += term;
    mean += delta_n;
}

void MomentAccumulator::merge(const MomentAccumulator& other) {
    if (other.count == 0) return;
    if (count == 0) {
        *this = other;
        return;
    }
    const double na = static_cast<double>(count), nb = static_cast<double>(other.count);
    const double nab = na + nb;
    const double delta = other.mean - mean;
    const double m2_new = m2 + other.m2 + delta * delta * na * nb / nab;
    const double m3_new = m3 + other.m3 +
                          delta * delta * delta * na * nb * (na - nb) / (nab * nab) +
                          3.0 * delta * (na * other.m2 - nb * m2) / nab;
    mean = (na * mean + nb * other.mean) / nab;
    m2 = m2_new;
    m3 = m3_new;
    count += other.count;
}

double MomentAccumulator::variance() const {
    return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0;
}

double MomentAccumulator::skewness() const {
    if (count < 2 || m2 <= 0.0) return 0.0;
    const double n = static_cast<double>(count);
    const double var_pop = m2 / n;
    return (m3 / n) / std::pow(var_pop, 1.5);
}

namespace {

double quantile_sorted(const std::vector<double>& s, double p) {
    if (s.empty()) return 0.0;
    const double pos = p * static_cast<double>(s.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, s.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return s[lo] * (1.0 - frac) + s[hi] * frac;
}

}  // namespace

Summary summarize(std::span<const double> values) {
    MomentAccumulator acc;
    for (double v : values) acc.add(v);
    Summary s;
    s.count = acc.count;
    s.mean = acc.mean;
    s.variance = acc.variance();
    s.skewness = acc.skewness();
    if (!values.empty()) {
        std::vector<double> sorted(values.begin(), values.end());
        std::sort(sorted.begin(), sorted.end());
        s.min = sorted.front();
        s.max = sorted.back();
        s.q05 = quantile_sorted(sorted, 0.05);
        s.q25 = quantile_sorted(sorted, 0.25);
        s.median = quantile_sorted(sorted, 0.50);
        s.q75 = quantile_sorted(sorted, 0.75);
        s.q95 = quantile_sorted(sorted, 0.95);
    }
    return s;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

double ks_statistic(std::span<const double> samples) {
    if (samples.size() < 1) throw InvalidArgumentError("ks_statistic: empty input");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t k = 0; k < sorted.size(); ++k) {
        const double cdf = normal_cdf(sorted[k]);
        d = std::max(d, std::abs(static_cast<double>(k + 1) / n - cdf));
        d = std::max(d, std::abs(static_cast<double>(k) / n - cdf));
    }
    return d;
}

int resolve_workers(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("LAGUERRE_EDGE_WORKERS")) {
        const int w = std::atoi(env);
        if (w > 0) return w;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

SimulationBatch run_batch(const SimulationConfig& config, const ProgressFn& progress) {
    if (config.replicas < 1) throw InvalidArgumentError("run_batch: replicas must be >= 1");
    if (config.run_oracle && config.params.n > 5000)
        throw InvalidArgumentError("run_batch: oracle requires n <= 5000");

    const auto t0 = std::chrono::steady_clock::now();
    const EdgeGeometry geometry = build_geometry(config.params);

    SimulationBatch batch;
    batch.records.resize(config.replicas);
    std::atomic<std::int64_t> next{0};
    std::atomic<std::int64_t> resamples{0};
    std::atomic<std::int64_t> done{0};
    std::atomic<bool> failed{false};
    std::string failure_msg;
    std::mutex failure_mutex;

    auto worker = [&]() {
        for (;;) {
            const std::int64_t idx = next.fetch_add(1);
            if (idx >= config.replicas || failed.load(std::memory_order_relaxed)) break;
            try {
                RecursionTrace trace;
                TridiagonalSample sample;
                std::uint64_t attempt = 0;
                for (;;) {
                    sample = sample_bidiagonal(config.params, config.master_seed,
                                               static_cast<std::uint64_t>(idx), attempt);
                    try {
                        trace = run_recursion(sample, geometry);
                        break;
                    } catch (const NumericalError&) {
                        ++attempt;
                        resamples.fetch_add(1);
                        if (attempt > 64) throw;
                    }
                }
                ReplicaRecord& rec = batch.records[idx];
                rec.replica = idx;
                rec.seed = sample.seed;
                rec.log_abs_calD = trace.log_abs_calD;
                rec.max_abs_r = trace.max_abs_r;
                rec.z = standardize(trace.log_abs_calD, config.params);
                if (config.run_oracle) rec.oracle = eigen_oracle(sample, config.params);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                failed.store(true);
                if (failure_msg.empty()) failure_msg = e.what();
                break;
            }
            const std::int64_t d = done.fetch_add(1) + 1;
            if (progress && (d % 256 == 0 || d == config.replicas)) progress(d, config.replicas);
        }
    };

    const int nworkers =
        static_cast<int>(std::min<std::int64_t>(resolve_workers(config.workers), config.replicas));
    if (nworkers <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(nworkers);
        for (int w = 0; w < nworkers; ++w) threads.emplace_back(worker);
        for (auto& th : threads) th.join();
    }
    if (failed.load()) throw NumericalError("run_batch: replica failed: " + failure_msg);

    batch.resample_count = resamples.load();
    if (batch.resample_count * 1000 > config.replicas)
        throw NumericalError("run_batch: suspicious parameters, more than 0.1% of replicas resampled");

    MomentAccumulator acc;
    std::vector<double> z = batch.z_values();
    for (double v : z) acc.add(v);
    batch.mean = acc.mean;
    batch.variance = acc.variance();
    batch.skewness = acc.skewness();
    batch.ks_stat = z.size() >= 2 ? ks_statistic(z) : 0.0;
    batch.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return batch;
}

void write_jsonl(const SimulationBatch& batch, std::ostream& os) {
    for (const auto& r : batch.records) {
        JsonObject obj;
        obj.field("replica", fmt_i64(r.replica))
            .field("seed", fmt_u64(r.seed))
            .field("z", r.z)
            .field("log_abs_calD", r.log_abs_calD)
            .field("max_abs_r", r.max_abs_r);
        if (r.oracle) obj.field("oracle", *r.oracle);
        os << obj.str() << '\n';
    }
    if (!os) throw IoError("write_jsonl: stream failure");
}

void write_csv(const SimulationBatch& batch, std::ostream& os) {
    os << "replica,seed,z,log_abs_calD,max_abs_r,oracle\n";
    for (const auto& r : batch.records) {
        os << fmt_i64(r.replica) << ',' << fmt_u64(r.seed) << ',' << fmt_g17(r.z) << ','
           << fmt_g17(r.log_abs_calD) << ',' << fmt_g17(r.max_abs_r) << ','
           << (r.oracle ? fmt_g17(*r.oracle) : "") << '\n';
    }
    if (!os) throw IoError("write_csv: stream failure");
}

void write_summary_json(const SimulationBatch& batch, const SimulationConfig& config,
                        std::ostream& os) {
    const Summary s = summarize(batch.z_values());
    JsonObject q;
    q.field("p05", s.q05).field("p25", s.q25).field("p50", s.median).field("p75", s.q75).field(
        "p95", s.q95);
    JsonObject obj;
    obj.field("n", fmt_i64(config.params.n))
        .field("m", fmt_i64(config.params.m))
        .field("lambda", config.params.lambda)
        .field("alpha", config.params.alpha)
        .field("sigma_n", config.params.sigma_n)
        .field("gamma", config.params.gamma)
        .field("replicas", fmt_i64(config.replicas))
        .field("master_seed", fmt_u64(config.master_seed))
        .field("mean", batch.mean)
        .field("variance", batch.variance)
        .field("skewness", batch.skewness)
        .field("ks_stat", batch.ks_stat)
        .field("resample_count", fmt_i64(batch.resample_count))
        .field("wall_time_s", batch.wall_time)
        .field("quantiles", q.str());
    os << obj.str() << '\n';
    if (!os) throw IoError("write_summary_json: stream failure");
}

std::vector<ReplicaRecord> read_jsonl(std::istream& is) {
    std::vector<ReplicaRecord> records;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line);
        ReplicaRecord r;
        r.replica = j.at("replica").get<std::int64_t>();
        r.seed = j.at("seed").get<std::uint64_t>();
        r.z = j.at("z").get<double>();
        r.log_abs_calD = j.at("log_abs_calD").get<double>();
        r.max_abs_r = j.at("max_abs_r").get<double>();
        if (j.contains("oracle")) r.oracle = j.at("oracle").get<double>();
        records.push_back(r);
    }
    return records;
}

}  // namespace lagedge
