#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core/clt.hpp"
#include "core/ensemble.hpp"

namespace lagedge {

struct SimulationConfig {
    EnsembleParams params;
    std::int64_t replicas = 1;
    std::uint64_t master_seed = 0;
    int workers = 0;  // 0 = LAGUERRE_EDGE_WORKERS env var, else hardware threads
    bool run_oracle = false;
    std::string output_path;  // JSONL destination; empty = caller handles output
};

struct ReplicaRecord {
    std::int64_t replica = 0;
    std::uint64_t seed = 0;
    double z = 0.0;
    double log_abs_calD = 0.0;
    double max_abs_r = 0.0;
    std::optional<double> oracle;
};

struct SimulationBatch {
    std::vector<ReplicaRecord> records;  // ordered by replica index
    double mean = 0.0;
    double variance = 0.0;  // unbiased (N-1)
    double skewness = 0.0;
    double ks_stat = 0.0;  // vs standard normal
    std::int64_t resample_count = 0;
    double wall_time = 0.0;  // seconds

    std::vector<double> z_values() const;
};

// Mergeable running moments (Chan/Welford update rules through the third
// central moment). merge(A,B) equals accumulating A's and B's inputs jointly.
struct MomentAccumulator {
    std::int64_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;
    double m3 = 0.0;

    void add(double x);
    void merge(const MomentAccumulator& other);
    double variance() const;  // unbiased
    double skewness() const;  // m3 / m2^(3/2), population-normalized
};

struct Summary {
    std::int64_t count = 0;
    double mean = 0.0;
    double variance = 0.0;
    double skewness = 0.0;
    double q05 = 0.0, q25 = 0.0, median = 0.0, q75 = 0.0, q95 = 0.0;
    double min = 0.0, max = 0.0;
};

Summary summarize(std::span<const double> values);

double normal_cdf(double x);

// Sup distance between the empirical CDF and the standard normal CDF.
double ks_statistic(std::span<const double> samples);

using ProgressFn = std::function<void(std::int64_t done, std::int64_t total)>;

// Replica-parallel batch: geometry is built once and shared read-only; each
// replica runs sample -> recursion -> standardize. Near-singular draws are
// retried with the attempt counter bumped, keeping results bit-identical for
// any worker count.
SimulationBatch run_batch(const SimulationConfig& config, const ProgressFn& progress = {});

void write_jsonl(const SimulationBatch& batch, std::ostream& os);
void write_csv(const SimulationBatch& batch, std::ostream& os);
void write_summary_json(const SimulationBatch& batch, const SimulationConfig& config,
                        std::ostream& os);

// Parses records previously written by write_jsonl.
std::vector<ReplicaRecord> read_jsonl(std::istream& is);

int resolve_workers(int requested);

}  // namespace lagedge
