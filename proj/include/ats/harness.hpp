#pragma once

#include "ats/benchmarks.hpp"
#include "ats/config.hpp"
#include "ats/strategies.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace ats {

inline constexpr double kRegretFloor = 1e-6;

struct IterationRecord {
    int rep = 0;
    int iter = 0;
    int evals = 0;
    double best = 0.0;
    std::optional<double> regret;
    std::optional<double> diversity;
    double wallclock_ms = 0.0;
    std::vector<Point> points;
    std::vector<double> values;
    std::vector<PointProvenance> provenance;
};

struct RepetitionFailure {
    int rep = 0;
    int iter = 0;
    std::string message;
};

struct ExperimentTrace {
    ExperimentConfig config;
    std::vector<IterationRecord> rows;  // ordered by (rep, iter)
    std::vector<RepetitionFailure> failures;

    bool failed(int rep) const;
    std::vector<IterationRecord> repetition(int rep) const;
};

/// max(best - min_value, 1e-6).
double regret(double best, double min_value);
/// Absent when the objective has no known minimum.
std::optional<double> regret(double best, const BenchmarkSpec& spec);
std::optional<double> regret(double best, const std::string& benchmark);

/// Mean over points of the mean l2 distance to the other points. Expects
/// unit-cube coordinates; absent for fewer than two points.
std::optional<double> intra_batch_distance(const std::vector<Point>& unit_points);

Seed repetition_seed(Seed root, int rep);
std::vector<Point> initial_points(const Bounds& domain, int n_init, Seed rep_seed);
BatchConfig batch_config_for(const ExperimentConfig& cfg, Seed rep_seed);

/// Metrics for one finished batch: `data` already holds the batch results.
IterationRecord summarize_iteration(const BenchmarkSpec& spec, const Dataset& data, int rep, int iter,
                                    const BatchProposal& batch, const std::vector<double>& values);

/// Outer loop: n_init uniform points, then n_iterations batches, per
/// repetition. Errors inside a repetition are recorded and the other
/// repetitions continue.
ExperimentTrace run_experiment(const ExperimentConfig& cfg);
ExperimentTrace run_experiment(const ExperimentConfig& cfg, const BenchmarkSpec& objective);

struct AggregateRow {
    int iter = 0;
    int evals = 0;
    double mean_best = 0.0;
    double se_best = 0.0;
    std::optional<double> mean_regret;
    std::optional<double> se_regret;
    std::optional<double> mean_diversity;
    int n_ok = 0;
    int n_failed = 0;
};

/// Mean and standard error across the repetitions that did not fail.
std::vector<AggregateRow> aggregate(const ExperimentTrace& trace);

void write_trace_csv(const ExperimentTrace& trace, std::ostream& out);
void write_aggregate_csv(const std::vector<AggregateRow>& rows, std::ostream& out);
nlohmann::json provenance_to_json(const PointProvenance& p);
nlohmann::json trace_sidecar(const ExperimentTrace& trace);

/// Writes trace.csv, aggregate.csv and trace.json into dir.
void write_outputs(const ExperimentTrace& trace, const std::filesystem::path& dir);

/// %.17g, empty for absent values.
std::string format_number(double v);
std::string format_number(const std::optional<double>& v);

}  // namespace ats
