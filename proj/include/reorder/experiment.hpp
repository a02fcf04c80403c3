#pragma once

#include "reorder/entropy.hpp"
#include "reorder/scheduler.hpp"
#include "reorder/spectral.hpp"
#include "reorder/taskgen.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace reorder {

inline constexpr const char* kVersion = "1.0.0";

enum class ExperimentKind { EntropyVsUtil, RangeRatio, Spectrum, Correlation };

/// entropy-vs-util, range-ratio, spectrum, correlation.
[[nodiscard]] std::string_view to_string(ExperimentKind kind);
[[nodiscard]] ExperimentKind parse_experiment(std::string_view name);

class ExperimentError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ExperimentSpec {
    ExperimentKind kind = ExperimentKind::EntropyVsUtil;
    std::vector<Scheme> schemes{std::begin(kAllSchemes), std::end(kAllSchemes)};
    /// Indices into the standard utilization buckets.
    std::vector<std::size_t> buckets{0, 1, 2, 3, 4, 5, 6, 7, 8};
    std::size_t tasksets_per_bucket = 25;
    /// Total taskset count for the correlation study (buckets are used
    /// round-robin) and seed count for the spectrum study.
    std::size_t tasksets = 200;
    Time hyperperiods = 100;
    std::uint64_t seed = 1;
    ExecPolicy exec = ExecPolicy::uniform_alpha();
    /// Overrides the per-taskset defaults m = ceil(0.35 L), pi = floor(0.1 L).
    std::optional<EntropyParams> entropy;
    /// Generator settings; the bucket is filled in per cell.
    GenConfig gen;
    /// Number of top spectral peaks searched for each 1/T_i.
    std::size_t peaks = 8;
    /// Worker threads; 0 picks the hardware concurrency.
    std::size_t threads = 0;

    /// Desk-scale correlation profile: UTR, L = 20, K = 1500, 200 tasksets.
    static ExperimentSpec correlation(Time hyperperiods = 1500, std::size_t tasksets = 200);

    [[nodiscard]] nlohmann::json to_json() const;
};

/// Seed of the j-th taskset of a bucket. Generation and simulation derive
/// independent streams from it, and every scheme reuses the same one.
[[nodiscard]] std::uint64_t taskset_seed(std::uint64_t seed, std::size_t bucket, std::size_t j);

/// Runs fn(0) .. fn(n - 1) on up to `threads` workers. Callers write
/// results into preallocated slots, so output never depends on timing.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn);

struct BucketStat {
    std::size_t bucket = 0;
    Scheme scheme = Scheme::VanillaEDF;
    double value = 0.0;       // mean entropy, or geometric-mean range ratio
    double stddev = 0.0;      // sample standard deviation across tasksets
    std::size_t n = 0;        // tasksets
    double normalized = 0.0;  // value / largest value in the table
};

struct BucketTable {
    nlohmann::json spec;
    std::vector<BucketStat> rows;
    /// Per-taskset values, samples[row index][taskset].
    std::vector<std::vector<double>> samples;

    [[nodiscard]] const BucketStat& at(std::size_t bucket, Scheme scheme) const;
    void write_csv(std::ostream& out, std::string_view value_column) const;
    [[nodiscard]] nlohmann::json to_json(std::string_view value_column) const;
};

/// Mean approximate entropy per (bucket, scheme).
[[nodiscard]] BucketTable run_entropy_experiment(const ExperimentSpec& spec);

/// Geometric mean of w_i / D_i across every task of every taskset, per
/// (bucket, scheme). stddev is left at 0.
[[nodiscard]] BucketTable run_range_experiment(const ExperimentSpec& spec);

struct CorrelationResult {
    nlohmann::json spec;
    std::vector<double> true_entropy;
    std::vector<double> approx_entropy;
    std::optional<double> pearson;  // nullopt when either side is constant

    [[nodiscard]] nlohmann::json to_json() const;
};

/// Empirical true entropy against approximate entropy over small-hyperperiod
/// tasksets, all simulated under spec.schemes.front(). Throws
/// ExperimentError when fewer than 10 tasksets are requested.
[[nodiscard]] CorrelationResult run_correlation_experiment(const ExperimentSpec& spec);

/// Aggregate activity signal fed to the DFT: slot value is the number of
/// the running task (0 when idle).
[[nodiscard]] std::vector<double> activity_signal(const ScheduleTrace& trace);

struct PeakReport {
    Scheme scheme = Scheme::VanillaEDF;
    std::uint64_t seed = 0;
    std::vector<double> peaks;
    /// recovered[i]: whether 1/T_i is among the peaks.
    std::vector<bool> recovered;

    [[nodiscard]] bool all_recovered() const;
};

/// Top `count` peaks of the activity spectrum and which task frequencies
/// they reveal.
[[nodiscard]] PeakReport peak_report(const Taskset& taskset, const ScheduleTrace& trace,
                                     std::size_t count);

struct SpectrumResult {
    nlohmann::json spec;
    std::vector<PeakReport> reports;

    [[nodiscard]] nlohmann::json to_json(const Taskset& taskset) const;
};

/// Simulates `taskset` under each scheme for spec.tasksets seeds and
/// reports the recovered task frequencies.
[[nodiscard]] SpectrumResult run_spectrum_experiment(const ExperimentSpec& spec, const Taskset& taskset);

}  // namespace reorder
