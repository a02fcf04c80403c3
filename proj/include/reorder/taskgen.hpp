#pragma once

#include "reorder/rng.hpp"
#include "reorder/task_model.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace reorder {

/// Base-utilization bucket [lo, hi].
struct UtilBucket {
    double lo = 0.01;
    double hi = 0.1;

    /// The i-th experiment bucket, [0.01 + 0.1 i, 0.1 + 0.1 i] for i in 0..8.
    static UtilBucket standard(std::size_t i);
    [[nodiscard]] std::string label() const;
};

inline constexpr std::size_t kStandardBucketCount = 9;

struct GenConfig {
    std::size_t min_tasks = 3;
    std::size_t max_tasks = 10;
    UtilBucket bucket;
    /// Candidate periods, chosen uniformly. Defaults to the divisors of 100
    /// that exceed 10.
    std::vector<Time> periods{20, 25, 50, 100};
    /// When set, only tasksets with exactly this hyperperiod are accepted.
    std::optional<Time> required_hyperperiod;
    std::size_t max_attempts = 10'000;

    /// Settings for small true-entropy studies: 3..5 tasks with periods in
    /// {2, 4, 5, 10, 20} and hyperperiod 20.
    static GenConfig small_hyperperiod(UtilBucket bucket);
};

class GenerationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// UUniFast: n positive utilizations summing to total, uniformly
/// distributed over the simplex.
[[nodiscard]] std::vector<double> uunifast(std::size_t n, double total, Rng& rng);

struct GeneratedTaskset {
    Taskset taskset;
    double target_utilization = 0.0;  // before WCET rounding
    std::size_t attempts = 0;
};

/// Draws implicit-deadline tasksets until one passes the EDF utilization
/// test (and the hyperperiod constraint, if any). WCETs are ceil(U_i T_i).
/// Throws GenerationError naming the bucket when max_attempts is exhausted.
[[nodiscard]] GeneratedTaskset generate_taskset(const GenConfig& config, Rng& rng);

}  // namespace reorder
