#pragma once

#include "reorder/task_model.hpp"

#include <cstddef>
#include <vector>

namespace reorder {

class AnalysisError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Offline EDF analysis of a taskset: per-task response-time upper bounds
/// and the worst-case inversion budgets derived from them.
struct AnalysisResult {
    std::vector<Time> response_time;  // R_i, indexed by task position
    std::vector<Budget> wcib;         // V_i = D_i - R_i
    Time busy_period = 0;             // upper bound on any busy period
    std::size_t iterations = 0;       // fixed-point steps taken for busy_period
};

inline constexpr std::size_t kBusyPeriodIterationCap = 1'000'000;

// All `i` arguments are 0-based task positions.

/// Worst-case interference on task i released at offset a, including the
/// extra back-to-back instance of each interfering task.
[[nodiscard]] Time interference(const Taskset& taskset, std::size_t i, Time a);

/// (floor(a / T_i) + 1) * C_i + interference(i, a).
[[nodiscard]] Time workload(const Taskset& taskset, std::size_t i, Time a);

/// Fixed point of r = sum ceil(r / T_j) * C_j starting from sum C_j.
/// Throws AnalysisError when the iteration cap is exceeded.
[[nodiscard]] Time busy_period_bound(const Taskset& taskset, std::size_t* iterations = nullptr);

/// max(C_i, W_i(a) - a).
[[nodiscard]] Time response_time_at(const Taskset& taskset, std::size_t i, Time a);

/// max over integer a in [0, busy_period - C_i) of response_time_at;
/// C_i when the range is empty.
[[nodiscard]] Time wcrt(const Taskset& taskset, std::size_t i, Time busy_period);

/// Runs the whole analysis.
[[nodiscard]] AnalysisResult analyze(const Taskset& taskset);

/// D_i - R_i for every task.
[[nodiscard]] std::vector<Budget> wcib(const Taskset& taskset);

}  // namespace reorder
