#pragma once

#include <boost/rational.hpp>

#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace reorder {

/// Discrete time, counted in indivisible unit slots.
using Time = std::uint64_t;
/// Signed inversion budget (WCIB / RIB), in slots.
using Budget = std::int64_t;
/// Task identifier. 0 is the idle task, real tasks are 1..n in declaration order.
using TaskId = std::uint32_t;

using Utilization = boost::rational<std::int64_t>;

inline constexpr TaskId kIdleTaskId = 0;
/// Stands in for the idle task's infinite deadline/period/execution time.
inline constexpr Time kInfiniteTime = std::numeric_limits<Time>::max();
inline constexpr Budget kInfiniteBudget = std::numeric_limits<Budget>::max();

class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Task {
    TaskId id = 0;
    Time wcet = 1;
    Time period = 1;
    Time deadline = 1;
    Budget wcib = 0;  // filled in by analysis

    bool operator==(const Task&) const = default;
};

/// An ordered list of periodic tasks. Ids are assigned 1..n by position.
class Taskset {
public:
    Taskset() = default;
    explicit Taskset(std::vector<Task> tasks);

    /// Builds a taskset from (wcet, period, deadline) triples.
    static Taskset from_params(std::initializer_list<std::array<Time, 3>> params);
    /// Implicit-deadline shorthand: (wcet, period) pairs.
    static Taskset implicit(std::initializer_list<std::array<Time, 2>> params);

    [[nodiscard]] std::size_t size() const { return tasks_.size(); }
    [[nodiscard]] bool empty() const { return tasks_.empty(); }
    [[nodiscard]] const std::vector<Task>& tasks() const { return tasks_; }
    [[nodiscard]] const Task& operator[](std::size_t index) const { return tasks_.at(index); }
    /// Task by id (1-based).
    [[nodiscard]] const Task& by_id(TaskId id) const;

    [[nodiscard]] auto begin() const { return tasks_.begin(); }
    [[nodiscard]] auto end() const { return tasks_.end(); }

    /// Copy with every task's wcib replaced. Size must match.
    [[nodiscard]] Taskset with_wcib(const std::vector<Budget>& wcib) const;

private:
    std::vector<Task> tasks_;
};

/// One released task instance.
struct Job {
    TaskId task = kIdleTaskId;
    Time release = 0;
    Time abs_deadline = kInfiniteTime;
    Time remaining = kInfiniteTime;
    Time actual_exec = kInfiniteTime;
    Budget rib = kInfiniteBudget;

    [[nodiscard]] bool is_idle() const { return task == kIdleTaskId; }

    /// The idle task's single, always-ready instance.
    static Job idle() { return Job{}; }
};

/// EDF priority order: earlier absolute deadline first, lower task id on ties.
/// The idle job sorts after every real job.
[[nodiscard]] inline bool higher_priority(const Job& a, const Job& b) {
    if (a.abs_deadline != b.abs_deadline) return a.abs_deadline < b.abs_deadline;
    if (a.is_idle() != b.is_idle()) return !a.is_idle();
    return a.task < b.task;
}

/// LCM of all periods. Throws ModelError on overflow or a zero period.
/// An empty taskset has hyperperiod 1.
[[nodiscard]] Time hyperperiod(const Taskset& taskset);
[[nodiscard]] Utilization utilization(const Taskset& taskset);

struct Violation {
    TaskId task = 0;  // 0 when the violation concerns the whole taskset
    std::string rule;
    std::string detail;
};

/// Checks every task/taskset invariant plus the EDF utilization bound.
/// Returns all violations; an empty vector means the taskset is acceptable.
[[nodiscard]] std::vector<Violation> validate(const Taskset& taskset);

}  // namespace reorder
