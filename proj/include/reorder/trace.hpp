#pragma once

#include "reorder/task_model.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace reorder {

using Symbol = TaskId;

/// K x L matrix of slot symbols: K observed hyperperiods of length L.
/// Symbol 0 is the idle task. Rows are 0-based.
class ScheduleTrace {
public:
    ScheduleTrace() = default;
    ScheduleTrace(std::size_t length, std::size_t count);
    /// Builds from explicit rows; all rows must have equal, nonzero length.
    static ScheduleTrace from_rows(const std::vector<std::vector<Symbol>>& rows);

    [[nodiscard]] std::size_t length() const { return length_; }  // L
    [[nodiscard]] std::size_t count() const { return count_; }    // K
    [[nodiscard]] bool empty() const { return slots_.empty(); }

    [[nodiscard]] std::span<const Symbol> row(std::size_t k) const;
    [[nodiscard]] std::span<Symbol> row(std::size_t k);
    [[nodiscard]] Symbol at(std::size_t k, std::size_t t) const { return slots_[k * length_ + t]; }
    /// Row-major view of all K * L slots.
    [[nodiscard]] std::span<const Symbol> flat() const { return slots_; }
    [[nodiscard]] std::span<Symbol> flat() { return slots_; }
    [[nodiscard]] Symbol max_symbol() const;

    bool operator==(const ScheduleTrace&) const = default;

private:
    std::size_t length_ = 0;
    std::size_t count_ = 0;
    std::vector<Symbol> slots_;
};

}  // namespace reorder
