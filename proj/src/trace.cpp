#include "reorder/trace.hpp"

#include <algorithm>
#include <stdexcept>

namespace reorder {

ScheduleTrace::ScheduleTrace(std::size_t length, std::size_t count)
    : length_(length), count_(count), slots_(length * count, kIdleTaskId) {}

ScheduleTrace ScheduleTrace::from_rows(const std::vector<std::vector<Symbol>>& rows) {
    if (rows.empty() || rows.front().empty()) {
        throw std::invalid_argument("trace needs at least one nonempty row");
    }
    ScheduleTrace trace(rows.front().size(), rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k) {
        if (rows[k].size() != trace.length_) {
            throw std::invalid_argument("trace rows must have equal length");
        }
        std::copy(rows[k].begin(), rows[k].end(), trace.row(k).begin());
    }
    return trace;
}

std::span<const Symbol> ScheduleTrace::row(std::size_t k) const {
    if (k >= count_) throw std::out_of_range("trace row out of range");
    return std::span<const Symbol>(slots_).subspan(k * length_, length_);
}

std::span<Symbol> ScheduleTrace::row(std::size_t k) {
    if (k >= count_) throw std::out_of_range("trace row out of range");
    return std::span<Symbol>(slots_).subspan(k * length_, length_);
}

Symbol ScheduleTrace::max_symbol() const {
    return slots_.empty() ? kIdleTaskId : *std::max_element(slots_.begin(), slots_.end());
}

}  // namespace reorder
