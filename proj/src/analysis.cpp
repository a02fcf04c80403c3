#include "reorder/analysis.hpp"

#include <algorithm>
#include <string>

namespace reorder {

namespace {

Time ceil_div(Time a, Time b) { return a / b + (a % b != 0); }

}  // namespace

Time interference(const Taskset& taskset, std::size_t i, Time a) {
    const Task& ti = taskset[i];
    Time total = 0;
    for (std::size_t j = 0; j < taskset.size(); ++j) {
        if (j == i) continue;
        const Task& tj = taskset[j];
        if (tj.deadline > a + ti.deadline) continue;
        const Time by_deadline = ceil_div(ti.deadline, tj.period) + 1;
        const Time by_offset = 1 + (a + ti.deadline - tj.deadline) / tj.period + 1;
        total += std::min(by_deadline, by_offset) * tj.wcet;
    }
    return total;
}

Time workload(const Taskset& taskset, std::size_t i, Time a) {
    const Task& ti = taskset[i];
    return (a / ti.period + 1) * ti.wcet + interference(taskset, i, a);
}

Time busy_period_bound(const Taskset& taskset, std::size_t* iterations) {
    Time r = 0;
    for (const auto& t : taskset) r += t.wcet;
    if (r == 0) {
        if (iterations) *iterations = 0;
        return 0;
    }
    for (std::size_t k = 1; k <= kBusyPeriodIterationCap; ++k) {
        Time next = 0;
        for (const auto& t : taskset) {
            Time term = 0;
            if (__builtin_mul_overflow(ceil_div(r, t.period), t.wcet, &term) ||
                __builtin_add_overflow(next, term, &next)) {
                throw AnalysisError("busy-period iterate overflowed after " + std::to_string(k) +
                                    " iterations; last iterate " + std::to_string(r));
            }
        }
        if (next == r) {
            if (iterations) *iterations = k;
            return r;
        }
        r = next;
    }
    throw AnalysisError("busy-period fixed point did not converge within " +
                        std::to_string(kBusyPeriodIterationCap) +
                        " iterations; last iterate " + std::to_string(r));
}

Time response_time_at(const Taskset& taskset, std::size_t i, Time a) {
    const Time c = taskset[i].wcet;
    const Time w = workload(taskset, i, a);
    return w > a + c ? w - a : c;
}

Time wcrt(const Taskset& taskset, std::size_t i, Time busy_period) {
    const Time c = taskset[i].wcet;
    Time worst = c;
    for (Time a = 0; a + c < busy_period; ++a) {
        worst = std::max(worst, response_time_at(taskset, i, a));
    }
    return worst;
}

AnalysisResult analyze(const Taskset& taskset) {
    AnalysisResult result;
    result.busy_period = busy_period_bound(taskset, &result.iterations);
    result.response_time.reserve(taskset.size());
    result.wcib.reserve(taskset.size());
    for (std::size_t i = 0; i < taskset.size(); ++i) {
        const Time r = wcrt(taskset, i, result.busy_period);
        result.response_time.push_back(r);
        result.wcib.push_back(static_cast<Budget>(taskset[i].deadline) - static_cast<Budget>(r));
    }
    return result;
}

std::vector<Budget> wcib(const Taskset& taskset) { return analyze(taskset).wcib; }

}  // namespace reorder
