#include "reorder/taskgen.hpp"

#include <cmath>
#include <sstream>

namespace reorder {

UtilBucket UtilBucket::standard(std::size_t i) {
    if (i >= kStandardBucketCount) throw std::out_of_range("bucket index must be < 9");
    const double base = 0.1 * static_cast<double>(i);
    return {0.01 + base, 0.1 + base};
}

std::string UtilBucket::label() const {
    std::ostringstream os;
    os.precision(2);
    os << std::fixed << "[" << lo << "," << hi << "]";
    return os.str();
}

GenConfig GenConfig::small_hyperperiod(UtilBucket bucket) {
    GenConfig c;
    c.min_tasks = 3;
    c.max_tasks = 5;
    c.bucket = bucket;
    c.periods = {2, 4, 5, 10, 20};
    c.required_hyperperiod = 20;
    return c;
}

std::vector<double> uunifast(std::size_t n, double total, Rng& rng) {
    if (n == 0) throw std::invalid_argument("uunifast: n must be >= 1");
    if (!(total > 0.0 && total <= 1.0)) {
        throw std::invalid_argument("uunifast: total utilization must be in (0, 1]");
    }
    std::vector<double> u;
    u.reserve(n);
    double remaining = total;
    for (std::size_t i = 1; i < n; ++i) {
        const double next =
            remaining * std::pow(rng.uniform_open01(), 1.0 / static_cast<double>(n - i));
        u.push_back(remaining - next);
        remaining = next;
    }
    u.push_back(remaining);
    return u;
}

GeneratedTaskset generate_taskset(const GenConfig& config, Rng& rng) {
    if (config.min_tasks < 1 || config.min_tasks > config.max_tasks) {
        throw std::invalid_argument("task count range is empty");
    }
    if (!(config.bucket.lo > 0.0 && config.bucket.lo <= config.bucket.hi && config.bucket.hi <= 1.0)) {
        throw std::invalid_argument("utilization bucket must lie within (0, 1]");
    }
    if (config.periods.empty()) throw std::invalid_argument("no candidate periods");

    for (std::size_t attempt = 1; attempt <= config.max_attempts; ++attempt) {
        const auto n = static_cast<std::size_t>(rng.uniform(config.min_tasks, config.max_tasks));
        const double target =
            config.bucket.lo + (config.bucket.hi - config.bucket.lo) * rng.uniform01();
        const auto utils = uunifast(n, target, rng);

        std::vector<Task> tasks;
        tasks.reserve(n);
        for (double u : utils) {
            const Time period = config.periods[rng.uniform(0, config.periods.size() - 1)];
            const double scaled = std::ceil(u * static_cast<double>(period));
            const Time wcet = std::max<Time>(1, static_cast<Time>(scaled));
            tasks.push_back(Task{.wcet = wcet, .period = period, .deadline = period});
        }
        Taskset ts(std::move(tasks));
        if (utilization(ts) > Utilization(1)) continue;
        if (config.required_hyperperiod && hyperperiod(ts) != *config.required_hyperperiod) continue;
        if (!validate(ts).empty()) continue;
        return {std::move(ts), target, attempt};
    }
    throw GenerationError("could not generate a schedulable taskset for bucket " +
                          config.bucket.label() + " within " +
                          std::to_string(config.max_attempts) + " attempts");
}

}  // namespace reorder
