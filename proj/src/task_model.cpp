#include "reorder/task_model.hpp"

#include <numeric>
#include <sstream>

namespace reorder {

Taskset::Taskset(std::vector<Task> tasks) : tasks_(std::move(tasks)) {
    for (std::size_t i = 0; i < tasks_.size(); ++i) {
        tasks_[i].id = static_cast<TaskId>(i + 1);
    }
}

Taskset Taskset::from_params(std::initializer_list<std::array<Time, 3>> params) {
    std::vector<Task> tasks;
    tasks.reserve(params.size());
    for (const auto& [c, t, d] : params) {
        tasks.push_back(Task{.wcet = c, .period = t, .deadline = d});
    }
    return Taskset(std::move(tasks));
}

Taskset Taskset::implicit(std::initializer_list<std::array<Time, 2>> params) {
    std::vector<Task> tasks;
    tasks.reserve(params.size());
    for (const auto& [c, t] : params) {
        tasks.push_back(Task{.wcet = c, .period = t, .deadline = t});
    }
    return Taskset(std::move(tasks));
}

const Task& Taskset::by_id(TaskId id) const {
    if (id == kIdleTaskId || id > tasks_.size()) {
        throw ModelError("no task with id " + std::to_string(id));
    }
    return tasks_[id - 1];
}

Taskset Taskset::with_wcib(const std::vector<Budget>& wcib) const {
    if (wcib.size() != tasks_.size()) {
        throw ModelError("wcib vector size does not match taskset");
    }
    Taskset copy = *this;
    for (std::size_t i = 0; i < wcib.size(); ++i) copy.tasks_[i].wcib = wcib[i];
    return copy;
}

Time hyperperiod(const Taskset& taskset) {
    Time l = 1;
    for (const auto& task : taskset) {
        if (task.period == 0) throw ModelError("period must be positive");
        const Time g = std::gcd(l, task.period);
        Time next = 0;
        if (__builtin_mul_overflow(l / g, task.period, &next)) {
            throw ModelError("hyperperiod overflows 64 bits");
        }
        l = next;
    }
    return l;
}

Utilization utilization(const Taskset& taskset) {
    Utilization u(0);
    for (const auto& task : taskset) {
        u += Utilization(static_cast<std::int64_t>(task.wcet),
                         static_cast<std::int64_t>(task.period));
    }
    return u;
}

std::vector<Violation> validate(const Taskset& taskset) {
    std::vector<Violation> out;
    auto add = [&](TaskId id, std::string rule, const std::string& detail) {
        out.push_back(Violation{id, std::move(rule), detail});
    };

    bool periods_ok = true;
    for (const auto& t : taskset) {
        if (t.wcet < 1) add(t.id, "positive wcet", "wcet must be >= 1");
        if (t.period < 1) {
            add(t.id, "positive period", "period must be >= 1");
            periods_ok = false;
        }
        if (t.deadline < 1) add(t.id, "positive deadline", "deadline must be >= 1");
        if (t.deadline > t.period) {
            std::ostringstream os;
            os << "deadline " << t.deadline << " exceeds period " << t.period;
            add(t.id, "constrained deadline", os.str());
        }
        if (t.wcet > t.deadline) {
            std::ostringstream os;
            os << "wcet " << t.wcet << " exceeds deadline " << t.deadline;
            add(t.id, "wcet within deadline", os.str());
        }
        const auto slack = static_cast<Budget>(t.deadline) - static_cast<Budget>(t.wcet);
        if (t.wcib > slack) {
            std::ostringstream os;
            os << "wcib " << t.wcib << " exceeds deadline - wcet = " << slack;
            add(t.id, "wcib bound", os.str());
        }
    }

    if (periods_ok) {
        try {
            (void)hyperperiod(taskset);
        } catch (const ModelError& e) {
            add(0, "hyperperiod", e.what());
        }
        const auto u = utilization(taskset);
        if (u > Utilization(1)) {
            std::ostringstream os;
            os << "total utilization " << u.numerator() << "/" << u.denominator() << " > 1";
            add(0, "EDF utilization bound", os.str());
        }
    }
    return out;
}

}  // namespace reorder
