#include "reorder/scheduler.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace reorder {

std::string_view to_string(Scheme s) {
    switch (s) {
        case Scheme::VanillaEDF: return "edf";
        case Scheme::Base: return "base";
        case Scheme::IdleTime: return "it";
        case Scheme::FineGrained: return "fg";
        case Scheme::UnusedTimeReclamation: return "utr";
    }
    return "?";
}

Scheme parse_scheme(std::string_view name) {
    for (Scheme s : kAllSchemes) {
        if (to_string(s) == name) return s;
    }
    throw std::invalid_argument("unknown scheme '" + std::string(name) + "'");
}

std::string_view to_string(Reason r) {
    switch (r) {
        case Reason::Arrival: return "arrival";
        case Reason::Completion: return "completion";
        case Reason::BudgetExpiry: return "budget_expiry";
        case Reason::RandomYield: return "random_yield";
    }
    return "?";
}

Time ExecPolicy::draw(Time wcet, RandomSource& rng) const {
    switch (kind) {
        case Kind::Wcet: return wcet;
        case Kind::UniformAlpha: {
            const auto scaled = [wcet](double alpha) {
                const double v = std::ceil(alpha * static_cast<double>(wcet) - 1e-9);
                return std::clamp<Time>(static_cast<Time>(std::max(v, 1.0)), 1, wcet);
            };
            const Time lo = scaled(alpha_lo);
            const Time hi = std::max(lo, scaled(alpha_hi));
            return rng.uniform(lo, hi);
        }
        case Kind::FixedFraction: {
            const auto v = static_cast<Time>(std::floor(fraction * static_cast<double>(wcet) + 1e-9));
            return std::clamp<Time>(v, 1, wcet);
        }
    }
    return wcet;
}

std::string ExecPolicy::describe() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::Wcet: os << "wcet"; break;
        case Kind::UniformAlpha: os << "uniform[" << alpha_lo << "," << alpha_hi << "]"; break;
        case Kind::FixedFraction: os << "fraction:" << fraction; break;
    }
    return os.str();
}

// --- ReadyQueue -------------------------------------------------------------

void ReadyQueue::insert(const Job& job) {
    const auto pos = std::upper_bound(jobs_.begin(), jobs_.end(), job, higher_priority);
    jobs_.insert(pos, job);
}

void ReadyQueue::erase(std::size_t index) {
    jobs_.erase(jobs_.begin() + static_cast<std::ptrdiff_t>(index));
}

std::optional<std::size_t> ReadyQueue::find(TaskId task) const {
    for (std::size_t i = 0; i < jobs_.size(); ++i) {
        if (jobs_[i].task == task) return i;
    }
    return std::nullopt;
}

std::size_t ReadyQueue::real_jobs() const {
    return static_cast<std::size_t>(
        std::count_if(jobs_.begin(), jobs_.end(), [](const Job& j) { return !j.is_idle(); }));
}

// --- protocol steps -----------------------------------------------------------

Time min_inversion_deadline(const ReadyQueue& queue, std::size_t index) {
    // The queue is priority-sorted, so the first exhausted job after `index`
    // has the smallest deadline among them.
    for (std::size_t j = index + 1; j < queue.size(); ++j) {
        if (queue[j].rib <= 0) return queue[j].abs_deadline;
    }
    return kInfiniteTime;
}

std::vector<std::size_t> rpip_eligible(const ReadyQueue& queue) {
    assert(!queue.empty());
    // Everything up to and including the first exhausted job. Equal-deadline
    // jobs queued behind it would still invert it, so they stay out.
    std::vector<std::size_t> out{0};
    for (std::size_t j = 1; j < queue.size(); ++j) {
        out.push_back(j);
        if (queue[j].rib <= 0) break;
    }
    return out;
}

std::vector<std::size_t> build_candidates(const ReadyQueue& queue) {
    assert(!queue.empty());
    if (queue.hp().rib <= 0) return {0};
    return rpip_eligible(queue);
}

Budget blocked_budget(const ReadyQueue& queue, std::size_t index) {
    Budget lowest = kInfiniteBudget;
    for (std::size_t j = 0; j < index; ++j) {
        lowest = std::min(lowest, queue[j].rib);
    }
    return lowest;
}

namespace {

Time saturating_add(Time a, Time b) { return a > kInfiniteTime - b ? kInfiniteTime : a + b; }

Pick run_until_done(const ReadyQueue& queue, std::size_t index, Time t, Time next_arrival) {
    const Time done = saturating_add(t, queue[index].remaining);
    if (done <= next_arrival) return {index, done, Reason::Completion};
    return {index, next_arrival, Reason::Arrival};
}

}  // namespace

Pick pick_next(const ReadyQueue& queue, std::span<const std::size_t> candidates,
               RandomSource& rng, Scheme scheme, Time t, Time next_arrival) {
    assert(!queue.empty() && !candidates.empty() && next_arrival > t);
    if (!is_randomized(scheme) || candidates.size() == 1) {
        return run_until_done(queue, candidates.front(), t, next_arrival);
    }

    const std::size_t chosen = candidates[rng.uniform(0, candidates.size() - 1)];
    if (chosen == 0) return run_until_done(queue, 0, t, next_arrival);

    const Job& job = queue[chosen];
    const Budget budget = blocked_budget(queue, chosen);
    if (budget <= 0) {
        throw std::logic_error("selected an inversion with no budget left");
    }
    const Time full = std::min(job.remaining, static_cast<Time>(budget));
    const Time delta = is_fine_grained(scheme) ? rng.uniform(1, full) : full;
    const Time end = saturating_add(t, delta);

    if (delta == job.remaining && end <= next_arrival) return {chosen, end, Reason::Completion};
    if (end >= next_arrival) return {chosen, next_arrival, Reason::Arrival};
    if (delta == full) return {chosen, end, Reason::BudgetExpiry};
    return {chosen, end, Reason::RandomYield};
}

void tick_budgets(ReadyQueue& queue, std::size_t running, Time elapsed) {
    for (std::size_t j = 0; j < running; ++j) {
        if (queue[j].rib != kInfiniteBudget) queue[j].rib -= static_cast<Budget>(elapsed);
    }
    Job& job = queue[running];
    if (job.remaining != kInfiniteTime) job.remaining -= std::min(elapsed, job.remaining);
}

void reclaim_unused(ReadyQueue& queue, const Job& finished, Time wcet) {
    if (finished.actual_exec >= wcet) return;
    const auto unused = static_cast<Budget>(wcet - finished.actual_exec);
    for (std::size_t j = 0; j < queue.size(); ++j) {
        Job& job = queue[j];
        if (higher_priority(finished, job) && job.rib != kInfiniteBudget) {
            job.rib += unused;
        }
    }
}

// --- simulation ---------------------------------------------------------------

ProtocolViolation::ProtocolViolation(std::vector<DeadlineMiss> misses)
    : std::runtime_error([&] {
          std::ostringstream os;
          os << misses.size() << " deadline miss(es); first: task " << misses.front().task
             << " released at " << misses.front().release << " with deadline "
             << misses.front().abs_deadline << ", " << misses.front().remaining
             << " slot(s) left at t=" << misses.front().detected_at;
          return os.str();
      }()),
      misses_(std::move(misses)) {}

void require_no_misses(const SimulationResult& result) {
    if (!result.ok()) throw ProtocolViolation(result.misses);
}

namespace {

class Engine {
public:
    Engine(const Taskset& taskset, const AnalysisResult& analysis, const SchedulerConfig& config,
           RandomSource& decisions, const DecisionObserver& observer)
        : taskset_(taskset),
          config_(config),
          decisions_(decisions),
          observer_(observer),
          exec_rng_(mix_seed(config.seed, 1)),
          wcib_(analysis.wcib),
          next_release_(taskset.size(), 0) {
        if (wcib_.size() != taskset.size()) {
            throw std::invalid_argument("analysis does not match taskset");
        }
        const auto violations = validate(taskset);
        if (!violations.empty()) {
            throw ModelError("invalid taskset: " + violations.front().rule + " (" +
                             violations.front().detail + ")");
        }
        if (config.hyperperiods == 0) throw std::invalid_argument("hyperperiods must be >= 1");
        length_ = hyperperiod(taskset);
        if (__builtin_mul_overflow(length_, config.hyperperiods, &horizon_)) {
            throw ModelError("simulation horizon overflows");
        }
        result_.trace = ScheduleTrace(length_, config.hyperperiods);
    }

    SimulationResult run() {
        if (uses_idle_task(config_.scheme)) queue_.insert(Job::idle());
        Time t = 0;
        release_due(t);
        auto slots = result_.trace.flat();
        while (t < horizon_) {
            const Time arrival = next_arrival();
            if (queue_.empty()) {
                carry_.clear();
                record({t, kIdleTaskId, arrival, Reason::Arrival});
                t = arrival;
                release_due(t);
                continue;
            }

            const auto candidates = is_randomized(config_.scheme)
                                        ? build_candidates(queue_)
                                        : std::vector<std::size_t>{0};
            const Pick pick = pick_next(queue_, candidates, decisions_, config_.scheme, t, arrival);
            if (observer_) observer_(t, queue_, pick);

            const TaskId running = queue_[pick.index].task;
            record({t, running, pick.next, pick.reason});
            std::fill(slots.begin() + static_cast<std::ptrdiff_t>(t),
                      slots.begin() + static_cast<std::ptrdiff_t>(pick.next), running);

            note_inversion(queue_[pick.index], pick.next - t);
            tick_budgets(queue_, pick.index, pick.next - t);
            t = pick.next;

            if (running != kIdleTaskId && queue_[pick.index].remaining == 0) {
                const Job finished = queue_[pick.index];
                queue_.erase(pick.index);
                if (reclaims_unused(config_.scheme)) {
                    reclaim_unused(queue_, finished, taskset_.by_id(finished.task).wcet);
                }
            }
            drop_overdue(t);
            release_due(t);
        }
        // Every deadline of the last hyperperiod falls at or before the horizon.
        drop_overdue(horizon_);
        return std::move(result_);
    }

private:
    Time next_arrival() const {
        if (next_release_.empty()) return horizon_;
        return *std::min_element(next_release_.begin(), next_release_.end());
    }

    void record(const DecisionRecord& rec) {
        if (config_.record_decisions) result_.decisions.push_back(rec);
    }

    // Priority level of a job: (deadline, task id), compared lexicographically.
    using Level = std::pair<Time, TaskId>;
    static Level level(const Job& j) { return {j.abs_deadline, j.task}; }

    // Level of the highest-priority pending real job.
    Level top_level() const {
        for (const Job& j : queue_.jobs()) {
            if (!j.is_idle()) return level(j);
        }
        return {kInfiniteTime, 0};
    }

    // Running a job at level h for `elapsed` slots inverts every level in
    // [top pending level, h).
    void note_inversion(const Job& running, Time elapsed) {
        const Level lo = top_level();
        const Level hi = level(running);
        if (lo < hi) carry_.push_back({lo, hi, elapsed});
    }

    // Levels above the top pending one have no outstanding work, so their
    // busy intervals have ended.
    void forget_idle_levels() {
        const Level lo = top_level();
        std::erase_if(carry_, [&lo](const Inversion& e) { return e.hi <= lo; });
        for (auto& e : carry_) e.lo = std::max(e.lo, lo);
    }

    // Inversion already suffered by the busy interval a job at level l joins
    // on release.
    Budget carried_inversion(const Level& l) const {
        Budget sum = 0;
        for (const auto& e : carry_) {
            if (e.lo <= l && l < e.hi) sum += static_cast<Budget>(e.amount);
        }
        return sum;
    }

    void release_due(Time t) {
        if (t >= horizon_) return;
        forget_idle_levels();
        for (std::size_t i = 0; i < taskset_.size(); ++i) {
            if (next_release_[i] != t) continue;
            const Task& task = taskset_[i];
            if (auto stale = queue_.find(task.id)) {
                miss(queue_[*stale], t);
                queue_.erase(*stale);
            }
            const Time actual = config_.exec.draw(task.wcet, exec_rng_);
            queue_.insert(Job{.task = task.id,
                              .release = t,
                              .abs_deadline = t + task.deadline,
                              .remaining = actual,
                              .actual_exec = actual,
                              .rib = wcib_[i] - carried_inversion({t + task.deadline, task.id})});
            next_release_[i] = t + task.period;
        }
    }

    void drop_overdue(Time t) {
        for (std::size_t j = 0; j < queue_.size();) {
            const Job& job = queue_[j];
            if (!job.is_idle() && job.abs_deadline <= t && job.remaining > 0) {
                miss(job, t);
                queue_.erase(j);
            } else {
                ++j;
            }
        }
    }

    void miss(const Job& job, Time t) {
        result_.misses.push_back(
            DeadlineMiss{job.task, job.release, job.abs_deadline, job.remaining, t});
    }

    struct Inversion {
        Level lo, hi;
        Time amount;
    };

    const Taskset& taskset_;
    const SchedulerConfig& config_;
    RandomSource& decisions_;
    const DecisionObserver& observer_;
    Rng exec_rng_;
    std::vector<Budget> wcib_;
    std::vector<Time> next_release_;
    ReadyQueue queue_;
    std::vector<Inversion> carry_;
    Time length_ = 0;
    Time horizon_ = 0;
    SimulationResult result_;
};

}  // namespace

SimulationResult simulate(const Taskset& taskset, const AnalysisResult& analysis,
                          const SchedulerConfig& config, RandomSource& decisions,
                          const DecisionObserver& observer) {
    return Engine(taskset, analysis, config, decisions, observer).run();
}

SimulationResult simulate(const Taskset& taskset, const AnalysisResult& analysis,
                          const SchedulerConfig& config, const DecisionObserver& observer) {
    Rng rng(mix_seed(config.seed, 0));
    return simulate(taskset, analysis, config, rng, observer);
}

}  // namespace reorder
