#pragma once

#include "reorder/analysis.hpp"
#include "reorder/rng.hpp"
#include "reorder/task_model.hpp"
#include "reorder/trace.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace reorder {

/// Scheduling schemes. Randomization features are cumulative in this order:
/// IdleTime adds the idle task to Base, FineGrained adds random yields, and
/// UnusedTimeReclamation adds budget transfer on early completion.
enum class Scheme { VanillaEDF, Base, IdleTime, FineGrained, UnusedTimeReclamation };

inline constexpr Scheme kAllSchemes[] = {Scheme::VanillaEDF, Scheme::Base, Scheme::IdleTime,
                                         Scheme::FineGrained, Scheme::UnusedTimeReclamation};
inline constexpr Scheme kReorderSchemes[] = {Scheme::Base, Scheme::IdleTime, Scheme::FineGrained,
                                             Scheme::UnusedTimeReclamation};

[[nodiscard]] constexpr bool is_randomized(Scheme s) { return s != Scheme::VanillaEDF; }
[[nodiscard]] constexpr bool uses_idle_task(Scheme s) { return s >= Scheme::IdleTime; }
[[nodiscard]] constexpr bool is_fine_grained(Scheme s) { return s >= Scheme::FineGrained; }
[[nodiscard]] constexpr bool reclaims_unused(Scheme s) { return s == Scheme::UnusedTimeReclamation; }

/// Short CLI name: edf, base, it, fg, utr.
[[nodiscard]] std::string_view to_string(Scheme s);
/// Inverse of to_string. Throws std::invalid_argument on unknown names.
[[nodiscard]] Scheme parse_scheme(std::string_view name);

/// How each job's actual execution demand is drawn at release.
struct ExecPolicy {
    enum class Kind {
        Wcet,           // every job takes exactly C_i
        UniformAlpha,   // uniform integer in [ceil(alpha_lo * C_i), ceil(alpha_hi * C_i)]
        FixedFraction,  // max(1, floor(fraction * C_i))
    };
    Kind kind = Kind::Wcet;
    double alpha_lo = 0.5;
    double alpha_hi = 1.0;
    double fraction = 0.8;

    static ExecPolicy wcet() { return {}; }
    static ExecPolicy uniform_alpha(double lo = 0.5, double hi = 1.0) {
        return {Kind::UniformAlpha, lo, hi, 0.8};
    }
    static ExecPolicy fixed_fraction(double f = 0.8) { return {Kind::FixedFraction, 0.5, 1.0, f}; }

    /// Result is always in [1, wcet].
    [[nodiscard]] Time draw(Time wcet, RandomSource& rng) const;
    [[nodiscard]] std::string describe() const;
};

struct SchedulerConfig {
    Scheme scheme = Scheme::VanillaEDF;
    std::uint64_t seed = 0;
    ExecPolicy exec;
    Time hyperperiods = 1;  // K
    bool record_decisions = true;
};

/// The set of ready jobs, kept sorted by EDF priority (index 0 is the
/// highest-priority job). Holds at most one job per task plus, under the
/// idle-time schemes, the idle job.
class ReadyQueue {
public:
    void insert(const Job& job);
    void erase(std::size_t index);

    [[nodiscard]] bool empty() const { return jobs_.empty(); }
    [[nodiscard]] std::size_t size() const { return jobs_.size(); }
    [[nodiscard]] const Job& hp() const { return jobs_.front(); }
    [[nodiscard]] const Job& operator[](std::size_t i) const { return jobs_[i]; }
    [[nodiscard]] Job& operator[](std::size_t i) { return jobs_[i]; }
    [[nodiscard]] std::span<const Job> jobs() const { return jobs_; }
    /// Index of the job belonging to `task`, if ready.
    [[nodiscard]] std::optional<std::size_t> find(TaskId task) const;
    /// Number of real (non-idle) jobs.
    [[nodiscard]] std::size_t real_jobs() const;

private:
    std::vector<Job> jobs_;
};

enum class Reason { Arrival, Completion, BudgetExpiry, RandomYield };
[[nodiscard]] std::string_view to_string(Reason r);

/// One scheduling decision: run `task` over [time, next).
struct DecisionRecord {
    Time time = 0;
    TaskId task = kIdleTaskId;
    Time next = 0;
    Reason reason = Reason::Arrival;
};

/// Outcome of pick_next. `index` refers to the ready queue the pick was
/// made from.
struct Pick {
    std::size_t index = 0;
    Time next = 0;
    Reason reason = Reason::Arrival;
};

struct DeadlineMiss {
    TaskId task = 0;
    Time release = 0;
    Time abs_deadline = 0;
    Time remaining = 0;
    Time detected_at = 0;
};

struct SimulationResult {
    ScheduleTrace trace;
    std::vector<DecisionRecord> decisions;
    std::vector<DeadlineMiss> misses;

    [[nodiscard]] bool ok() const { return misses.empty(); }
};

/// Smallest absolute deadline among ready jobs of lower priority than
/// queue[index] whose remaining inversion budget is exhausted (<= 0);
/// kInfiniteTime when there is none.
[[nodiscard]] Time min_inversion_deadline(const ReadyQueue& queue, std::size_t index);

/// Ready jobs that the inversion policy lets run ahead of the
/// highest-priority job: every job up to and including the first one, in
/// priority order, whose budget is exhausted. With distinct deadlines this
/// is every job with deadline <= m_HP. Ignores the highest-priority job's
/// own budget. Queue must be nonempty.
[[nodiscard]] std::vector<std::size_t> rpip_eligible(const ReadyQueue& queue);

/// Candidate list for a randomized decision: just the highest-priority job
/// when its budget is <= 0, otherwise rpip_eligible(). Queue must be nonempty.
[[nodiscard]] std::vector<std::size_t> build_candidates(const ReadyQueue& queue);

/// Smallest remaining budget among ready jobs ahead of queue[index] in
/// priority order; kInfiniteBudget when there is none.
[[nodiscard]] Budget blocked_budget(const ReadyQueue& queue, std::size_t index);

/// Chooses the job to run at time t and the next decision point, which is
/// always capped by `next_arrival`. Draws from `rng` only when there is
/// more than one candidate or a fine-grained yield is needed.
[[nodiscard]] Pick pick_next(const ReadyQueue& queue, std::span<const std::size_t> candidates,
                             RandomSource& rng, Scheme scheme, Time t, Time next_arrival);

/// Accounts `elapsed` slots of execution by queue[running]: debits the
/// remaining execution of the running job and the budget of every job
/// ahead of it in priority order.
void tick_budgets(ReadyQueue& queue, std::size_t running, Time elapsed);

/// Transfers the finished job's unused WCET to every ready job of lower
/// priority.
void reclaim_unused(ReadyQueue& queue, const Job& finished, Time wcet);

/// Called before each interval executes, with the ready queue the decision
/// was taken on.
using DecisionObserver =
    std::function<void(Time t, const ReadyQueue& queue, const Pick& pick)>;

/// Runs K hyperperiods from a synchronous release at t = 0. Each task's
/// wcib is taken from `analysis`. Scheduling draws use a generator seeded
/// from config.seed; execution-time draws use an independent stream so
/// every scheme sees the same job demands for a given seed.
[[nodiscard]] SimulationResult simulate(const Taskset& taskset, const AnalysisResult& analysis,
                                        const SchedulerConfig& config,
                                        const DecisionObserver& observer = {});

/// Same, but scheduling draws come from `decisions` (execution draws are
/// still seeded from config.seed).
[[nodiscard]] SimulationResult simulate(const Taskset& taskset, const AnalysisResult& analysis,
                                        const SchedulerConfig& config, RandomSource& decisions,
                                        const DecisionObserver& observer = {});

class ProtocolViolation : public std::runtime_error {
public:
    explicit ProtocolViolation(std::vector<DeadlineMiss> misses);
    [[nodiscard]] const std::vector<DeadlineMiss>& misses() const { return misses_; }

private:
    std::vector<DeadlineMiss> misses_;
};

/// Throws ProtocolViolation when the result contains deadline misses.
void require_no_misses(const SimulationResult& result);

}  // namespace reorder
