#include "doctest.h"
#include "fixtures.hpp"
#include "reorder/analysis.hpp"
#include "reorder/scheduler.hpp"

using namespace reorder;

namespace {

std::vector<Symbol> flat(const ScheduleTrace& trace) {
    return {trace.flat().begin(), trace.flat().end()};
}

ReadyQueue queue_at_zero(const Taskset& ts) {
    const auto a = analyze(ts);
    ReadyQueue q;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const Task& t = ts[i];
        q.insert(Job{t.id, 0, t.deadline, t.wcet, t.wcet, a.wcib[i]});
    }
    return q;
}

std::vector<TaskId> tasks_of(const ReadyQueue& q, const std::vector<std::size_t>& idx) {
    std::vector<TaskId> out;
    for (auto i : idx) out.push_back(q[i].task);
    return out;
}

SchedulerConfig config(Scheme scheme, std::uint64_t seed, ExecPolicy exec, Time k) {
    SchedulerConfig c;
    c.scheme = scheme;
    c.seed = seed;
    c.exec = exec;
    c.hyperperiods = k;
    return c;
}

const ExecPolicy kExecPolicies[] = {ExecPolicy::wcet(), ExecPolicy::uniform_alpha(),
                                    ExecPolicy::fixed_fraction()};

}  // namespace

TEST_SUITE("scheduler") {

TEST_CASE("scheme names round trip") {
    for (Scheme s : kAllSchemes) CHECK(parse_scheme(to_string(s)) == s);
    CHECK_THROWS_AS((void)parse_scheme("rm"), std::invalid_argument);
    CHECK(uses_idle_task(Scheme::UnusedTimeReclamation));
    CHECK_FALSE(uses_idle_task(Scheme::Base));
    CHECK(is_fine_grained(Scheme::UnusedTimeReclamation));
    CHECK_FALSE(is_fine_grained(Scheme::IdleTime));
}

TEST_CASE("execution policies stay within [1, C]") {
    Rng rng(3);
    for (Time c = 1; c <= 30; ++c) {
        for (int n = 0; n < 50; ++n) {
            const Time u = ExecPolicy::uniform_alpha().draw(c, rng);
            CHECK(u >= (c + 1) / 2);
            CHECK(u <= c);
        }
        CHECK(ExecPolicy::wcet().draw(c, rng) == c);
        CHECK(ExecPolicy::fixed_fraction().draw(c, rng) == std::max<Time>(1, c * 8 / 10));
    }
}

TEST_CASE("ready queue keeps priority order") {
    ReadyQueue q;
    q.insert(Job::idle());
    q.insert(Job{.task = 2, .abs_deadline = 10});
    q.insert(Job{.task = 1, .abs_deadline = 10});
    q.insert(Job{.task = 3, .abs_deadline = 4});
    CHECK(tasks_of(q, {0, 1, 2, 3}) == std::vector<TaskId>{3, 1, 2, 0});
    CHECK(q.real_jobs() == 3);
    CHECK(q.find(2) == 2);
    CHECK_FALSE(q.find(7).has_value());
}

TEST_CASE("minimum inversion deadlines at t = 0") {
    const auto q = queue_at_zero(fixtures::kEx1);
    std::vector<Time> m(4);
    for (std::size_t i = 0; i < q.size(); ++i) m[q[i].task - 1] = min_inversion_deadline(q, i);
    CHECK(m == std::vector<Time>{12, kInfiniteTime, 12, 20});
}

TEST_CASE("a zero budget counts as exhausted") {
    ReadyQueue q;
    q.insert(Job{.task = 1, .abs_deadline = 5, .rib = 2});
    q.insert(Job{.task = 2, .abs_deadline = 8, .rib = 0});
    CHECK(min_inversion_deadline(q, 0) == 8);
}

TEST_CASE("candidates") {
    SUBCASE("negative budget at the head") {
        const auto q = queue_at_zero(fixtures::kEx1);
        CHECK(tasks_of(q, build_candidates(q)) == std::vector<TaskId>{3});
        CHECK(tasks_of(q, rpip_eligible(q)) == std::vector<TaskId>{3, 1, 4});
    }
    SUBCASE("all budgets positive") {
        const auto q = queue_at_zero(fixtures::kEx2);
        CHECK(tasks_of(q, build_candidates(q)) == std::vector<TaskId>{3, 1, 2});
    }
    SUBCASE("zero budget at the head") {
        ReadyQueue q;
        q.insert(Job{.task = 1, .abs_deadline = 5, .rib = 0});
        q.insert(Job{.task = 2, .abs_deadline = 9, .rib = 4});
        CHECK(build_candidates(q) == std::vector<std::size_t>{0});
    }
    SUBCASE("equal deadlines behind an exhausted job stay out") {
        ReadyQueue q;
        q.insert(Job{.task = 1, .abs_deadline = 10, .rib = 2});
        q.insert(Job{.task = 2, .abs_deadline = 10, .rib = -1});
        q.insert(Job{.task = 3, .abs_deadline = 10, .rib = 4});
        CHECK(tasks_of(q, build_candidates(q)) == std::vector<TaskId>{1, 2});
    }
}

TEST_CASE("blocked budget covers every job ahead") {
    ReadyQueue q;
    q.insert(Job{.task = 1, .abs_deadline = 10, .rib = 2});
    q.insert(Job{.task = 2, .abs_deadline = 10, .rib = 7});
    q.insert(Job{.task = 3, .abs_deadline = 12, .rib = 5});
    CHECK(blocked_budget(q, 0) == kInfiniteBudget);
    CHECK(blocked_budget(q, 1) == 2);
    CHECK(blocked_budget(q, 2) == 2);
}

TEST_CASE("pick_next intervals") {
    SUBCASE("inversion runs min(remaining, budget)") {
        const auto q = queue_at_zero(fixtures::kEx2);
        fixtures::Script s({2});
        const Pick p = pick_next(q, build_candidates(q), s, Scheme::Base, 0, 5);
        CHECK(q[p.index].task == 2);
        CHECK(p.next == 2);
        CHECK(p.reason == Reason::Completion);
    }
    SUBCASE("later decision point") {
        ReadyQueue q;
        q.insert(Job{.task = 3, .release = 10, .abs_deadline = 15, .remaining = 2, .actual_exec = 2, .rib = 3});
        q.insert(Job{.task = 1, .release = 10, .abs_deadline = 20, .remaining = 1, .actual_exec = 1, .rib = 3});
        fixtures::Script s({1});
        const Pick p = pick_next(q, build_candidates(q), s, Scheme::Base, 10, 15);
        CHECK(q[p.index].task == 1);
        CHECK(p.next == 11);
    }
    SUBCASE("budget shorter than the job") {
        ReadyQueue q;
        q.insert(Job{.task = 1, .abs_deadline = 10, .remaining = 1, .rib = 2});
        q.insert(Job{.task = 2, .abs_deadline = 20, .remaining = 5, .rib = 9});
        fixtures::Script s({1});
        const Pick p = pick_next(q, {std::vector<std::size_t>{0, 1}}, s, Scheme::Base, 0, 50);
        CHECK(p.next == 2);
        CHECK(p.reason == Reason::BudgetExpiry);
    }
    SUBCASE("fine-grained yield draws within [1, budget]") {
        ReadyQueue q;
        q.insert(Job{.task = 1, .abs_deadline = 10, .remaining = 1, .rib = 4});
        q.insert(Job{.task = 2, .abs_deadline = 20, .remaining = 6, .rib = 9});
        fixtures::Script s({1, 3});
        const Pick p = pick_next(q, {std::vector<std::size_t>{0, 1}}, s, Scheme::FineGrained, 0, 50);
        CHECK(p.next == 3);
        CHECK(p.reason == Reason::RandomYield);
        CHECK(s.done());
    }
    SUBCASE("arrivals cap every interval") {
        ReadyQueue q;
        q.insert(Job{.task = 1, .abs_deadline = 10, .remaining = 4, .rib = 4});
        fixtures::Script none({});
        const Pick p = pick_next(q, {std::vector<std::size_t>{0}}, none, Scheme::UnusedTimeReclamation, 0, 3);
        CHECK(p.next == 3);
        CHECK(p.reason == Reason::Arrival);
    }
    SUBCASE("singleton candidate list needs no draw") {
        const auto q = queue_at_zero(fixtures::kEx1);
        fixtures::Script none({});
        const Pick p = pick_next(q, build_candidates(q), none, Scheme::Base, 0, 5);
        CHECK(p.index == 0);
        CHECK(p.next == 1);
    }
    SUBCASE("an inversion without budget is a logic error") {
        ReadyQueue q;
        q.insert(Job{.task = 1, .abs_deadline = 10, .remaining = 1, .rib = 0});
        q.insert(Job{.task = 2, .abs_deadline = 20, .remaining = 6, .rib = 9});
        fixtures::Script s({1});
        CHECK_THROWS_AS((void)pick_next(q, {std::vector<std::size_t>{0, 1}}, s, Scheme::Base, 0, 50),
                        std::logic_error);
    }
}

TEST_CASE("tick_budgets") {
    SUBCASE("lower-priority job running") {
        auto q = queue_at_zero(fixtures::kEx2);
        tick_budgets(q, 2, 2);
        CHECK(q[0].rib == 1);
        CHECK(q[1].rib == 1);
        CHECK(q[2].rib == 5);
        CHECK(q[2].remaining == 0);
    }
    SUBCASE("head running") {
        auto q = queue_at_zero(fixtures::kEx2);
        tick_budgets(q, 0, 1);
        CHECK(q[0].rib == 3);
        CHECK(q[1].rib == 3);
        CHECK(q[2].rib == 5);
        CHECK(q[0].remaining == 1);
    }
    SUBCASE("idle running") {
        auto q = queue_at_zero(fixtures::kEx2);
        q.insert(Job::idle());
        tick_budgets(q, 3, 1);
        CHECK(q[0].rib == 2);
        CHECK(q[1].rib == 2);
        CHECK(q[2].rib == 4);
        CHECK(q[3].rib == kInfiniteBudget);
        CHECK(q[3].remaining == kInfiniteTime);
    }
}

TEST_CASE("reclaim_unused") {
    const Job finished{.task = 1, .abs_deadline = 10, .remaining = 0, .actual_exec = 2, .rib = 1};
    SUBCASE("unused time moves to lower priority") {
        ReadyQueue q;
        q.insert(Job{.task = 2, .abs_deadline = 15, .rib = 1});
        q.insert(Job{.task = 3, .abs_deadline = 8, .rib = 1});
        q.insert(Job::idle());
        reclaim_unused(q, finished, 4);
        CHECK(q[0].rib == 1);
        CHECK(q[1].rib == 3);
        CHECK(q[2].rib == kInfiniteBudget);
    }
    SUBCASE("full execution reclaims nothing") {
        ReadyQueue q;
        q.insert(Job{.task = 2, .abs_deadline = 15, .rib = 1});
        reclaim_unused(q, finished, 2);
        CHECK(q[0].rib == 1);
    }
    SUBCASE("no lower-priority jobs") {
        ReadyQueue q;
        q.insert(Job{.task = 2, .abs_deadline = 5, .rib = 1});
        reclaim_unused(q, finished, 4);
        CHECK(q[0].rib == 1);
    }
}

TEST_CASE("vanilla EDF on the second example") {
    const auto& ts = fixtures::kEx2;
    const auto r = simulate(ts, analyze(ts), config(Scheme::VanillaEDF, 0, ExecPolicy::wcet(), 1));
    CHECK(flat(r.trace) == std::vector<Symbol>{3, 3, 1, 2, 2, 3, 3, 0, 0, 0, 3, 3, 1, 0, 0, 3, 3, 0, 0, 0});
    CHECK(r.ok());
}

TEST_CASE("scripted randomization on the second example") {
    const auto& ts = fixtures::kEx2;
    fixtures::Script s({2, 0, 1});
    const auto r = simulate(ts, analyze(ts), config(Scheme::Base, 0, ExecPolicy::wcet(), 1), s);
    CHECK(flat(r.trace) == std::vector<Symbol>{2, 2, 3, 3, 1, 3, 3, 0, 0, 0, 1, 3, 3, 0, 0, 3, 3, 0, 0, 0});
    CHECK(s.done());
    for (const auto& d : r.decisions) CHECK(d.time < d.next);
}

TEST_CASE("vanilla EDF matches brute force") {
    std::mt19937_64 gen(51);
    for (int n = 0; n < 60; ++n) {
        const auto ts = fixtures::random_small(gen);
        const auto o = fixtures::to_oracle(ts);
        const Time k = 3;
        const auto horizon = static_cast<std::int64_t>(k * hyperperiod(ts));
        for (const auto& exec : kExecPolicies) {
            const auto cfg = config(Scheme::VanillaEDF, static_cast<std::uint64_t>(n), exec, k);
            const auto r = simulate(ts, analyze(ts), cfg);
            Rng draws(mix_seed(cfg.seed, 1));
            const auto want = oracle::brute_edf(o, horizon, [&](std::size_t i, std::int64_t) {
                return static_cast<std::int64_t>(exec.draw(ts[i].wcet, draws));
            });
            std::vector<Symbol> expected(want.trace.begin(), want.trace.end());
            CHECK(flat(r.trace) == expected);
        }
    }
}

TEST_CASE("non-randomizable taskset keeps the EDF schedule") {
    const auto& ts = fixtures::kEx3;
    const auto a = analyze(ts);
    const auto edf = simulate(ts, a, config(Scheme::VanillaEDF, 0, ExecPolicy::wcet(), 2));
    for (Scheme s : kReorderSchemes) {
        for (std::uint64_t seed = 0; seed < 4; ++seed) {
            CHECK(simulate(ts, a, config(s, seed, ExecPolicy::wcet(), 2)).trace == edf.trace);
        }
    }
}

TEST_CASE("protocol invariants hold at every decision") {
    std::mt19937_64 gen(52);
    for (int n = 0; n < 80; ++n) {
        const auto ts = fixtures::random_small(gen);
        const auto a = analyze(ts);
        for (Scheme scheme : kReorderSchemes) {
            for (const auto& exec : kExecPolicies) {
                std::size_t broken = 0;
                const auto observer = [&](Time t, const ReadyQueue& q, const Pick& p) {
                    if (p.next <= t) ++broken;
                    // Every job passed over still has budget to give.
                    for (std::size_t j = 0; j < p.index; ++j) broken += q[j].rib <= 0;
                    if (q.hp().rib <= 0) broken += p.index != 0;
                    if (scheme == Scheme::Base) {
                        for (const auto& job : q.jobs()) broken += job.is_idle();
                    }
                };
                const auto cfg = config(scheme, static_cast<std::uint64_t>(n) * 7 + 1, exec, 4);
                const auto r = simulate(ts, a, cfg, observer);
                CHECK(broken == 0);
                CHECK(r.ok());
            }
        }
    }
}

TEST_CASE("Base is work conserving") {
    std::mt19937_64 gen(53);
    for (int n = 0; n < 60; ++n) {
        const auto ts = fixtures::random_small(gen);
        const auto a = analyze(ts);
        const auto edf = simulate(ts, a, config(Scheme::VanillaEDF, n, ExecPolicy::uniform_alpha(), 3));
        const auto base = simulate(ts, a, config(Scheme::Base, n, ExecPolicy::uniform_alpha(), 3));
        const auto e = flat(edf.trace);
        const auto b = flat(base.trace);
        REQUIRE(e.size() == b.size());
        std::size_t differ = 0;
        for (std::size_t i = 0; i < e.size(); ++i) differ += (e[i] == 0) != (b[i] == 0);
        CHECK(differ == 0);
    }
}

TEST_CASE("same config replays the same schedule") {
    const auto& ts = fixtures::kEx1;
    const auto a = analyze(ts);
    for (Scheme s : kAllSchemes) {
        const auto cfg = config(s, 99, ExecPolicy::uniform_alpha(), 10);
        const auto x = simulate(ts, a, cfg);
        const auto y = simulate(ts, a, cfg);
        CHECK(x.trace == y.trace);
        REQUIRE(x.decisions.size() == y.decisions.size());
        for (std::size_t i = 0; i < x.decisions.size(); ++i) {
            CHECK(x.decisions[i].time == y.decisions[i].time);
            CHECK(x.decisions[i].task == y.decisions[i].task);
            CHECK(x.decisions[i].next == y.decisions[i].next);
        }
    }
}

TEST_CASE("every scheme sees the same job demands") {
    const auto& ts = fixtures::kEx1;
    const auto a = analyze(ts);
    std::vector<std::vector<std::size_t>> busy;
    for (Scheme s : kAllSchemes) {
        const auto r = simulate(ts, a, config(s, 5, ExecPolicy::uniform_alpha(), 5));
        std::vector<std::size_t> count(ts.size() + 1, 0);
        for (Symbol v : r.trace.flat()) ++count[v];
        count[0] = 0;
        busy.push_back(count);
    }
    for (const auto& b : busy) CHECK(b == busy.front());
}

TEST_CASE("no misses on schedulable tasksets") {
    std::mt19937_64 gen(54);
    for (int n = 0; n < 150; ++n) {
        const auto ts = fixtures::random_small(gen);
        const auto a = analyze(ts);
        for (Scheme s : kAllSchemes) {
            for (const auto& exec : kExecPolicies) {
                const auto r = simulate(ts, a, config(s, gen(), exec, 6));
                CHECK_NOTHROW(require_no_misses(r));
            }
        }
    }
}

// A job idled out of its own window can carry work into the window of a
// later release; that release has to start with the inversion already spent.
TEST_CASE("carried-in inversion is charged at release") {
    const Taskset ts = Taskset::implicit({{2, 25}, {3, 20}, {1, 50}});
    const auto a = analyze(ts);
    for (Scheme s : kReorderSchemes) {
        for (std::uint64_t seed = 0; seed < 200; ++seed) {
            for (const auto& exec : kExecPolicies) {
                CHECK(simulate(ts, a, config(s, seed, exec, 20)).ok());
            }
        }
    }
}

// Jobs sharing a deadline still rank by id, so running a later one ahead of
// an earlier one spends the earlier one's budget.
TEST_CASE("equal deadlines are inversions too") {
    const Taskset ts = Taskset::implicit({{1, 25}, {5, 100}, {2, 25}, {5, 50}, {9, 100},
                                          {1, 50}, {8, 20}, {1, 20}, {1, 20}, {2, 20}});
    const auto a = analyze(ts);
    CHECK(a.wcib[6] == 3);
    for (Scheme s : kReorderSchemes) {
        for (std::uint64_t seed = 0; seed < 60; ++seed) {
            for (const auto& exec : kExecPolicies) {
                CHECK(simulate(ts, a, config(s, seed, exec, 20)).ok());
            }
        }
    }
}

TEST_CASE("deadline misses are reported, not hidden") {
    // Budgets far larger than the slack let the protocol starve task 1.
    const Taskset ts = Taskset::implicit({{2, 4}, {2, 4}});
    AnalysisResult lying = analyze(ts);
    lying.wcib = {50, 50};
    bool missed = false;
    for (std::uint64_t seed = 0; seed < 20 && !missed; ++seed) {
        const auto r = simulate(ts, lying, config(Scheme::IdleTime, seed, ExecPolicy::wcet(), 5));
        if (!r.ok()) {
            missed = true;
            CHECK_THROWS_AS(require_no_misses(r), ProtocolViolation);
        }
    }
    CHECK(missed);
}

TEST_CASE("simulate rejects bad input") {
    const auto& ts = fixtures::kEx2;
    AnalysisResult short_analysis;
    short_analysis.wcib = {1};
    CHECK_THROWS_AS((void)simulate(ts, short_analysis, config(Scheme::Base, 0, ExecPolicy::wcet(), 1)),
                    std::invalid_argument);
    const Taskset bad = Taskset::implicit({{3, 4}, {3, 4}});
    AnalysisResult any;
    any.wcib = {0, 0};
    CHECK_THROWS_AS((void)simulate(bad, any, config(Scheme::Base, 0, ExecPolicy::wcet(), 1)), ModelError);
}

}  // TEST_SUITE
