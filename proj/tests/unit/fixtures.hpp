#pragma once

#include <algorithm>
#include <deque>
#include <random>
#include <stdexcept>
#include <vector>

#include "oracles.hpp"
#include "reorder/rng.hpp"
#include "reorder/task_model.hpp"

namespace fixtures {

using reorder::Taskset;

inline const Taskset kEx1 = Taskset::implicit({{4, 10}, {1, 20}, {1, 5}, {2, 12}});
inline const Taskset kEx2 = Taskset::implicit({{1, 10}, {2, 20}, {2, 5}});
inline const Taskset kEx3 = Taskset::implicit({{1, 5}, {3, 8}, {2, 9}, {4, 20}});

inline std::vector<oracle::Task> to_oracle(const Taskset& ts) {
    std::vector<oracle::Task> out;
    for (const auto& t : ts) {
        out.push_back({static_cast<std::int64_t>(t.wcet), static_cast<std::int64_t>(t.period),
                       static_cast<std::int64_t>(t.deadline)});
    }
    return out;
}

// Small constrained-deadline taskset that brute-force EDF schedules within
// the response-time bounds the analysis reports.
inline Taskset random_small(std::mt19937_64& gen) {
    using reorder::Time;
    static constexpr Time kPeriods[] = {4, 5, 6, 8, 10, 12, 15, 20};
    while (true) {
        const std::size_t n = 2 + gen() % 4;
        std::vector<reorder::Task> tasks;
        for (std::size_t i = 0; i < n; ++i) {
            const Time t = kPeriods[gen() % std::size(kPeriods)];
            const Time d_lo = std::max<Time>(2, t / 2);
            const Time d = d_lo + gen() % (t - d_lo + 1);
            const Time c = 1 + gen() % std::max<Time>(1, d / 2);
            tasks.push_back({.wcet = c, .period = t, .deadline = d});
        }
        Taskset ts(tasks);
        if (!reorder::validate(ts).empty()) continue;
        const auto o = to_oracle(ts);
        const auto run = oracle::brute_edf_wcet(o, 2 * static_cast<std::int64_t>(reorder::hyperperiod(ts)));
        if (run.missed) continue;
        const auto bound = oracle::wcrt(o);
        bool within = true;
        for (std::size_t i = 0; i < o.size(); ++i) within = within && run.worst_response[i] <= bound[i];
        if (within) return ts;
    }
}

// Hands out a fixed list of draws, then fails loudly.
class Script final : public reorder::RandomSource {
public:
    explicit Script(std::vector<std::uint64_t> picks) : picks_(picks.begin(), picks.end()) {}
    std::uint64_t uniform(std::uint64_t lo, std::uint64_t hi) override {
        if (picks_.empty()) throw std::logic_error("script exhausted");
        const auto v = picks_.front();
        picks_.pop_front();
        if (v < lo || v > hi) throw std::logic_error("scripted draw out of range");
        return v;
    }
    [[nodiscard]] bool done() const { return picks_.empty(); }

private:
    std::deque<std::uint64_t> picks_;
};

}  // namespace fixtures
