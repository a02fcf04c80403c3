#pragma once

#include "reorder/analysis.hpp"
#include "reorder/scheduler.hpp"
#include "reorder/task_model.hpp"
#include "reorder/trace.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>

namespace reorder {

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Taskset files: {"tasks": [{"wcet": C, "period": T, "deadline": D}, ...]}.
// "deadline" is optional and defaults to the period.
[[nodiscard]] Taskset taskset_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json taskset_to_json(const Taskset& taskset);
[[nodiscard]] Taskset load_taskset(const std::filesystem::path& path);
void save_taskset(const std::filesystem::path& path, const Taskset& taskset);

// Trace CSV: header "hyperperiod,slot,task_id", one row per slot, with
// 0-based hyperperiod and slot indices and task_id 0 for idle.
void write_trace_csv(std::ostream& out, const ScheduleTrace& trace);
[[nodiscard]] ScheduleTrace read_trace_csv(std::istream& in);
[[nodiscard]] ScheduleTrace load_trace_csv(const std::filesystem::path& path);

[[nodiscard]] nlohmann::json analysis_to_json(const Taskset& taskset, const AnalysisResult& analysis);
[[nodiscard]] nlohmann::json config_to_json(const SchedulerConfig& config);
[[nodiscard]] SchedulerConfig config_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json exec_policy_to_json(const ExecPolicy& policy);
[[nodiscard]] ExecPolicy exec_policy_from_json(const nlohmann::json& j);

/// Replay bundle: taskset, config, analysis, decision records, misses and
/// the trace rows.
[[nodiscard]] nlohmann::json simulation_to_json(const Taskset& taskset, const AnalysisResult& analysis,
                                                const SchedulerConfig& config,
                                                const SimulationResult& result);
/// Trace rows from a replay bundle.
[[nodiscard]] ScheduleTrace trace_from_json(const nlohmann::json& j);

}  // namespace reorder
