#include "reorder/io.hpp"

#include <fstream>
#include <sstream>
#include <string>

namespace reorder {

using nlohmann::json;

namespace {

Time positive_field(const json& obj, const char* key, std::size_t index) {
    const auto it = obj.find(key);
    if (it == obj.end()) {
        throw FormatError("task " + std::to_string(index) + ": missing \"" + key + "\"");
    }
    if (!it->is_number_integer() || it->get<std::int64_t>() < 1) {
        throw FormatError("task " + std::to_string(index) + ": \"" + key +
                          "\" must be a positive integer");
    }
    return it->get<Time>();
}

}  // namespace

Taskset taskset_from_json(const json& j) {
    if (!j.is_object() || !j.contains("tasks") || !j["tasks"].is_array()) {
        throw FormatError("taskset JSON must be an object with a \"tasks\" array");
    }
    std::vector<Task> tasks;
    std::size_t index = 0;
    for (const auto& t : j["tasks"]) {
        ++index;
        if (!t.is_object()) throw FormatError("task " + std::to_string(index) + " is not an object");
        Task task;
        task.wcet = positive_field(t, "wcet", index);
        task.period = positive_field(t, "period", index);
        task.deadline = t.contains("deadline") ? positive_field(t, "deadline", index) : task.period;
        tasks.push_back(task);
    }
    return Taskset(std::move(tasks));
}

json taskset_to_json(const Taskset& taskset) {
    json tasks = json::array();
    for (const auto& t : taskset) {
        tasks.push_back({{"wcet", t.wcet}, {"period", t.period}, {"deadline", t.deadline}});
    }
    return {{"tasks", tasks}};
}

Taskset load_taskset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open taskset file " + path.string());
    try {
        return taskset_from_json(json::parse(in));
    } catch (const json::exception& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

void save_taskset(const std::filesystem::path& path, const Taskset& taskset) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write " + path.string());
    out << taskset_to_json(taskset).dump(2) << '\n';
}

void write_trace_csv(std::ostream& out, const ScheduleTrace& trace) {
    out << "hyperperiod,slot,task_id\n";
    for (std::size_t k = 0; k < trace.count(); ++k) {
        for (std::size_t t = 0; t < trace.length(); ++t) {
            out << k << ',' << t << ',' << trace.at(k, t) << '\n';
        }
    }
}

ScheduleTrace read_trace_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw FormatError("trace CSV is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "hyperperiod,slot,task_id") {
        throw FormatError("trace CSV header must be \"hyperperiod,slot,task_id\"");
    }

    std::vector<std::vector<Symbol>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        std::istringstream fields(line);
        unsigned long long k = 0, t = 0, id = 0;
        char c1 = 0, c2 = 0;
        if (!(fields >> k >> c1 >> t >> c2 >> id) || c1 != ',' || c2 != ',') {
            throw FormatError("trace CSV line " + std::to_string(line_no) + " is malformed");
        }
        if (k == rows.size()) rows.emplace_back();
        if (k + 1 != rows.size() || t != rows.back().size()) {
            throw FormatError("trace CSV line " + std::to_string(line_no) +
                              ": rows must be listed in order without gaps");
        }
        rows.back().push_back(static_cast<Symbol>(id));
    }
    try {
        return ScheduleTrace::from_rows(rows);
    } catch (const std::invalid_argument& e) {
        throw FormatError(std::string("trace CSV: ") + e.what());
    }
}

ScheduleTrace load_trace_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open trace file " + path.string());
    return read_trace_csv(in);
}

json analysis_to_json(const Taskset& taskset, const AnalysisResult& analysis) {
    json tasks = json::array();
    for (std::size_t i = 0; i < taskset.size(); ++i) {
        const Task& t = taskset[i];
        tasks.push_back({{"id", t.id},
                         {"wcet", t.wcet},
                         {"period", t.period},
                         {"deadline", t.deadline},
                         {"response_time", analysis.response_time[i]},
                         {"wcib", analysis.wcib[i]}});
    }
    const auto u = utilization(taskset);
    return {{"tasks", tasks},
            {"busy_period", analysis.busy_period},
            {"iterations", analysis.iterations},
            {"hyperperiod", hyperperiod(taskset)},
            {"utilization", {{"num", u.numerator()}, {"den", u.denominator()}}}};
}

json exec_policy_to_json(const ExecPolicy& policy) {
    switch (policy.kind) {
        case ExecPolicy::Kind::Wcet: return {{"kind", "wcet"}};
        case ExecPolicy::Kind::UniformAlpha:
            return {{"kind", "uniform"}, {"alpha_lo", policy.alpha_lo}, {"alpha_hi", policy.alpha_hi}};
        case ExecPolicy::Kind::FixedFraction:
            return {{"kind", "fraction"}, {"fraction", policy.fraction}};
    }
    return {};
}

ExecPolicy exec_policy_from_json(const json& j) {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "wcet") return ExecPolicy::wcet();
    if (kind == "uniform") {
        return ExecPolicy::uniform_alpha(j.value("alpha_lo", 0.5), j.value("alpha_hi", 1.0));
    }
    if (kind == "fraction") return ExecPolicy::fixed_fraction(j.value("fraction", 0.8));
    throw FormatError("unknown execution policy '" + kind + "'");
}

json config_to_json(const SchedulerConfig& config) {
    return {{"scheme", std::string(to_string(config.scheme))},
            {"seed", config.seed},
            {"exec_policy", exec_policy_to_json(config.exec)},
            {"hyperperiods", config.hyperperiods},
            {"rng", Rng::kAlgorithm}};
}

SchedulerConfig config_from_json(const json& j) {
    SchedulerConfig c;
    c.scheme = parse_scheme(j.at("scheme").get<std::string>());
    c.seed = j.at("seed").get<std::uint64_t>();
    c.exec = exec_policy_from_json(j.at("exec_policy"));
    c.hyperperiods = j.at("hyperperiods").get<Time>();
    return c;
}

json simulation_to_json(const Taskset& taskset, const AnalysisResult& analysis,
                        const SchedulerConfig& config, const SimulationResult& result) {
    json decisions = json::array();
    for (const auto& d : result.decisions) {
        decisions.push_back(
            {{"t", d.time}, {"task", d.task}, {"next", d.next}, {"reason", std::string(to_string(d.reason))}});
    }
    json misses = json::array();
    for (const auto& m : result.misses) {
        misses.push_back({{"task", m.task},
                          {"release", m.release},
                          {"abs_deadline", m.abs_deadline},
                          {"remaining", m.remaining},
                          {"detected_at", m.detected_at}});
    }
    json rows = json::array();
    for (std::size_t k = 0; k < result.trace.count(); ++k) {
        const auto row = result.trace.row(k);
        rows.push_back(std::vector<Symbol>(row.begin(), row.end()));
    }
    return {{"taskset", taskset_to_json(taskset)},
            {"config", config_to_json(config)},
            {"analysis", analysis_to_json(taskset, analysis)},
            {"decisions", decisions},
            {"misses", misses},
            {"trace", {{"hyperperiod", result.trace.length()}, {"rows", rows}}}};
}

ScheduleTrace trace_from_json(const json& j) {
    const auto& rows = j.at("trace").at("rows");
    return ScheduleTrace::from_rows(rows.get<std::vector<std::vector<Symbol>>>());
}

}  // namespace reorder
