// reorder: command-line front end for analysis, simulation, metrics and
// experiment batches. Errors are reported as one JSON object on stderr.

#include "reorder/analysis.hpp"
#include "reorder/entropy.hpp"
#include "reorder/experiment.hpp"
#include "reorder/io.hpp"
#include "reorder/scheduler.hpp"
#include "reorder/spectral.hpp"
#include "reorder/taskgen.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace reorder;

namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Common {
    std::uint64_t seed = 1;
    std::string scheme = "utr";
    Time hyperperiods = 100;
    std::string out;
    std::string format = "json";
};

void add_common(CLI::App* cmd, Common& c, bool with_scheme, std::string default_format) {
    c.format = std::move(default_format);
    cmd->add_option("--seed", c.seed, "Random seed")->capture_default_str();
    if (with_scheme) {
        cmd->add_option("--scheme", c.scheme, "edf | base | it | fg | utr")
            ->check(CLI::IsMember({"edf", "base", "it", "fg", "utr"}))
            ->capture_default_str();
    }
    cmd->add_option("--hyperperiods,-K", c.hyperperiods, "Number of hyperperiods K")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--out", c.out, "Output file or directory (default: stdout)");
    cmd->add_option("--format", c.format, "csv | json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
}

// Writes to --out when given, otherwise stdout.
void emit(const std::string& out, const std::string& text) {
    if (out.empty()) {
        std::cout << text;
        return;
    }
    if (const auto dir = fs::path(out).parent_path(); !dir.empty()) fs::create_directories(dir);
    std::ofstream f(out);
    if (!f) throw std::runtime_error("cannot write " + out);
    f << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

ExecPolicy parse_exec(const std::string& name, double lo, double hi, double fraction) {
    if (name == "wcet") return ExecPolicy::wcet();
    if (name == "uniform") return ExecPolicy::uniform_alpha(lo, hi);
    if (name == "fraction") return ExecPolicy::fixed_fraction(fraction);
    throw UsageError("unknown execution policy '" + name + "'");
}

struct ExecOpts {
    std::string kind = "uniform";
    double lo = 0.5;
    double hi = 1.0;
    double fraction = 0.8;

    void add(CLI::App* cmd) {
        cmd->add_option("--exec", kind, "Per-job execution time: wcet | uniform | fraction")
            ->check(CLI::IsMember({"wcet", "uniform", "fraction"}))
            ->capture_default_str();
        cmd->add_option("--alpha-lo", lo, "Lower alpha for --exec uniform")->capture_default_str();
        cmd->add_option("--alpha-hi", hi, "Upper alpha for --exec uniform")->capture_default_str();
        cmd->add_option("--fraction", fraction, "Fraction for --exec fraction")->capture_default_str();
    }
    [[nodiscard]] ExecPolicy policy() const { return parse_exec(kind, lo, hi, fraction); }
};

std::vector<std::size_t> parse_buckets(const std::string& text) {
    if (text == "all") return {0, 1, 2, 3, 4, 5, 6, 7, 8};
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto dash = item.find('-');
        try {
            if (dash == std::string::npos) {
                out.push_back(std::stoul(item));
            } else {
                const auto a = std::stoul(item.substr(0, dash));
                const auto b = std::stoul(item.substr(dash + 1));
                for (auto i = a; i <= b; ++i) out.push_back(i);
            }
        } catch (const std::logic_error&) {
            throw UsageError("bad bucket list '" + text + "'");
        }
    }
    for (auto b : out) {
        if (b >= kStandardBucketCount) throw UsageError("bucket index must be 0..8");
    }
    return out;
}

std::vector<Scheme> parse_schemes(const std::string& text) {
    if (text == "all") return {std::begin(kAllSchemes), std::end(kAllSchemes)};
    std::vector<Scheme> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_scheme(item));
    return out;
}

std::string spectrum_csv(const Taskset& ts, const ScheduleTrace& trace) {
    std::ostringstream os;
    os << std::setprecision(12) << "signal,frequency,magnitude\n";
    const auto write = [&](const std::string& name, const std::vector<double>& signal) {
        const auto s = dft_spectrum(signal);
        for (std::size_t k = 0; k < s.magnitudes.size(); ++k) {
            os << name << ',' << s.frequencies[k] << ',' << s.magnitudes[k] << '\n';
        }
    };
    write("activity", activity_signal(trace));
    for (const auto& t : ts) write("task" + std::to_string(t.id), occupancy_signal(trace, t.id));
    return os.str();
}

json spectrum_json(const Taskset& ts, const ScheduleTrace& trace, std::size_t count) {
    const auto report = peak_report(ts, trace, count);
    json tasks = json::array();
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const auto& t = ts[i];
        const auto spectrum = dft_spectrum(occupancy_signal(trace, t.id));
        const auto peaks = detect_peaks(spectrum, count);
        const double f = 1.0 / static_cast<double>(t.period);
        tasks.push_back({{"task", t.id},
                         {"frequency", f},
                         {"occupancy_peaks", peaks},
                         {"in_occupancy_peaks", has_peak_near(spectrum, peaks, f)},
                         {"in_activity_peaks", static_cast<bool>(report.recovered[i])}});
    }
    return {{"signal_length", trace.flat().size()},
            {"peaks_searched", count},
            {"activity_peaks", report.peaks},
            {"all_recovered", report.all_recovered()},
            {"tasks", tasks}};
}

// Trace input: a CSV trace or a JSON bundle written by `simulate`.
ScheduleTrace load_any_trace(const std::string& path) {
    if (fs::path(path).extension() == ".json") {
        std::ifstream in(path);
        if (!in) throw FormatError("cannot open " + path);
        return trace_from_json(json::parse(in));
    }
    return load_trace_csv(path);
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << text;
}

int run(int argc, char** argv) {
    CLI::App app{"Randomized EDF schedule obfuscation toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    // gen
    Common gen_c;
    std::string gen_buckets = "4";
    std::size_t gen_count = 1, gen_min = 3, gen_max = 10;
    auto* gen = app.add_subcommand("gen", "Generate implicit-deadline tasksets");
    add_common(gen, gen_c, false, "json");
    gen->add_option("--buckets", gen_buckets, "Bucket indices, e.g. 4, 0-8, 1,3 or all")->capture_default_str();
    gen->add_option("--count", gen_count, "Tasksets per bucket")->check(CLI::PositiveNumber)->capture_default_str();
    gen->add_option("--min-tasks", gen_min, "Minimum task count")->capture_default_str();
    gen->add_option("--max-tasks", gen_max, "Maximum task count")->capture_default_str();

    // analyze
    Common an_c;
    std::string an_file;
    auto* an = app.add_subcommand("analyze", "Worst-case response times and inversion budgets");
    add_common(an, an_c, false, "json");
    an->add_option("taskset", an_file, "Taskset JSON")->required()->check(CLI::ExistingFile);

    // simulate
    Common sim_c;
    ExecOpts sim_exec;
    std::string sim_file;
    auto* sim = app.add_subcommand("simulate", "Simulate K hyperperiods and write the trace");
    add_common(sim, sim_c, true, "csv");
    sim_exec.add(sim);
    sim->add_option("taskset", sim_file, "Taskset JSON")->required()->check(CLI::ExistingFile);

    // entropy
    Common ent_c;
    std::string ent_file;
    std::optional<std::size_t> ent_m, ent_pi;
    bool ent_true = false;
    auto* ent = app.add_subcommand("entropy", "Entropy of a recorded trace");
    add_common(ent, ent_c, false, "json");
    ent->add_option("trace", ent_file, "Trace CSV (or simulate JSON bundle)")->required()->check(CLI::ExistingFile);
    ent->add_option("--m", ent_m, "Interval length (default ceil(0.35 L))");
    ent->add_option("--pi", ent_pi, "Dissimilarity threshold (default floor(0.1 L))");
    ent->add_flag("--true", ent_true, "Also report the empirical entropy of whole rows");

    // spectrum
    Common spec_c;
    std::string spec_trace, spec_taskset;
    std::size_t spec_peaks = 8;
    auto* spec = app.add_subcommand("spectrum", "DFT spectra and peak report of a trace");
    add_common(spec, spec_c, false, "json");
    spec->add_option("trace", spec_trace, "Trace CSV (or simulate JSON bundle)")->required()->check(CLI::ExistingFile);
    spec->add_option("--taskset", spec_taskset, "Taskset JSON")->required()->check(CLI::ExistingFile);
    spec->add_option("--peaks", spec_peaks, "Number of top peaks")->check(CLI::PositiveNumber)->capture_default_str();

    // range
    Common rng_c;
    std::string rng_trace, rng_taskset;
    auto* rng = app.add_subcommand("range", "Execution range of each task");
    add_common(rng, rng_c, false, "json");
    rng->add_option("trace", rng_trace, "Trace CSV (or simulate JSON bundle)")->required()->check(CLI::ExistingFile);
    rng->add_option("--taskset", rng_taskset, "Taskset JSON")->required()->check(CLI::ExistingFile);

    // experiment
    Common ex_c;
    ExecOpts ex_exec;
    std::string ex_kind, ex_buckets = "all", ex_schemes, ex_taskset;
    std::optional<std::size_t> ex_per, ex_total, ex_m, ex_pi;
    std::size_t ex_threads = 0, ex_peaks = 8;
    bool ex_full = false;
    auto* ex = app.add_subcommand("experiment", "Run a batch experiment");
    add_common(ex, ex_c, false, "csv");
    ex_exec.add(ex);
    ex->add_option("kind", ex_kind, "entropy-vs-util | range-ratio | spectrum | correlation")
        ->required()
        ->check(CLI::IsMember({"entropy-vs-util", "range-ratio", "spectrum", "correlation"}));
    ex->add_option("--buckets", ex_buckets, "Bucket indices, e.g. 0-8 or all")->capture_default_str();
    ex->add_option("--schemes", ex_schemes, "Comma-separated schemes or all");
    ex->add_option("--tasksets-per-bucket", ex_per, "Tasksets per bucket (default 25, 250 with --full)");
    ex->add_option("--tasksets", ex_total, "Tasksets (correlation) or seeds (spectrum)");
    ex->add_option("--taskset", ex_taskset, "Taskset JSON for the spectrum experiment")->check(CLI::ExistingFile);
    ex->add_option("--m", ex_m, "Entropy interval length");
    ex->add_option("--pi", ex_pi, "Entropy dissimilarity threshold");
    ex->add_option("--threads", ex_threads, "Worker threads (0 = all cores)")->capture_default_str();
    ex->add_option("--peaks", ex_peaks, "Spectral peaks searched")->capture_default_str();
    ex->add_flag("--full", ex_full, "Full scale: 250 tasksets per bucket");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    if (*gen) {
        const auto buckets = parse_buckets(gen_buckets);
        if (gen_c.out.empty() && buckets.size() * gen_count > 1) {
            throw UsageError("--out DIR is required when generating more than one taskset");
        }
        if (!gen_c.out.empty()) fs::create_directories(gen_c.out);
        json index = json::array();
        for (auto b : buckets) {
            for (std::size_t j = 0; j < gen_count; ++j) {
                GenConfig cfg;
                cfg.min_tasks = gen_min;
                cfg.max_tasks = gen_max;
                cfg.bucket = UtilBucket::standard(b);
                const auto seed = taskset_seed(gen_c.seed, b, j);
                Rng r(mix_seed(seed, 0));
                const auto g = generate_taskset(cfg, r);
                json doc = taskset_to_json(g.taskset);
                doc["generator"] = {{"seed", gen_c.seed}, {"bucket", b},      {"index", j},
                                    {"target_utilization", g.target_utilization},
                                    {"version", kVersion}};
                if (gen_c.out.empty()) {
                    std::cout << dump(doc);
                } else {
                    std::ostringstream name;
                    name << "taskset_b" << b << '_' << std::setw(3) << std::setfill('0') << j << ".json";
                    write_file(fs::path(gen_c.out) / name.str(), dump(doc));
                    index.push_back(name.str());
                }
            }
        }
        if (!gen_c.out.empty()) std::cout << dump({{"written", index}, {"dir", gen_c.out}});
        return 0;
    }

    if (*an) {
        const Taskset ts = load_taskset(an_file);
        const auto a = analyze(ts);
        if (an_c.format == "csv") {
            std::ostringstream os;
            os << "task,wcet,period,deadline,response_time,wcib\n";
            for (std::size_t i = 0; i < ts.size(); ++i) {
                os << ts[i].id << ',' << ts[i].wcet << ',' << ts[i].period << ',' << ts[i].deadline << ','
                   << a.response_time[i] << ',' << a.wcib[i] << '\n';
            }
            emit(an_c.out, os.str());
        } else {
            emit(an_c.out, dump(analysis_to_json(ts, a)));
        }
        return 0;
    }

    if (*sim) {
        const Taskset ts = load_taskset(sim_file);
        const auto a = analyze(ts);
        SchedulerConfig cfg;
        cfg.scheme = parse_scheme(sim_c.scheme);
        cfg.seed = sim_c.seed;
        cfg.exec = sim_exec.policy();
        cfg.hyperperiods = sim_c.hyperperiods;
        const auto result = simulate(ts, a, cfg);
        if (sim_c.format == "csv") {
            std::ostringstream os;
            write_trace_csv(os, result.trace);
            emit(sim_c.out, os.str());
        } else {
            emit(sim_c.out, dump(simulation_to_json(ts, a, cfg, result)));
        }
        if (!result.ok()) throw ProtocolViolation(result.misses);
        return 0;
    }

    if (*ent) {
        const auto trace = load_any_trace(ent_file);
        auto params = EntropyParams::defaults_for(trace.length());
        if (ent_m) params.m = *ent_m;
        if (ent_pi) params.pi = *ent_pi;
        const double h = approx_entropy(trace, params);
        const double shannon = slot_shannon_entropy(trace);
        json j = {{"approx_entropy", h},
                  {"slot_shannon", shannon},
                  {"true_entropy", ent_true ? json(empirical_true_entropy(trace)) : json(nullptr)},
                  {"params", {{"m", params.m}, {"pi", params.pi}, {"L", trace.length()}, {"K", trace.count()}}}};
        if (ent_c.format == "csv") {
            std::ostringstream os;
            os << "approx_entropy,slot_shannon,true_entropy,m,pi,L,K\n"
               << h << ',' << shannon << ',' << (ent_true ? std::to_string(empirical_true_entropy(trace)) : "")
               << ',' << params.m << ',' << params.pi << ',' << trace.length() << ',' << trace.count() << '\n';
            emit(ent_c.out, os.str());
        } else {
            emit(ent_c.out, dump(j));
        }
        return 0;
    }

    if (*spec) {
        const Taskset ts = load_taskset(spec_taskset);
        const auto trace = load_any_trace(spec_trace);
        if (spec_c.format == "csv") {
            emit(spec_c.out, spectrum_csv(ts, trace));
        } else {
            emit(spec_c.out, dump(spectrum_json(ts, trace, spec_peaks)));
        }
        return 0;
    }

    if (*rng) {
        const Taskset ts = load_taskset(rng_taskset);
        const auto trace = load_any_trace(rng_trace);
        std::vector<ExecutionRange> ranges;
        std::vector<double> ratios;
        for (const auto& t : ts) {
            ranges.push_back(execution_range(trace, t));
            ratios.push_back(ranges.back().ratio);
        }
        const double g = geometric_mean(ratios);
        if (rng_c.format == "csv") {
            std::ostringstream os;
            os << "task,first_offset,last_offset,width,ratio\n";
            for (const auto& r : ranges) {
                os << r.task << ',' << r.first_offset << ',' << r.last_offset << ',' << r.width << ',' << r.ratio
                   << '\n';
            }
            emit(rng_c.out, os.str());
        } else {
            json tasks = json::array();
            for (const auto& r : ranges) {
                tasks.push_back({{"task", r.task},
                                 {"first_offset", r.first_offset},
                                 {"last_offset", r.last_offset},
                                 {"width", r.width},
                                 {"ratio", r.ratio}});
            }
            emit(rng_c.out, dump({{"tasks", tasks}, {"geometric_mean_ratio", g}}));
        }
        return 0;
    }

    // experiment
    const auto kind = parse_experiment(ex_kind);
    ExperimentSpec s = kind == ExperimentKind::Correlation ? ExperimentSpec::correlation() : ExperimentSpec{};
    s.kind = kind;
    s.seed = ex_c.seed;
    // Spectral peaks are read off WCET traces unless asked otherwise.
    s.exec = kind == ExperimentKind::Spectrum && ex->count("--exec") == 0 ? ExecPolicy::wcet()
                                                                            : ex_exec.policy();
    s.threads = ex_threads;
    s.peaks = ex_peaks;
    if (ex->count("--hyperperiods") > 0 || kind != ExperimentKind::Correlation) s.hyperperiods = ex_c.hyperperiods;
    if (ex->count("--buckets") > 0 || kind != ExperimentKind::Correlation) s.buckets = parse_buckets(ex_buckets);
    if (!ex_schemes.empty()) {
        s.schemes = parse_schemes(ex_schemes);
    } else if (kind == ExperimentKind::Spectrum) {
        s.schemes = {Scheme::VanillaEDF, Scheme::UnusedTimeReclamation};
    }
    s.tasksets_per_bucket = ex_per.value_or(ex_full ? 250 : 25);
    if (ex_total) s.tasksets = *ex_total;
    else if (kind == ExperimentKind::Spectrum) s.tasksets = 10;
    if (ex_m || ex_pi) {
        EntropyParams p;
        p.m = ex_m.value_or(1);
        p.pi = ex_pi.value_or(0);
        if (!ex_m) throw UsageError("--pi requires --m");
        s.entropy = p;
    }
    if (!ex_c.out.empty()) fs::create_directories(ex_c.out);
    const auto out_file = [&](const std::string& name) {
        return ex_c.out.empty() ? std::string() : (fs::path(ex_c.out) / name).string();
    };

    switch (kind) {
        case ExperimentKind::EntropyVsUtil:
        case ExperimentKind::RangeRatio: {
            const bool entropy = kind == ExperimentKind::EntropyVsUtil;
            const auto table = entropy ? run_entropy_experiment(s) : run_range_experiment(s);
            const char* column = entropy ? "mean_entropy" : "geomean_ratio";
            const std::string stem = entropy ? "entropy_vs_util" : "range_ratio";
            if (ex_c.format == "csv") {
                std::ostringstream os;
                table.write_csv(os, column);
                emit(out_file(stem + ".csv"), os.str());
                if (!ex_c.out.empty()) write_file(out_file(stem + ".spec.json"), dump(table.spec));
            } else {
                emit(out_file(stem + ".json"), dump(table.to_json(column)));
            }
            break;
        }
        case ExperimentKind::Correlation: {
            const auto r = run_correlation_experiment(s);
            if (ex_c.format == "csv") {
                std::ostringstream os;
                os << "taskset,true_entropy,approx_entropy\n";
                for (std::size_t i = 0; i < r.true_entropy.size(); ++i) {
                    os << i << ',' << r.true_entropy[i] << ',' << r.approx_entropy[i] << '\n';
                }
                emit(out_file("correlation.csv"), os.str());
                json summary = {{"spec", r.spec}, {"pearson", r.pearson ? json(*r.pearson) : json(nullptr)}};
                if (ex_c.out.empty()) std::cerr << summary.dump() << '\n';
                else write_file(out_file("correlation.json"), dump(summary));
            } else {
                emit(out_file("correlation.json"), dump(r.to_json()));
            }
            break;
        }
        case ExperimentKind::Spectrum: {
            const Taskset ts = ex_taskset.empty() ? Taskset::implicit({{4, 10}, {1, 20}, {1, 5}, {2, 12}})
                                                  : load_taskset(ex_taskset);
            const auto r = run_spectrum_experiment(s, ts);
            if (ex_c.format == "csv") {
                std::ostringstream os;
                os << "scheme,seed,task,period,recovered\n";
                for (const auto& rep : r.reports) {
                    for (std::size_t i = 0; i < ts.size(); ++i) {
                        os << to_string(rep.scheme) << ',' << rep.seed << ',' << ts[i].id << ',' << ts[i].period
                           << ',' << (rep.recovered[i] ? 1 : 0) << '\n';
                    }
                }
                emit(out_file("spectrum.csv"), os.str());
                if (!ex_c.out.empty()) write_file(out_file("spectrum.spec.json"), dump(r.spec));
            } else {
                emit(out_file("spectrum.json"), dump(r.to_json(ts)));
            }
            break;
        }
    }
    return 0;
}

const char* error_type(const std::exception& e) {
    if (dynamic_cast<const UsageError*>(&e)) return "usage";
    if (dynamic_cast<const FormatError*>(&e)) return "format";
    if (dynamic_cast<const json::exception*>(&e)) return "format";
    if (dynamic_cast<const ModelError*>(&e)) return "model";
    if (dynamic_cast<const AnalysisError*>(&e)) return "analysis";
    if (dynamic_cast<const GenerationError*>(&e)) return "generation";
    if (dynamic_cast<const ProtocolViolation*>(&e)) return "deadline_miss";
    if (dynamic_cast<const ExperimentError*>(&e)) return "experiment";
    if (dynamic_cast<const std::invalid_argument*>(&e)) return "invalid_argument";
    return "runtime";
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::exception& e) {
        std::cout.flush();
        std::cerr << json{{"error", e.what()}, {"type", error_type(e)}}.dump() << '\n';
        return error_type(e) == std::string_view("usage") ? 2 : 1;
    }
}
