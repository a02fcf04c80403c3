#include "reorder/experiment.hpp"

#include "reorder/analysis.hpp"
#include "reorder/io.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>

namespace reorder {

using nlohmann::json;

std::string_view to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::EntropyVsUtil: return "entropy-vs-util";
        case ExperimentKind::RangeRatio: return "range-ratio";
        case ExperimentKind::Spectrum: return "spectrum";
        case ExperimentKind::Correlation: return "correlation";
    }
    return "?";
}

ExperimentKind parse_experiment(std::string_view name) {
    for (auto k : {ExperimentKind::EntropyVsUtil, ExperimentKind::RangeRatio, ExperimentKind::Spectrum,
                   ExperimentKind::Correlation}) {
        if (to_string(k) == name) return k;
    }
    throw std::invalid_argument("unknown experiment '" + std::string(name) + "'");
}

ExperimentSpec ExperimentSpec::correlation(Time hyperperiods, std::size_t tasksets) {
    ExperimentSpec s;
    s.kind = ExperimentKind::Correlation;
    s.schemes = {Scheme::UnusedTimeReclamation};
    s.buckets = {2, 3, 4, 5, 6, 7, 8};
    s.tasksets = tasksets;
    s.hyperperiods = hyperperiods;
    s.gen = GenConfig::small_hyperperiod(UtilBucket{});
    return s;
}

json ExperimentSpec::to_json() const {
    json schemes_j = json::array();
    for (auto s : schemes) schemes_j.push_back(std::string(reorder::to_string(s)));
    json buckets_j = json::array();
    for (auto b : buckets) {
        const auto u = UtilBucket::standard(b);
        buckets_j.push_back({{"index", b}, {"lo", u.lo}, {"hi", u.hi}});
    }
    json j = {{"experiment", std::string(reorder::to_string(kind))},
              {"version", kVersion},
              {"rng", Rng::kAlgorithm},
              {"seed", seed},
              {"schemes", schemes_j},
              {"buckets", buckets_j},
              {"tasksets_per_bucket", tasksets_per_bucket},
              {"tasksets", tasksets},
              {"hyperperiods", hyperperiods},
              {"exec_policy", exec_policy_to_json(exec)},
              {"generator",
               {{"min_tasks", gen.min_tasks},
                {"max_tasks", gen.max_tasks},
                {"periods", gen.periods},
                {"max_attempts", gen.max_attempts}}},
              {"peaks", peaks}};
    if (gen.required_hyperperiod) j["generator"]["hyperperiod"] = *gen.required_hyperperiod;
    if (entropy) {
        j["entropy"] = {{"m", entropy->m}, {"pi", entropy->pi}};
    } else {
        j["entropy"] = "m = ceil(0.35 L), pi = floor(0.1 L)";
    }
    return j;
}

std::uint64_t taskset_seed(std::uint64_t seed, std::size_t bucket, std::size_t j) {
    return mix_seed(mix_seed(seed, 0x100 + bucket), j);
}

void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, n);
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                    next = n;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

namespace {

struct Cell {
    std::size_t bucket;
    std::size_t index;
};

Taskset make_taskset(GenConfig gen, std::size_t bucket, std::uint64_t ts_seed) {
    gen.bucket = UtilBucket::standard(bucket);
    Rng rng(mix_seed(ts_seed, 0));
    return generate_taskset(gen, rng).taskset;
}

SimulationResult run_scheme(const Taskset& ts, const AnalysisResult& analysis, const ExperimentSpec& spec,
                            Scheme scheme, std::uint64_t ts_seed) {
    SchedulerConfig config;
    config.scheme = scheme;
    config.seed = mix_seed(ts_seed, 1);
    config.exec = spec.exec;
    config.hyperperiods = spec.hyperperiods;
    config.record_decisions = false;
    auto result = simulate(ts, analysis, config);
    require_no_misses(result);
    return result;
}

std::string cell_context(const Cell& c) {
    return "bucket " + UtilBucket::standard(c.bucket).label() + ", taskset " + std::to_string(c.index);
}

void check_spec(const ExperimentSpec& spec) {
    if (spec.schemes.empty()) throw ExperimentError("no schemes selected");
    if (spec.buckets.empty()) throw ExperimentError("no buckets selected");
    if (spec.hyperperiods < 1) throw ExperimentError("hyperperiods must be >= 1");
    for (auto b : spec.buckets) {
        if (b >= kStandardBucketCount) throw ExperimentError("bucket index out of range");
    }
}

struct Grid {
    // values[bucket position][scheme position][taskset]
    std::vector<std::vector<std::vector<double>>> values;
    // tasks[bucket position][taskset]
    std::vector<std::vector<std::size_t>> tasks;
};

// Evaluates metric(taskset, trace) for every (bucket, taskset, scheme).
template <class Metric>
Grid grid(const ExperimentSpec& spec, Metric metric) {
    check_spec(spec);
    const std::size_t per = spec.tasksets_per_bucket;
    if (per == 0) throw ExperimentError("tasksets per bucket must be >= 1");
    Grid g;
    g.values.assign(spec.buckets.size(),
                    std::vector<std::vector<double>>(spec.schemes.size(), std::vector<double>(per)));
    g.tasks.assign(spec.buckets.size(), std::vector<std::size_t>(per));

    parallel_for(spec.buckets.size() * per, spec.threads, [&](std::size_t i) {
        const std::size_t b = i / per;
        const Cell cell{spec.buckets[b], i % per};
        try {
            const auto seed = taskset_seed(spec.seed, cell.bucket, cell.index);
            const Taskset ts = make_taskset(spec.gen, cell.bucket, seed);
            const AnalysisResult analysis = analyze(ts);
            g.tasks[b][cell.index] = ts.size();
            for (std::size_t s = 0; s < spec.schemes.size(); ++s) {
                const auto result = run_scheme(ts, analysis, spec, spec.schemes[s], seed);
                g.values[b][s][cell.index] = metric(ts, result.trace);
            }
        } catch (const std::exception& e) {
            throw ExperimentError(cell_context(cell) + ": " + e.what());
        }
    });
    return g;
}

double mean_of(const std::vector<double>& v) {
    double sum = 0.0;
    for (double x : v) sum += x;
    return sum / static_cast<double>(v.size());
}

double sample_stddev(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double mu = mean_of(v);
    double ss = 0.0;
    for (double x : v) ss += (x - mu) * (x - mu);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

void normalize(BucketTable& table) {
    double peak = 0.0;
    for (const auto& r : table.rows) peak = std::max(peak, r.value);
    for (auto& r : table.rows) r.normalized = peak > 0.0 ? r.value / peak : 0.0;
}

}  // namespace

const BucketStat& BucketTable::at(std::size_t bucket, Scheme scheme) const {
    for (const auto& r : rows) {
        if (r.bucket == bucket && r.scheme == scheme) return r;
    }
    throw std::out_of_range("no row for that bucket and scheme");
}

void BucketTable::write_csv(std::ostream& out, std::string_view value_column) const {
    out << "bucket,lo,hi,scheme," << value_column << ",stddev,n,normalized\n";
    for (const auto& r : rows) {
        const auto u = UtilBucket::standard(r.bucket);
        out << r.bucket << ',' << u.lo << ',' << u.hi << ',' << reorder::to_string(r.scheme) << ','
            << r.value << ',' << r.stddev << ',' << r.n << ',' << r.normalized << '\n';
    }
}

json BucketTable::to_json(std::string_view value_column) const {
    json rows_j = json::array();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        rows_j.push_back({{"bucket", r.bucket},
                          {"scheme", std::string(reorder::to_string(r.scheme))},
                          {std::string(value_column), r.value},
                          {"stddev", r.stddev},
                          {"n", r.n},
                          {"normalized", r.normalized},
                          {"samples", samples[i]}});
    }
    return {{"spec", spec}, {"rows", rows_j}};
}

BucketTable run_entropy_experiment(const ExperimentSpec& spec) {
    const auto g = grid(spec, [&](const Taskset&, const ScheduleTrace& trace) {
        const auto params = spec.entropy.value_or(EntropyParams::defaults_for(trace.length()));
        return approx_entropy(trace, params);
    });
    BucketTable table;
    table.spec = spec.to_json();
    for (std::size_t b = 0; b < spec.buckets.size(); ++b) {
        for (std::size_t s = 0; s < spec.schemes.size(); ++s) {
            const auto& v = g.values[b][s];
            table.rows.push_back({spec.buckets[b], spec.schemes[s], mean_of(v), sample_stddev(v), v.size(), 0.0});
            table.samples.push_back(v);
        }
    }
    normalize(table);
    return table;
}

BucketTable run_range_experiment(const ExperimentSpec& spec) {
    // Per-taskset geometric means are pooled back into one geometric mean
    // over every task of every taskset in the bucket.
    const auto g = grid(spec, [](const Taskset& ts, const ScheduleTrace& trace) {
        std::vector<double> ratios;
        for (const auto& task : ts) ratios.push_back(execution_range(trace, task).ratio);
        return geometric_mean(ratios);
    });
    BucketTable table;
    table.spec = spec.to_json();
    for (std::size_t b = 0; b < spec.buckets.size(); ++b) {
        for (std::size_t s = 0; s < spec.schemes.size(); ++s) {
            const auto& v = g.values[b][s];
            double log_sum = 0.0;
            std::size_t tasks = 0;
            bool zero = false;
            for (std::size_t j = 0; j < v.size(); ++j) {
                if (v[j] == 0.0) zero = true;
                else log_sum += std::log(v[j]) * static_cast<double>(g.tasks[b][j]);
                tasks += g.tasks[b][j];
            }
            const double pooled = zero ? 0.0 : std::exp(log_sum / static_cast<double>(tasks));
            table.rows.push_back({spec.buckets[b], spec.schemes[s], pooled, 0.0, v.size(), 0.0});
            table.samples.push_back(v);
        }
    }
    normalize(table);
    return table;
}

json CorrelationResult::to_json() const {
    json j = {{"spec", spec},
              {"tasksets", true_entropy.size()},
              {"true_entropy", true_entropy},
              {"approx_entropy", approx_entropy}};
    j["pearson"] = pearson ? json(*pearson) : json(nullptr);
    return j;
}

CorrelationResult run_correlation_experiment(const ExperimentSpec& spec) {
    check_spec(spec);
    if (spec.tasksets < 10) {
        throw ExperimentError("correlation needs at least 10 tasksets, got " + std::to_string(spec.tasksets));
    }
    CorrelationResult out;
    out.spec = spec.to_json();
    out.true_entropy.resize(spec.tasksets);
    out.approx_entropy.resize(spec.tasksets);
    parallel_for(spec.tasksets, spec.threads, [&](std::size_t j) {
        const Cell cell{spec.buckets[j % spec.buckets.size()], j};
        try {
            const auto seed = taskset_seed(spec.seed, cell.bucket, j);
            const Taskset ts = make_taskset(spec.gen, cell.bucket, seed);
            const auto result = run_scheme(ts, analyze(ts), spec, spec.schemes.front(), seed);
            const auto params = spec.entropy.value_or(EntropyParams::defaults_for(result.trace.length()));
            out.true_entropy[j] = empirical_true_entropy(result.trace);
            out.approx_entropy[j] = approx_entropy(result.trace, params);
        } catch (const std::exception& e) {
            throw ExperimentError(cell_context(cell) + ": " + e.what());
        }
    });
    out.pearson = pearson(out.true_entropy, out.approx_entropy);
    return out;
}

std::vector<double> activity_signal(const ScheduleTrace& trace) {
    std::vector<double> out;
    out.reserve(trace.flat().size());
    for (Symbol s : trace.flat()) out.push_back(static_cast<double>(s));
    return out;
}

bool PeakReport::all_recovered() const {
    return std::all_of(recovered.begin(), recovered.end(), [](bool b) { return b; });
}

PeakReport peak_report(const Taskset& taskset, const ScheduleTrace& trace, std::size_t count) {
    const auto spectrum = dft_spectrum(activity_signal(trace));
    PeakReport r;
    r.peaks = detect_peaks(spectrum, count);
    for (const auto& t : taskset) {
        r.recovered.push_back(has_peak_near(spectrum, r.peaks, 1.0 / static_cast<double>(t.period)));
    }
    return r;
}

json SpectrumResult::to_json(const Taskset& taskset) const {
    json freqs = json::array();
    for (const auto& t : taskset) freqs.push_back(1.0 / static_cast<double>(t.period));
    json reports_j = json::array();
    for (const auto& r : reports) {
        reports_j.push_back({{"scheme", std::string(reorder::to_string(r.scheme))},
                             {"seed", r.seed},
                             {"peaks", r.peaks},
                             {"recovered", r.recovered},
                             {"all_recovered", r.all_recovered()}});
    }
    return {{"spec", spec}, {"taskset", taskset_to_json(taskset)}, {"task_frequencies", freqs},
            {"reports", reports_j}};
}

SpectrumResult run_spectrum_experiment(const ExperimentSpec& spec, const Taskset& taskset) {
    if (spec.schemes.empty()) throw ExperimentError("no schemes selected");
    if (spec.tasksets == 0) throw ExperimentError("need at least one seed");
    const AnalysisResult analysis = analyze(taskset);
    SpectrumResult out;
    out.spec = spec.to_json();
    out.reports.resize(spec.schemes.size() * spec.tasksets);
    parallel_for(out.reports.size(), spec.threads, [&](std::size_t i) {
        const Scheme scheme = spec.schemes[i / spec.tasksets];
        const std::uint64_t seed = mix_seed(spec.seed, i % spec.tasksets);
        SchedulerConfig config;
        config.scheme = scheme;
        config.seed = seed;
        config.exec = spec.exec;
        config.hyperperiods = spec.hyperperiods;
        config.record_decisions = false;
        const auto result = simulate(taskset, analysis, config);
        require_no_misses(result);
        auto report = peak_report(taskset, result.trace, spec.peaks);
        report.scheme = scheme;
        report.seed = seed;
        out.reports[i] = std::move(report);
    });
    return out;
}

}  // namespace reorder
