#include "reorder/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <numeric>
#include <stdexcept>

namespace reorder {

std::vector<double> occupancy_signal(const ScheduleTrace& trace, TaskId task) {
    std::vector<double> out;
    out.reserve(trace.flat().size());
    for (Symbol s : trace.flat()) out.push_back(s == task ? 1.0 : 0.0);
    return out;
}

namespace {

// FFTW's planner is not thread-safe; execution of a finished plan is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwFree {
    void operator()(void* p) const { fftw_free(p); }
};

struct PlanDestroy {
    void operator()(fftw_plan p) const {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(p);
    }
};

using PlanPtr = std::unique_ptr<std::remove_pointer_t<fftw_plan>, PlanDestroy>;

}  // namespace

Spectrum dft_spectrum(std::span<const double> signal) {
    const std::size_t n = signal.size();
    if (n < 2) throw std::invalid_argument("dft_spectrum: need at least 2 samples");
    const double mean = std::accumulate(signal.begin(), signal.end(), 0.0) / static_cast<double>(n);

    std::unique_ptr<double, FftwFree> in(static_cast<double*>(fftw_malloc(sizeof(double) * n)));
    std::unique_ptr<fftw_complex, FftwFree> out(
        static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1))));
    if (!in || !out) throw std::bad_alloc();

    PlanPtr plan;
    {
        std::lock_guard lock(planner_mutex());
        plan.reset(fftw_plan_dft_r2c_1d(static_cast<int>(n), in.get(), out.get(), FFTW_ESTIMATE));
    }
    if (!plan) throw std::runtime_error("dft_spectrum: FFTW planning failed");
    for (std::size_t i = 0; i < n; ++i) in.get()[i] = signal[i] - mean;
    fftw_execute(plan.get());

    Spectrum s;
    s.signal_length = n;
    const std::size_t bins = n / 2;
    s.frequencies.reserve(bins);
    s.magnitudes.reserve(bins);
    for (std::size_t k = 1; k <= bins; ++k) {
        s.frequencies.push_back(static_cast<double>(k) / static_cast<double>(n));
        s.magnitudes.push_back(std::hypot(out.get()[k][0], out.get()[k][1]));
    }
    return s;
}

std::vector<double> detect_peaks(const Spectrum& spectrum, std::size_t count) {
    const auto& mag = spectrum.magnitudes;
    const std::size_t n = mag.size();
    if (n == 0 || count == 0) return {};
    const double floor = 1e-9 * *std::max_element(mag.begin(), mag.end());

    std::vector<std::size_t> peaks;
    for (std::size_t k = 0; k < n; ++k) {
        if (mag[k] <= floor) continue;
        const bool above_left = k == 0 || mag[k] > mag[k - 1];
        const bool above_right = k + 1 == n || mag[k] > mag[k + 1];
        if (above_left && above_right) peaks.push_back(k);
    }
    std::stable_sort(peaks.begin(), peaks.end(),
                     [&](std::size_t a, std::size_t b) { return mag[a] > mag[b]; });
    if (peaks.size() > count) peaks.resize(count);

    std::vector<double> out;
    out.reserve(peaks.size());
    for (std::size_t k : peaks) out.push_back(spectrum.frequencies[k]);
    return out;
}

bool has_peak_near(const Spectrum& spectrum, std::span<const double> peaks, double frequency) {
    const double half_bin = 0.5 / static_cast<double>(spectrum.signal_length);
    return std::any_of(peaks.begin(), peaks.end(),
                       [&](double f) { return std::abs(f - frequency) <= half_bin; });
}

ExecutionRange execution_range(const ScheduleTrace& trace, const Task& task) {
    ExecutionRange r;
    r.task = task.id;
    bool seen = false;
    const auto slots = trace.flat();
    for (std::size_t s = 0; s < slots.size(); ++s) {
        if (slots[s] != task.id) continue;
        const Time offset = static_cast<Time>(s) % task.period;
        if (!seen) {
            r.first_offset = r.last_offset = offset;
            seen = true;
        } else {
            r.first_offset = std::min(r.first_offset, offset);
            r.last_offset = std::max(r.last_offset, offset);
        }
    }
    if (!seen) {
        throw std::invalid_argument("execution_range: task " + std::to_string(task.id) +
                                    " never appears in the trace");
    }
    r.width = r.last_offset - r.first_offset + 1;
    r.ratio = static_cast<double>(r.width) / static_cast<double>(task.deadline);
    return r;
}

double geometric_mean(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("geometric_mean: empty input");
    double log_sum = 0.0;
    for (double v : values) {
        if (v < 0.0) throw std::invalid_argument("geometric_mean: negative value");
        if (v == 0.0) return 0.0;
        log_sum += std::log(v);
    }
    return std::exp(log_sum / static_cast<double>(values.size()));
}

}  // namespace reorder
