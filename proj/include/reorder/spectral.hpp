#pragma once

#include "reorder/task_model.hpp"
#include "reorder/trace.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace reorder {

/// One-sided magnitude spectrum. Bin k has frequency k / N cycles per slot,
/// for k = 1 .. floor(N / 2).
struct Spectrum {
    std::vector<double> frequencies;
    std::vector<double> magnitudes;
    std::size_t signal_length = 0;  // N
};

/// Row-major flattening of the trace into a 0/1 signal that is 1 wherever
/// the slot holds `task` (task 0 selects idle slots).
[[nodiscard]] std::vector<double> occupancy_signal(const ScheduleTrace& trace, TaskId task);

/// |DFT(x - mean(x))| at the positive-frequency bins. Requires N >= 2.
[[nodiscard]] Spectrum dft_spectrum(std::span<const double> signal);

/// Frequencies of the `count` largest strict local maxima, by descending
/// magnitude (ties go to the lower frequency). Bins below 1e-9 of the
/// largest magnitude are treated as numerical noise and never reported.
[[nodiscard]] std::vector<double> detect_peaks(const Spectrum& spectrum, std::size_t count);

/// True when some reported peak lies within half a bin of `frequency`.
[[nodiscard]] bool has_peak_near(const Spectrum& spectrum, std::span<const double> peaks,
                                 double frequency);

/// Widest observed execution envelope of a task: the minimum first and
/// maximum last slot offset (relative to the job's release) over every job
/// in the trace. Releases are assumed synchronous at t = 0.
struct ExecutionRange {
    TaskId task = 0;
    Time first_offset = 0;
    Time last_offset = 0;
    Time width = 0;      // slots spanned: last_offset - first_offset + 1
    double ratio = 0.0;  // w_i / D_i
};

/// Throws std::invalid_argument when the task never appears.
[[nodiscard]] ExecutionRange execution_range(const ScheduleTrace& trace, const Task& task);

/// Geometric mean; 0 when any value is 0. Throws on an empty input or a
/// negative value.
[[nodiscard]] double geometric_mean(std::span<const double> values);

}  // namespace reorder
