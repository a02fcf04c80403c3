#pragma once

#include "reorder/trace.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace reorder {

/// Interval length m and Hamming dissimilarity threshold pi for the
/// approximate schedule entropy.
struct EntropyParams {
    std::size_t m = 1;
    std::size_t pi = 0;

    /// m = ceil(0.35 L), pi = floor(0.1 L).
    static EntropyParams defaults_for(std::size_t length);
    /// Throws std::invalid_argument unless 1 <= m <= length and pi <= m.
    void check(std::size_t length) const;
};

/// Number of positions where u and v differ. Throws on length mismatch.
[[nodiscard]] std::size_t hamming(std::span<const Symbol> u, std::span<const Symbol> v);

/// The m symbols of row k starting at slot t, wrapping modulo L within the row.
[[nodiscard]] std::vector<Symbol> extract_interval(const ScheduleTrace& trace, std::size_t k,
                                                   std::size_t t, std::size_t m);

/// Approximate schedule entropy in bits:
///   C_t^k = |{k' : hamming(X_t^k, X_t^k') <= pi}| / K   (k' = k included)
///   eta_t = -(1/K) sum_k log2 C_t^k
///   H     = (1/m) sum_t eta_t
[[nodiscard]] double approx_entropy(const ScheduleTrace& trace, const EntropyParams& params);

/// Upper-approximated entropy: sum over slots of the plug-in Shannon entropy
/// of that slot's symbol distribution across rows.
[[nodiscard]] double slot_shannon_entropy(const ScheduleTrace& trace);

/// Plug-in Shannon entropy of the distribution of whole rows. Only
/// meaningful when K is large relative to the number of distinct rows.
[[nodiscard]] double empirical_true_entropy(const ScheduleTrace& trace);

/// Pearson correlation; nullopt when either side has zero variance or
/// fewer than two points.
[[nodiscard]] std::optional<double> pearson(std::span<const double> x, std::span<const double> y);

}  // namespace reorder
