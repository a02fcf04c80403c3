#include "reorder/entropy.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace reorder {

EntropyParams EntropyParams::defaults_for(std::size_t length) {
    EntropyParams p;
    p.m = std::max<std::size_t>(1, (35 * length + 99) / 100);
    p.pi = length / 10;
    return p;
}

void EntropyParams::check(std::size_t length) const {
    if (m < 1 || m > length) {
        throw std::invalid_argument("interval length m must be in [1, L]");
    }
    if (pi > m) throw std::invalid_argument("threshold pi must not exceed m");
}

std::size_t hamming(std::span<const Symbol> u, std::span<const Symbol> v) {
    if (u.size() != v.size()) throw std::invalid_argument("hamming: length mismatch");
    std::size_t d = 0;
    for (std::size_t i = 0; i < u.size(); ++i) d += u[i] != v[i];
    return d;
}

std::vector<Symbol> extract_interval(const ScheduleTrace& trace, std::size_t k, std::size_t t,
                                     std::size_t m) {
    const std::size_t length = trace.length();
    if (k >= trace.count() || t >= length || m < 1 || m > length) {
        throw std::out_of_range("extract_interval: index out of range");
    }
    const auto row = trace.row(k);
    std::vector<Symbol> out(m);
    for (std::size_t i = 0; i < m; ++i) out[i] = row[(t + i) % length];
    return out;
}

namespace {

// Symbols are remapped to dense codes and packed into fixed-width lanes of
// 64-bit words, so one XOR compares 8 (or 4) slots at once.
struct Lanes {
    unsigned bits;
    std::uint64_t low;   // every lane with its top bit cleared
    std::uint64_t high;  // top bit of every lane

    static Lanes for_alphabet(std::size_t symbols) {
        if (symbols <= 256) return {8, 0x7F7F7F7F7F7F7F7FULL, 0x8080808080808080ULL};
        if (symbols <= 65536) return {16, 0x7FFF7FFF7FFF7FFFULL, 0x8000800080008000ULL};
        throw std::invalid_argument("trace alphabet too large");
    }
    [[nodiscard]] unsigned per_word() const { return 64 / bits; }

    // Number of nonzero lanes in x.
    [[nodiscard]] unsigned nonzero(std::uint64_t x) const {
        return static_cast<unsigned>(std::popcount((((x & low) + low) | x) & high));
    }
};

std::vector<std::uint32_t> dense_codes(const ScheduleTrace& trace, std::size_t& alphabet) {
    std::unordered_map<Symbol, std::uint32_t> code;
    std::vector<std::uint32_t> out;
    out.reserve(trace.flat().size());
    for (Symbol s : trace.flat()) {
        auto [it, inserted] = code.try_emplace(s, static_cast<std::uint32_t>(code.size()));
        out.push_back(it->second);
    }
    alphabet = code.size();
    return out;
}

}  // namespace

double approx_entropy(const ScheduleTrace& trace, const EntropyParams& params) {
    if (trace.empty()) throw std::invalid_argument("approx_entropy: empty trace");
    const std::size_t length = trace.length();
    const std::size_t count = trace.count();
    params.check(length);

    std::size_t alphabet = 0;
    const auto codes = dense_codes(trace, alphabet);
    const Lanes lanes = Lanes::for_alphabet(alphabet);
    const std::size_t m = params.m;
    const std::size_t words = (m + lanes.per_word() - 1) / lanes.per_word();

    std::vector<std::uint64_t> packed(count * words);
    std::vector<std::size_t> order(count);
    std::vector<std::size_t> group_start;
    std::vector<double> matches;
    const double k_count = static_cast<double>(count);
    const double k_inv = 1.0 / k_count;

    double total = 0.0;
    for (std::size_t t = 0; t < length; ++t) {
        std::fill(packed.begin(), packed.end(), 0);
        for (std::size_t k = 0; k < count; ++k) {
            std::uint64_t* dst = &packed[k * words];
            const std::uint32_t* row = &codes[k * length];
            for (std::size_t i = 0; i < m; ++i) {
                const std::uint64_t c = row[(t + i) % length];
                dst[i / lanes.per_word()] |= c << (lanes.bits * (i % lanes.per_word()));
            }
        }

        // Group identical intervals; each distinct pattern is compared once.
        std::iota(order.begin(), order.end(), 0);
        const auto less = [&](std::size_t a, std::size_t b) {
            return std::lexicographical_compare(&packed[a * words], &packed[a * words] + words,
                                                &packed[b * words], &packed[b * words] + words);
        };
        std::sort(order.begin(), order.end(), less);
        group_start.clear();
        for (std::size_t i = 0; i < count; ++i) {
            if (i == 0 || less(order[i - 1], order[i])) group_start.push_back(i);
        }
        const std::size_t groups = group_start.size();
        group_start.push_back(count);

        matches.assign(groups, 0.0);
        for (std::size_t g = 0; g < groups; ++g) {
            const double size_g = static_cast<double>(group_start[g + 1] - group_start[g]);
            matches[g] += size_g;
            const std::uint64_t* pg = &packed[order[group_start[g]] * words];
            for (std::size_t h = g + 1; h < groups; ++h) {
                const std::uint64_t* ph = &packed[order[group_start[h]] * words];
                std::size_t distance = 0;
                for (std::size_t w = 0; w < words && distance <= params.pi; ++w) {
                    distance += lanes.nonzero(pg[w] ^ ph[w]);
                }
                if (distance <= params.pi) {
                    matches[g] += static_cast<double>(group_start[h + 1] - group_start[h]);
                    matches[h] += size_g;
                }
            }
        }

        double eta = 0.0;
        for (std::size_t g = 0; g < groups; ++g) {
            const double size_g = static_cast<double>(group_start[g + 1] - group_start[g]);
            eta -= size_g * std::log2(matches[g] / k_count);
        }
        total += eta * k_inv;
    }
    // Clamp the -0.0 produced when every log2 term is exactly zero.
    return std::max(0.0, total / static_cast<double>(m));
}

namespace {

template <typename Counts>
double plug_in_entropy(const Counts& counts, double n) {
    double h = 0.0;
    for (const auto& [key, c] : counts) {
        const double p = static_cast<double>(c) / n;
        h -= p * std::log2(p);
    }
    return std::max(0.0, h);
}

}  // namespace

double slot_shannon_entropy(const ScheduleTrace& trace) {
    if (trace.empty()) throw std::invalid_argument("slot_shannon_entropy: empty trace");
    const auto n = static_cast<double>(trace.count());
    double total = 0.0;
    std::map<Symbol, std::size_t> counts;
    for (std::size_t t = 0; t < trace.length(); ++t) {
        counts.clear();
        for (std::size_t k = 0; k < trace.count(); ++k) ++counts[trace.at(k, t)];
        total += plug_in_entropy(counts, n);
    }
    return total;
}

double empirical_true_entropy(const ScheduleTrace& trace) {
    if (trace.empty()) throw std::invalid_argument("empirical_true_entropy: empty trace");
    std::map<std::vector<Symbol>, std::size_t> counts;
    for (std::size_t k = 0; k < trace.count(); ++k) {
        const auto row = trace.row(k);
        ++counts[std::vector<Symbol>(row.begin(), row.end())];
    }
    return plug_in_entropy(counts, static_cast<double>(trace.count()));
}

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("pearson: length mismatch");
    const std::size_t n = x.size();
    if (n < 2) return std::nullopt;
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace reorder
