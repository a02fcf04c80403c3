#pragma once

#include <cstdint>
#include <random>

namespace reorder {

/// Source of uniform integers for scheduling decisions. The simulator only
/// ever asks for draws through this interface, so tests can script choices.
class RandomSource {
public:
    virtual ~RandomSource() = default;
    /// Uniform integer in the closed range [lo, hi]. Requires lo <= hi.
    virtual std::uint64_t uniform(std::uint64_t lo, std::uint64_t hi) = 0;
};

/// Reproducible PRNG: std::mt19937_64 (whose output sequence is fixed by
/// the standard) with bias-free rejection sampling for integer ranges and
/// 53-bit mantissa reals. Standard distributions are avoided because their
/// algorithms differ between library implementations.
class Rng final : public RandomSource {
public:
    static constexpr const char* kAlgorithm = "mt19937_64+rejection";

    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t uniform(std::uint64_t lo, std::uint64_t hi) override;
    /// Uniform real in [0, 1).
    double uniform01();
    /// Uniform real in the open interval (0, 1).
    double uniform_open01();
    std::uint64_t next() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

/// splitmix64 finalizer; used to derive independent child seeds.
[[nodiscard]] std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace reorder
