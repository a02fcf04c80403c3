#include "doctest.h"
#include "fixtures.hpp"
#include "reorder/entropy.hpp"

using namespace reorder;

namespace {

oracle::Rows random_rows(std::mt19937_64& gen, std::size_t k, std::size_t len, std::uint32_t symbols) {
    oracle::Rows rows(k, std::vector<std::uint32_t>(len));
    for (auto& r : rows) {
        for (auto& v : r) v = static_cast<std::uint32_t>(gen() % symbols);
    }
    return rows;
}

// Rows drawn from a handful of templates with a few random flips, so that
// matches within pi actually occur.
oracle::Rows clustered_rows(std::mt19937_64& gen, std::size_t k, std::size_t len) {
    const auto templates = random_rows(gen, 3, len, 4);
    oracle::Rows rows;
    for (std::size_t i = 0; i < k; ++i) {
        auto r = templates[gen() % templates.size()];
        for (std::size_t f = gen() % 3; f > 0; --f) r[gen() % len] = static_cast<std::uint32_t>(gen() % 4);
        rows.push_back(r);
    }
    return rows;
}

}  // namespace

TEST_SUITE("entropy") {

TEST_CASE("parameters") {
    const auto p = EntropyParams::defaults_for(20);
    CHECK(p.m == 7);
    CHECK(p.pi == 2);
    CHECK(EntropyParams::defaults_for(100).m == 35);
    CHECK(EntropyParams::defaults_for(100).pi == 10);
    CHECK(EntropyParams::defaults_for(3).m == 2);
    CHECK_THROWS_AS(EntropyParams({0, 0}).check(10), std::invalid_argument);
    CHECK_THROWS_AS(EntropyParams({11, 0}).check(10), std::invalid_argument);
    CHECK_THROWS_AS(EntropyParams({3, 4}).check(10), std::invalid_argument);
    CHECK_NOTHROW(EntropyParams({10, 10}).check(10));
}

TEST_CASE("hamming distance and interval extraction") {
    const std::vector<Symbol> a{1, 2, 3, 0}, b{1, 0, 3, 2}, c{1};
    CHECK(hamming(a, a) == 0);
    CHECK(hamming(a, b) == 2);
    CHECK_THROWS_AS((void)hamming(a, c), std::invalid_argument);
    const auto tr = ScheduleTrace::from_rows({{1, 2, 3, 4, 5}, {6, 7, 8, 9, 0}});
    CHECK(extract_interval(tr, 0, 1, 3) == std::vector<Symbol>{2, 3, 4});
    CHECK(extract_interval(tr, 1, 3, 4) == std::vector<Symbol>{9, 0, 6, 7});
}

TEST_CASE("approximate entropy matches the reference") {
    std::mt19937_64 gen(61);
    for (int n = 0; n < 40; ++n) {
        const std::size_t k = 2 + gen() % 30;
        const std::size_t len = 1 + gen() % 25;
        const auto rows = n % 2 ? random_rows(gen, k, len, 1 + gen() % 4) : clustered_rows(gen, k, len);
        const auto tr = ScheduleTrace::from_rows(rows);
        for (std::size_t m = 1; m <= len; m += 1 + len / 5) {
            for (std::size_t pi = 0; pi <= m; pi += 1 + m / 3) {
                CHECK(approx_entropy(tr, {m, pi}) == doctest::Approx(oracle::approx_entropy(rows, m, pi)).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("Shannon estimators match the reference") {
    std::mt19937_64 gen(62);
    for (int n = 0; n < 30; ++n) {
        const auto rows = clustered_rows(gen, 5 + gen() % 60, 1 + gen() % 12);
        const auto tr = ScheduleTrace::from_rows(rows);
        CHECK(slot_shannon_entropy(tr) == doctest::Approx(oracle::slot_shannon(rows)).epsilon(1e-12));
        CHECK(empirical_true_entropy(tr) == doctest::Approx(oracle::true_entropy(rows)).epsilon(1e-12));
    }
}

TEST_CASE("deterministic traces have zero entropy") {
    const auto tr = ScheduleTrace::from_rows(oracle::Rows(40, {3, 3, 1, 2, 0, 0, 1}));
    for (std::size_t m = 1; m <= 7; ++m) {
        for (std::size_t pi = 0; pi <= m; ++pi) CHECK(approx_entropy(tr, {m, pi}) == 0.0);
    }
    CHECK(slot_shannon_entropy(tr) == 0.0);
    CHECK(empirical_true_entropy(tr) == 0.0);
}

TEST_CASE("two-pattern and all-pattern constructions") {
    const auto s1 = ScheduleTrace::from_rows(oracle::s1(2048));
    const auto s2 = ScheduleTrace::from_rows(oracle::s2_cyclic(2048));
    CHECK(approx_entropy(s1, {1, 0}) == doctest::Approx(5.0));
    CHECK(approx_entropy(s2, {1, 0}) == doctest::Approx(5.0));
    CHECK(slot_shannon_entropy(s1) == doctest::Approx(5.0));
    CHECK(slot_shannon_entropy(s2) == doctest::Approx(5.0));
    CHECK(empirical_true_entropy(s1) == doctest::Approx(1.0));
    CHECK(empirical_true_entropy(s2) == doctest::Approx(5.0));
    CHECK(approx_entropy(s1, {5, 0}) == doctest::Approx(1.0).epsilon(0.01));
    CHECK(approx_entropy(s2, {5, 0}) == doctest::Approx(5.0).epsilon(0.01));
}

TEST_CASE("properties") {
    std::mt19937_64 gen(63);
    for (int n = 0; n < 30; ++n) {
        const auto rows = clustered_rows(gen, 10 + gen() % 40, 4 + gen() % 16);
        const auto tr = ScheduleTrace::from_rows(rows);
        const std::size_t len = tr.length();

        // A looser threshold merges more intervals.
        for (std::size_t m = 1; m <= len; ++m) {
            double prev = approx_entropy(tr, {m, 0});
            for (std::size_t pi = 1; pi <= m; ++pi) {
                const double cur = approx_entropy(tr, {m, pi});
                CHECK(cur <= prev + 1e-12);
                prev = cur;
            }
            CHECK(approx_entropy(tr, {m, m}) == 0.0);
        }

        // Renaming symbols does not change anything.
        auto renamed = rows;
        for (auto& r : renamed) {
            for (auto& v : r) v = 100 - v;
        }
        const auto tr2 = ScheduleTrace::from_rows(renamed);
        CHECK(approx_entropy(tr2, EntropyParams::defaults_for(len)) ==
              doctest::Approx(approx_entropy(tr, EntropyParams::defaults_for(len))));

        // Joint entropy never exceeds the sum of the slot entropies.
        CHECK(empirical_true_entropy(tr) <= slot_shannon_entropy(tr) + 1e-9);
        // Order of rows is irrelevant.
        auto shuffled = rows;
        std::shuffle(shuffled.begin(), shuffled.end(), gen);
        CHECK(approx_entropy(ScheduleTrace::from_rows(shuffled), {2, 1}) ==
              doctest::Approx(approx_entropy(tr, {2, 1})));
        // Bounded by log2 K per slot, scaled by 1/m.
        CHECK(approx_entropy(tr, {1, 0}) <= static_cast<double>(len) * std::log2(static_cast<double>(tr.count())) + 1e-9);
    }
}

TEST_CASE("pearson") {
    std::mt19937_64 gen(64);
    std::vector<double> x, y;
    for (int i = 0; i < 50; ++i) {
        x.push_back(static_cast<double>(gen() % 1000));
        y.push_back(0.5 * x.back() + static_cast<double>(gen() % 300));
    }
    CHECK(pearson(x, y).value() == doctest::Approx(oracle::pearson(x, y)).epsilon(1e-12));
    std::vector<double> neg(x.size());
    std::transform(x.begin(), x.end(), neg.begin(), [](double v) { return 3.0 - 2.0 * v; });
    CHECK(pearson(x, neg).value() == doctest::Approx(-1.0));
    CHECK_FALSE(pearson(x, std::vector<double>(x.size(), 4.0)).has_value());
    CHECK_FALSE(pearson(std::vector<double>{1.0}, std::vector<double>{2.0}).has_value());
}

}  // TEST_SUITE
