#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <vector>

#include "ngsim/rng.hpp"

using namespace ngsim;

TEST_CASE("identical seeds produce identical streams") {
    Rng a(42), b(42);
    for (int i = 0; i < 1000; ++i) REQUIRE(a.next_u64() == b.next_u64());
}

TEST_CASE("different seeds diverge") {
    Rng a(1), b(2);
    int same = 0;
    for (int i = 0; i < 100; ++i) same += a.next_u64() == b.next_u64();
    REQUIRE(same == 0);
}

TEST_CASE("uniform_below stays in range and covers all values") {
    Rng rng(7);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 10'000; ++i) {
        const auto v = rng.uniform_below(7);
        REQUIRE(v < 7);
        seen.insert(v);
    }
    REQUIRE(seen.size() == 7);
}

TEST_CASE("uniform_below is unbiased enough for a coarse frequency check") {
    Rng rng(99);
    const int n = 5;
    std::vector<long> counts(n, 0);
    const int draws = 100'000;
    for (int i = 0; i < draws; ++i) ++counts[rng.uniform_int(n)];
    const double expected = static_cast<double>(draws) / n;
    for (long c : counts) {
        // 5 sigma of Binomial(draws, 1/n)
        const double sigma = std::sqrt(expected * (1.0 - 1.0 / n));
        REQUIRE(std::abs(static_cast<double>(c) - expected) < 5.0 * sigma);
    }
}

TEST_CASE("uniform_double is in [0,1)") {
    Rng rng(3);
    for (int i = 0; i < 10'000; ++i) {
        const double v = rng.uniform_double();
        REQUIRE(v >= 0.0);
        REQUIRE(v < 1.0);
    }
}

TEST_CASE("shuffle yields a permutation") {
    Rng rng(11);
    std::vector<int> v(50);
    for (int i = 0; i < 50; ++i) v[static_cast<std::size_t>(i)] = i;
    rng.shuffle(v);
    std::set<int> unique(v.begin(), v.end());
    REQUIRE(unique.size() == 50);
}

TEST_CASE("derive_seed separates streams by tag and index") {
    const std::uint64_t base = 12345;
    std::set<std::uint64_t> seeds;
    for (std::uint64_t tag = 1; tag <= 5; ++tag)
        for (std::uint64_t idx = 0; idx < 100; ++idx)
            seeds.insert(derive_seed(base, tag, idx));
    REQUIRE(seeds.size() == 500);
    REQUIRE(derive_seed(base, 1, 0) == derive_seed(base, 1, 0));
    REQUIRE(derive_seed(base, 1, 0) != derive_seed(base + 1, 1, 0));
}
