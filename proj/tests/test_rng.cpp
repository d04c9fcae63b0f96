#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "zerocal/rng.hpp"

using namespace zerocal;

TEST_CASE("counter draws are pure functions of (key, counter)") {
    const auto key = rng::sub_seed(42, "test");
    REQUIRE(rng::uniform01(key, 7) == rng::uniform01(key, 7));
    REQUIRE(rng::uniform01(key, 7) != rng::uniform01(key, 8));
    REQUIRE(rng::sub_seed(42, "a") != rng::sub_seed(42, "b"));
    REQUIRE(rng::sub_seed(42, "a") != rng::sub_seed(43, "a"));
}

TEST_CASE("uniform01 stays in [0,1) and uniform01_pos in (0,1]") {
    const auto key = rng::sub_seed(1, "bounds");
    for (std::uint64_t i = 0; i < 10000; ++i) {
        const double u = rng::uniform01(key, i);
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        const double v = rng::uniform01_pos(key, i);
        REQUIRE(v > 0.0);
        REQUIRE(v <= 1.0);
    }
}

TEST_CASE("normal draws have roughly unit variance and zero mean") {
    rng::Sequence seq(99, "normal-check");
    const int n = 200000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = seq.normal();
        sum += z;
        sum2 += z * z;
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    REQUIRE(std::abs(mean) < 0.01);
    REQUIRE(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("sequences with the same key replay identically") {
    rng::Sequence a(7, "replay");
    rng::Sequence b(7, "replay");
    for (int i = 0; i < 100; ++i) REQUIRE(a.uniform01() == b.uniform01());
}
