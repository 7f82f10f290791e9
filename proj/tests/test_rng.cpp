#include "fluidalg/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace fluidalg;

// Reference values from an independent implementation of the published
// SplitMix64 / xoshiro256** algorithms.

TEST_CASE("splitmix64 reference stream") {
    SplitMix64 sm(0);
    CHECK(sm.next() == 0xe220a8397b1dcdafULL);
    CHECK(sm.next() == 0x6e789e6aa1b965f4ULL);
    CHECK(sm.next() == 0x06c45d188009454fULL);
}

TEST_CASE("xoshiro256** seeded through splitmix64") {
    Xoshiro256StarStar rng(42);
    CHECK(rng.next() == 0x15780b2e0c2ec716ULL);
    CHECK(rng.next() == 0x6104d9866d113a7eULL);
    CHECK(rng.next() == 0xae17533239e499a1ULL);
    CHECK(rng.next() == 0xecb8ad4703b360a1ULL);
}

TEST_CASE("uniform and normal derived draws") {
    Xoshiro256StarStar u(1);
    CHECK(u.uniform() == 0.7029218331588505);
    CHECK(u.uniform() == 0.5204366199388569);
    CHECK(u.uniform() == 0.5741057000197225);

    Xoshiro256StarStar g(7);
    CHECK(g.normal() == doctest::Approx(-0.2790239910251981).epsilon(1e-14));
    CHECK(g.normal() == doctest::Approx(1.8997685786889567).epsilon(1e-14));
    CHECK(g.normal() == doctest::Approx(2.136306014732201).epsilon(1e-14));
}

TEST_CASE("derived seeds separate streams") {
    CHECK(derive_seed(5, 0) != derive_seed(5, 1));
    CHECK(derive_seed(5, 0) != derive_seed(6, 0));
    CHECK(derive_seed(5, 3) == derive_seed(5, 3));
}

TEST_CASE("uniform stays in [0, 1) and normals have unit variance") {
    Xoshiro256StarStar rng(123);
    double sum = 0.0, sum_sq = 0.0;
    constexpr int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        const double z = rng.normal();
        REQUIRE(std::isfinite(z));
        sum += z;
        sum_sq += z * z;
    }
    CHECK(std::abs(sum / n) < 0.01);
    CHECK(std::abs(sum_sq / n - 1.0) < 0.02);
}
