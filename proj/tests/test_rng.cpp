// Deterministic RNG layer: seed derivation, stream reproducibility, and the
// hand-rolled distribution conversions.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <unordered_set>
#include <vector>

#include "mmf/rng.hpp"

using namespace mmf;

TEST_CASE("derive_seed is a pure function of its inputs", "[rng]") {
    CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
    CHECK(derive_seed(0, 0, 0) == derive_seed(0, 0, 0));

    // Neighbouring indexes must land far apart.
    CHECK(derive_seed(42, 0, 0) != derive_seed(42, 0, 1));
    CHECK(derive_seed(42, 0, 0) != derive_seed(42, 1, 0));
    CHECK(derive_seed(42, 0, 0) != derive_seed(43, 0, 0));
}

TEST_CASE("a million derived child seeds do not collide", "[rng]") {
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(1u << 20);
    for (std::uint64_t cell = 0; cell < 1000; ++cell) {
        for (std::uint64_t rep = 0; rep < 1000; ++rep) {
            seen.insert(derive_seed(20260814, cell, rep));
        }
    }
    CHECK(seen.size() == 1000u * 1000u);
}

TEST_CASE("mix64 is bijective on sampled inputs", "[rng]") {
    // A collision among distinct inputs would disprove bijectivity.
    std::unordered_set<std::uint64_t> outputs;
    for (std::uint64_t i = 0; i < 10000; ++i) {
        outputs.insert(mix64(i * 0x9e3779b97f4a7c15ULL + i));
    }
    CHECK(outputs.size() == 10000);
}

TEST_CASE("identical seeds give identical streams", "[rng]") {
    Rng a(12345);
    Rng b(12345);
    for (int i = 0; i < 64; ++i) {
        REQUIRE(a.next_u64() == b.next_u64());
    }
    for (int i = 0; i < 64; ++i) {
        REQUIRE(a.uniform01() == b.uniform01());
        REQUIRE(a.normal() == b.normal());
        REQUIRE(a.student_t(1.3) == b.student_t(1.3));
    }
    Rng c(12346);
    CHECK(Rng(12345).next_u64() != c.next_u64());
}

TEST_CASE("uniform01 stays inside [0, 1) with the right mean", "[rng]") {
    Rng rng(7);
    const int n = 100000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform01();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    CHECK(std::abs(sum / n - 0.5) < 0.01);
}

TEST_CASE("normal draws have unit scale", "[rng]") {
    Rng rng(11);
    const int n = 100000;
    double sum = 0.0;
    double sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        sum += z;
        sq += z * z;
    }
    const double mean = sum / n;
    const double var = sq / n - mean * mean;
    CHECK(std::abs(mean) < 0.02);
    CHECK(std::abs(std::sqrt(var) - 1.0) < 0.02);
}

TEST_CASE("gamma and chi-square match their first moments", "[rng]") {
    Rng rng(13);
    const int n = 200000;

    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += rng.gamma(2.5);
    CHECK(std::abs(sum / n - 2.5) < 0.03);

    // The shape < 1 path goes through the boost step.
    sum = 0.0;
    for (int i = 0; i < n; ++i) sum += rng.gamma(0.5);
    CHECK(std::abs(sum / n - 0.5) < 0.02);

    sum = 0.0;
    for (int i = 0; i < n; ++i) sum += rng.chi_square(1.3);
    CHECK(std::abs(sum / n - 1.3) < 0.03);

    CHECK_THROWS_AS(rng.gamma(0.0), std::invalid_argument);
    CHECK_THROWS_AS(rng.gamma(-1.0), std::invalid_argument);
}

TEST_CASE("student_t approaches a standard normal at large dof", "[rng]") {
    Rng rng(17);
    const int n = 100000;
    double sum = 0.0;
    double sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double t = rng.student_t(1000.0);
        sum += t;
        sq += t * t;
    }
    const double mean = sum / n;
    const double sd = std::sqrt(sq / n - mean * mean);
    CHECK(sd > 0.97);
    CHECK(sd < 1.03);

    CHECK_THROWS_AS(rng.student_t(0.0), std::invalid_argument);
    CHECK_THROWS_AS(rng.student_t(-2.0), std::invalid_argument);
}
