// Detrended fluctuation analysis: scale-grid construction, the detrending
// identity, exact shift/scale behaviour, and Hurst recovery on synthetic
// series with known exponents.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <vector>

#include "mmf/dfa.hpp"
#include "mmf/fgn.hpp"
#include "mmf/rng.hpp"

using namespace mmf;

TEST_CASE("dfa rejects invalid input", "[dfa]") {
    const std::vector<double> tiny(8, 1.0);
    const std::vector<std::int64_t> scales = {4};
    CHECK_THROWS_AS(dfa(tiny, scales), std::invalid_argument);

    std::vector<double> series(64, 0.0);
    CHECK_THROWS_AS(dfa(series, std::vector<std::int64_t>{}), std::invalid_argument);
    CHECK_THROWS_AS(dfa(series, std::vector<std::int64_t>{3}), std::invalid_argument);
    CHECK_THROWS_AS(dfa(series, std::vector<std::int64_t>{17}), std::invalid_argument);
    CHECK_THROWS_AS(dfa(series, std::vector<std::int64_t>{8, 8}), std::invalid_argument);
    CHECK_THROWS_AS(dfa(series, std::vector<std::int64_t>{8, 6}), std::invalid_argument);
}

TEST_CASE("order-1 detrending annihilates a linear profile", "[dfa]") {
    // A constant series integrates to a linear profile, which per-segment
    // linear fits remove entirely up to float roundoff.
    const double b = 0.37;
    const std::size_t n = 4096;
    const std::vector<double> series(n, b);
    const auto scales = default_scales(n);
    const auto result = dfa(series, scales);
    for (const double f : result.fluctuations) {
        CHECK(f < 1e-8 * b * static_cast<double>(n));
    }
}

TEST_CASE("fluctuations are shift invariant and scale covariant", "[dfa]") {
    Rng rng(3);
    std::vector<double> series(20000);
    for (auto& v : series) v = rng.normal();
    const auto scales = default_scales(series.size());
    const auto base = fit_hurst(dfa(series, scales), 10, 4500);

    std::vector<double> shifted(series.size());
    std::vector<double> doubled(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) {
        shifted[i] = series[i] + 123.456;
        doubled[i] = 2.0 * series[i];
    }
    const auto shift_result = fit_hurst(dfa(shifted, scales), 10, 4500);
    const auto scale_result = fit_hurst(dfa(doubled, scales), 10, 4500);

    for (std::size_t i = 0; i < base.fluctuations.size(); ++i) {
        CHECK(std::abs(shift_result.fluctuations[i] - base.fluctuations[i]) <=
              1e-12 * base.fluctuations[i]);
        // Multiplying by two is exact in binary arithmetic.
        CHECK(scale_result.fluctuations[i] == 2.0 * base.fluctuations[i]);
    }
    CHECK(std::abs(shift_result.hurst - base.hurst) < 1e-12);
    CHECK(std::abs(scale_result.hurst - base.hurst) < 1e-12);
}

TEST_CASE("fit_hurst recovers an exact power law", "[dfa]") {
    DfaResult synthetic;
    synthetic.scales = {10, 20, 40, 80};
    synthetic.fluctuations.resize(4);
    const double c = 0.123;
    for (std::size_t i = 0; i < synthetic.scales.size(); ++i) {
        synthetic.fluctuations[i] =
            c * std::pow(static_cast<double>(synthetic.scales[i]), 0.7);
    }
    const auto fitted = fit_hurst(synthetic, 10, 4500);
    CHECK(std::abs(fitted.hurst - 0.7) < 1e-12);
    CHECK(std::abs(fitted.r2 - 1.0) < 1e-12);
    CHECK(fitted.fit_min_scale == 10);
    CHECK(fitted.fit_max_scale_exclusive == 4500);
}

TEST_CASE("fit_hurst needs at least 3 scales in range", "[dfa]") {
    DfaResult two;
    two.scales = {10, 20};
    two.fluctuations = {1.0, 2.0};
    CHECK_THROWS_AS(fit_hurst(two, 10, 4500), std::invalid_argument);

    // Plenty of scales overall but too few inside the window.
    DfaResult narrow;
    narrow.scales = {10, 20, 40, 80, 160};
    narrow.fluctuations = {1.0, 2.0, 3.0, 4.0, 5.0};
    CHECK_THROWS_AS(fit_hurst(narrow, 30, 90), std::invalid_argument);
}

TEST_CASE("default scale grid is log spaced over [10, min(4500, N/4))", "[dfa]") {
    const auto scales = default_scales(40000);
    REQUIRE(!scales.empty());
    CHECK(scales.front() == 10);
    CHECK(scales.back() < 4500);
    CHECK(scales.back() >= 4000);
    for (std::size_t i = 1; i < scales.size(); ++i) {
        CHECK(scales[i] > scales[i - 1]);
    }
    // About 20 points per decade across log10(4500/10) = 2.65 decades.
    CHECK(scales.size() >= 45);
    CHECK(scales.size() <= 58);

    // Short series are capped by N/4.
    const auto short_scales = default_scales(100);
    REQUIRE(!short_scales.empty());
    CHECK(short_scales.back() < 25);

    // Too short for any scale: empty grid, and the convenience wrapper throws.
    CHECK(default_scales(40).empty());
    const std::vector<double> tiny(40, 1.0);
    CHECK_THROWS_AS(dfa_hurst(tiny), std::invalid_argument);
}

TEST_CASE("forward-only segmentation is available and differs", "[dfa]") {
    Rng rng(8);
    std::vector<double> series(1000);  // not a multiple of most scales
    for (auto& v : series) v = rng.normal();
    const auto scales = default_scales(series.size());
    DfaOptions forward;
    forward.both_ends = false;
    const auto both = dfa(series, scales);
    const auto fwd = dfa(series, scales, forward);
    bool any_difference = false;
    for (std::size_t i = 0; i < both.fluctuations.size(); ++i) {
        CHECK(fwd.fluctuations[i] > 0.0);
        if (fwd.fluctuations[i] != both.fluctuations[i]) any_difference = true;
    }
    CHECK(any_difference);
}

TEST_CASE("white noise fits a slope of one half", "[dfa][slow]") {
    const int seeds = 10;
    double mean_h = 0.0;
    for (int s = 0; s < seeds; ++s) {
        Rng rng(derive_seed(101, 0, static_cast<std::uint64_t>(s)));
        std::vector<double> series(40000);
        for (auto& v : series) v = rng.normal();
        mean_h += dfa_hurst(series).hurst;
    }
    mean_h /= seeds;
    CHECK(std::abs(mean_h - 0.5) < 0.03);
}

TEST_CASE("persistent noise fits its target slope", "[dfa][slow]") {
    const int seeds = 10;
    double mean_h = 0.0;
    for (int s = 0; s < seeds; ++s) {
        Rng rng(derive_seed(103, 0, static_cast<std::uint64_t>(s)));
        const auto sample = generate_fgn(40000, 0.9, rng);
        mean_h += dfa_hurst(sample.values).hurst;
    }
    mean_h /= seeds;
    CHECK(std::abs(mean_h - 0.9) < 0.04);
}

TEST_CASE("dfa_hurst at N = 40000 uses the whole default window", "[dfa]") {
    Rng rng(55);
    std::vector<double> series(40000);
    for (auto& v : series) v = rng.normal();
    const auto result = dfa_hurst(series);
    CHECK(result.fit_min_scale == 10);
    CHECK(result.fit_max_scale_exclusive == 4500);
    CHECK(result.scales.front() == 10);
    CHECK(result.scales.back() < 4500);
    CHECK(std::isfinite(result.hurst));
    CHECK(result.r2 > 0.9);
}
