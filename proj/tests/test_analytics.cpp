// Sweep analytics: cell aggregation against a brute-force oracle, Pearson
// correlation properties, exact OLS recovery on noiseless designs, the error
// contract of each reduction, and sensitivity extraction.

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>
#include <vector>

#include "mmf/analytics.hpp"

using namespace mmf;

namespace {

SweepRecord rec(double alpha_x, double hurst_x, double hurst_s, double hurst_r) {
    SweepRecord r;
    r.alpha_x = alpha_x;
    r.hurst_x = hurst_x;
    r.hurst_s = hurst_s;
    r.hurst_r = hurst_r;
    return r;
}

}  // namespace

TEST_CASE("format_cell prints mean and scaled deviation", "[analytics]") {
    CHECK(format_cell(0.46, 0.0) == "0.46(0)");
    CHECK(format_cell(0.46, 0.01) == "0.46(1)");
    CHECK(format_cell(0.643, 0.0212) == "0.64(2)");
    CHECK(format_cell(0.5, 0.105) == "0.50(10)");
}

TEST_CASE("cell_stats aggregates and orders cells", "[analytics]") {
    std::vector<SweepRecord> records;
    records.push_back(rec(1.3, 0.5, 0.5, 0.50));
    records.push_back(rec(1.3, 0.5, 0.5, 0.54));
    const auto stats = cell_stats(records);
    REQUIRE(stats.size() == 1);
    CHECK(stats[0].reps == 2);
    CHECK(std::abs(stats[0].mean - 0.52) < 1e-12);
    CHECK(std::abs(stats[0].stddev - std::sqrt(0.0008)) < 1e-12);

    // A cell with a single rep has no spread estimate.
    records.push_back(rec(1.3, 0.7, 0.5, 0.55));
    CHECK_THROWS_AS(cell_stats(records), std::invalid_argument);

    // Output is ordered by (alpha_x, hurst_x, hurst_s) regardless of input.
    std::vector<SweepRecord> shuffled;
    const double keys[4][3] = {
        {1.6, 0.5, 0.5}, {1.0, 0.9, 0.5}, {1.0, 0.5, 0.9}, {1.0, 0.5, 0.5}};
    for (const auto& k : keys) {
        shuffled.push_back(rec(k[0], k[1], k[2], 0.5));
        shuffled.push_back(rec(k[0], k[1], k[2], 0.6));
    }
    const auto ordered = cell_stats(shuffled);
    REQUIRE(ordered.size() == 4);
    CHECK(ordered[0].alpha_x == 1.0);
    CHECK(ordered[0].hurst_x == 0.5);
    CHECK(ordered[0].hurst_s == 0.5);
    CHECK(ordered[1].hurst_s == 0.9);
    CHECK(ordered[2].hurst_x == 0.9);
    CHECK(ordered[3].alpha_x == 1.6);
}

TEST_CASE("cell_stats matches a two-pass oracle", "[analytics]") {
    // Random-ish deterministic values over a 2x2x2 grid with 4 reps.
    std::vector<SweepRecord> records;
    double v = 0.31;
    for (const double a : {1.0, 1.3}) {
        for (const double hx : {0.5, 0.7}) {
            for (const double hs : {0.5, 0.9}) {
                for (int r = 0; r < 4; ++r) {
                    v = std::fmod(v * 1.61803398875 + 0.1, 0.5) + 0.25;
                    records.push_back(rec(a, hx, hs, v));
                }
            }
        }
    }
    const auto stats = cell_stats(records);
    REQUIRE(stats.size() == 8);

    std::map<std::tuple<double, double, double>, std::vector<double>> oracle;
    for (const auto& r : records) {
        oracle[{r.alpha_x, r.hurst_x, r.hurst_s}].push_back(r.hurst_r);
    }
    for (const auto& s : stats) {
        const auto& values = oracle.at({s.alpha_x, s.hurst_x, s.hurst_s});
        REQUIRE(s.reps == values.size());
        double sum = 0.0;
        for (const double x : values) sum += x;
        const double mean = sum / static_cast<double>(values.size());
        double ss = 0.0;
        for (const double x : values) ss += (x - mean) * (x - mean);
        const double stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
        CHECK(s.mean == mean);
        CHECK(s.stddev == stddev);
    }
}

TEST_CASE("pearson correlation properties", "[analytics]") {
    std::vector<SweepRecord> records;
    for (int i = 0; i < 10; ++i) {
        const double hs = 0.5 + 0.04 * i;
        records.push_back(rec(1.3, 0.5 + 0.01 * (i % 3), hs, hs));
    }
    const auto perfect = pearson(records, Variable::hurst_s);
    CHECK(perfect.rho == 1.0);
    CHECK(perfect.p_value == 0.0);
    CHECK(perfect.n == 10);

    // Constant regressor: no variance to correlate against.
    CHECK_THROWS_AS(pearson(records, Variable::alpha_x), std::invalid_argument);

    std::vector<SweepRecord> two(records.begin(), records.begin() + 2);
    CHECK_THROWS_AS(pearson(two, Variable::hurst_s), std::invalid_argument);

    // Anti-monotone response gives a negative coefficient.
    std::vector<SweepRecord> falling;
    for (int i = 0; i < 10; ++i) {
        falling.push_back(rec(1.3, 0.5 + 0.05 * i, 0.5, 0.9 - 0.03 * i));
    }
    CHECK(pearson(falling, Variable::hurst_x).rho < -0.99);

    // Affine maps of the regressor leave the coefficient unchanged.
    std::vector<SweepRecord> mixed;
    double noise = 0.2;
    for (int i = 0; i < 12; ++i) {
        noise = std::fmod(noise * 7.13 + 0.31, 0.2);
        mixed.push_back(rec(1.3, 0.5 + 0.04 * i, 0.5, 0.4 + 0.02 * i + noise));
    }
    auto scaled = mixed;
    for (auto& r : scaled) r.hurst_x = 3.0 * r.hurst_x + 1.0;
    const auto base = pearson(mixed, Variable::hurst_x);
    const auto affine = pearson(scaled, Variable::hurst_x);
    CHECK(std::abs(base.rho - affine.rho) < 1e-12);
    CHECK(std::abs(base.p_value - affine.p_value) < 1e-12);
}

TEST_CASE("ols recovers noiseless linear models exactly", "[analytics]") {
    // Bivariate form at a single alpha.
    std::vector<SweepRecord> flat;
    for (const double hx : {0.5, 0.6, 0.7, 0.8, 0.9}) {
        for (const double hs : {0.5, 0.6, 0.7, 0.8, 0.9}) {
            flat.push_back(rec(1.3, hx, hs, 0.23 - 0.08 * hx + 0.52 * hs));
        }
    }
    const auto two = ols(flat, OlsForm::linear2);
    REQUIRE(two.coefficients.size() == 3);
    CHECK(std::abs(two.coefficients[0] - 0.23) < 1e-10);
    CHECK(std::abs(two.coefficients[1] + 0.08) < 1e-10);
    CHECK(std::abs(two.coefficients[2] - 0.52) < 1e-10);
    CHECK(two.r2 > 1.0 - 1e-12);
    CHECK(two.adjusted_r2 > 1.0 - 1e-12);
    CHECK(two.n == flat.size());

    // Trivariate form over an alpha grid.
    std::vector<SweepRecord> pooled;
    for (const double a : {1.0, 1.3, 1.6}) {
        for (const double hx : {0.5, 0.7, 0.9}) {
            for (const double hs : {0.5, 0.7, 0.9}) {
                pooled.push_back(
                    rec(a, hx, hs, 0.25 - 0.02 * a - 0.08 * hx + 0.52 * hs));
            }
        }
    }
    const auto three = ols(pooled, OlsForm::linear3);
    REQUIRE(three.coefficients.size() == 4);
    CHECK(std::abs(three.coefficients[0] - 0.25) < 1e-10);
    CHECK(std::abs(three.coefficients[1] + 0.02) < 1e-10);
    CHECK(std::abs(three.coefficients[2] + 0.08) < 1e-10);
    CHECK(std::abs(three.coefficients[3] - 0.52) < 1e-10);
    for (const double se : three.std_errors) CHECK(se < 1e-8);
    CHECK(std::abs(predict(three, 1.3, 0.80, 0.75) - 0.55) < 1e-10);
}

TEST_CASE("ols recovers a cubic response surface", "[analytics]") {
    const double c[6] = {1.75, -0.02, -0.08, -6.11, 9.53, -4.45};
    std::vector<SweepRecord> records;
    for (const double a : {1.0, 1.3, 1.6}) {
        for (const double hx : {0.5, 0.7, 0.9}) {
            for (const double hs : {0.5, 0.6, 0.7, 0.8, 0.9}) {
                const double y = c[0] + c[1] * a + c[2] * hx + c[3] * hs +
                                 c[4] * hs * hs + c[5] * hs * hs * hs;
                records.push_back(rec(a, hx, hs, y));
            }
        }
    }
    const auto report = ols(records, OlsForm::cubic_s3);
    REQUIRE(report.coefficients.size() == 6);
    for (std::size_t j = 0; j < 6; ++j) {
        INFO("coefficient " << report.names[j]);
        CHECK(std::abs(report.coefficients[j] - c[j]) < 1e-8);
    }
    CHECK(report.r2 > 1.0 - 1e-12);
}

TEST_CASE("ols rejects undersized and degenerate designs", "[analytics]") {
    // linear2 needs p + 10 = 13 records.
    std::vector<SweepRecord> few;
    for (int i = 0; i < 12; ++i) {
        few.push_back(rec(1.3, 0.5 + 0.03 * i, 0.5 + 0.02 * i, 0.5));
    }
    CHECK_THROWS_AS(ols(few, OlsForm::linear2), std::invalid_argument);

    // A regressor with a single distinct value cannot be identified.
    std::vector<SweepRecord> flat_hx;
    for (int i = 0; i < 20; ++i) {
        flat_hx.push_back(rec(1.0 + 0.05 * i, 0.7, 0.5 + 0.02 * i, 0.5));
    }
    CHECK_THROWS_AS(ols(flat_hx, OlsForm::linear2), std::invalid_argument);

    // Exact collinearity alpha = 2 * hurst_x + 1 (all binary-exact values).
    std::vector<SweepRecord> collinear;
    for (const double hx : {0.25, 0.5, 0.75}) {
        for (const double hs : {0.25, 0.5, 0.75}) {
            for (int r = 0; r < 2; ++r) {
                collinear.push_back(rec(2.0 * hx + 1.0, hx, hs, 0.4 + 0.1 * hs));
            }
        }
    }
    CHECK_THROWS_AS(ols(collinear, OlsForm::linear3), std::runtime_error);
}

TEST_CASE("sensitivity reads linear coefficients", "[analytics]") {
    std::vector<SweepRecord> pooled;
    for (const double a : {1.0, 1.3, 1.6}) {
        for (const double hx : {0.5, 0.7, 0.9}) {
            // Five distinct hurst_s values so the cubic form is identifiable.
            for (const double hs : {0.5, 0.6, 0.7, 0.8, 0.9}) {
                pooled.push_back(
                    rec(a, hx, hs, 0.25 - 0.02 * a - 0.08 * hx + 0.52 * hs));
            }
        }
    }
    const auto report = ols(pooled, OlsForm::linear3);
    CHECK(std::abs(sensitivity(report, "alpha_x", 1.0) + 0.02) < 1e-10);
    CHECK(std::abs(sensitivity(report, "hurst_s", 0.2) - 0.104) < 1e-10);
    CHECK(sensitivity(report, "hurst_x", 0.0) == 0.0);
    CHECK_THROWS_AS(sensitivity(report, "bogus", 1.0), std::invalid_argument);
    CHECK_THROWS_AS(sensitivity(report, "intercept", 1.0), std::invalid_argument);

    const auto cubic = ols(pooled, OlsForm::cubic_s3);
    CHECK_THROWS_AS(sensitivity(cubic, "hurst_s", 1.0), std::invalid_argument);
}

TEST_CASE("record validity filter", "[analytics]") {
    auto good = rec(1.3, 0.5, 0.5, 0.5);
    CHECK(good.valid());

    auto degenerate = good;
    degenerate.status = "degenerate";
    CHECK_FALSE(degenerate.valid());

    auto failed = good;
    failed.status = "dfa-failed";
    CHECK_FALSE(failed.valid());

    auto nan = good;
    nan.hurst_r = std::numeric_limits<double>::quiet_NaN();
    CHECK_FALSE(nan.valid());
}
