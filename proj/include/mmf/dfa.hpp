#pragma once

// Detrended fluctuation analysis with order-1 (linear) detrending.
//
// The profile (cumulative sum of the mean-subtracted series) is split into
// floor(N/l) disjoint segments from the front and the same number from the
// back, so the tail of the series contributes when N is not a multiple of l.
// F(l) is the RMS of the per-segment linear-fit residuals pooled over all
// 2*floor(N/l) segments; the Hurst estimate is the slope of ln F on ln l
// over a configurable scale window.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace mmf {

struct DfaOptions {
    // Forward-only segmentation is kept for sensitivity checks.
    bool both_ends = true;
};

struct DfaResult {
    std::vector<std::int64_t> scales;
    std::vector<double> fluctuations;
    double hurst = std::numeric_limits<double>::quiet_NaN();
    double r2 = std::numeric_limits<double>::quiet_NaN();
    std::int64_t fit_min_scale = 0;
    std::int64_t fit_max_scale_exclusive = 0;
};

inline constexpr std::int64_t kDfaDefaultMinScale = 10;
inline constexpr std::int64_t kDfaDefaultMaxScaleExclusive = 4500;

// Log-spaced integer scales, ~`per_decade` points per decade, deduplicated,
// spanning [min_scale, min(max_scale_exclusive, N/4)).
inline std::vector<std::int64_t> default_scales(
    std::size_t n, std::int64_t min_scale = kDfaDefaultMinScale,
    std::int64_t max_scale_exclusive = kDfaDefaultMaxScaleExclusive,
    double per_decade = 20.0) {
    const std::int64_t cap =
        std::min<std::int64_t>(max_scale_exclusive, static_cast<std::int64_t>(n / 4));
    std::vector<std::int64_t> scales;
    if (cap <= min_scale) return scales;
    const double step = 1.0 / per_decade;
    for (double e = std::log10(static_cast<double>(min_scale));; e += step) {
        const auto scale = static_cast<std::int64_t>(std::llround(std::pow(10.0, e)));
        if (scale >= cap) break;
        if (scale < min_scale) continue;
        if (scales.empty() || scales.back() != scale) scales.push_back(scale);
    }
    return scales;
}

namespace detail {

// Residual sum of squares of a least-squares line through y[0..len).
inline double linear_detrend_rss(const double* y, std::int64_t len) {
    const double n = static_cast<double>(len);
    double mean = 0.0;
    for (std::int64_t i = 0; i < len; ++i) mean += y[i];
    mean /= n;
    // Centered abscissa keeps the normal equations diagonal.
    const double x_mid = 0.5 * (n - 1.0);
    const double sxx = n * (n * n - 1.0) / 12.0;
    double syy = 0.0;
    double sxy = 0.0;
    for (std::int64_t i = 0; i < len; ++i) {
        const double dy = y[i] - mean;
        const double dx = static_cast<double>(i) - x_mid;
        syy += dy * dy;
        sxy += dx * dy;
    }
    const double rss = syy - (sxy * sxy) / sxx;
    return rss > 0.0 ? rss : 0.0;
}

}  // namespace detail

// Fluctuation function over the given strictly increasing scales. The fit
// fields of the result are left unset; see fit_hurst.
inline DfaResult dfa(std::span<const double> series,
                     std::span<const std::int64_t> scales,
                     const DfaOptions& options = {}) {
    const auto n = static_cast<std::int64_t>(series.size());
    if (n < 16) {
        throw std::invalid_argument("dfa: series must have at least 16 points");
    }
    if (scales.empty()) {
        throw std::invalid_argument("dfa: at least one scale is required");
    }
    for (std::size_t i = 0; i < scales.size(); ++i) {
        if (scales[i] < 4) {
            throw std::invalid_argument("dfa: scales must be >= 4");
        }
        if (scales[i] > n / 4) {
            throw std::invalid_argument("dfa: scale exceeds N/4");
        }
        if (i > 0 && scales[i] <= scales[i - 1]) {
            throw std::invalid_argument("dfa: scales must be strictly increasing");
        }
    }

    double mean = 0.0;
    for (const double v : series) mean += v;
    mean /= static_cast<double>(n);

    std::vector<double> profile(series.size());
    double acc = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
        acc += series[static_cast<std::size_t>(i)] - mean;
        profile[static_cast<std::size_t>(i)] = acc;
    }

    DfaResult result;
    result.scales.assign(scales.begin(), scales.end());
    result.fluctuations.resize(scales.size());
    for (std::size_t si = 0; si < scales.size(); ++si) {
        const std::int64_t scale = scales[si];
        const std::int64_t segments = n / scale;
        double total_rss = 0.0;
        for (std::int64_t s = 0; s < segments; ++s) {
            total_rss += detail::linear_detrend_rss(profile.data() + s * scale, scale);
        }
        std::int64_t segment_count = segments;
        if (options.both_ends) {
            for (std::int64_t s = 0; s < segments; ++s) {
                const std::int64_t start = n - (s + 1) * scale;
                total_rss += detail::linear_detrend_rss(profile.data() + start, scale);
            }
            segment_count *= 2;
        }
        result.fluctuations[si] =
            std::sqrt(total_rss / static_cast<double>(segment_count * scale));
    }
    return result;
}

// Fills hurst/r2 by OLS of ln F on ln l over scales in [min, max_exclusive).
inline DfaResult fit_hurst(DfaResult result, std::int64_t min_scale,
                           std::int64_t max_scale_exclusive) {
    std::vector<double> lx;
    std::vector<double> ly;
    for (std::size_t i = 0; i < result.scales.size(); ++i) {
        const std::int64_t scale = result.scales[i];
        if (scale < min_scale || scale >= max_scale_exclusive) continue;
        const double f = result.fluctuations[i];
        if (!(f > 0.0)) {
            throw std::invalid_argument("fit_hurst: nonpositive fluctuation in range");
        }
        lx.push_back(std::log(static_cast<double>(scale)));
        ly.push_back(std::log(f));
    }
    if (lx.size() < 3) {
        throw std::invalid_argument("fit_hurst: fewer than 3 scales in fit range");
    }
    const double n = static_cast<double>(lx.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        const double dx = lx[i] - mx;
        const double dy = ly[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    result.hurst = sxy / sxx;
    result.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    result.fit_min_scale = min_scale;
    result.fit_max_scale_exclusive = max_scale_exclusive;
    return result;
}

// Convenience: default scale grid plus the standard fit window.
inline DfaResult dfa_hurst(std::span<const double> series,
                           std::int64_t min_scale = kDfaDefaultMinScale,
                           std::int64_t max_scale_exclusive = kDfaDefaultMaxScaleExclusive,
                           const DfaOptions& options = {}) {
    const auto scales = default_scales(series.size(), min_scale, max_scale_exclusive);
    if (scales.empty()) {
        throw std::invalid_argument("dfa_hurst: series too short for scale grid");
    }
    return fit_hurst(dfa(series, scales, options), min_scale, max_scale_exclusive);
}

}  // namespace mmf
