#pragma once

// Built-in invariant checks, runnable from the CLI without any input data.
// Each check is fast, deterministic, and prints one PASS/FAIL line, so a
// fresh build can be smoke-tested in seconds on any machine.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "mmf/analytics.hpp"
#include "mmf/dfa.hpp"
#include "mmf/fgn.hpp"
#include "mmf/lob.hpp"
#include "mmf/model.hpp"
#include "mmf/rng.hpp"
#include "mmf/stochastic.hpp"

namespace mmf {

namespace detail {

struct SelfTestCase {
    std::string name;
    std::function<bool(std::string&)> run;
};

inline bool selftest_seed_derivation(std::string& detail) {
    if (derive_seed(1, 2, 3) != derive_seed(1, 2, 3)) {
        detail = "same inputs gave different seeds";
        return false;
    }
    std::set<std::uint64_t> seen;
    for (std::uint64_t cell = 0; cell < 200; ++cell) {
        for (std::uint64_t rep = 0; rep < 50; ++rep) {
            seen.insert(derive_seed(42, cell, rep));
        }
    }
    if (seen.size() != 200 * 50) {
        detail = "collision among 10000 derived seeds";
        return false;
    }
    return true;
}

inline bool selftest_fgn_uncorrelated(std::string& detail) {
    Rng rng(7);
    const auto sample = generate_fgn(1 << 14, 0.5, rng);
    double mean = 0.0;
    for (double v : sample.values) mean += v;
    mean /= static_cast<double>(sample.values.size());
    double c0 = 0.0;
    double c1 = 0.0;
    for (std::size_t i = 0; i < sample.values.size(); ++i) {
        const double a = sample.values[i] - mean;
        c0 += a * a;
        if (i + 1 < sample.values.size()) c1 += a * (sample.values[i + 1] - mean);
    }
    const double rho1 = c1 / c0;
    if (std::abs(rho1) > 0.05) {
        detail = "lag-1 autocorrelation " + std::to_string(rho1) + " at H = 0.5";
        return false;
    }
    return true;
}

inline bool selftest_fgn_covariance(std::string& detail) {
    // Average the lag-1 sample autocovariance over several draws and compare
    // against the closed-form value.
    const double hurst = 0.8;
    const int n = 1 << 13;
    const int runs = 20;
    double mean_c1 = 0.0;
    for (int r = 0; r < runs; ++r) {
        Rng rng(derive_seed(11, 0, static_cast<std::uint64_t>(r)));
        const auto sample = generate_fgn(n, hurst, rng);
        double c1 = 0.0;
        for (int i = 0; i + 1 < n; ++i) c1 += sample.values[i] * sample.values[i + 1];
        mean_c1 += c1 / static_cast<double>(n - 1);
    }
    mean_c1 /= runs;
    const double expected = fgn_autocovariance(hurst, 1);
    if (std::abs(mean_c1 - expected) > 0.05) {
        detail = "lag-1 autocovariance " + std::to_string(mean_c1) + ", expected " +
                 std::to_string(expected);
        return false;
    }
    return true;
}

inline bool selftest_book_invariants(std::string& detail) {
    Rng rng(99);
    OrderBook book;
    std::vector<std::uint64_t> live;
    for (int t = 1; t <= 4000; ++t) {
        const double u = rng.uniform01();
        if (u < 0.7 || live.empty()) {
            const Side side = rng.uniform01() < 0.5 ? Side::buy : Side::sell;
            const std::int64_t ticks =
                static_cast<std::int64_t>(std::llround((rng.uniform01() - 0.5) * 40.0));
            const auto outcome = book.place(side, ticks, t);
            if (outcome.rested()) live.push_back(outcome.order_id);
        } else {
            const auto idx = static_cast<std::size_t>(rng.uniform01() *
                                                      static_cast<double>(live.size()));
            const auto id = live[std::min(idx, live.size() - 1)];
            book.cancel(id);
        }
        live.erase(std::remove_if(live.begin(), live.end(),
                                  [&](std::uint64_t id) { return book.find(id) == nullptr; }),
                   live.end());

        const auto bid = book.best_bid();
        const auto ask = book.best_ask();
        if (bid.has_value() && ask.has_value() && *bid >= *ask) {
            detail = "crossed book at step " + std::to_string(t);
            return false;
        }
        std::optional<std::int64_t> max_buy;
        std::optional<std::int64_t> min_sell;
        book.for_each_order([&](const Order& order) {
            if (order.side == Side::buy) {
                if (!max_buy || order.price_ticks > *max_buy) max_buy = order.price_ticks;
            } else {
                if (!min_sell || order.price_ticks < *min_sell) min_sell = order.price_ticks;
            }
        });
        if (bid != max_buy || ask != min_sell) {
            detail = "best quote disagrees with full scan at step " + std::to_string(t);
            return false;
        }
        if (book.placed_count() !=
            book.n_total() + 2 * book.trade_count() + book.cancelled_count()) {
            detail = "order conservation violated at step " + std::to_string(t);
            return false;
        }
    }
    return true;
}

inline bool selftest_cancel_probability(std::string& detail) {
    Rng rng(123);
    CancellationModel model;
    for (int trial = 0; trial < 2000; ++trial) {
        Order order;
        order.side = rng.uniform01() < 0.5 ? Side::buy : Side::sell;
        order.price_ticks = static_cast<std::int64_t>(std::llround((rng.uniform01() - 0.5) * 100));
        order.initial_distance = static_cast<std::int64_t>(rng.uniform01() * 50.0);
        order.initial_distance_defined = order.initial_distance > 0;
        const auto n_buy = static_cast<std::size_t>(1 + rng.uniform01() * 20);
        const auto n_sell = static_cast<std::size_t>(1 + rng.uniform01() * 20);
        const std::int64_t bid = -5;
        const std::int64_t ask = 5;
        const double p = detail::cancellation_probability_frozen(order, bid, ask, n_buy,
                                                                 n_sell, model);
        if (!(p >= 0.0 && p <= 1.0)) {
            detail = "probability outside [0, 1]: " + std::to_string(p);
            return false;
        }
    }
    // More same-side depth raises the imbalance term, so the cancellation
    // probability must not decrease.
    Order order;
    order.side = Side::buy;
    order.price_ticks = -3;
    order.initial_distance = 8;
    order.initial_distance_defined = true;
    double prev = -1.0;
    for (std::size_t n_buy = 1; n_buy <= 15; ++n_buy) {
        const double p =
            detail::cancellation_probability_frozen(order, -1, 1, n_buy, 16 - n_buy, model);
        if (p + 1e-12 < prev) {
            detail = "probability not monotone in imbalance";
            return false;
        }
        prev = p;
    }
    return true;
}

inline bool selftest_dfa_detrending(std::string& detail) {
    // A straight line is removed exactly by order-1 detrending.
    const int n = 4096;
    std::vector<double> increments(n, 0.37);
    const auto scales = default_scales(n);
    const auto result = dfa(increments, scales);
    for (double f : result.fluctuations) {
        if (f > 1e-8) {
            detail = "nonzero fluctuation on a constant-increment series";
            return false;
        }
    }
    return true;
}

inline bool selftest_dfa_scaling(std::string& detail) {
    Rng rng(31);
    std::vector<double> series(20000);
    for (auto& v : series) v = rng.normal();
    const auto scales = default_scales(series.size());
    const auto base = dfa(series, scales);

    std::vector<double> shifted(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) shifted[i] = series[i] + 0.5;
    const auto shift_result = dfa(shifted, scales);
    std::vector<double> doubled(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) doubled[i] = 2.0 * series[i];
    const auto scale_result = dfa(doubled, scales);

    for (std::size_t i = 0; i < base.fluctuations.size(); ++i) {
        if (std::abs(shift_result.fluctuations[i] - base.fluctuations[i]) >
            1e-9 * base.fluctuations[i]) {
            detail = "fluctuations changed under a constant shift";
            return false;
        }
        if (std::abs(scale_result.fluctuations[i] - 2.0 * base.fluctuations[i]) >
            1e-9 * base.fluctuations[i]) {
            detail = "fluctuations not homogeneous under scaling";
            return false;
        }
    }
    if (std::abs(base.hurst - 0.5) > 0.05) {
        detail = "white-noise exponent " + std::to_string(base.hurst);
        return false;
    }
    return true;
}

inline bool selftest_ols_recovery(std::string& detail) {
    std::vector<SweepRecord> records;
    int rep = 0;
    for (double a : {1.0, 1.3, 1.6}) {
        for (double hx : {0.5, 0.7, 0.9}) {
            for (double hs : {0.5, 0.7, 0.9}) {
                SweepRecord rec;
                rec.alpha_x = a;
                rec.hurst_x = hx;
                rec.hurst_s = hs;
                rec.rep = rep++;
                rec.hurst_r = 0.25 - 0.02 * a - 0.08 * hx + 0.52 * hs;
                rec.r2 = 1.0;
                records.push_back(rec);
            }
        }
    }
    const auto report = ols(records, OlsForm::linear3);
    const std::vector<double> expected = {0.25, -0.02, -0.08, 0.52};
    for (std::size_t j = 0; j < expected.size(); ++j) {
        if (std::abs(report.coefficients[j] - expected[j]) > 1e-10) {
            detail = "coefficient " + report.names[j] + " off by more than 1e-10";
            return false;
        }
    }
    return true;
}

inline bool selftest_surrogate_permutation(std::string& detail) {
    Rng amp_rng(5);
    Rng spec_rng(6);
    const int n = 4096;
    std::vector<double> amplitudes(n);
    for (auto& v : amplitudes) v = amp_rng.student_t(1.3);
    const auto fgn = generate_fgn(n, 0.8, spec_rng);
    const auto surrogate = iaaft(amplitudes, fgn.values);

    auto sorted_in = amplitudes;
    auto sorted_out = surrogate.values;
    std::sort(sorted_in.begin(), sorted_in.end());
    std::sort(sorted_out.begin(), sorted_out.end());
    if (sorted_in != sorted_out) {
        detail = "surrogate is not a permutation of the input amplitudes";
        return false;
    }
    return true;
}

inline bool selftest_simulation_determinism(std::string& detail) {
    ModelParams params;
    params.n_events = 2000;
    params.keep_returns = 300;
    params.seed = 2024;
    const auto a = run(params);
    const auto b = run(params);
    if (a.returns.values != b.returns.values) {
        detail = "same seed produced different return series";
        return false;
    }
    params.seed = 2025;
    const auto c = run(params);
    if (a.returns.values == c.returns.values) {
        detail = "different seeds produced identical return series";
        return false;
    }
    const auto& diag = a.diagnostics;
    if (diag.orders_placed !=
        diag.orders_resting_final + 2 * diag.trades + diag.orders_cancelled) {
        detail = "diagnostics do not conserve order counts";
        return false;
    }
    return true;
}

}  // namespace detail

// Runs every built-in check, printing one line per check. Returns true when
// all pass.
inline bool run_selftest(std::ostream& os) {
    const std::vector<detail::SelfTestCase> cases = {
        {"seed-derivation", detail::selftest_seed_derivation},
        {"noise-lag1-uncorrelated", detail::selftest_fgn_uncorrelated},
        {"noise-lag1-covariance", detail::selftest_fgn_covariance},
        {"book-invariants", detail::selftest_book_invariants},
        {"cancel-probability", detail::selftest_cancel_probability},
        {"dfa-linear-detrending", detail::selftest_dfa_detrending},
        {"dfa-shift-scale", detail::selftest_dfa_scaling},
        {"ols-exact-recovery", detail::selftest_ols_recovery},
        {"surrogate-permutation", detail::selftest_surrogate_permutation},
        {"simulation-determinism", detail::selftest_simulation_determinism},
    };
    bool all_ok = true;
    for (const auto& test : cases) {
        std::string note;
        bool ok = false;
        try {
            ok = test.run(note);
        } catch (const std::exception& e) {
            note = e.what();
        }
        if (ok) {
            os << "[PASS] " << test.name << '\n';
        } else {
            os << "[FAIL] " << test.name;
            if (!note.empty()) os << " (" << note << ")";
            os << '\n';
            all_ok = false;
        }
    }
    return all_ok;
}

}  // namespace mmf
