#pragma once

// Statistical reduction of sweep output: per-cell mean/std of the return
// Hurst index, pooled Pearson correlations against the three order-flow
// parameters, and the linear/cubic OLS regressions with significance
// reporting.

#include <Eigen/Dense>
#include <boost/math/distributions/students_t.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace mmf {

struct SweepRecord {
    double alpha_x = 0.0;
    double hurst_x = 0.0;
    double hurst_s = 0.0;
    int rep = 0;
    std::uint64_t seed = 0;
    double hurst_r = std::numeric_limits<double>::quiet_NaN();
    double r2 = std::numeric_limits<double>::quiet_NaN();
    std::string status = "ok";
    std::int64_t runtime_ms = 0;

    bool valid() const { return status == "ok" && std::isfinite(hurst_r); }
};

struct CellStats {
    double alpha_x = 0.0;
    double hurst_x = 0.0;
    double hurst_s = 0.0;
    std::size_t reps = 0;
    double mean = 0.0;
    double stddev = 0.0;
};

// Table-style cell text: mean to two decimals, sample standard deviation
// times 100 in parentheses, e.g. "0.46(1)".
inline std::string format_cell(double mean, double stddev) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.2f(%.0f)", mean, stddev * 100.0);
    return buf;
}

// Per-cell mean and sample standard deviation, cells ordered by
// (alpha_x, hurst_x, hurst_s).
inline std::vector<CellStats> cell_stats(std::span<const SweepRecord> records) {
    std::map<std::tuple<double, double, double>, std::vector<double>> cells;
    for (const auto& rec : records) {
        cells[{rec.alpha_x, rec.hurst_x, rec.hurst_s}].push_back(rec.hurst_r);
    }
    std::vector<CellStats> out;
    out.reserve(cells.size());
    for (const auto& [key, values] : cells) {
        if (values.size() < 2) {
            throw std::invalid_argument("cell_stats: cell has fewer than 2 reps");
        }
        CellStats stats;
        std::tie(stats.alpha_x, stats.hurst_x, stats.hurst_s) = key;
        stats.reps = values.size();
        double sum = 0.0;
        for (const double v : values) sum += v;
        stats.mean = sum / static_cast<double>(values.size());
        double ss = 0.0;
        for (const double v : values) {
            const double d = v - stats.mean;
            ss += d * d;
        }
        stats.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
        out.push_back(stats);
    }
    return out;
}

enum class Variable : std::uint8_t { alpha_x, hurst_x, hurst_s };

inline const char* variable_name(Variable v) {
    switch (v) {
        case Variable::alpha_x: return "alpha_x";
        case Variable::hurst_x: return "hurst_x";
        case Variable::hurst_s: return "hurst_s";
    }
    return "?";
}

inline double variable_value(const SweepRecord& rec, Variable v) {
    switch (v) {
        case Variable::alpha_x: return rec.alpha_x;
        case Variable::hurst_x: return rec.hurst_x;
        case Variable::hurst_s: return rec.hurst_s;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

struct PearsonResult {
    double rho = 0.0;
    double p_value = 1.0;
    std::size_t n = 0;
};

// Sample Pearson correlation of hurst_r against one parameter, pooling all
// records; two-sided p-value from the t transform with n-2 dof.
inline PearsonResult pearson(std::span<const SweepRecord> records, Variable variable) {
    const std::size_t n = records.size();
    if (n < 3) {
        throw std::invalid_argument("pearson: need at least 3 records");
    }
    double mx = 0.0;
    double my = 0.0;
    for (const auto& rec : records) {
        mx += variable_value(rec, variable);
        my += rec.hurst_r;
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0;
    double syy = 0.0;
    double sxy = 0.0;
    double max_dx = 0.0;
    double max_dy = 0.0;
    for (const auto& rec : records) {
        const double dx = variable_value(rec, variable) - mx;
        const double dy = rec.hurst_r - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
        max_dx = std::max(max_dx, std::abs(dx));
        max_dy = std::max(max_dy, std::abs(dy));
    }
    // A constant column leaves only rounding dust in the deviations, which
    // keeps sxx technically positive; test constancy in relative terms so the
    // correlation of a flat regressor errors out instead of returning noise.
    if (!(sxx > 0.0) || !(syy > 0.0) || max_dx <= 1e-12 * (1.0 + std::abs(mx)) ||
        max_dy <= 1e-12 * (1.0 + std::abs(my))) {
        throw std::invalid_argument("pearson: degenerate variance");
    }
    PearsonResult result;
    result.n = n;
    result.rho = sxy / std::sqrt(sxx * syy);

    const double r2 = result.rho * result.rho;
    if (r2 >= 1.0) {
        result.p_value = 0.0;
    } else {
        const double dof = static_cast<double>(n - 2);
        const double t = std::abs(result.rho) * std::sqrt(dof / (1.0 - r2));
        const boost::math::students_t dist(dof);
        result.p_value = 2.0 * boost::math::cdf(dist, -t);
    }
    return result;
}

// Regression design families. The bivariate forms assume the records were
// filtered to a single alpha_x.
enum class OlsForm : std::uint8_t {
    linear2,   // H_r ~ 1 + H_x + H_s
    cubic_s2,  // H_r ~ 1 + H_x + H_s + H_s^2 + H_s^3
    linear3,   // H_r ~ 1 + alpha_x + H_x + H_s
    cubic_s3,  // H_r ~ 1 + alpha_x + H_x + H_s + H_s^2 + H_s^3
};

inline const char* ols_form_name(OlsForm form) {
    switch (form) {
        case OlsForm::linear2: return "linear2";
        case OlsForm::cubic_s2: return "cubic_s2";
        case OlsForm::linear3: return "linear3";
        case OlsForm::cubic_s3: return "cubic_s3";
    }
    return "?";
}

inline std::vector<std::string> ols_regressors(OlsForm form) {
    switch (form) {
        case OlsForm::linear2: return {"intercept", "hurst_x", "hurst_s"};
        case OlsForm::cubic_s2:
            return {"intercept", "hurst_x", "hurst_s", "hurst_s^2", "hurst_s^3"};
        case OlsForm::linear3: return {"intercept", "alpha_x", "hurst_x", "hurst_s"};
        case OlsForm::cubic_s3:
            return {"intercept", "alpha_x", "hurst_x", "hurst_s", "hurst_s^2",
                    "hurst_s^3"};
    }
    return {};
}

struct RegressionReport {
    OlsForm form = OlsForm::linear3;
    std::vector<std::string> names;
    std::vector<double> coefficients;
    std::vector<double> std_errors;
    double r2 = 0.0;
    double adjusted_r2 = 0.0;
    std::size_t n = 0;
};

namespace detail {

inline double regressor_value(const std::string& name, double alpha_x, double hurst_x,
                              double hurst_s) {
    if (name == "intercept") return 1.0;
    if (name == "alpha_x") return alpha_x;
    if (name == "hurst_x") return hurst_x;
    if (name == "hurst_s") return hurst_s;
    if (name == "hurst_s^2") return hurst_s * hurst_s;
    if (name == "hurst_s^3") return hurst_s * hurst_s * hurst_s;
    throw std::invalid_argument("unknown regressor: " + name);
}

inline std::size_t distinct_count(std::span<const SweepRecord> records, Variable v) {
    std::map<double, bool> seen;
    for (const auto& rec : records) seen[variable_value(rec, v)] = true;
    return seen.size();
}

}  // namespace detail

// OLS with intercept on the requested family. Throws std::invalid_argument
// on undersized/degenerate inputs and std::runtime_error when the design
// matrix is rank deficient.
inline RegressionReport ols(std::span<const SweepRecord> records, OlsForm form) {
    const auto names = ols_regressors(form);
    const std::size_t p = names.size();
    const std::size_t n = records.size();
    if (n < p + 10) {
        throw std::invalid_argument("ols: need at least p + 10 records");
    }
    const bool has_alpha = form == OlsForm::linear3 || form == OlsForm::cubic_s3;
    if (has_alpha && detail::distinct_count(records, Variable::alpha_x) < 2) {
        throw std::invalid_argument("ols: alpha_x needs >= 2 distinct values");
    }
    if (detail::distinct_count(records, Variable::hurst_x) < 2) {
        throw std::invalid_argument("ols: hurst_x needs >= 2 distinct values");
    }
    if (detail::distinct_count(records, Variable::hurst_s) < 2) {
        throw std::invalid_argument("ols: hurst_s needs >= 2 distinct values");
    }

    Eigen::MatrixXd design(n, p);
    Eigen::VectorXd response(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& rec = records[i];
        for (std::size_t j = 0; j < p; ++j) {
            design(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                detail::regressor_value(names[j], rec.alpha_x, rec.hurst_x, rec.hurst_s);
        }
        response(static_cast<Eigen::Index>(i)) = rec.hurst_r;
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < static_cast<Eigen::Index>(p)) {
        throw std::runtime_error("ols: rank-deficient design matrix");
    }
    const Eigen::VectorXd beta = qr.solve(response);

    const Eigen::VectorXd residuals = response - design * beta;
    const double rss = residuals.squaredNorm();
    const double mean_y = response.mean();
    const double tss = (response.array() - mean_y).square().sum();
    const double dof = static_cast<double>(n - p);
    const double sigma2 = rss / dof;
    const Eigen::MatrixXd xtx_inverse =
        (design.transpose() * design)
            .ldlt()
            .solve(Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(p),
                                             static_cast<Eigen::Index>(p)));

    RegressionReport report;
    report.form = form;
    report.names = names;
    report.n = n;
    report.coefficients.resize(p);
    report.std_errors.resize(p);
    for (std::size_t j = 0; j < p; ++j) {
        report.coefficients[j] = beta(static_cast<Eigen::Index>(j));
        report.std_errors[j] = std::sqrt(
            sigma2 * xtx_inverse(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)));
    }
    report.r2 = tss > 0.0 ? 1.0 - rss / tss : 1.0;
    report.adjusted_r2 =
        1.0 - (1.0 - report.r2) * (static_cast<double>(n) - 1.0) / dof;
    return report;
}

inline double predict(const RegressionReport& report, double alpha_x, double hurst_x,
                      double hurst_s) {
    double value = 0.0;
    for (std::size_t j = 0; j < report.names.size(); ++j) {
        value += report.coefficients[j] *
                 detail::regressor_value(report.names[j], alpha_x, hurst_x, hurst_s);
    }
    return value;
}

// Predicted change of H_r for a `delta` change of one variable, from a
// linear-form report.
inline double sensitivity(const RegressionReport& report, const std::string& variable,
                          double delta) {
    if (report.form != OlsForm::linear2 && report.form != OlsForm::linear3) {
        throw std::invalid_argument("sensitivity: report must come from a linear form");
    }
    for (std::size_t j = 0; j < report.names.size(); ++j) {
        if (report.names[j] == variable && variable != "intercept") {
            return report.coefficients[j] * delta;
        }
    }
    throw std::invalid_argument("sensitivity: variable not in model: " + variable);
}

}  // namespace mmf
