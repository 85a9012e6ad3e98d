#pragma once

// Turns a set of sweep records into the summary artifacts the lab is built
// around: per-alpha grids of mean estimated Hurst exponents, pooled Pearson
// correlations against each order-flow parameter, and the four regression
// forms with a sensitivity/prediction block. Writers emit a human-readable
// report, a JSON mirror with full-precision numbers, and one TSV per grid.

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mmf/analytics.hpp"
#include "mmf/version.hpp"

namespace mmf {

// One grid of cell summaries at a fixed alpha_x: rows are hurst_s values,
// columns are hurst_x values.
struct AlphaTable {
    double alpha_x = 0.0;
    std::vector<double> hurst_x_values;
    std::vector<double> hurst_s_values;
    std::vector<std::vector<CellStats>> cells;  // [row][col], row-major
};

struct CorrelationEntry {
    Variable variable = Variable::alpha_x;
    bool ok = false;
    PearsonResult result;
    std::string note;
};

struct RegressionEntry {
    OlsForm form = OlsForm::linear2;
    bool ok = false;
    RegressionReport report;
    std::string note;
};

struct SensitivityEntry {
    std::string variable;
    double delta = 1.0;
    double change = 0.0;
};

struct ReportBundle {
    std::size_t records_total = 0;
    std::size_t records_valid = 0;
    std::vector<AlphaTable> tables;
    std::string table_note;  // set when grids could not be built
    std::vector<CorrelationEntry> correlations;
    std::vector<RegressionEntry> regressions;
    // Slice of alpha_x used by the two-variable regression forms (the distinct
    // value closest to 1.3, ties toward the smaller value).
    double bivariate_alpha = 0.0;
    std::vector<SensitivityEntry> sensitivities;
    std::string sensitivity_source;  // form name the sensitivities came from
    std::optional<double> predicted_reference;  // at (1.3, 0.80, 0.75)
};

constexpr double kReferenceAlphaX = 1.3;
constexpr double kReferenceHurstX = 0.80;
constexpr double kReferenceHurstS = 0.75;

namespace detail {

inline std::vector<double> sorted_distinct(std::span<const SweepRecord> records,
                                           Variable v) {
    std::set<double> seen;
    for (const auto& rec : records) seen.insert(variable_value(rec, v));
    return {seen.begin(), seen.end()};
}

inline std::string format_fixed(double value, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
    return buf;
}

inline std::string format_compact(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", value);
    return buf;
}

}  // namespace detail

inline const RegressionEntry* find_regression(const ReportBundle& bundle, OlsForm form) {
    for (const auto& entry : bundle.regressions) {
        if (entry.form == form && entry.ok) return &entry;
    }
    return nullptr;
}

inline ReportBundle build_report(std::span<const SweepRecord> records) {
    ReportBundle bundle;
    bundle.records_total = records.size();

    std::vector<SweepRecord> valid;
    valid.reserve(records.size());
    for (const auto& rec : records) {
        if (rec.valid()) valid.push_back(rec);
    }
    bundle.records_valid = valid.size();
    if (valid.empty()) throw std::invalid_argument("report: no valid records");

    // Per-alpha grids. cell_stats refuses cells with fewer than two reps, in
    // which case the grids are skipped but the rest of the report still runs.
    const auto alphas = detail::sorted_distinct(valid, Variable::alpha_x);
    try {
        const auto stats = cell_stats(valid);
        for (double alpha : alphas) {
            AlphaTable table;
            table.alpha_x = alpha;
            std::set<double> xs;
            std::set<double> ss;
            for (const auto& cs : stats) {
                if (cs.alpha_x != alpha) continue;
                xs.insert(cs.hurst_x);
                ss.insert(cs.hurst_s);
            }
            table.hurst_x_values.assign(xs.begin(), xs.end());
            table.hurst_s_values.assign(ss.begin(), ss.end());
            table.cells.resize(table.hurst_s_values.size());
            for (auto& row : table.cells) row.resize(table.hurst_x_values.size());
            bool complete = true;
            for (std::size_t r = 0; r < table.hurst_s_values.size(); ++r) {
                for (std::size_t c = 0; c < table.hurst_x_values.size(); ++c) {
                    auto it = std::find_if(stats.begin(), stats.end(), [&](const CellStats& cs) {
                        return cs.alpha_x == alpha && cs.hurst_x == table.hurst_x_values[c] &&
                               cs.hurst_s == table.hurst_s_values[r];
                    });
                    if (it == stats.end()) {
                        complete = false;
                    } else {
                        table.cells[r][c] = *it;
                    }
                }
            }
            if (complete) bundle.tables.push_back(std::move(table));
        }
        if (bundle.tables.empty()) bundle.table_note = "no complete grid at any alpha_x";
    } catch (const std::invalid_argument& e) {
        bundle.table_note = e.what();
    }

    for (Variable v : {Variable::alpha_x, Variable::hurst_x, Variable::hurst_s}) {
        CorrelationEntry entry;
        entry.variable = v;
        try {
            entry.result = pearson(valid, v);
            entry.ok = true;
        } catch (const std::invalid_argument& e) {
            entry.note = e.what();
        }
        bundle.correlations.push_back(entry);
    }

    // Two-variable forms run on the alpha slice nearest the reference value;
    // three-variable forms pool everything.
    bundle.bivariate_alpha = alphas.front();
    for (double alpha : alphas) {
        if (std::abs(alpha - kReferenceAlphaX) <
            std::abs(bundle.bivariate_alpha - kReferenceAlphaX)) {
            bundle.bivariate_alpha = alpha;
        }
    }
    std::vector<SweepRecord> slice;
    for (const auto& rec : valid) {
        if (rec.alpha_x == bundle.bivariate_alpha) slice.push_back(rec);
    }

    for (OlsForm form : {OlsForm::linear2, OlsForm::cubic_s2, OlsForm::linear3,
                         OlsForm::cubic_s3}) {
        RegressionEntry entry;
        entry.form = form;
        const bool bivariate = form == OlsForm::linear2 || form == OlsForm::cubic_s2;
        try {
            entry.report = ols(bivariate ? std::span<const SweepRecord>(slice)
                                         : std::span<const SweepRecord>(valid),
                               form);
            entry.ok = true;
        } catch (const std::exception& e) {
            entry.note = e.what();
        }
        bundle.regressions.push_back(std::move(entry));
    }

    const RegressionEntry* linear = find_regression(bundle, OlsForm::linear3);
    if (linear == nullptr) linear = find_regression(bundle, OlsForm::linear2);
    if (linear != nullptr) {
        bundle.sensitivity_source = ols_form_name(linear->form);
        for (const auto& name : linear->report.names) {
            if (name == "intercept") continue;
            SensitivityEntry entry;
            entry.variable = name;
            entry.delta = 1.0;
            entry.change = sensitivity(linear->report, name, entry.delta);
            bundle.sensitivities.push_back(std::move(entry));
        }
        bundle.predicted_reference =
            predict(linear->report, kReferenceAlphaX, kReferenceHurstX, kReferenceHurstS);
    }

    return bundle;
}

inline void write_report_text(std::ostream& os, const ReportBundle& bundle) {
    os << "order-flow sweep report (tool " << kToolVersion << ")\n";
    os << "records: " << bundle.records_total << " total, " << bundle.records_valid
       << " valid, " << (bundle.records_total - bundle.records_valid) << " excluded\n";

    os << "\n== mean estimated Hurst exponent of returns, mean(stddev x 100) ==\n";
    if (bundle.tables.empty()) {
        os << "(grids unavailable: " << bundle.table_note << ")\n";
    }
    for (const auto& table : bundle.tables) {
        os << "alpha_x = " << detail::format_fixed(table.alpha_x, 2)
           << "  (rows: hurst_s, columns: hurst_x)\n";
        os << "        ";
        for (double hx : table.hurst_x_values) {
            os << detail::format_fixed(hx, 2) << "     ";
        }
        os << '\n';
        for (std::size_t r = 0; r < table.hurst_s_values.size(); ++r) {
            os << detail::format_fixed(table.hurst_s_values[r], 2) << "    ";
            for (const auto& cs : table.cells[r]) {
                char buf[32];
                std::snprintf(buf, sizeof(buf), "%-9s", format_cell(cs.mean, cs.stddev).c_str());
                os << buf;
            }
            os << '\n';
        }
        os << '\n';
    }

    os << "== Pearson correlations with the estimated Hurst exponent (pooled) ==\n";
    for (const auto& entry : bundle.correlations) {
        os << "rho(H_r, " << variable_name(entry.variable) << ") = ";
        if (entry.ok) {
            os << detail::format_fixed(entry.result.rho, 4)
               << "  (p = " << detail::format_compact(entry.result.p_value)
               << ", n = " << entry.result.n << ")\n";
        } else {
            os << "n/a (" << entry.note << ")\n";
        }
    }

    os << "\n== regressions of the estimated Hurst exponent ==\n";
    for (const auto& entry : bundle.regressions) {
        os << "[" << ols_form_name(entry.form) << "]";
        const bool bivariate =
            entry.form == OlsForm::linear2 || entry.form == OlsForm::cubic_s2;
        if (bivariate) {
            os << " alpha_x slice = " << detail::format_fixed(bundle.bivariate_alpha, 2);
        }
        os << '\n';
        if (!entry.ok) {
            os << "  n/a (" << entry.note << ")\n";
            continue;
        }
        for (std::size_t j = 0; j < entry.report.names.size(); ++j) {
            char buf[96];
            std::snprintf(buf, sizeof(buf), "  %-10s %10.4f  (se %.4f)\n",
                          entry.report.names[j].c_str(), entry.report.coefficients[j],
                          entry.report.std_errors[j]);
            os << buf;
        }
        os << "  adjusted R^2 = " << detail::format_fixed(entry.report.adjusted_r2, 4)
           << ", R^2 = " << detail::format_fixed(entry.report.r2, 4)
           << ", n = " << entry.report.n << '\n';
    }

    if (!bundle.sensitivities.empty()) {
        os << "\n== sensitivities (" << bundle.sensitivity_source << ", unit deltas) ==\n";
        for (const auto& s : bundle.sensitivities) {
            os << "delta H_r per +" << detail::format_compact(s.delta) << " " << s.variable
               << " = " << detail::format_fixed(s.change, 4) << '\n';
        }
    }
    if (bundle.predicted_reference.has_value()) {
        os << "\npredicted H_r at (alpha_x = " << detail::format_fixed(kReferenceAlphaX, 2)
           << ", hurst_x = " << detail::format_fixed(kReferenceHurstX, 2)
           << ", hurst_s = " << detail::format_fixed(kReferenceHurstS, 2)
           << ") = " << detail::format_fixed(*bundle.predicted_reference, 2) << '\n';
    }
}

inline nlohmann::json report_to_json(const ReportBundle& bundle) {
    nlohmann::json j;
    j["tool_version"] = kToolVersion;
    j["records_total"] = bundle.records_total;
    j["records_valid"] = bundle.records_valid;

    j["tables"] = nlohmann::json::array();
    for (const auto& table : bundle.tables) {
        nlohmann::json jt;
        jt["alpha_x"] = table.alpha_x;
        jt["hurst_x_values"] = table.hurst_x_values;
        jt["hurst_s_values"] = table.hurst_s_values;
        jt["cells"] = nlohmann::json::array();
        for (const auto& row : table.cells) {
            nlohmann::json jrow = nlohmann::json::array();
            for (const auto& cs : row) {
                jrow.push_back({{"mean", cs.mean},
                                {"stddev", cs.stddev},
                                {"reps", cs.reps},
                                {"text", format_cell(cs.mean, cs.stddev)}});
            }
            jt["cells"].push_back(jrow);
        }
        j["tables"].push_back(jt);
    }
    if (!bundle.table_note.empty()) j["table_note"] = bundle.table_note;

    j["correlations"] = nlohmann::json::array();
    for (const auto& entry : bundle.correlations) {
        nlohmann::json jc;
        jc["variable"] = variable_name(entry.variable);
        jc["ok"] = entry.ok;
        if (entry.ok) {
            jc["rho"] = entry.result.rho;
            jc["p_value"] = entry.result.p_value;
            jc["n"] = entry.result.n;
        } else {
            jc["note"] = entry.note;
        }
        j["correlations"].push_back(jc);
    }

    j["bivariate_alpha"] = bundle.bivariate_alpha;
    j["regressions"] = nlohmann::json::array();
    for (const auto& entry : bundle.regressions) {
        nlohmann::json jr;
        jr["form"] = ols_form_name(entry.form);
        jr["ok"] = entry.ok;
        if (entry.ok) {
            jr["names"] = entry.report.names;
            jr["coefficients"] = entry.report.coefficients;
            jr["std_errors"] = entry.report.std_errors;
            jr["r2"] = entry.report.r2;
            jr["adjusted_r2"] = entry.report.adjusted_r2;
            jr["n"] = entry.report.n;
        } else {
            jr["note"] = entry.note;
        }
        j["regressions"].push_back(jr);
    }

    j["sensitivities"] = nlohmann::json::array();
    for (const auto& s : bundle.sensitivities) {
        j["sensitivities"].push_back(
            {{"variable", s.variable}, {"delta", s.delta}, {"change", s.change}});
    }
    if (!bundle.sensitivity_source.empty()) {
        j["sensitivity_source"] = bundle.sensitivity_source;
    }
    if (bundle.predicted_reference.has_value()) {
        j["predicted_reference"] = {{"alpha_x", kReferenceAlphaX},
                                    {"hurst_x", kReferenceHurstX},
                                    {"hurst_s", kReferenceHurstS},
                                    {"value", *bundle.predicted_reference}};
    }
    return j;
}

inline void write_alpha_table_tsv(std::ostream& os, const AlphaTable& table) {
    os << "hurst_s\\hurst_x";
    for (double hx : table.hurst_x_values) {
        os << '\t' << detail::format_fixed(hx, 2);
    }
    os << '\n';
    for (std::size_t r = 0; r < table.hurst_s_values.size(); ++r) {
        os << detail::format_fixed(table.hurst_s_values[r], 2);
        for (const auto& cs : table.cells[r]) {
            os << '\t' << format_cell(cs.mean, cs.stddev);
        }
        os << '\n';
    }
}

// Writes report.txt, report.json, and one table_alpha_<value>.tsv per grid
// into `dir`; returns the paths written.
inline std::vector<std::string> write_report_files(const std::string& dir,
                                                   const ReportBundle& bundle) {
    std::vector<std::string> written;
    const std::string prefix = dir.empty() ? std::string() : dir + "/";

    {
        const std::string path = prefix + "report.txt";
        std::ofstream os(path);
        if (!os) throw std::runtime_error("cannot open for writing: " + path);
        write_report_text(os, bundle);
        written.push_back(path);
    }
    {
        const std::string path = prefix + "report.json";
        std::ofstream os(path);
        if (!os) throw std::runtime_error("cannot open for writing: " + path);
        os << report_to_json(bundle).dump(2) << '\n';
        written.push_back(path);
    }
    for (const auto& table : bundle.tables) {
        const std::string path =
            prefix + "table_alpha_" + detail::format_fixed(table.alpha_x, 2) + ".tsv";
        std::ofstream os(path);
        if (!os) throw std::runtime_error("cannot open for writing: " + path);
        write_alpha_table_tsv(os, table);
        written.push_back(path);
    }
    return written;
}

}  // namespace mmf
