#pragma once

// Parameter-sweep orchestration: deterministic child seeds per (cell, rep),
// a bounded worker pool, and canonical-order persistence of the per-run
// records so the output is byte-identical for any worker count.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "mmf/analytics.hpp"
#include "mmf/dfa.hpp"
#include "mmf/model.hpp"
#include "mmf/rng.hpp"
#include "mmf/version.hpp"

namespace mmf {

struct SweepConfig {
    std::vector<double> alpha_grid = {1.3};
    std::vector<double> hurst_x_grid = {0.5, 0.7, 0.9};
    std::vector<double> hurst_s_grid = {0.5, 0.7, 0.9};
    int reps = 10;
    std::int64_t n_events = 50000;
    std::int64_t keep_returns = 0;  // 0 = derive from n_events
    std::uint64_t master_seed = 20260814;
    int workers = 1;
    std::string output_dir = ".";
    int iaaft_max_iter = 100;
    std::int64_t fit_min_scale = kDfaDefaultMinScale;
    std::int64_t fit_max_scale_exclusive = kDfaDefaultMaxScaleExclusive;

    std::size_t cell_count() const {
        return alpha_grid.size() * hurst_x_grid.size() * hurst_s_grid.size();
    }
    std::size_t run_count() const { return cell_count() * static_cast<std::size_t>(reps); }
};

// Reduced profile for quick desk runs.
inline SweepConfig desk_preset() {
    SweepConfig config;
    config.alpha_grid = {1.3};
    config.hurst_x_grid = {0.5, 0.7, 0.9};
    config.hurst_s_grid = {0.5, 0.7, 0.9};
    config.reps = 10;
    config.n_events = 50000;
    return config;
}

// The full campaign: alpha_x 1.00..1.65 and H_x, H_s 0.50..0.95, 100 reps of
// 2e5 events each.
inline SweepConfig paper_preset() {
    SweepConfig config;
    config.alpha_grid.clear();
    for (int i = 0; i <= 13; ++i) config.alpha_grid.push_back(1.00 + 0.05 * i);
    config.hurst_x_grid.clear();
    config.hurst_s_grid.clear();
    for (int i = 0; i <= 9; ++i) {
        config.hurst_x_grid.push_back(0.50 + 0.05 * i);
        config.hurst_s_grid.push_back(0.50 + 0.05 * i);
    }
    config.reps = 100;
    config.n_events = 200000;
    config.keep_returns = 40000;
    return config;
}

inline void validate(const SweepConfig& config) {
    if (config.alpha_grid.empty() || config.hurst_x_grid.empty() ||
        config.hurst_s_grid.empty()) {
        throw std::invalid_argument("SweepConfig: all grids must be nonempty");
    }
    for (const double a : config.alpha_grid) {
        if (!(a > 0.0)) throw std::invalid_argument("SweepConfig: alpha_x must be > 0");
    }
    for (const double h : config.hurst_x_grid) {
        if (!(h >= 0.5) || !(h < 1.0)) {
            throw std::invalid_argument("SweepConfig: hurst_x values must be in [0.5, 1)");
        }
    }
    for (const double h : config.hurst_s_grid) {
        if (!(h >= 0.5) || !(h < 1.0)) {
            throw std::invalid_argument("SweepConfig: hurst_s values must be in [0.5, 1)");
        }
    }
    if (config.reps < 1) throw std::invalid_argument("SweepConfig: reps must be >= 1");
    if (config.n_events < 4) {
        throw std::invalid_argument("SweepConfig: n_events must be >= 4");
    }
    if (config.keep_returns < 0) {
        throw std::invalid_argument("SweepConfig: keep_returns must be >= 0");
    }
    if (config.workers < 1) {
        throw std::invalid_argument("SweepConfig: workers must be >= 1");
    }
    if (config.iaaft_max_iter < 1) {
        throw std::invalid_argument("SweepConfig: iaaft_max_iter must be >= 1");
    }
    if (config.fit_min_scale < 4 ||
        config.fit_max_scale_exclusive <= config.fit_min_scale) {
        throw std::invalid_argument("SweepConfig: invalid DFA fit range");
    }
}

// Full-precision decimal text; round-trips doubles exactly.
inline std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

namespace detail {

inline std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace detail

// Digest of everything that determines the records (runtime fields aside).
inline std::string config_hash(const SweepConfig& config) {
    std::ostringstream os;
    os << "alpha:";
    for (const double a : config.alpha_grid) os << format_double(a) << ',';
    os << ";hx:";
    for (const double h : config.hurst_x_grid) os << format_double(h) << ',';
    os << ";hs:";
    for (const double h : config.hurst_s_grid) os << format_double(h) << ',';
    os << ";reps:" << config.reps << ";events:" << config.n_events
       << ";keep:" << config.keep_returns << ";seed:" << config.master_seed
       << ";iaaft:" << config.iaaft_max_iter << ";fit:" << config.fit_min_scale << '-'
       << config.fit_max_scale_exclusive;
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(detail::fnv1a(os.str())));
    return buf;
}

namespace detail {

inline std::string trim(const std::string& text) {
    const auto begin = text.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return {};
    const auto end = text.find_last_not_of(" \t\r");
    return text.substr(begin, end - begin + 1);
}

inline std::vector<double> parse_double_list(const std::string& text,
                                             const std::string& key) {
    std::vector<double> values;
    std::istringstream is(text);
    std::string item;
    while (std::getline(is, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        std::size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != item.size()) {
            throw std::invalid_argument("config: bad value for " + key + ": " + item);
        }
        values.push_back(v);
    }
    if (values.empty()) throw std::invalid_argument("config: empty list for " + key);
    return values;
}

template <typename T>
T parse_integer(const std::string& text, const std::string& key) {
    std::size_t pos = 0;
    long long v = 0;
    try {
        v = std::stoll(text, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != text.size()) {
        throw std::invalid_argument("config: bad value for " + key + ": " + text);
    }
    return static_cast<T>(v);
}

}  // namespace detail

// key = value configuration files; '#' starts a comment. `preset=desk|paper`
// replaces the whole config and must come before any other key.
inline SweepConfig load_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config: " + path);
    SweepConfig config;
    bool saw_key = false;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                        ": expected key = value");
        }
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key == "preset") {
            if (saw_key) {
                throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                            ": preset must come first");
            }
            if (value == "desk") {
                config = desk_preset();
            } else if (value == "paper") {
                config = paper_preset();
            } else {
                throw std::invalid_argument("config: unknown preset: " + value);
            }
        } else if (key == "alpha_grid") {
            config.alpha_grid = detail::parse_double_list(value, key);
        } else if (key == "hurst_x_grid") {
            config.hurst_x_grid = detail::parse_double_list(value, key);
        } else if (key == "hurst_s_grid") {
            config.hurst_s_grid = detail::parse_double_list(value, key);
        } else if (key == "reps") {
            config.reps = detail::parse_integer<int>(value, key);
        } else if (key == "n_events") {
            config.n_events = detail::parse_integer<std::int64_t>(value, key);
        } else if (key == "keep_returns") {
            config.keep_returns = detail::parse_integer<std::int64_t>(value, key);
        } else if (key == "master_seed") {
            config.master_seed = detail::parse_integer<std::uint64_t>(value, key);
        } else if (key == "workers") {
            config.workers = detail::parse_integer<int>(value, key);
        } else if (key == "iaaft_max_iter") {
            config.iaaft_max_iter = detail::parse_integer<int>(value, key);
        } else if (key == "fit_min_scale") {
            config.fit_min_scale = detail::parse_integer<std::int64_t>(value, key);
        } else if (key == "fit_max_scale_exclusive") {
            config.fit_max_scale_exclusive = detail::parse_integer<std::int64_t>(value, key);
        } else {
            throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                        ": unknown key: " + key);
        }
        saw_key = true;
    }
    return config;
}

struct SweepCell {
    std::size_t index = 0;
    double alpha_x = 0.0;
    double hurst_x = 0.0;
    double hurst_s = 0.0;
};

// Cells in canonical order: alpha_x outermost, hurst_s fastest.
inline std::vector<SweepCell> enumerate_cells(const SweepConfig& config) {
    std::vector<SweepCell> cells;
    cells.reserve(config.cell_count());
    std::size_t index = 0;
    for (const double alpha : config.alpha_grid) {
        for (const double hx : config.hurst_x_grid) {
            for (const double hs : config.hurst_s_grid) {
                cells.push_back({index++, alpha, hx, hs});
            }
        }
    }
    return cells;
}

// One (cell, rep) unit of work: simulate, then estimate H_r by DFA over the
// configured fit window.
inline SweepRecord run_sweep_task(const SweepConfig& config, const SweepCell& cell,
                                  int rep) {
    const auto start = std::chrono::steady_clock::now();

    ModelParams params;
    params.alpha_x = cell.alpha_x;
    params.hurst_x = cell.hurst_x;
    params.hurst_s = cell.hurst_s;
    params.n_events = config.n_events;
    params.keep_returns = config.keep_returns;
    params.iaaft_max_iter = config.iaaft_max_iter;
    params.seed = derive_seed(config.master_seed, cell.index,
                              static_cast<std::uint64_t>(rep));

    SweepRecord record;
    record.alpha_x = cell.alpha_x;
    record.hurst_x = cell.hurst_x;
    record.hurst_s = cell.hurst_s;
    record.rep = rep;
    record.seed = params.seed;

    const RunResult result = run(params);
    if (result.status == RunStatus::ok) {
        try {
            const DfaResult fit =
                dfa_hurst(result.returns.values, config.fit_min_scale,
                          config.fit_max_scale_exclusive);
            record.hurst_r = fit.hurst;
            record.r2 = fit.r2;
            record.status = "ok";
        } catch (const std::invalid_argument&) {
            record.status = "dfa-failed";
        }
    } else {
        record.status = "degenerate";
    }

    const auto stop = std::chrono::steady_clock::now();
    record.runtime_ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(stop - start).count();
    return record;
}

// Executes the sweep on `config.workers` threads. Tasks are claimed from a
// shared counter and results land in a slot per task, so the record order is
// canonical regardless of scheduling. The optional progress callback fires
// after each completed run and may be invoked concurrently from workers.
inline std::vector<SweepRecord> run_sweep(
    const SweepConfig& config,
    const std::function<void(std::size_t, std::size_t)>& progress = {}) {
    validate(config);
    const auto cells = enumerate_cells(config);
    const std::size_t total = config.run_count();
    std::vector<SweepRecord> records(total);

    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> done{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t task = next.fetch_add(1);
            if (task >= total) break;
            const std::size_t cell_index = task / static_cast<std::size_t>(config.reps);
            const int rep = static_cast<int>(task % static_cast<std::size_t>(config.reps));
            records[task] = run_sweep_task(config, cells[cell_index], rep);
            const std::size_t completed = done.fetch_add(1) + 1;
            if (progress) progress(completed, total);
        }
    };

    if (config.workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(config.workers));
        for (int w = 0; w < config.workers; ++w) pool.emplace_back(worker);
        for (auto& thread : pool) thread.join();
    }
    return records;
}

inline constexpr const char* kRecordHeader =
    "alpha_x,hurst_x,hurst_s,rep,seed,hurst_r,r2,status,runtime_ms";

inline void write_records(std::ostream& os, std::span<const SweepRecord> records) {
    os << kRecordHeader << '\n';
    for (const auto& rec : records) {
        os << format_double(rec.alpha_x) << ',' << format_double(rec.hurst_x) << ','
           << format_double(rec.hurst_s) << ',' << rec.rep << ',' << rec.seed << ','
           << format_double(rec.hurst_r) << ',' << format_double(rec.r2) << ','
           << rec.status << ',' << rec.runtime_ms << '\n';
    }
}

inline void write_records(const std::string& path, std::span<const SweepRecord> records) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    write_records(os, records);
    if (!os) throw std::runtime_error("write failed: " + path);
}

inline std::vector<SweepRecord> read_records(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) {
        throw std::runtime_error("records: empty file");
    }
    if (line != kRecordHeader) {
        throw std::runtime_error("records: unexpected header: " + line);
    }
    std::vector<SweepRecord> records;
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::size_t pos = 0;
        while (true) {
            const std::size_t comma = line.find(',', pos);
            if (comma == std::string::npos) {
                fields.push_back(line.substr(pos));
                break;
            }
            fields.push_back(line.substr(pos, comma - pos));
            pos = comma + 1;
        }
        if (fields.size() != 9) {
            throw std::runtime_error("records: bad field count at line " +
                                     std::to_string(line_no));
        }
        SweepRecord rec;
        rec.alpha_x = std::stod(fields[0]);
        rec.hurst_x = std::stod(fields[1]);
        rec.hurst_s = std::stod(fields[2]);
        rec.rep = std::stoi(fields[3]);
        rec.seed = std::stoull(fields[4]);
        rec.hurst_r = std::stod(fields[5]);
        rec.r2 = std::stod(fields[6]);
        rec.status = fields[7];
        rec.runtime_ms = std::stoll(fields[8]);
        records.push_back(rec);
    }
    return records;
}

inline std::vector<SweepRecord> read_records(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open: " + path);
    return read_records(is);
}

}  // namespace mmf
