#pragma once

// Run manifest: a machine-readable description of exactly which runs a sweep
// performed. Child seeds are a pure function of (master seed, cell, rep), so
// re-running a manifest reproduces byte-identical records. No wall-clock
// fields are stored; the manifest for a given config is itself reproducible.

#include <json.hpp>

#include <fstream>
#include <span>
#include <stdexcept>
#include <string>

#include "mmf/sweep.hpp"
#include "mmf/version.hpp"

namespace mmf {

inline nlohmann::json build_manifest(const SweepConfig& config,
                                     std::span<const SweepRecord> records) {
    nlohmann::json manifest;
    manifest["tool_version"] = kToolVersion;
    manifest["config_hash"] = config_hash(config);
    manifest["config"] = {
        {"alpha_grid", config.alpha_grid},
        {"hurst_x_grid", config.hurst_x_grid},
        {"hurst_s_grid", config.hurst_s_grid},
        {"reps", config.reps},
        {"n_events", config.n_events},
        {"keep_returns", config.keep_returns},
        {"master_seed", config.master_seed},
        {"iaaft_max_iter", config.iaaft_max_iter},
        {"fit_min_scale", config.fit_min_scale},
        {"fit_max_scale_exclusive", config.fit_max_scale_exclusive},
    };
    manifest["cell_order"] = "alpha_x outermost, then hurst_x, hurst_s fastest";

    nlohmann::json runs = nlohmann::json::array();
    const auto reps = static_cast<std::size_t>(config.reps);
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& rec = records[i];
        runs.push_back({
            {"cell", i / reps},
            {"rep", rec.rep},
            {"seed", rec.seed},
            {"status", rec.status},
        });
    }
    manifest["runs"] = runs;
    return manifest;
}

inline void write_manifest(const std::string& path, const SweepConfig& config,
                           std::span<const SweepRecord> records) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    os << build_manifest(config, records).dump(2) << '\n';
}

}  // namespace mmf
