// mmflab: command-line front end for the order-driven market laboratory.
//
//   simulate   one model run -> return series (+ optional diagnostics JSON)
//   dfa        detrended fluctuation analysis of a series file
//   sweep      parameter-grid campaign -> records.csv + manifest.json
//   report     records.csv -> report.txt / report.json / per-alpha TSV grids
//   selftest   built-in invariant checks
//
// MMFLAB_OUTPUT_DIR, when set, is the default directory for output files.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "mmf/dfa.hpp"
#include "mmf/manifest.hpp"
#include "mmf/model.hpp"
#include "mmf/report.hpp"
#include "mmf/selftest.hpp"
#include "mmf/series_io.hpp"
#include "mmf/sweep.hpp"
#include "mmf/version.hpp"

namespace {

std::string default_output_dir() {
    const char* env = std::getenv("MMFLAB_OUTPUT_DIR");
    return (env != nullptr && *env != '\0') ? env : ".";
}

std::string join_path(const std::string& dir, const std::string& name) {
    if (dir.empty() || dir == ".") return name;
    return dir + "/" + name;
}

void ensure_dir(const std::string& dir) {
    if (dir.empty() || dir == ".") return;
    std::filesystem::create_directories(dir);
}

nlohmann::json diagnostics_json(const mmf::RunResult& result) {
    const auto& d = result.diagnostics;
    return {
        {"status", result.status == mmf::RunStatus::ok ? "ok" : "degenerate"},
        {"events_simulated", result.returns.events_simulated},
        {"returns_kept", result.returns.kept},
        {"orders_placed", d.orders_placed},
        {"trades", d.trades},
        {"orders_cancelled", d.orders_cancelled},
        {"orders_resting_final", d.orders_resting_final},
        {"mean_book_depth", d.mean_book_depth},
        {"returns_recorded", d.returns_recorded},
        {"events_without_both_quotes", d.events_without_both_quotes},
        {"empty_book_events_post_transient", d.empty_book_events_post_transient},
        {"post_transient_events", d.post_transient_events},
        {"transient_rule", d.transient_rule},
        {"iaaft",
         {{"iterations", d.iaaft.iterations},
          {"converged", d.iaaft.converged},
          {"spectrum_rms", d.iaaft.spectrum_rms}}},
    };
}

int cmd_simulate(const mmf::ModelParams& params, const std::string& out_path,
                 const std::string& diagnostics_path) {
    const auto result = mmf::run(params);
    mmf::write_series(out_path, result.returns.values);
    if (!diagnostics_path.empty()) {
        std::ofstream os(diagnostics_path);
        if (!os) throw std::runtime_error("cannot open for writing: " + diagnostics_path);
        os << diagnostics_json(result).dump(2) << '\n';
    }
    std::cout << "simulated " << result.returns.events_simulated << " events, kept "
              << result.returns.kept << " returns -> " << out_path << '\n';
    if (result.status == mmf::RunStatus::degenerate) {
        std::cout << "warning: run is degenerate (return window not filled or book "
                     "emptied too often)\n";
    }
    return 0;
}

int cmd_dfa(const std::string& in_path, std::int64_t min_scale,
            std::int64_t max_scale_exclusive, bool forward_only,
            const std::string& out_path) {
    const auto series = mmf::read_series(in_path);
    const auto scales =
        mmf::default_scales(series.size(), min_scale, max_scale_exclusive);
    mmf::DfaOptions options;
    options.both_ends = !forward_only;
    auto result = mmf::dfa(series, scales, options);
    result = mmf::fit_hurst(result, min_scale, max_scale_exclusive);
    if (!out_path.empty()) {
        std::ofstream os(out_path);
        if (!os) throw std::runtime_error("cannot open for writing: " + out_path);
        os << "scale\tfluctuation\n";
        for (std::size_t i = 0; i < result.scales.size(); ++i) {
            os << result.scales[i] << '\t' << mmf::format_double(result.fluctuations[i])
               << '\n';
        }
    }
    char buf[128];
    std::snprintf(buf, sizeof(buf), "hurst = %.4f, fit r2 = %.4f, scales = %zu\n",
                  result.hurst, result.r2, result.scales.size());
    std::cout << buf;
    return 0;
}

int cmd_sweep(const mmf::SweepConfig& config, bool quiet) {
    ensure_dir(config.output_dir);
    std::cerr << "sweep: " << config.cell_count() << " cells x " << config.reps
              << " reps = " << config.run_count() << " runs, config "
              << mmf::config_hash(config) << '\n';

    auto progress = [&](std::size_t done, std::size_t total) {
        if (quiet) return;
        std::fprintf(stderr, "\rrun %zu/%zu", done, total);
        if (done == total) std::fprintf(stderr, "\n");
        std::fflush(stderr);
    };
    const auto records = mmf::run_sweep(config, progress);

    const std::string records_path = join_path(config.output_dir, "records.csv");
    const std::string manifest_path = join_path(config.output_dir, "manifest.json");
    mmf::write_records(records_path, records);
    mmf::write_manifest(manifest_path, config, records);

    std::size_t ok = 0;
    for (const auto& rec : records) {
        if (rec.valid()) ++ok;
    }
    std::cout << "wrote " << records.size() << " records (" << ok << " ok) -> "
              << records_path << '\n';
    std::cout << "wrote manifest -> " << manifest_path << '\n';
    return 0;
}

int cmd_report(const std::string& records_path, const std::string& out_dir) {
    const auto records = mmf::read_records(records_path);
    const auto bundle = mmf::build_report(records);
    ensure_dir(out_dir);
    const auto written = mmf::write_report_files(out_dir, bundle);
    mmf::write_report_text(std::cout, bundle);
    for (const auto& path : written) std::cout << "wrote " << path << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"order-driven market laboratory"};
    app.set_version_flag("--version", std::string(mmf::kToolVersion));
    app.require_subcommand(1);

    // --- simulate ---
    auto* simulate = app.add_subcommand(
        "simulate", "run the order-driven model once and write the return series");
    mmf::ModelParams params;
    double transient_fraction = -1.0;
    std::string sim_out = join_path(default_output_dir(), "returns.txt");
    std::string diagnostics_path;
    simulate->add_option("--alpha-x", params.alpha_x,
                         "tail index of the relative-price distribution");
    simulate->add_option("--hurst-x", params.hurst_x, "Hurst index of relative prices");
    simulate->add_option("--hurst-s", params.hurst_s, "Hurst index of order directions");
    simulate->add_option("--events", params.n_events, "number of order-placement events");
    simulate->add_option("--keep", params.keep_returns,
                         "returns kept from the end (0 = events / 5)");
    simulate->add_option("--transient-fraction", transient_fraction,
                         "drop this fraction of recorded returns from the front "
                         "instead of the keep-last rule");
    simulate->add_option("--seed", params.seed, "run seed");
    simulate->add_option("--price-scale", params.price_scale,
                         "log-price units per unit relative-price draw");
    simulate->add_option("--iaaft-max-iter", params.iaaft_max_iter,
                         "surrogate refinement iteration cap");
    simulate->add_option("--out", sim_out, "output series file (one value per line)");
    simulate->add_option("--diagnostics", diagnostics_path,
                         "write run diagnostics to this JSON file");

    // --- dfa ---
    auto* dfa_cmd = app.add_subcommand(
        "dfa", "estimate the Hurst exponent of a series file by order-1 DFA");
    std::string dfa_in;
    std::string dfa_out;
    std::int64_t min_scale = mmf::kDfaDefaultMinScale;
    std::int64_t max_scale = mmf::kDfaDefaultMaxScaleExclusive;
    bool forward_only = false;
    dfa_cmd->add_option("--in", dfa_in, "input series file, one value per line")
        ->required();
    dfa_cmd->add_option("--min-scale", min_scale, "smallest window length in the fit");
    dfa_cmd->add_option("--max-scale", max_scale,
                        "exclusive upper window length in the fit");
    dfa_cmd->add_flag("--forward-only", forward_only,
                      "segment from the front only instead of both ends");
    dfa_cmd->add_option("--out", dfa_out, "write the scale/fluctuation table here");

    // --- sweep ---
    auto* sweep_cmd = app.add_subcommand(
        "sweep", "run a parameter-grid campaign and write records + manifest");
    std::string preset;
    std::string config_path;
    std::vector<double> alpha_grid;
    std::vector<double> hx_grid;
    std::vector<double> hs_grid;
    std::optional<int> reps;
    std::optional<std::int64_t> sweep_events;
    std::optional<std::int64_t> sweep_keep;
    std::optional<std::uint64_t> master_seed;
    std::optional<int> workers;
    std::optional<int> sweep_iaaft;
    std::string out_dir = default_output_dir();
    bool quiet = false;
    sweep_cmd->add_option("--preset", preset, "desk (3x3 grid, quick) or paper (full)")
        ->check(CLI::IsMember({"desk", "paper"}));
    sweep_cmd->add_option("--config", config_path, "key = value config file");
    sweep_cmd->add_option("--alpha-grid", alpha_grid, "alpha_x values")->delimiter(',');
    sweep_cmd->add_option("--hurst-x-grid", hx_grid, "hurst_x values")->delimiter(',');
    sweep_cmd->add_option("--hurst-s-grid", hs_grid, "hurst_s values")->delimiter(',');
    sweep_cmd->add_option("--reps", reps, "independent runs per cell");
    sweep_cmd->add_option("--events", sweep_events, "events per run");
    sweep_cmd->add_option("--keep", sweep_keep, "returns kept per run (0 = events / 5)");
    sweep_cmd->add_option("--seed", master_seed, "master seed for the whole campaign");
    sweep_cmd->add_option("--workers", workers, "worker threads");
    sweep_cmd->add_option("--iaaft-max-iter", sweep_iaaft,
                          "surrogate refinement iteration cap");
    sweep_cmd->add_option("--out-dir", out_dir, "directory for records + manifest");
    sweep_cmd->add_flag("--quiet", quiet, "suppress per-run progress");

    // --- report ---
    auto* report_cmd = app.add_subcommand(
        "report", "summarize sweep records: grids, correlations, regressions");
    std::string records_path;
    std::string report_dir = default_output_dir();
    report_cmd->add_option("--records", records_path, "records.csv from a sweep")
        ->required();
    report_cmd->add_option("--out-dir", report_dir, "directory for report files");

    // --- selftest ---
    auto* selftest_cmd =
        app.add_subcommand("selftest", "run the built-in invariant checks");

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) {
            if (transient_fraction >= 0.0) params.transient_fraction = transient_fraction;
            return cmd_simulate(params, sim_out, diagnostics_path);
        }
        if (dfa_cmd->parsed()) {
            return cmd_dfa(dfa_in, min_scale, max_scale, forward_only, dfa_out);
        }
        if (sweep_cmd->parsed()) {
            mmf::SweepConfig config;
            if (!config_path.empty()) {
                config = mmf::load_config_file(config_path);
            } else if (preset == "paper") {
                config = mmf::paper_preset();
            } else if (preset == "desk" || preset.empty()) {
                config = mmf::desk_preset();
            }
            if (!config_path.empty() && !preset.empty()) {
                throw std::invalid_argument("--preset and --config are exclusive");
            }
            if (!alpha_grid.empty()) config.alpha_grid = alpha_grid;
            if (!hx_grid.empty()) config.hurst_x_grid = hx_grid;
            if (!hs_grid.empty()) config.hurst_s_grid = hs_grid;
            if (reps) config.reps = *reps;
            if (sweep_events) config.n_events = *sweep_events;
            if (sweep_keep) config.keep_returns = *sweep_keep;
            if (master_seed) config.master_seed = *master_seed;
            if (workers) config.workers = *workers;
            if (sweep_iaaft) config.iaaft_max_iter = *sweep_iaaft;
            config.output_dir = out_dir;
            return cmd_sweep(config, quiet);
        }
        if (report_cmd->parsed()) {
            return cmd_report(records_path, report_dir);
        }
        if (selftest_cmd->parsed()) {
            return mmf::run_selftest(std::cout) ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
