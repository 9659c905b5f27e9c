#pragma once

// Command-line front end: budget | simulate | rate | sweep | report.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "eprsim/budget.hpp"
#include "eprsim/io/config_file.hpp"
#include "eprsim/io/json.hpp"
#include "eprsim/io/report.hpp"
#include "eprsim/monte_carlo.hpp"
#include "eprsim/rate_budget.hpp"
#include "eprsim/sweep.hpp"

namespace eprsim::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitRuntime = 2;

inline constexpr std::uint64_t kDefaultSeed = 1998;
inline constexpr std::uint64_t kDefaultEvents = 100000;

struct CommonOptions {
    std::string config_path;
    bool json = false;
    std::string out_dir = "out";
};

struct LoadedConfig {
    ApparatusConfig config;
    std::string path;
    std::string sha256;
};

inline LoadedConfig load_config(const std::string& path, std::ostream& err) {
    if (path.empty()) {
        const auto cfg = table1_default();
        return {cfg, "<default>", io::sha256_hex(io::serialize_config(cfg))};
    }
    const std::string bytes = io::read_file(path);
    auto parsed = io::parse_config_text(bytes, path);
    if (!parsed.defaulted_keys.empty()) {
        err << "note: " << parsed.defaulted_keys.size() << " key(s) not set in " << path << " use reference defaults:";
        for (const auto& k : parsed.defaulted_keys) err << ' ' << k;
        err << '\n';
    }
    for (const auto& w : validate(parsed.config).warnings()) err << "warning: " << w.field << ": " << w.message << '\n';
    return {parsed.config, path, io::sha256_hex(bytes)};
}

class OutputSet {
public:
    OutputSet(std::string dir, std::string command) : dir_(std::move(dir)) {
        manifest_.command = std::move(command);
        manifest_.timestamp = io::utc_timestamp();
        std::filesystem::create_directories(dir_);
    }

    void write(const std::string& name, const std::string& content) {
        const auto path = std::filesystem::path(dir_) / name;
        std::ofstream f(path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + path.string());
        f << content;
        manifest_.outputs.push_back(path.string());
    }

    io::RunManifest& manifest() { return manifest_; }

    void finish() {
        const auto path = std::filesystem::path(dir_) / "manifest.json";
        std::ofstream f(path, std::ios::binary);
        f << io::manifest_json(manifest_).dump(2) << '\n';
    }

private:
    std::string dir_;
    io::RunManifest manifest_;
};

inline OutputSet open_outputs(const CommonOptions& o, const std::string& command, const LoadedConfig& cfg) {
    OutputSet out(o.out_dir, command);
    out.manifest().config_path = cfg.path;
    out.manifest().config_sha256 = cfg.sha256;
    return out;
}

inline int command_budget(const CommonOptions& o, std::ostream& out, std::ostream& err) {
    const auto cfg = load_config(o.config_path, err);
    const auto budget = full_budget(cfg.config);
    const auto j = io::budget_json(budget);
    const auto table = io::budget_table(budget);
    auto files = open_outputs(o, "budget", cfg);
    files.write("budget.json", j.dump(2) + "\n");
    files.write("budget.txt", table);
    files.finish();
    out << (o.json ? j.dump(2) + "\n" : table);
    return kExitOk;
}

struct SimulateOptions {
    std::uint64_t events = kDefaultEvents;
    std::uint64_t seed = kDefaultSeed;
    unsigned workers = 1;
    bool rejection = false;
};

inline SimulationOptions simulation_options(const SimulateOptions& s) {
    SimulationOptions opts;
    opts.workers = s.workers;
    if (s.rejection) {
        opts.sampling = SamplingMode::rejection;
        opts.target = EventTarget::sampled;
    } else {
        opts.sampling = SamplingMode::conditioned;
        opts.target = EventTarget::accepted;
    }
    return opts;
}

inline int command_simulate(const CommonOptions& o, const SimulateOptions& s, std::ostream& out, std::ostream& err) {
    if (s.events == 0) throw std::invalid_argument("--events must be at least 1");
    const auto cfg = load_config(o.config_path, err);
    const auto summary = run_simulation(cfg.config, s.events, s.seed, simulation_options(s));
    const auto j = io::summary_json(summary);
    auto files = open_outputs(o, "simulate", cfg);
    files.manifest().seed = s.seed;
    files.manifest().events = s.events;
    files.write("simulation.json", j.dump(2) + "\n");
    files.write("residual_histogram.csv", io::histogram_csv(summary.residual_histogram));
    files.finish();
    if (o.json) {
        out << j.dump(2) << '\n';
    } else {
        out << "Monte Carlo: " << summary.n_accepted << " accepted of " << summary.n_sampled << " sampled ("
            << io::to_string(summary.sampling) << ")\n";
        if (summary.has_statistics) {
            out << "  empirical arrival time dispersion  " << io::sig(summary.empirical_arrival_time_dispersion)
                << " s\n";
            out << "  empirical velocity dispersion      " << io::sig(summary.empirical_velocity_dispersion)
                << " m/s\n";
            out << "  empirical product / hbar           " << io::sig(summary.empirical_product_over_hbar) << '\n';
            out << "  mean predicted velocity            " << io::sig(summary.mean_predicted_velocity) << " m/s\n";
        }
    }
    if (!summary.has_statistics) {
        err << "error: no accepted events, no statistics\n";
        return kExitRuntime;
    }
    return kExitOk;
}

inline VelocitySpaceMode parse_mode(const std::string& m) {
    if (m == "paper") return VelocitySpaceMode::paper;
    if (m == "derived") return VelocitySpaceMode::derived;
    throw std::invalid_argument("--mode must be paper or derived");
}

inline int command_rate(const CommonOptions& o, const std::string& mode, std::ostream& out, std::ostream& err) {
    const auto cfg = load_config(o.config_path, err);
    const auto chain = paper_chain(cfg.config, parse_mode(mode));
    const auto j = io::chain_json(chain);
    const auto ledger = io::rate_ledger(chain);
    auto files = open_outputs(o, "rate", cfg);
    files.write("rate.json", j.dump(2) + "\n");
    files.write("rate_ledger.txt", ledger);
    files.finish();
    out << (o.json ? j.dump(2) + "\n" : ledger);
    return kExitOk;
}

inline int command_sweep(const CommonOptions& o, const std::string& spec_path, std::ostream& out, std::ostream& err) {
    const auto cfg = load_config(o.config_path, err);
    const auto spec = io::parse_sweep(spec_path);
    const auto result = run_sweep(spec, cfg.config);
    const auto j = io::sweep_json(result, spec.objective);
    const auto csv = io::sweep_csv(result);
    auto files = open_outputs(o, "sweep", cfg);
    if (spec.monte_carlo) files.manifest().seed = spec.monte_carlo->seed;
    files.write("sweep.json", j.dump(2) + "\n");
    files.write("sweep.csv", csv);
    files.finish();
    if (o.json) {
        out << j.dump(2) << '\n';
    } else {
        out << csv;
        if (result.best_feasible)
            out << "best feasible row: " << *result.best_feasible << '\n';
        else
            out << "no feasible row\n";
        out << "pareto front: " << result.pareto_front.size() << " point(s)\n";
    }
    return kExitOk;
}

inline int command_report(const CommonOptions& o, const SimulateOptions& s, const std::string& mode,
                          std::ostream& out, std::ostream& err) {
    const auto cfg = load_config(o.config_path, err);
    const auto budget = full_budget(cfg.config);
    std::optional<SimulationSummary> sim;
    if (s.events > 0) sim = run_simulation(cfg.config, s.events, s.seed, simulation_options(s));
    const auto report = io::make_report(budget, sim, paper_chain(cfg.config, parse_mode(mode)));
    const auto j = io::report_json(report);
    const auto text = io::report_text(report);
    auto files = open_outputs(o, "report", cfg);
    if (sim) {
        files.manifest().seed = s.seed;
        files.manifest().events = s.events;
    }
    files.write("report.json", j.dump(2) + "\n");
    files.write("report.txt", text);
    files.finish();
    out << (o.json ? j.dump(2) + "\n" : text);
    return kExitOk;
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Dispersion budget, Monte Carlo and rate estimates for a photon-recoil momentum-position experiment",
                 "eprsim"};
    app.require_subcommand(1);
    app.set_version_flag("--version", io::kToolVersion);

    CommonOptions common;
    SimulateOptions sim;
    std::string mode = "paper";
    std::string spec_path;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", common.config_path, "Configuration file (key = value)");
        cmd->add_flag("--json", common.json, "Print machine-readable JSON only");
        cmd->add_option("--out", common.out_dir, "Output directory")->capture_default_str();
    };
    auto add_sim = [&](CLI::App* cmd) {
        cmd->add_option("--events", sim.events, "Accepted-event target (sampled count with --rejection)")
            ->capture_default_str();
        cmd->add_option("--seed", sim.seed, "Random seed")->capture_default_str();
        cmd->add_option("--workers", sim.workers, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
        cmd->add_flag("--rejection", sim.rejection, "Apply every gate as a rejection filter");
    };
    auto add_mode = [&](CLI::App* cmd) {
        cmd->add_option("--mode", mode, "Velocity-space volume: paper or derived")
            ->capture_default_str()
            ->check(CLI::IsMember({"paper", "derived"}));
    };

    auto* budget = app.add_subcommand("budget", "Closed-form dispersion budget");
    add_common(budget);
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo of the measurement chain");
    add_common(simulate);
    add_sim(simulate);
    auto* rate = app.add_subcommand("rate", "Counting-rate ledger");
    add_common(rate);
    add_mode(rate);
    auto* sweep = app.add_subcommand("sweep", "Parameter sweep with optional rate constraint");
    add_common(sweep);
    sweep->add_option("--spec", spec_path, "Sweep description file")->required();
    auto* report = app.add_subcommand("report", "Analytic, Monte Carlo and paper values side by side");
    add_common(report);
    add_sim(report);
    add_mode(report);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitInvalid;
    }

    try {
        if (*budget) return command_budget(common, out, err);
        if (*simulate) return command_simulate(common, sim, out, err);
        if (*rate) return command_rate(common, mode, out, err);
        if (*sweep) return command_sweep(common, spec_path, out, err);
        if (*report) return command_report(common, sim, mode, out, err);
    } catch (const io::ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const ValidationError& e) {
        err << "error: " << e.what();
        return kExitInvalid;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitInvalid;
}

}  // namespace eprsim::cli
