#pragma once

// Human-readable tables, CSV writers, the consolidated report and the run
// manifest.

#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "eprsim/io/config_file.hpp"
#include "eprsim/io/json.hpp"

namespace eprsim::io {

inline constexpr const char* kToolVersion = "0.3.0";

inline std::string sig(double v, int digits = 4) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

inline std::string sha256_hex(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 failed");
    std::ostringstream os;
    for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int{digest[i]};
    return os.str();
}

struct RunManifest {
    std::string command;
    std::string config_path;  // "<default>" when no file was given
    std::string config_sha256;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> events;
    std::string tool_version = kToolVersion;
    std::string timestamp;
    std::vector<std::string> outputs;
};

inline std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline json manifest_json(const RunManifest& m) {
    json j{{"command", m.command},
           {"config_path", m.config_path},
           {"config_sha256", m.config_sha256},
           {"tool_version", m.tool_version},
           {"timestamp", m.timestamp},
           {"outputs", m.outputs}};
    j["seed"] = m.seed ? json(*m.seed) : json(nullptr);
    j["events"] = m.events ? json(*m.events) : json(nullptr);
    return j;
}

namespace detail {
inline void row(std::ostream& os, const std::string& name, const std::string& value, const std::string& unit,
                const std::string& note = {}) {
    os << "  " << std::left << std::setw(34) << name << std::right << std::setw(12) << value << "  " << std::left
       << std::setw(8) << unit << note << '\n';
}
}  // namespace detail

inline std::string budget_table(const BudgetReport& b) {
    std::ostringstream os;
    using detail::row;
    os << "Dispersion budget\n";
    row(os, "initial time dispersion", sig(b.initial_time_dispersion.value()), "s");
    row(os, "  term: initial time", sig(b.arrival_terms.initial_time.value()), "s");
    row(os, "  term: slit transit", sig(b.arrival_terms.slit_transit.value()), "s");
    row(os, "  term: velocity spread", sig(b.arrival_terms.velocity_spread.value()), "s");
    row(os, "arrival time dispersion", sig(b.arrival_time_dispersion.value()), "s",
        "paper: " + sig(reference::kArrivalTimeDispersion));
    row(os, "dominant term", std::string(to_string(b.dominant_term)), "");
    row(os, "velocity dispersion (required)", sig(b.velocity_dispersion.value()), "m/s",
        "paper: " + sig(reference::kVelocityDispersion));
    row(os, "spectrometer resolution c/R", sig(b.spectrometer_velocity_resolution.value()), "m/s");
    row(os, "diffraction velocity spread", sig(b.diffraction_velocity_spread.value()), "m/s");
    row(os, "laser-focus exit spread", sig(b.exit_velocity_spread.value()), "m/s",
        "paper: " + sig(reference::kExitVelocitySpread));
    row(os, "recoil velocity", sig(b.recoil_velocity.value()), "m/s", "paper: " + sig(reference::kRecoilVelocity));
    row(os, "linewidth fraction dE/E", sig(b.linewidth_fraction.value()), "1",
        "paper: " + sig(reference::kLinewidthFraction));
    row(os, "max useful resolution", sig(b.max_useful_resolution.value()), "1",
        "paper: " + sig(reference::kMaxUsefulResolution));
    row(os, "total position sigma", sig(b.total_position_sigma.value()), "m");
    row(os, "dispersion product", sig(b.dispersion_product.value()), "J s");
    const double ratio = b.dispersion_product_over_hbar.value();
    row(os, "dispersion product / hbar", sig(ratio), "1", "= hbar/" + sig(1.0 / ratio, 3) + "  (paper: hbar/17)");
    return os.str();
}

inline std::string rate_ledger(const RateChain& c) {
    std::ostringstream os;
    os << "Counting-rate ledger (velocity space: " << to_string(c.source.mode) << ")\n";
    os << "  " << std::left << std::setw(28) << "factor" << std::right << std::setw(12) << "value" << std::setw(16)
       << "rate [1/s]" << '\n';
    os << "  " << std::left << std::setw(28) << "source_flux" << std::right << std::setw(12) << sig(c.source.flux)
       << std::setw(16) << sig(c.source.flux) << '\n';
    const auto running = c.running_rates();
    for (std::size_t i = 0; i < c.factors.size(); ++i)
        os << "  " << std::left << std::setw(28) << c.factors[i].name << std::right << std::setw(12)
           << sig(c.factors[i].value) << std::setw(16) << sig(running[i]) << '\n';
    os << "  final rate: " << sig(c.final_rate()) << " counts/s = " << sig(c.per_minute()) << " counts/min"
       << "  (paper: about " << sig(reference::kCountsPerMinute) << "/min)\n";
    os << "  largest loss: " << sensitivity(c).front().name << '\n';
    return os.str();
}

inline std::string histogram_csv(const Histogram& h) {
    std::ostringstream os;
    os << "bin_left,bin_right,count\n";
    for (std::size_t i = 0; i < h.counts.size(); ++i)
        os << format_double(h.edges[i]) << ',' << format_double(h.edges[i + 1]) << ',' << h.counts[i] << '\n';
    return os.str();
}

inline std::string sweep_csv(const SweepResult& r) {
    std::ostringstream os;
    for (const auto& p : r.parameters) os << p << ',';
    os << "valid,feasible,dispersion_product_Js,dispersion_product_over_hbar,arrival_time_dispersion_s,"
          "diffraction_velocity_spread_mps,rate_per_min,objective,mc_arrival_time_dispersion_s,"
          "mc_velocity_dispersion_mps\n";
    for (const auto& row : r.rows) {
        for (double v : row.point) os << format_double(v) << ',';
        os << (row.valid ? 1 : 0) << ',' << (row.feasible ? 1 : 0) << ',';
        if (row.budget)
            os << format_double(row.budget->dispersion_product.value()) << ','
               << format_double(row.budget->dispersion_product_over_hbar.value()) << ','
               << format_double(row.budget->arrival_time_dispersion.value()) << ','
               << format_double(row.budget->diffraction_velocity_spread.value()) << ','
               << format_double(row.rate_per_min) << ',' << format_double(row.objective) << ',';
        else
            os << ",,,,,,";
        if (row.monte_carlo && row.monte_carlo->has_statistics)
            os << format_double(row.monte_carlo->arrival_time_dispersion) << ','
               << format_double(row.monte_carlo->velocity_dispersion);
        else
            os << ',';
        os << '\n';
    }
    return os.str();
}

struct ComparisonRow {
    std::string name;
    std::string unit;
    double analytic = 0;
    std::optional<double> monte_carlo;
    double paper = 0;

    std::optional<double> ratio() const {
        if (!monte_carlo || analytic == 0) return std::nullopt;
        return *monte_carlo / analytic;
    }
};

struct ConsolidatedReport {
    BudgetReport budget;
    std::optional<SimulationSummary> simulation;
    RateChain chain;
    std::vector<ComparisonRow> rows;
};

inline ConsolidatedReport make_report(const BudgetReport& budget, const std::optional<SimulationSummary>& sim,
                                      const RateChain& chain) {
    ConsolidatedReport r{budget, sim, chain, {}};
    const bool mc = sim && sim->has_statistics;
    auto mc_value = [&](double v) { return mc ? std::optional<double>(v) : std::nullopt; };
    r.rows.push_back({"arrival_time_dispersion", "s", budget.arrival_time_dispersion.value(),
                      mc_value(mc ? sim->empirical_arrival_time_dispersion : 0), reference::kArrivalTimeDispersion});
    r.rows.push_back({"velocity_dispersion", "m/s", budget.velocity_dispersion.value(),
                      mc_value(mc ? sim->empirical_velocity_dispersion : 0), reference::kVelocityDispersion});
    r.rows.push_back({"dispersion_product_over_hbar", "1", budget.dispersion_product_over_hbar.value(),
                      mc_value(mc ? sim->empirical_product_over_hbar : 0), reference::kProductOverHbar});
    return r;
}

inline std::string report_text(const ConsolidatedReport& r) {
    std::ostringstream os;
    os << "Analytic vs Monte Carlo vs paper\n";
    os << "  " << std::left << std::setw(30) << "quantity" << std::setw(6) << "unit" << std::right << std::setw(12)
       << "analytic" << std::setw(12) << "mc" << std::setw(12) << "paper" << std::setw(12) << "mc/analytic" << '\n';
    for (const auto& row : r.rows) {
        os << "  " << std::left << std::setw(30) << row.name << std::setw(6) << row.unit << std::right << std::setw(12)
           << sig(row.analytic) << std::setw(12) << (row.monte_carlo ? sig(*row.monte_carlo) : "not run")
           << std::setw(12) << sig(row.paper) << std::setw(12) << (row.ratio() ? sig(*row.ratio(), 3) : "not run")
           << '\n';
    }
    if (r.simulation)
        os << "  mc events: " << r.simulation->n_accepted << " accepted of " << r.simulation->n_sampled
           << " sampled (" << to_string(r.simulation->sampling) << ")\n";
    os << '\n' << budget_table(r.budget) << '\n' << rate_ledger(r.chain);
    return os.str();
}

inline json report_json(const ConsolidatedReport& r) {
    json rows = json::array();
    for (const auto& row : r.rows) {
        json jr{{"name", row.name}, {"unit", row.unit}, {"analytic", row.analytic}, {"paper", row.paper}};
        jr["monte_carlo"] = row.monte_carlo ? json(*row.monte_carlo) : json("not run");
        jr["mc_over_analytic"] = row.ratio() ? json(sig(*row.ratio(), 3)) : json("not run");
        rows.push_back(std::move(jr));
    }
    json j{{"comparison", rows}, {"budget", budget_json(r.budget)}, {"rate", chain_json(r.chain)}};
    j["simulation"] = r.simulation ? summary_json(*r.simulation) : json("not run");
    return j;
}

}  // namespace eprsim::io
