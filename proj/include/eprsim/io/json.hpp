#pragma once

// JSON forms of the result types. Physical values are written as
// {"value": x, "unit": "..."} pairs.

#include <nlohmann/json.hpp>

#include "eprsim/apparatus.hpp"
#include "eprsim/budget.hpp"
#include "eprsim/monte_carlo.hpp"
#include "eprsim/rate_budget.hpp"
#include "eprsim/sweep.hpp"

namespace eprsim::io {

using nlohmann::json;

inline json with_unit(double value, const char* unit) { return json{{"value", value}, {"unit", unit}}; }

inline json with_unit(const Quantity& q, const char* unit) { return with_unit(q.value(), unit); }

inline json config_json(const ApparatusConfig& c) {
    json j = json::object();
    for (const auto& p : parameter_registry()) j[std::string(p.name)] = with_unit(p.get(c), unit_symbol(p.kind));
    j["species_label"] = c.species.label;
    j["species_transition_wavelength"] = with_unit(c.species.transition_wavelength, "m");
    j["allow_slit_sigma_override"] = c.allow_slit_sigma_override;
    return j;
}

inline json budget_json(const BudgetReport& b) {
    return json{
        {"initial_time_dispersion", with_unit(b.initial_time_dispersion, "s")},
        {"diffraction_velocity_spread", with_unit(b.diffraction_velocity_spread, "m/s")},
        {"spectrometer_velocity_resolution", with_unit(b.spectrometer_velocity_resolution, "m/s")},
        {"exit_velocity_spread", with_unit(b.exit_velocity_spread, "m/s")},
        {"velocity_dispersion", with_unit(b.velocity_dispersion, "m/s")},
        {"arrival_time_dispersion", with_unit(b.arrival_time_dispersion, "s")},
        {"arrival_time_terms",
         {{"initial_time", with_unit(b.arrival_terms.initial_time, "s")},
          {"slit_transit", with_unit(b.arrival_terms.slit_transit, "s")},
          {"velocity_spread", with_unit(b.arrival_terms.velocity_spread, "s")}}},
        {"total_position_sigma", with_unit(b.total_position_sigma, "m")},
        {"recoil_velocity", with_unit(b.recoil_velocity, "m/s")},
        {"linewidth_fraction", with_unit(b.linewidth_fraction, "1")},
        {"max_useful_resolution", with_unit(b.max_useful_resolution, "1")},
        {"dispersion_product", with_unit(b.dispersion_product, "J s")},
        {"dispersion_product_over_hbar", with_unit(b.dispersion_product_over_hbar, "1")},
        {"dominant_term", std::string(to_string(b.dominant_term))},
    };
}

inline json histogram_json(const Histogram& h) { return json{{"edges_s", h.edges}, {"counts", h.counts}}; }

inline const char* to_string(SamplingMode m) { return m == SamplingMode::rejection ? "rejection" : "conditioned"; }
inline const char* to_string(EventTarget t) { return t == EventTarget::sampled ? "sampled" : "accepted"; }

inline json summary_json(const SimulationSummary& s) {
    json j{
        {"seed", s.seed},
        {"n_requested", s.n_requested},
        {"target", to_string(s.target)},
        {"sampling", to_string(s.sampling)},
        {"n_sampled", s.n_sampled},
        {"n_accepted", s.n_accepted},
        {"n_cone", s.n_cone},
        {"n_window", s.n_window},
        {"n_passband", s.n_passband},
        {"hit_sample_cap", s.hit_sample_cap},
        {"has_statistics", s.has_statistics},
        {"acceptance_fraction", s.acceptance_fraction},
        {"cone_acceptance", s.cone_acceptance},
        {"window_acceptance", s.window_acceptance},
        {"conditioned_gate_probability", s.conditioned_gate_probability},
    };
    if (s.has_statistics) {
        j["empirical_arrival_time_dispersion"] = with_unit(s.empirical_arrival_time_dispersion, "s");
        j["empirical_velocity_dispersion"] = with_unit(s.empirical_velocity_dispersion, "m/s");
        j["empirical_product_over_hbar"] = with_unit(s.empirical_product_over_hbar, "1");
        j["mean_time_residual"] = with_unit(s.mean_time_residual, "s");
        j["mean_velocity_residual"] = with_unit(s.mean_velocity_residual, "m/s");
        j["mean_predicted_velocity"] = with_unit(s.mean_predicted_velocity, "m/s");
        j["time_residual_skewness"] = s.time_residual_skewness;
    } else {
        j["statistics"] = "no accepted events";
    }
    j["residual_histogram"] = histogram_json(s.residual_histogram);
    return j;
}

inline json chain_json(const RateChain& c) {
    json factors = json::array();
    const auto running = c.running_rates();
    for (std::size_t i = 0; i < c.factors.size(); ++i) {
        const auto& f = c.factors[i];
        factors.push_back({{"name", f.name},
                           {"value", f.value},
                           {"provenance", to_string(f.provenance)},
                           {"note", f.note},
                           {"running_rate", with_unit(running[i], "1/s")}});
    }
    json sens = json::array();
    for (const auto& s : sensitivity(c))
        sens.push_back({{"name", s.name}, {"elasticity", s.elasticity}, {"log10_contribution", s.log10_contribution}});
    return json{
        {"velocity_space_mode", to_string(c.source.mode)},
        {"source",
         {{"quoted_width_volume_per_second", with_unit(c.source.quoted_width_volume_cm3, "cm^3/s")},
          {"geometry_norm", c.source.geometry_norm},
          {"geometric_volume_per_second", with_unit(c.source.geometric_volume_cm3, "cm^3/s")},
          {"velocity_space_volume", with_unit(c.source.velocity_space_volume, "(m/s)^3")},
          {"flux", with_unit(c.source.flux, "1/s")}}},
        {"factors", factors},
        {"sensitivity", sens},
        {"final_rate", with_unit(c.final_rate(), "1/s")},
        {"final_rate_per_minute", with_unit(c.per_minute(), "1/min")},
    };
}

inline json sweep_json(const SweepResult& r, Objective objective) {
    json rows = json::array();
    for (const auto& row : r.rows) {
        json jr{{"point", row.point}, {"valid", row.valid}, {"feasible", row.feasible}};
        if (!row.errors.empty()) jr["errors"] = row.errors;
        if (row.budget) {
            jr["dispersion_product"] = with_unit(row.budget->dispersion_product, "J s");
            jr["dispersion_product_over_hbar"] = row.budget->dispersion_product_over_hbar.value();
            jr["arrival_time_dispersion"] = with_unit(row.budget->arrival_time_dispersion, "s");
            jr["diffraction_velocity_spread"] = with_unit(row.budget->diffraction_velocity_spread, "m/s");
            jr["rate_per_minute"] = with_unit(row.rate_per_min, "1/min");
            jr["objective"] = row.objective;
        }
        if (row.monte_carlo && row.monte_carlo->has_statistics) {
            jr["mc_arrival_time_dispersion"] = with_unit(row.monte_carlo->arrival_time_dispersion, "s");
            jr["mc_velocity_dispersion"] = with_unit(row.monte_carlo->velocity_dispersion, "m/s");
            jr["mc_product_over_hbar"] = row.monte_carlo->product_over_hbar;
        }
        rows.push_back(std::move(jr));
    }
    json front = json::array();
    for (const auto& p : r.pareto_front)
        front.push_back({{"row", p.row},
                         {"dispersion_product", with_unit(p.dispersion_product, "J s")},
                         {"rate_per_minute", with_unit(p.rate_per_min, "1/min")}});
    json j{{"parameters", r.parameters}, {"objective", to_string(objective)}, {"rows", rows}, {"pareto_front", front}};
    j["best_feasible"] = r.best_feasible ? json(*r.best_feasible) : json(nullptr);
    return j;
}

}  // namespace eprsim::io
