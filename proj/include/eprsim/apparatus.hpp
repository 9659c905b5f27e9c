#pragma once

// Flat description of the apparatus, the reference defaults, and validation.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "eprsim/dispersion.hpp"
#include "eprsim/quantity.hpp"

namespace eprsim {

// All values in SI except trap_phase_space_density, which keeps the
// customary atoms cm^-3 (m/s)^-3.
struct ApparatusConfig {
    double slit_to_detector_distance = 0.01;    // m
    double slit_width = 2e-8;                    // m
    double slit_position_sigma = 0.5e-8;         // m
    double detector_position_sigma = 0.5e-8;     // m
    double total_position_sigma = 1.0e-8;        // m
    double laser_pulse_duration = 1e-5;          // s
    double laser_divergence = 0.05;              // rad
    double pulse_rate = 100;                     // 1/s
    double spectrometer_resolution = 7e9;
    double spectrometer_solid_angle_fraction = 3e-4;
    double acceptance_half_angle = 2.7e-2;       // rad
    double mean_atom_x_velocity = 1.0;           // m/s
    double trap_z_velocity = 10;                 // m/s
    double trap_temperature = 100e-9;            // K
    double trap_phase_space_density = 2e17;      // atoms cm^-3 (m/s)^-3
    double slit_length_y = 1e-4;                 // m
    double beam_length_per_pulse_z = 1e-4;       // m
    double emission_window_length = 2e-6;        // m
    double arrival_time_dispersion_target = 5e-4;  // s
    double excitation_to_slit_distance = 8e-6;   // m
    double passband_half_width_elements = 1.0;   // in units of 1/R
    double detector_time_sigma = 0.0;            // s
    double diffraction_shape_factor = 1.0;
    double linewidth_factor = kHalfWidthLinewidthFactor;
    bool allow_slit_sigma_override = false;
    AtomSpecies species = li7_species();

    bool operator==(const ApparatusConfig&) const = default;

    double implied_flight_time() const { return slit_to_detector_distance / mean_atom_x_velocity; }
};

inline ApparatusConfig table1_default() { return ApparatusConfig{}; }

enum class ParameterKind { length, time, velocity, rate, angle, dimensionless, temperature, density, mass, energy };

inline const char* unit_symbol(ParameterKind k) {
    switch (k) {
        case ParameterKind::length: return "m";
        case ParameterKind::time: return "s";
        case ParameterKind::velocity: return "m/s";
        case ParameterKind::rate: return "1/s";
        case ParameterKind::angle: return "rad";
        case ParameterKind::dimensionless: return "1";
        case ParameterKind::temperature: return "K";
        case ParameterKind::density: return "cm^-3 (m/s)^-3";
        case ParameterKind::mass: return "kg";
        case ParameterKind::energy: return "J";
    }
    return "";
}

// A numeric config field addressable by name (config files, sweeps, JSON).
struct ParameterInfo {
    std::string_view name;
    ParameterKind kind;
    bool zero_allowed;
    std::function<double(const ApparatusConfig&)> get;
    std::function<void(ApparatusConfig&, double)> set;
};

namespace detail {
template <double ApparatusConfig::*Field>
ParameterInfo field(std::string_view name, ParameterKind kind, bool zero_allowed = false) {
    return {name, kind, zero_allowed, [](const ApparatusConfig& c) { return c.*Field; },
            [](ApparatusConfig& c, double v) { c.*Field = v; }};
}

// Species setters go through the species constructor so its invariants hold.
inline ParameterInfo species_field(std::string_view name, ParameterKind kind, double AtomSpecies::*member) {
    return {name, kind, false, [member](const ApparatusConfig& c) { return c.species.*member; },
            [member](ApparatusConfig& c, double v) {
                AtomSpecies s = c.species;
                s.*member = v;
                if (member == &AtomSpecies::transition_wavelength)
                    s.transition_energy = AtomSpecies::photon_energy_for(v);
                else if (member == &AtomSpecies::transition_energy && v > 0)
                    s.transition_wavelength = AtomSpecies::wavelength_for(v);
                c.species = s;
            }};
}
}  // namespace detail

inline const std::vector<ParameterInfo>& parameter_registry() {
    using K = ParameterKind;
    using C = ApparatusConfig;
    static const std::vector<ParameterInfo> registry = {
        detail::field<&C::slit_to_detector_distance>("slit_to_detector_distance", K::length),
        detail::field<&C::slit_width>("slit_width", K::length),
        detail::field<&C::slit_position_sigma>("slit_position_sigma", K::length),
        detail::field<&C::detector_position_sigma>("detector_position_sigma", K::length),
        detail::field<&C::total_position_sigma>("total_position_sigma", K::length),
        detail::field<&C::laser_pulse_duration>("laser_pulse_duration", K::time),
        detail::field<&C::laser_divergence>("laser_divergence", K::angle),
        detail::field<&C::pulse_rate>("pulse_rate", K::rate),
        detail::field<&C::spectrometer_resolution>("spectrometer_resolution", K::dimensionless),
        detail::field<&C::spectrometer_solid_angle_fraction>("spectrometer_solid_angle_fraction", K::dimensionless),
        detail::field<&C::acceptance_half_angle>("acceptance_half_angle", K::angle),
        detail::field<&C::mean_atom_x_velocity>("mean_atom_x_velocity", K::velocity),
        detail::field<&C::trap_z_velocity>("trap_z_velocity", K::velocity),
        detail::field<&C::trap_temperature>("trap_temperature", K::temperature),
        detail::field<&C::trap_phase_space_density>("trap_phase_space_density", K::density),
        detail::field<&C::slit_length_y>("slit_length_y", K::length),
        detail::field<&C::beam_length_per_pulse_z>("beam_length_per_pulse_z", K::length),
        detail::field<&C::emission_window_length>("emission_window_length", K::length),
        detail::field<&C::arrival_time_dispersion_target>("arrival_time_dispersion_target", K::time),
        detail::field<&C::excitation_to_slit_distance>("excitation_to_slit_distance", K::length, true),
        detail::field<&C::passband_half_width_elements>("passband_half_width_elements", K::dimensionless),
        detail::field<&C::detector_time_sigma>("detector_time_sigma", K::time, true),
        detail::field<&C::diffraction_shape_factor>("diffraction_shape_factor", K::dimensionless),
        detail::field<&C::linewidth_factor>("linewidth_factor", K::dimensionless),
        detail::species_field("species_mass", K::mass, &AtomSpecies::mass),
        detail::species_field("species_transition_energy", K::energy, &AtomSpecies::transition_energy),
        detail::species_field("species_lifetime", K::time, &AtomSpecies::lifetime),
    };
    return registry;
}

inline const ParameterInfo* find_parameter(std::string_view name) {
    for (const auto& p : parameter_registry())
        if (p.name == name) return &p;
    return nullptr;
}

inline const ParameterInfo& parameter(std::string_view name) {
    if (const auto* p = find_parameter(name)) return *p;
    throw std::invalid_argument("unknown apparatus parameter '" + std::string(name) + "'");
}

/// Drift contribution to the total position sigma implied by the stored
/// total and the slit and detector components.
inline double drift_position_sigma(const ApparatusConfig& c) {
    const double d2 = c.total_position_sigma * c.total_position_sigma - c.slit_position_sigma * c.slit_position_sigma -
                      c.detector_position_sigma * c.detector_position_sigma;
    return d2 > 0 ? std::sqrt(d2) : 0.0;
}

/// Set one parameter and keep the coupled fields consistent: the slit sigma
/// tracks a quarter of the slit width, and changes to the slit or detector
/// sigma recompose the total with the drift term held fixed.
inline ApparatusConfig with_parameter(ApparatusConfig c, std::string_view name, double value) {
    const auto& info = parameter(name);
    if (info.get(c) == value) return c;
    const double drift = drift_position_sigma(c);
    auto recompose = [&] {
        c.total_position_sigma = total_position_sigma(metres(c.slit_position_sigma), metres(c.detector_position_sigma),
                                                      metres(drift))
                                     .value();
    };
    if (name == "slit_position_sigma" && !c.allow_slit_sigma_override) {
        c.slit_position_sigma = value;
        c.slit_width = 4 * value;
        recompose();
    } else if (name == "slit_width" && !c.allow_slit_sigma_override) {
        c.slit_width = value;
        c.slit_position_sigma = value / 4;
        recompose();
    } else if (name == "detector_position_sigma" || name == "slit_position_sigma") {
        info.set(c, value);
        recompose();
    } else {
        info.set(c, value);
    }
    return c;
}

enum class Severity { error, warning };

struct ValidationIssue {
    std::string field;
    Severity severity;
    std::string message;
};

struct ConfigValidationReport {
    std::vector<ValidationIssue> issues;

    bool accepted() const { return errors().empty(); }
    std::vector<ValidationIssue> errors() const { return filter(Severity::error); }
    std::vector<ValidationIssue> warnings() const { return filter(Severity::warning); }

    std::string summary() const {
        std::string out;
        for (const auto& i : issues) {
            out += (i.severity == Severity::error ? "error: " : "warning: ");
            out += i.field + ": " + i.message + "\n";
        }
        return out;
    }

private:
    std::vector<ValidationIssue> filter(Severity s) const {
        std::vector<ValidationIssue> out;
        std::copy_if(issues.begin(), issues.end(), std::back_inserter(out),
                     [s](const ValidationIssue& i) { return i.severity == s; });
        return out;
    }
};

// R may exceed the natural-line ceiling by this much before validate()
// warns; the ceiling itself depends on the linewidth convention.
inline constexpr double kResolutionCeilingTolerance = 1.5;

class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(ConfigValidationReport report)
        : std::runtime_error("invalid apparatus configuration:\n" + report.summary()), report_(std::move(report)) {}
    const ConfigValidationReport& report() const { return report_; }

private:
    ConfigValidationReport report_;
};

inline ConfigValidationReport validate(const ApparatusConfig& c) {
    ConfigValidationReport r;
    auto error = [&](std::string_view f, std::string m) {
        r.issues.push_back({std::string(f), Severity::error, std::move(m)});
    };

    for (const auto& p : parameter_registry()) {
        const double v = p.get(c);
        if (!std::isfinite(v))
            error(p.name, "must be finite");
        else if (p.zero_allowed ? v < 0 : v <= 0)
            error(p.name, p.zero_allowed ? "must be non-negative" : "must be positive");
    }
    if (!(c.spectrometer_resolution > 1)) error("spectrometer_resolution", "must exceed 1");
    if (!(c.acceptance_half_angle > 0 && c.acceptance_half_angle < M_PI / 2))
        error("acceptance_half_angle", "must lie in (0, pi/2)");
    if (!(c.spectrometer_solid_angle_fraction > 0 && c.spectrometer_solid_angle_fraction < 1))
        error("spectrometer_solid_angle_fraction", "must lie in (0, 1)");
    if (!c.allow_slit_sigma_override && c.slit_width > 0 &&
        std::abs(c.slit_position_sigma - c.slit_width / 4) > 1e-12 * c.slit_width)
        error("slit_position_sigma", "must equal slit_width / 4 (set allow_slit_sigma_override to relax)");
    if (c.total_position_sigma < std::max(c.slit_position_sigma, c.detector_position_sigma))
        error("total_position_sigma", "cannot be smaller than the slit or detector sigma it is composed from");

    const auto& s = c.species;
    const bool species_ok = s.mass > 0 && s.lifetime > 0 && s.transition_energy > 0 && s.transition_wavelength > 0;
    if (species_ok && std::abs(s.transition_energy - AtomSpecies::photon_energy_for(s.transition_wavelength)) >
                          1e-9 * s.transition_energy)
        error("species_transition_energy", "inconsistent with transition wavelength");

    if (r.accepted() && species_ok) {
        const double ceiling = max_useful_resolution(s, c.linewidth_factor).value();
        if (c.spectrometer_resolution > kResolutionCeilingTolerance * ceiling) {
            std::ostringstream os;
            os.precision(3);
            os << "resolution " << c.spectrometer_resolution << " exceeds the linewidth-limited resolution "
               << ceiling;
            r.issues.push_back({"spectrometer_resolution", Severity::warning, os.str()});
        }
    }
    return r;
}

inline void require_valid(const ApparatusConfig& c) {
    auto report = validate(c);
    if (!report.accepted()) throw ValidationError(std::move(report));
}

}  // namespace eprsim
