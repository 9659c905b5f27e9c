#pragma once

// Counting-rate estimate as an ordered chain of multiplicative factors.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "eprsim/apparatus.hpp"
#include "eprsim/quantity.hpp"

namespace eprsim {

enum class VelocitySpaceMode { paper, derived };

enum class Provenance { paper_quote, derived_note };

inline const char* to_string(Provenance p) { return p == Provenance::paper_quote ? "paper_quote" : "derived_note"; }
inline const char* to_string(VelocitySpaceMode m) { return m == VelocitySpaceMode::paper ? "paper" : "derived"; }

// The velocity-space volume quoted for the source, (m/s)^3.
inline constexpr double kPaperVelocitySpaceVolume = 3e-6;
// Slit width quoted in the counting-rate estimate (1e-6 cm). The quoted
// geometric volume (2e-8 cm^3 per second) is twice the product built from
// it; the configured slit width (4 x slit sigma = 2e-8 m) accounts for
// exactly that factor.
inline constexpr double kPaperQuotedSlitWidth = 1e-8;  // m
inline constexpr double kPaperGeometricVolume = 2e-8;  // cm^3 per second
// Fraction of the thermal x-velocity usable after slit diffraction.
inline constexpr double kUsableXVelocityFraction = 1.0 / 30.0;

struct RateFactor {
    std::string name;
    double value = 1;
    Provenance provenance = Provenance::paper_quote;
    std::string note;
};

struct SourceFlux {
    VelocitySpaceMode mode = VelocitySpaceMode::paper;
    double quoted_width_volume_cm3 = 0;  // per second, with the quoted 1e-6 cm slit width
    double geometry_norm = 0;            // geometric / quoted-width volume
    double geometric_volume_cm3 = 0;     // per second, configured slit width
    double velocity_space_volume = 0; // (m/s)^3
    double flux = 0;                  // atoms/s
};

inline double derived_velocity_space_volume(const ApparatusConfig& c) {
    const double v = thermal_velocity(kelvin(c.trap_temperature), c.species).value();
    return v * v * v * kUsableXVelocityFraction;
}

/// Atoms per second through the slit: phase-space density times the
/// geometric volume swept per second times the filled velocity volume.
inline SourceFlux source_flux(const ApparatusConfig& c, VelocitySpaceMode mode = VelocitySpaceMode::paper) {
    for (double v : {c.trap_phase_space_density, c.slit_width, c.slit_length_y, c.pulse_rate,
                     c.beam_length_per_pulse_z})
        if (!(v > 0)) throw DomainError("source_flux: inputs must be positive");
    constexpr double kCm3PerM3 = 1e6;
    SourceFlux f;
    f.mode = mode;
    const double swept = c.slit_length_y * c.pulse_rate * c.beam_length_per_pulse_z * kCm3PerM3;
    f.geometric_volume_cm3 = c.slit_width * swept;
    f.quoted_width_volume_cm3 = kPaperQuotedSlitWidth * swept;
    f.geometry_norm = f.geometric_volume_cm3 / f.quoted_width_volume_cm3;
    f.velocity_space_volume =
        mode == VelocitySpaceMode::paper ? kPaperVelocitySpaceVolume : derived_velocity_space_volume(c);
    f.flux = c.trap_phase_space_density * f.geometric_volume_cm3 * f.velocity_space_volume;
    return f;
}

struct RateChain {
    SourceFlux source;
    std::vector<RateFactor> factors;

    // Evaluated in log space so long what-if chains cannot underflow.
    double log10_final() const {
        double acc = std::log10(source.flux);
        for (const auto& f : factors) acc += std::log10(f.value);
        return acc;
    }
    double final_rate() const { return std::pow(10.0, log10_final()); }
    double direct_product() const {
        double p = source.flux;
        for (const auto& f : factors) p *= f.value;
        return p;
    }
    double per_minute() const { return final_rate() * 60.0; }

    // Running rate after each factor, for the ledger.
    std::vector<double> running_rates() const {
        std::vector<double> out;
        double acc = std::log10(source.flux);
        for (const auto& f : factors) {
            acc += std::log10(f.value);
            out.push_back(std::pow(10.0, acc));
        }
        return out;
    }
};

inline RateChain paper_chain(const ApparatusConfig& c, VelocitySpaceMode mode = VelocitySpaceMode::paper) {
    RateChain chain;
    chain.source = source_flux(c, mode);
    chain.factors = {
        {"beam_spreading", 1.0 / 3, Provenance::paper_quote, "trap-to-slit density loss, about a factor of 3"},
        {"spectrometer_solid_angle", c.spectrometer_solid_angle_fraction, Provenance::paper_quote,
         "fraction of the emission sphere accepted"},
        {"spectrometer_transmission", 1.0 / 3, Provenance::paper_quote, "loss passing through the spectrometer"},
        {"decay_window", 1.0 / 10, Provenance::paper_quote, "narrow slice of the decay curve"},
        {"detector_misc", 1.0 / 10, Provenance::paper_quote, "detector inefficiency and miscellaneous"},
        {"excitation_and_detectors", 1.0 / 10, Provenance::paper_quote, "excitation and both detectors"},
    };
    for (const auto& f : chain.factors)
        if (!(f.value > 0)) throw DomainError("rate factor '" + f.name + "' must be positive");
    return chain;
}

struct FactorSensitivity {
    std::string name;
    double elasticity = 1;      // d log rate / d log factor
    double log10_contribution = 0;
};

/// Elasticities and log10 contributions, most limiting factor first.
inline std::vector<FactorSensitivity> sensitivity(const RateChain& chain) {
    std::vector<FactorSensitivity> out;
    for (const auto& f : chain.factors) out.push_back({f.name, 1.0, std::log10(f.value)});
    std::stable_sort(out.begin(), out.end(), [](const FactorSensitivity& a, const FactorSensitivity& b) {
        return std::abs(a.log10_contribution) > std::abs(b.log10_contribution);
    });
    return out;
}

}  // namespace eprsim
