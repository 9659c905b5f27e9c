#pragma once

#include <algorithm>
#include <array>
#include <string_view>

#include "eprsim/apparatus.hpp"
#include "eprsim/dispersion.hpp"

namespace eprsim {

enum class DominantTerm { initial_time, slit_transit, velocity_spread };

inline std::string_view to_string(DominantTerm t) {
    switch (t) {
        case DominantTerm::initial_time: return "initial_time";
        case DominantTerm::slit_transit: return "slit_transit";
        case DominantTerm::velocity_spread: return "velocity_spread";
    }
    return "";
}

// Published reference values, kept for comparison output.
namespace reference {
inline constexpr double kArrivalTimeDispersion = 5e-4;     // s
inline constexpr double kVelocityDispersion = 0.05;        // m/s
inline constexpr double kExitVelocitySpread = 0.6e-2;      // m/s
inline constexpr double kRecoilVelocity = 0.12;            // m/s
inline constexpr double kLinewidthFraction = 1.4e-10;
inline constexpr double kMaxUsefulResolution = 7e9;
inline constexpr double kProductOverHbar = 1.0 / 17.0;
inline constexpr double kCosineError = 3.1e-4;             // m/s
inline constexpr double kCountsPerMinute = 0.1;
inline constexpr double kThermalVelocity = 1.1e-2;         // m/s at 100 nK
}  // namespace reference

struct BudgetReport {
    Quantity initial_time_dispersion;           // s
    Quantity diffraction_velocity_spread;       // m/s
    Quantity spectrometer_velocity_resolution;  // m/s, c/R, reported alongside
    Quantity exit_velocity_spread;              // m/s
    Quantity velocity_dispersion;               // m/s, Dv_a
    Quantity arrival_time_dispersion;           // s, Dt_a
    Quantity total_position_sigma;              // m
    Quantity recoil_velocity;                   // m/s
    Quantity linewidth_fraction;
    Quantity max_useful_resolution;
    Quantity dispersion_product;                // J s
    Quantity dispersion_product_over_hbar;
    ArrivalTimeTerms arrival_terms;
    DominantTerm dominant_term = DominantTerm::velocity_spread;
};

inline DominantTerm dominant_term_of(const ArrivalTimeTerms& t) {
    const std::array<double, 3> sq{t.initial_time.value() * t.initial_time.value(),
                                   t.slit_transit.value() * t.slit_transit.value(),
                                   t.velocity_spread.value() * t.velocity_spread.value()};
    return static_cast<DominantTerm>(std::max_element(sq.begin(), sq.end()) - sq.begin());
}

/// Compose the closed-form relations over a validated configuration.
/// The velocity dispersion follows the required-resolution path at the
/// configured arrival-time target; c/R is reported next to it.
inline BudgetReport full_budget(const ApparatusConfig& config) {
    require_valid(config);
    const auto& sp = config.species;
    const auto v_a = metres_per_second(config.mean_atom_x_velocity);
    const auto x = metres(config.slit_to_detector_distance);

    BudgetReport r;
    r.initial_time_dispersion = initial_time_dispersion(seconds(config.laser_pulse_duration), sp.lifetime_q());
    r.diffraction_velocity_spread =
        diffraction_velocity_spread(metres(config.slit_position_sigma), sp.mass_q(), config.diffraction_shape_factor);
    r.spectrometer_velocity_resolution = spectrometer_velocity_resolution(scalar(config.spectrometer_resolution));
    r.exit_velocity_spread = laser_focus_velocity_spread(radians(config.laser_divergence), sp.energy_q(), sp.mass_q());
    r.velocity_dispersion = required_velocity_resolution(seconds(config.arrival_time_dispersion_target), v_a, x);
    r.arrival_terms = arrival_time_terms(r.initial_time_dispersion, metres(config.slit_position_sigma), v_a, x,
                                         r.velocity_dispersion);
    r.arrival_time_dispersion = r.arrival_terms.total();
    r.total_position_sigma = metres(config.total_position_sigma);
    r.recoil_velocity = recoil_velocity(sp);
    r.linewidth_fraction = linewidth_fraction(sp, config.linewidth_factor);
    r.max_useful_resolution = max_useful_resolution(sp, config.linewidth_factor);
    r.dispersion_product = sp.mass_q() * r.velocity_dispersion * r.total_position_sigma;
    r.dispersion_product_over_hbar = r.dispersion_product / kConstants.reduced_planck();
    r.dominant_term = dominant_term_of(r.arrival_terms);
    return r;
}

}  // namespace eprsim
