#pragma once

// Closed-form dispersion relations for the photon-recoil time-of-flight
// measurement. Every function takes and returns dimension-checked
// quantities.

#include <cmath>
#include <string>

#include "eprsim/quantity.hpp"

namespace eprsim {

namespace detail {
inline void require_positive(const Quantity& q, const Dimension& d, const char* name) {
    if (!(q.in(d) > 0)) throw DomainError(std::string(name) + " must be positive");
}
inline void require_non_negative(const Quantity& q, const Dimension& d, const char* name) {
    if (!(q.in(d) >= 0)) throw DomainError(std::string(name) + " must be non-negative");
}
}  // namespace detail

// Default half-width convention for the natural line: dE = 0.5 * hbar / tau.
inline constexpr double kHalfWidthLinewidthFactor = 0.5;

/// Initial-time dispersion: half the excitation pulse plus half the decay time.
inline Quantity initial_time_dispersion(const Quantity& pulse_duration, const Quantity& lifetime) {
    detail::require_positive(pulse_duration, dims::time, "pulse_duration");
    detail::require_positive(lifetime, dims::time, "lifetime");
    return pulse_duration / 2.0 + lifetime / 2.0;
}

/// The three independent contributions to the arrival-time dispersion, in
/// the order initial time, slit transit, velocity spread.
struct ArrivalTimeTerms {
    Quantity initial_time;
    Quantity slit_transit;
    Quantity velocity_spread;

    Quantity total() const {
        return sqrt(square(initial_time) + square(slit_transit) + square(velocity_spread));
    }
};

inline ArrivalTimeTerms arrival_time_terms(const Quantity& initial_time_sigma, const Quantity& slit_sigma,
                                           const Quantity& velocity, const Quantity& distance,
                                           const Quantity& velocity_sigma) {
    detail::require_positive(velocity, dims::velocity, "v_a");
    detail::require_positive(distance, dims::length, "x");
    detail::require_non_negative(initial_time_sigma, dims::time, "initial time dispersion");
    detail::require_non_negative(slit_sigma, dims::length, "slit sigma");
    detail::require_non_negative(velocity_sigma, dims::velocity, "velocity dispersion");
    return {initial_time_sigma, slit_sigma / velocity, distance * velocity_sigma / square(velocity)};
}

/// Arrival-time dispersion at the atom detector: quadrature sum of the
/// initial-time, slit-transit and velocity-spread terms.
inline Quantity arrival_time_dispersion(const Quantity& initial_time_sigma, const Quantity& slit_sigma,
                                        const Quantity& velocity, const Quantity& distance,
                                        const Quantity& velocity_sigma) {
    return arrival_time_terms(initial_time_sigma, slit_sigma, velocity, distance, velocity_sigma).total();
}

/// Velocity resolution needed for a given arrival-time dispersion when the
/// velocity term dominates: v^2 dt / x.
inline Quantity required_velocity_resolution(const Quantity& arrival_sigma, const Quantity& velocity,
                                             const Quantity& distance) {
    detail::require_positive(distance, dims::length, "x");
    detail::require_non_negative(arrival_sigma, dims::time, "arrival time dispersion");
    velocity.in(dims::velocity);
    return square(velocity) * arrival_sigma / distance;
}

inline Quantity recoil_velocity(const AtomSpecies& species) {
    species.check();
    return species.energy_q() / (kConstants.speed_of_light() * species.mass_q());
}

/// Transverse velocity spread from the x-component spread of the absorbed
/// laser photons.
inline Quantity laser_focus_velocity_spread(const Quantity& divergence, const Quantity& photon_energy,
                                            const Quantity& mass) {
    detail::require_non_negative(divergence, dims::none, "laser divergence");
    detail::require_positive(photon_energy, dims::energy, "photon energy");
    detail::require_positive(mass, dims::mass, "mass");
    return divergence * photon_energy / (kConstants.speed_of_light() * mass);
}

/// Natural-line fractional width (factor * hbar / tau) / E.
inline Quantity linewidth_fraction(const AtomSpecies& species, double factor = kHalfWidthLinewidthFactor) {
    species.check();
    if (!(factor > 0)) throw DomainError("linewidth factor must be positive");
    return kConstants.reduced_planck() * factor / species.lifetime_q() / species.energy_q();
}

/// Spectrometer resolving power beyond which the natural line dominates.
inline Quantity max_useful_resolution(const AtomSpecies& species, double factor = kHalfWidthLinewidthFactor) {
    return scalar(1.0) / linewidth_fraction(species, factor);
}

/// Minimum-uncertainty velocity kick from confining the position to slit_sigma.
inline Quantity diffraction_velocity_spread(const Quantity& slit_sigma, const Quantity& mass,
                                            double shape_factor = 1.0) {
    detail::require_positive(slit_sigma, dims::length, "slit sigma");
    detail::require_positive(mass, dims::mass, "mass");
    if (!(shape_factor > 0)) throw DomainError("diffraction shape factor must be positive");
    return kConstants.reduced_planck() * shape_factor / (mass * slit_sigma * 2.0);
}

/// First-order Doppler velocity resolution c / R.
inline Quantity spectrometer_velocity_resolution(const Quantity& resolving_power) {
    if (!(resolving_power.in(dims::none) > 1)) throw DomainError("spectrometer resolution must exceed 1");
    return kConstants.speed_of_light() / resolving_power;
}

/// Worst-case x-velocity projection error over an acceptance cone of half
/// angle theta_max: v (1 - cos theta_max).
inline Quantity acceptance_cosine_error(const Quantity& velocity, const Quantity& half_angle) {
    const double theta = half_angle.in(dims::none);
    if (!(theta >= 0 && theta < M_PI / 2)) throw DomainError("acceptance half angle must be in [0, pi/2)");
    const double s = std::sin(theta / 2);
    return velocity * (2.0 * s * s);
}

inline Quantity total_position_sigma(const Quantity& slit_sigma, const Quantity& detector_sigma,
                                     const Quantity& drift_sigma) {
    detail::require_non_negative(slit_sigma, dims::length, "slit sigma");
    detail::require_non_negative(detector_sigma, dims::length, "detector sigma");
    detail::require_non_negative(drift_sigma, dims::length, "drift sigma");
    return sqrt(square(slit_sigma) + square(detector_sigma) + square(drift_sigma));
}

}  // namespace eprsim
