#pragma once

// Dimensioned scalars, physical constants and atomic species data.

#include <array>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <string>

namespace eprsim {

class DimensionError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Exponents of the SI base dimensions, in the order m, kg, s, A, K, mol, cd.
struct Dimension {
    static constexpr std::size_t kBaseCount = 7;
    std::array<int, kBaseCount> exponents{};

    constexpr Dimension() = default;
    constexpr Dimension(int m, int kg, int s, int a = 0, int k = 0, int mol = 0, int cd = 0)
        : exponents{m, kg, s, a, k, mol, cd} {}

    constexpr bool operator==(const Dimension&) const = default;

    constexpr Dimension operator*(const Dimension& o) const {
        Dimension r;
        for (std::size_t i = 0; i < kBaseCount; ++i) r.exponents[i] = exponents[i] + o.exponents[i];
        return r;
    }
    constexpr Dimension operator/(const Dimension& o) const {
        Dimension r;
        for (std::size_t i = 0; i < kBaseCount; ++i) r.exponents[i] = exponents[i] - o.exponents[i];
        return r;
    }
    constexpr Dimension pow(int n) const {
        Dimension r;
        for (std::size_t i = 0; i < kBaseCount; ++i) r.exponents[i] = exponents[i] * n;
        return r;
    }
    constexpr bool dimensionless() const { return *this == Dimension{}; }

    std::string to_string() const {
        static constexpr std::array<const char*, kBaseCount> symbols{"m", "kg", "s", "A", "K", "mol", "cd"};
        std::ostringstream os;
        bool first = true;
        for (std::size_t i = 0; i < kBaseCount; ++i) {
            if (exponents[i] == 0) continue;
            if (!first) os << '.';
            os << symbols[i];
            if (exponents[i] != 1) os << '^' << exponents[i];
            first = false;
        }
        return first ? std::string("1") : os.str();
    }
};

namespace dims {
inline constexpr Dimension none{};
inline constexpr Dimension length{1, 0, 0};
inline constexpr Dimension mass{0, 1, 0};
inline constexpr Dimension time{0, 0, 1};
inline constexpr Dimension temperature{0, 0, 0, 0, 1};
inline constexpr Dimension velocity = length / time;
inline constexpr Dimension frequency = none / time;
inline constexpr Dimension energy = mass * velocity * velocity;
inline constexpr Dimension action = energy * time;
inline constexpr Dimension momentum = mass * velocity;
}  // namespace dims

// A finite magnitude in SI units together with its dimension. Arithmetic
// checks dimensions at runtime; there is no unchecked path.
class Quantity {
public:
    constexpr Quantity() = default;
    Quantity(double magnitude, Dimension dimension) : magnitude_(magnitude), dims_(dimension) {
        if (!std::isfinite(magnitude)) throw DomainError("Quantity magnitude must be finite");
    }

    double value() const { return magnitude_; }
    const Dimension& dimension() const { return dims_; }

    // Magnitude, after checking the caller's expectation of the dimension.
    double in(const Dimension& expected) const {
        if (dims_ != expected)
            throw DimensionError("expected dimension " + expected.to_string() + ", got " + dims_.to_string());
        return magnitude_;
    }

    Quantity operator+(const Quantity& o) const {
        require_same(o, "add");
        return {magnitude_ + o.magnitude_, dims_};
    }
    Quantity operator-(const Quantity& o) const {
        require_same(o, "subtract");
        return {magnitude_ - o.magnitude_, dims_};
    }
    Quantity operator-() const { return {-magnitude_, dims_}; }
    Quantity operator*(const Quantity& o) const { return {magnitude_ * o.magnitude_, dims_ * o.dims_}; }
    Quantity operator/(const Quantity& o) const { return {magnitude_ / o.magnitude_, dims_ / o.dims_}; }
    Quantity operator*(double k) const { return {magnitude_ * k, dims_}; }
    Quantity operator/(double k) const { return {magnitude_ / k, dims_}; }
    friend Quantity operator*(double k, const Quantity& q) { return q * k; }

    bool operator<(const Quantity& o) const {
        require_same(o, "compare");
        return magnitude_ < o.magnitude_;
    }
    bool operator==(const Quantity& o) const = default;

private:
    void require_same(const Quantity& o, const char* what) const {
        if (dims_ != o.dims_)
            throw DimensionError(std::string("cannot ") + what + " quantities of dimension " + dims_.to_string() +
                                 " and " + o.dims_.to_string());
    }

    double magnitude_ = 0.0;
    Dimension dims_{};
};

inline Quantity sqrt(const Quantity& q) {
    for (int e : q.dimension().exponents)
        if (e % 2 != 0) throw DimensionError("sqrt of odd dimension " + q.dimension().to_string());
    if (q.value() < 0) throw DomainError("sqrt of negative quantity");
    Dimension half;
    for (std::size_t i = 0; i < Dimension::kBaseCount; ++i) half.exponents[i] = q.dimension().exponents[i] / 2;
    return {std::sqrt(q.value()), half};
}

inline Quantity square(const Quantity& q) { return q * q; }

inline Quantity metres(double v) { return {v, dims::length}; }
inline Quantity seconds(double v) { return {v, dims::time}; }
inline Quantity kilograms(double v) { return {v, dims::mass}; }
inline Quantity kelvin(double v) { return {v, dims::temperature}; }
inline Quantity joules(double v) { return {v, dims::energy}; }
inline Quantity metres_per_second(double v) { return {v, dims::velocity}; }
inline Quantity per_second(double v) { return {v, dims::frequency}; }
inline Quantity radians(double v) { return {v, dims::none}; }
inline Quantity scalar(double v) { return {v, dims::none}; }

struct PhysicalConstants {
    double hbar = 1.054571817e-34;  // J s
    double c = 2.99792458e8;        // m/s
    double k_B = 1.380649e-23;      // J/K

    Quantity reduced_planck() const { return {hbar, dims::action}; }
    Quantity speed_of_light() const { return {c, dims::velocity}; }
    Quantity boltzmann() const { return {k_B, dims::energy / dims::temperature}; }
};

inline constexpr PhysicalConstants kConstants{};

inline constexpr double kAtomicMassUnit = 1.66053906660e-27;  // kg
inline constexpr double kLi7Mass = 1.165e-26;                  // kg, 7.016 u
inline constexpr double kLi7PaperStatedMass = 1.6e-26;         // kg, as stated in the reference design
inline constexpr double kLi7TableEnergy = 4.2e-19;             // J, reference photon energy
inline constexpr double kLi7NominalLineWavelength = 323e-9;    // m, label of the 3p -> 2s line
inline constexpr double kLi7Lifetime = 0.8e-6;                 // s

struct AtomSpecies {
    std::string label;
    double mass = 0;                 // kg
    double transition_wavelength = 0;  // m
    double transition_energy = 0;    // J
    double lifetime = 0;             // s

    bool operator==(const AtomSpecies&) const = default;

    Quantity mass_q() const { return kilograms(mass); }
    Quantity energy_q() const { return joules(transition_energy); }
    Quantity lifetime_q() const { return seconds(lifetime); }
    Quantity wavelength_q() const { return metres(transition_wavelength); }

    static double photon_energy_for(double wavelength) {
        return 2.0 * M_PI * kConstants.hbar * kConstants.c / wavelength;
    }

    static double wavelength_for(double energy) {
        return 2.0 * M_PI * kConstants.hbar * kConstants.c / energy;
    }

    static AtomSpecies from_wavelength(std::string label, double mass, double wavelength, double lifetime) {
        if (!(wavelength > 0)) throw DomainError("transition wavelength must be positive");
        AtomSpecies s{std::move(label), mass, wavelength, photon_energy_for(wavelength), lifetime};
        s.check();
        return s;
    }

    static AtomSpecies from_energy(std::string label, double mass, double energy, double lifetime) {
        if (!(energy > 0)) throw DomainError("transition energy must be positive");
        AtomSpecies s{std::move(label), mass, wavelength_for(energy), energy, lifetime};
        s.check();
        return s;
    }

    void check() const {
        if (!(mass > 0) || !std::isfinite(mass)) throw DomainError("species mass must be positive");
        if (!(lifetime > 0) || !std::isfinite(lifetime)) throw DomainError("species lifetime must be positive");
        if (!(transition_energy > 0) || !(transition_wavelength > 0))
            throw DomainError("species transition energy and wavelength must be positive");
        const double expected = photon_energy_for(transition_wavelength);
        if (std::abs(transition_energy - expected) > 1e-9 * expected)
            throw DomainError("species transition energy inconsistent with wavelength");
    }
};

// 7Li on the reference photon energy. The wavelength is the one implied by
// that energy; the printed line label (323 nm) corresponds to 6.15e-19 J,
// which none of the derived numbers use.
inline AtomSpecies li7_species(double mass = kLi7Mass) {
    return AtomSpecies::from_energy("7Li 3p->2s (nominal 323 nm)", mass, kLi7TableEnergy, kLi7Lifetime);
}

// One-dimensional RMS thermal speed sqrt(k_B T / m).
inline Quantity thermal_velocity(const Quantity& temperature, const AtomSpecies& species) {
    const double t = temperature.in(dims::temperature);
    if (!(t > 0)) throw DomainError("thermal_velocity: temperature must be positive");
    return sqrt(kConstants.boltzmann() * temperature / species.mass_q());
}

}  // namespace eprsim
