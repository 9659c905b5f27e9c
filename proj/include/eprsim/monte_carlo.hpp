#pragma once

// Per-event simulation of the retrodiction measurement: sample the atom and
// photon, infer the atom's x-velocity from the Doppler shift the way the
// experiment would, predict its arrival at the detector, and accumulate the
// prediction-minus-truth residuals.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <thread>
#include <vector>

#include "eprsim/apparatus.hpp"
#include "eprsim/dispersion.hpp"
#include "eprsim/moments.hpp"
#include "eprsim/random.hpp"

namespace eprsim {

enum class LineProfile { gaussian, lorentzian, none };

// rejection: every gate is a filter on unconditioned draws.
// conditioned: the photon direction is drawn inside the acceptance cone and
// the decay delay inside the emission window (exact conditional laws);
// only the spectrometer passband remains a filter.
enum class SamplingMode { rejection, conditioned };

enum class EventTarget { sampled, accepted };

inline constexpr std::uint64_t kDefaultSampleCap = 1'000'000'000;
inline constexpr double kFwhmPerSigma = 2.3548200450309493;  // 2 sqrt(2 ln 2)

struct SimulationOptions {
    LineProfile natural_line = LineProfile::gaussian;
    bool spectrometer_noise = true;
    bool ideal_photon_direction = false;  // photon exactly along -x
    SamplingMode sampling = SamplingMode::rejection;
    EventTarget target = EventTarget::sampled;
    unsigned workers = 1;
    std::uint64_t batch_size = 1u << 16;
    std::uint64_t max_samples = kDefaultSampleCap;
    std::size_t histogram_bins = 50;
};

struct EventRecord {
    double true_emission_time = 0;         // s, from the start of the excitation pulse
    double true_slit_x = 0;                // m
    double true_vx_pre_emission = 0;       // m/s
    std::array<double, 3> photon_direction{-1, 0, 0};
    double measured_wavelength_shift = 0;  // fractional, -v.k/c plus line and instrument noise
    double inferred_vx = 0;                // m/s, pre-emission, assuming k = -x
    double true_vx_post = 0;               // m/s
    double predicted_vx_post = 0;          // m/s
    double predicted_arrival_time = 0;     // s
    double true_arrival_time = 0;          // s
    bool in_cone = false;
    bool in_window = false;
    bool in_passband = false;
    bool accepted = false;

    double time_residual() const { return predicted_arrival_time - true_arrival_time; }
    double velocity_residual() const { return predicted_vx_post - true_vx_post; }
};

// Quantities derived once from a configuration for the sampler.
struct SamplerSetup {
    ApparatusConfig config;
    SimulationOptions options;
    double thermal_sigma = 0;
    double laser_kick_sigma = 0;
    double diffraction_sigma = 0;
    double recoil = 0;
    double line_width_fraction = 0;
    double spectrometer_sigma_fraction = 0;
    double passband_center = 0;      // inferred pre-emission vx at the set point
    double passband_half_width = 0;  // m/s
    double cos_max = 1;
    double window_delay_lo = 0;
    double window_delay_hi = 0;

    SamplerSetup(const ApparatusConfig& c, const SimulationOptions& o) : config(c), options(o) {
        require_valid(c);
        const auto& sp = c.species;
        thermal_sigma = thermal_velocity(kelvin(c.trap_temperature), sp).value();
        laser_kick_sigma = laser_focus_velocity_spread(radians(c.laser_divergence), sp.energy_q(), sp.mass_q()).value();
        diffraction_sigma =
            diffraction_velocity_spread(metres(c.slit_position_sigma), sp.mass_q(), c.diffraction_shape_factor).value();
        recoil = recoil_velocity(sp).value();
        line_width_fraction = linewidth_fraction(sp, c.linewidth_factor).value();
        spectrometer_sigma_fraction = (1.0 / c.spectrometer_resolution) / kFwhmPerSigma;
        passband_center = c.mean_atom_x_velocity - recoil;
        passband_half_width = c.passband_half_width_elements * kConstants.c / c.spectrometer_resolution;
        cos_max = std::cos(c.acceptance_half_angle);
        window_delay_lo = c.excitation_to_slit_distance / c.trap_z_velocity;
        window_delay_hi = (c.excitation_to_slit_distance + c.emission_window_length) / c.trap_z_velocity;
    }

    // Probability mass of the gates that conditioned sampling draws inside.
    double cone_probability() const { return (1 - cos_max) / 2; }
    double window_probability() const {
        const double tau = config.species.lifetime;
        return std::exp(-window_delay_lo / tau) * (1 - std::exp(-(window_delay_hi - window_delay_lo) / tau));
    }
    double conditioned_probability() const {
        return options.sampling == SamplingMode::conditioned ? cone_probability() * window_probability() : 1.0;
    }
};

/// Draw one event. Every draw is made regardless of which gates pass, so
/// two configurations sampled from the same stream share random numbers.
inline EventRecord sample_event(const SamplerSetup& s, RandomStream& rng) {
    const auto& c = s.config;
    const auto& o = s.options;
    const bool conditioned = o.sampling == SamplingMode::conditioned;
    EventRecord e;

    const double excitation_time = rng.uniform(0.0, c.laser_pulse_duration);
    const double tau = c.species.lifetime;
    const double delay = conditioned ? rng.truncated_exponential(tau, s.window_delay_lo, s.window_delay_hi)
                                     : rng.exponential(tau);
    e.true_emission_time = excitation_time + delay;

    e.true_slit_x = rng.uniform(-c.slit_width / 2, c.slit_width / 2);
    const double vx = rng.normal(0, s.thermal_sigma) + rng.normal(0, s.laser_kick_sigma) +
                      rng.normal(0, s.diffraction_sigma);
    const double vy = rng.normal(0, s.thermal_sigma);
    const double vz = rng.normal(0, s.thermal_sigma);
    e.true_vx_pre_emission = vx;

    // Direction parametrized by mu = cos(angle to -x) and azimuth phi.
    const double mu_draw = conditioned ? rng.uniform(s.cos_max, 1.0) : rng.uniform(-1.0, 1.0);
    const double phi = rng.uniform(0.0, 2 * M_PI);
    const double mu = o.ideal_photon_direction ? 1.0 : mu_draw;
    const double sin_theta = std::sqrt(std::max(0.0, 1 - mu * mu));
    e.photon_direction = {-mu, sin_theta * std::cos(phi), sin_theta * std::sin(phi)};
    const auto& k = e.photon_direction;

    const double line_draw = o.natural_line == LineProfile::lorentzian ? rng.cauchy(s.line_width_fraction)
                                                                       : rng.normal(0, s.line_width_fraction);
    const double line_noise = o.natural_line == LineProfile::none ? 0.0 : line_draw;
    const double instrument_draw = rng.normal(0, s.spectrometer_sigma_fraction);
    const double instrument_noise = o.spectrometer_noise ? instrument_draw : 0.0;
    const double detector_jitter = rng.normal(0, c.detector_time_sigma);

    const double projection = vx * k[0] + vy * k[1] + vz * k[2];
    e.measured_wavelength_shift = -projection / kConstants.c + line_noise + instrument_noise;
    e.inferred_vx = kConstants.c * e.measured_wavelength_shift;

    e.true_vx_post = vx - s.recoil * k[0];
    e.predicted_vx_post = e.inferred_vx + s.recoil;

    const double x = c.slit_to_detector_distance;
    const bool forward = e.true_vx_post > 0 && e.predicted_vx_post > 0;
    e.true_arrival_time = forward ? e.true_emission_time + (x - e.true_slit_x) / e.true_vx_post : NAN;
    e.predicted_arrival_time = forward ? e.true_emission_time + detector_jitter + x / e.predicted_vx_post : NAN;

    e.in_cone = o.ideal_photon_direction || mu >= s.cos_max;
    e.in_window = delay >= s.window_delay_lo && delay <= s.window_delay_hi;
    e.in_passband = std::abs(e.inferred_vx - s.passband_center) <= s.passband_half_width;
    e.accepted = e.in_cone && e.in_window && e.in_passband && forward;
    return e;
}

inline EventRecord sample_event(const ApparatusConfig& config, RandomStream& rng,
                                const SimulationOptions& options = {}) {
    return sample_event(SamplerSetup(config, options), rng);
}

struct SimulationSummary {
    std::uint64_t seed = 0;
    std::uint64_t n_requested = 0;
    SamplingMode sampling = SamplingMode::rejection;
    EventTarget target = EventTarget::sampled;
    std::uint64_t n_sampled = 0;
    std::uint64_t n_accepted = 0;
    std::uint64_t n_cone = 0;
    std::uint64_t n_window = 0;
    std::uint64_t n_passband = 0;
    bool hit_sample_cap = false;
    bool has_statistics = false;
    double empirical_arrival_time_dispersion = 0;  // s
    double empirical_velocity_dispersion = 0;      // m/s
    double empirical_product_over_hbar = 0;
    double mean_time_residual = 0;                 // s
    double mean_velocity_residual = 0;             // m/s
    double mean_predicted_velocity = 0;            // m/s
    double time_residual_skewness = 0;
    double acceptance_fraction = 0;
    double cone_acceptance = 0;
    double window_acceptance = 0;
    double conditioned_gate_probability = 1;
    Histogram residual_histogram;
    std::vector<double> time_residuals;  // accepted events, in canonical order
};

namespace detail {
struct BatchResult {
    std::uint64_t sampled = 0, accepted = 0, cone = 0, window = 0, passband = 0;
    RunningMoments dt, dv, v_pred;
    std::vector<double> time_residuals;
};

inline BatchResult run_batch(const SamplerSetup& setup, std::uint64_t seed, std::uint64_t index,
                             std::uint64_t size) {
    BatchResult b;
    RandomStream rng(seed, index);
    for (std::uint64_t i = 0; i < size; ++i) {
        const EventRecord e = sample_event(setup, rng);
        ++b.sampled;
        b.cone += e.in_cone;
        b.window += e.in_window;
        b.passband += e.in_passband;
        if (!e.accepted) continue;
        ++b.accepted;
        b.dt.add(e.time_residual());
        b.dv.add(e.velocity_residual());
        b.v_pred.add(e.predicted_vx_post);
        b.time_residuals.push_back(e.time_residual());
    }
    return b;
}

// Evaluate batches [first, first + count) on up to `workers` threads.
// Results are stored by index, so the schedule does not affect them.
inline std::vector<BatchResult> run_batches(const SamplerSetup& setup, std::uint64_t seed, std::uint64_t first,
                                            std::uint64_t count, std::uint64_t batch_size,
                                            std::uint64_t last_batch_size, unsigned workers) {
    std::vector<BatchResult> out(count);
    auto size_of = [&](std::uint64_t i) { return i + 1 == count ? last_batch_size : batch_size; };
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::uint64_t>(count, 1))));
    if (workers == 1) {
        for (std::uint64_t i = 0; i < count; ++i) out[i] = run_batch(setup, seed, first + i, size_of(i));
        return out;
    }
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::uint64_t i = w; i < count; i += workers) out[i] = run_batch(setup, seed, first + i, size_of(i));
        });
    }
    for (auto& t : pool) t.join();
    return out;
}
}  // namespace detail

inline Histogram residual_histogram(const SimulationSummary& summary, std::size_t n_bins) {
    if (n_bins == 0) throw DomainError("residual_histogram: n_bins must be >= 1");
    const double sigma = summary.empirical_arrival_time_dispersion;
    const double center = summary.mean_time_residual;
    if (!(sigma > 0)) return make_histogram(summary.time_residuals, center, center, 1);
    return make_histogram(summary.time_residuals, center - 5 * sigma, center + 5 * sigma, n_bins);
}

/// Run the simulation. The result is a function of (config, n_events, seed,
/// options minus workers): batches draw from streams keyed by
/// (seed, batch index) and are merged in index order.
inline SimulationSummary run_simulation(const ApparatusConfig& config, std::uint64_t n_events, std::uint64_t seed,
                                        const SimulationOptions& options = {}) {
    if (n_events < 1) throw DomainError("run_simulation: n_events must be >= 1");
    if (options.batch_size < 1) throw DomainError("run_simulation: batch_size must be >= 1");
    const SamplerSetup setup(config, options);

    SimulationSummary s;
    s.seed = seed;
    s.n_requested = n_events;
    s.sampling = options.sampling;
    s.target = options.target;
    s.conditioned_gate_probability = setup.conditioned_probability();

    RunningMoments dt, dv, v_pred;
    auto absorb = [&](detail::BatchResult& b) {
        s.n_sampled += b.sampled;
        s.n_accepted += b.accepted;
        s.n_cone += b.cone;
        s.n_window += b.window;
        s.n_passband += b.passband;
        dt.merge(b.dt);
        dv.merge(b.dv);
        v_pred.merge(b.v_pred);
        s.time_residuals.insert(s.time_residuals.end(), b.time_residuals.begin(), b.time_residuals.end());
    };

    const std::uint64_t bs = options.batch_size;
    if (options.target == EventTarget::sampled) {
        const std::uint64_t n = std::min(n_events, options.max_samples);
        s.hit_sample_cap = n < n_events;
        const std::uint64_t batches = (n + bs - 1) / bs;
        const std::uint64_t last = n - (batches - 1) * bs;
        auto results = detail::run_batches(setup, seed, 0, batches, bs, last, options.workers);
        for (auto& b : results) absorb(b);
    } else {
        const std::uint64_t round = std::max(1u, options.workers) * 4ull;
        std::uint64_t next = 0;
        bool done = false;
        while (!done) {
            const std::uint64_t remaining_batches = (options.max_samples - next * bs) / bs;
            if (remaining_batches == 0) {
                s.hit_sample_cap = true;
                break;
            }
            const std::uint64_t count = std::min(round, remaining_batches);
            auto results = detail::run_batches(setup, seed, next, count, bs, bs, options.workers);
            for (auto& b : results) {
                absorb(b);
                ++next;
                if (s.n_accepted >= n_events) {
                    done = true;
                    break;
                }
            }
        }
    }

    if (s.n_sampled > 0) {
        const double n = static_cast<double>(s.n_sampled);
        s.acceptance_fraction = static_cast<double>(s.n_accepted) / n;
        s.cone_acceptance = static_cast<double>(s.n_cone) / n;
        s.window_acceptance = static_cast<double>(s.n_window) / n;
    }
    s.has_statistics = s.n_accepted >= 2;
    if (s.has_statistics) {
        s.empirical_arrival_time_dispersion = dt.stddev();
        s.empirical_velocity_dispersion = dv.stddev();
        s.empirical_product_over_hbar =
            config.species.mass * s.empirical_velocity_dispersion * config.total_position_sigma / kConstants.hbar;
        s.mean_time_residual = dt.mean();
        s.mean_velocity_residual = dv.mean();
        s.mean_predicted_velocity = v_pred.mean();
        s.time_residual_skewness = dt.skewness();
    }
    s.residual_histogram = residual_histogram(s, std::max<std::size_t>(1, options.histogram_bins));
    return s;
}

}  // namespace eprsim
