#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "eprsim/budget.hpp"
#include "eprsim/monte_carlo.hpp"

using namespace eprsim;

namespace {
SimulationOptions conditioned(std::uint64_t batch = 4096) {
    SimulationOptions o;
    o.sampling = SamplingMode::conditioned;
    o.target = EventTarget::accepted;
    o.batch_size = batch;
    return o;
}

SimulationOptions noiseless() {
    auto o = conditioned();
    o.natural_line = LineProfile::none;
    o.spectrometer_noise = false;
    o.ideal_photon_direction = true;
    return o;
}

double stddev(const std::vector<double>& xs) {
    RunningMoments m;
    for (double x : xs) m.add(x);
    return m.stddev();
}
}  // namespace

TEST(SampleEvent, NoiselessPredictionMatchesTruth) {
    const SamplerSetup setup(table1_default(), noiseless());
    RandomStream rng(9, 0);
    int forward = 0;
    for (int i = 0; i < 20000; ++i) {
        const auto e = sample_event(setup, rng);
        EXPECT_NEAR(e.inferred_vx, e.true_vx_pre_emission, 1e-12);
        EXPECT_NEAR(e.velocity_residual(), 0.0, 1e-12);
        EXPECT_TRUE(e.in_cone);
        EXPECT_TRUE(e.in_window);
        if (e.true_vx_post > 0) {
            ++forward;
            EXPECT_NEAR(e.time_residual(), e.true_slit_x / e.true_vx_post, 1e-12 * std::abs(e.true_arrival_time));
        }
    }
    EXPECT_GT(forward, 0);
}

TEST(SampleEvent, GateFlagsAreConsistent) {
    const SamplerSetup setup(table1_default(), SimulationOptions{});
    RandomStream rng(10, 0);
    for (int i = 0; i < 50000; ++i) {
        const auto e = sample_event(setup, rng);
        const double mu = -e.photon_direction[0];
        EXPECT_EQ(e.in_cone, mu >= setup.cos_max);
        EXPECT_EQ(e.in_passband, std::abs(e.inferred_vx - setup.passband_center) <= setup.passband_half_width);
        if (e.accepted) {
            EXPECT_TRUE(e.in_cone && e.in_window && e.in_passband);
        }
        const double norm = std::hypot(e.photon_direction[0], e.photon_direction[1], e.photon_direction[2]);
        EXPECT_NEAR(norm, 1.0, 1e-12);
    }
}

TEST(Simulation, NoiselessVelocityDispersionVanishes) {
    const auto s = run_simulation(table1_default(), 5000, 3, noiseless());
    ASSERT_TRUE(s.has_statistics);
    EXPECT_LE(s.empirical_velocity_dispersion, 4e-4);
}

// Truth consistency: with no measurement noise only the slit-position term
// survives, w / sqrt(12) / v.
TEST(Simulation, NoiselessTimeDispersionIsSlitTerm) {
    const auto c = table1_default();
    const auto s = run_simulation(c, 20000, 4, noiseless());
    ASSERT_TRUE(s.has_statistics);
    const double expected = c.slit_width / std::sqrt(12.0) / s.mean_predicted_velocity;
    EXPECT_NEAR(s.empirical_arrival_time_dispersion / expected, 1.0, 0.05);
    EXPECT_NEAR(s.time_residual_skewness, 0.0, 3 * std::sqrt(6.0 / s.n_accepted));
}

TEST(Simulation, SymmetricJitterGivesZeroSkewness) {
    auto c = table1_default();
    c.detector_time_sigma = 5e-3;
    const auto s = run_simulation(c, 20000, 5, conditioned());
    ASSERT_TRUE(s.has_statistics);
    EXPECT_NEAR(s.time_residual_skewness, 0.0, 3 * std::sqrt(6.0 / s.n_accepted));
}

TEST(Simulation, TableOneAgreesWithBudget) {
    const auto c = table1_default();
    const auto b = full_budget(c);
    const auto s = run_simulation(c, 20000, 1998, conditioned());
    ASSERT_TRUE(s.has_statistics);
    EXPECT_GE(s.n_accepted, 20000u);
    EXPECT_NEAR(s.empirical_arrival_time_dispersion / b.arrival_time_dispersion.value(), 1.0, 0.2);
    EXPECT_NEAR(s.empirical_velocity_dispersion / 0.05, 1.0, 0.25);
    EXPECT_NEAR(s.mean_predicted_velocity, c.mean_atom_x_velocity, 0.01);
    EXPECT_NEAR(s.conditioned_gate_probability, 1.8223892858154622e-4 * 0.08137464431125221, 1e-12);
}

TEST(Simulation, AcceptedTargetStopsAtFirstSufficientBatch) {
    const auto s = run_simulation(table1_default(), 3000, 2, conditioned(1024));
    EXPECT_GE(s.n_accepted, 3000u);
    EXPECT_EQ(s.n_sampled % 1024, 0u);
    const auto shorter = run_simulation(table1_default(), 3000, 2, conditioned(1024));
    EXPECT_EQ(shorter.n_sampled, s.n_sampled);
    EXPECT_EQ(s.time_residuals.size(), s.n_accepted);
}

TEST(Simulation, DeterministicAcrossWorkerCounts) {
    auto one = conditioned();
    auto eight = conditioned();
    eight.workers = 8;
    const auto a = run_simulation(table1_default(), 5000, 77, one);
    const auto b = run_simulation(table1_default(), 5000, 77, eight);
    EXPECT_EQ(a.n_sampled, b.n_sampled);
    EXPECT_EQ(a.n_accepted, b.n_accepted);
    EXPECT_EQ(a.time_residuals, b.time_residuals);
    EXPECT_EQ(a.empirical_arrival_time_dispersion, b.empirical_arrival_time_dispersion);
    EXPECT_EQ(a.empirical_velocity_dispersion, b.empirical_velocity_dispersion);
    EXPECT_EQ(a.residual_histogram.counts, b.residual_histogram.counts);

    SimulationOptions rej;
    rej.batch_size = 10000;
    auto rej8 = rej;
    rej8.workers = 8;
    const auto c = run_simulation(table1_default(), 95000, 78, rej);
    const auto d = run_simulation(table1_default(), 95000, 78, rej8);
    EXPECT_EQ(c.n_sampled, 95000u);
    EXPECT_EQ(c.n_cone, d.n_cone);
    EXPECT_EQ(c.n_window, d.n_window);
    EXPECT_EQ(c.n_passband, d.n_passband);
}

TEST(Simulation, SeedChangesResult) {
    const auto a = run_simulation(table1_default(), 2000, 1, conditioned());
    const auto b = run_simulation(table1_default(), 2000, 2, conditioned());
    EXPECT_NE(a.time_residuals, b.time_residuals);
}

TEST(Simulation, WindowAcceptanceMatchesExponentialGate) {
    SimulationOptions o;
    const auto s = run_simulation(table1_default(), 400000, 11, o);
    const double oracle = 0.08137464431125221;
    EXPECT_NEAR(s.window_acceptance / oracle, 1.0, 0.25);
    EXPECT_NEAR(SamplerSetup(table1_default(), o).window_probability(), oracle, 1e-12);
}

TEST(Simulation, ConeAcceptanceWithinBinomialError) {
    SimulationOptions o;
    const std::uint64_t n = 1000000;
    const auto s = run_simulation(table1_default(), n, 12, o);
    const double p = (1 - std::cos(2.7e-2)) / 2;
    EXPECT_NEAR(p, 1.8223892858154622e-4, 1e-15);
    const double sigma = std::sqrt(n * p * (1 - p));
    EXPECT_NEAR(static_cast<double>(s.n_cone), n * p, 3 * sigma);
}

// Property: with shared random numbers, shrinking the cone never adds events.
TEST(SimulationProperty, ConeCountMonotoneInAngle) {
    SimulationOptions o;
    std::uint64_t previous = std::numeric_limits<std::uint64_t>::max();
    for (double theta : {1.2, 0.6, 0.3, 0.1, 0.027, 0.01}) {
        auto c = table1_default();
        c.acceptance_half_angle = theta;
        const auto s = run_simulation(c, 50000, 13, o);
        EXPECT_LE(s.n_cone, previous) << theta;
        EXPECT_LE(s.n_accepted, s.n_cone);
        previous = s.n_cone;
    }
}

// Property: quadrupling the accepted count halves the seed-to-seed spread
// of the estimated dispersions.
TEST(SimulationProperty, SpreadShrinksAsInverseSqrtN) {
    std::vector<double> small_t, large_t, small_v, large_v;
    for (std::uint64_t seed = 100; seed < 120; ++seed) {
        const auto a = run_simulation(table1_default(), 1000, seed, conditioned(2048));
        const auto b = run_simulation(table1_default(), 4000, seed + 1000, conditioned(2048));
        small_t.push_back(a.empirical_arrival_time_dispersion);
        large_t.push_back(b.empirical_arrival_time_dispersion);
        small_v.push_back(a.empirical_velocity_dispersion);
        large_v.push_back(b.empirical_velocity_dispersion);
    }
    const double rt = stddev(small_t) / stddev(large_t);
    const double rv = stddev(small_v) / stddev(large_v);
    EXPECT_GT(rt, 1.3);
    EXPECT_LT(rt, 3.0);
    EXPECT_GT(rv, 1.3);
    EXPECT_LT(rv, 3.0);
}

TEST(Simulation, HistogramCountsEveryAcceptedEvent) {
    const auto s = run_simulation(table1_default(), 3000, 14, conditioned());
    EXPECT_EQ(s.residual_histogram.total(), s.n_accepted);
    EXPECT_EQ(s.residual_histogram.counts.size(), 50u);
    const auto h = residual_histogram(s, 7);
    EXPECT_EQ(h.counts.size(), 7u);
    EXPECT_EQ(h.total(), s.n_accepted);
    EXPECT_THROW(residual_histogram(s, 0), DomainError);
}

TEST(Simulation, NoAcceptedEventsHasNoStatistics) {
    auto c = table1_default();
    c.passband_half_width_elements = 1e-12;
    SimulationOptions o;
    const auto s = run_simulation(c, 2000, 15, o);
    EXPECT_EQ(s.n_accepted, 0u);
    EXPECT_FALSE(s.has_statistics);
    EXPECT_EQ(s.residual_histogram.counts.size(), 1u);
    EXPECT_EQ(s.residual_histogram.total(), 0u);
}

TEST(Simulation, SampleCapIsReported) {
    auto c = table1_default();
    c.passband_half_width_elements = 1e-12;
    auto o = conditioned(1000);
    o.max_samples = 10000;
    const auto s = run_simulation(c, 10, 16, o);
    EXPECT_TRUE(s.hit_sample_cap);
    EXPECT_EQ(s.n_sampled, 10000u);
    EXPECT_FALSE(s.has_statistics);
}

TEST(Simulation, RejectsBadArguments) {
    EXPECT_THROW(run_simulation(table1_default(), 0, 1), DomainError);
    auto c = table1_default();
    c.slit_width = -1;
    EXPECT_THROW(run_simulation(c, 10, 1), ValidationError);
}

// The Lorentzian line has tails far beyond the Gaussian of the same width.
TEST(Simulation, LorentzianLineHasHeavyTails) {
    auto count_tail = [](LineProfile p) {
        SimulationOptions o;
        o.natural_line = p;
        o.spectrometer_noise = false;
        o.ideal_photon_direction = true;
        const SamplerSetup setup(table1_default(), o);
        const double scale = setup.line_width_fraction * kConstants.c;
        RandomStream rng(17, 0);
        int tail = 0;
        const int n = 100000;
        for (int i = 0; i < n; ++i) {
            const auto e = sample_event(setup, rng);
            tail += std::abs(e.inferred_vx - e.true_vx_pre_emission) > 10 * scale;
        }
        return tail / double(n);
    };
    EXPECT_EQ(count_tail(LineProfile::gaussian), 0.0);
    EXPECT_NEAR(count_tail(LineProfile::lorentzian), 2 / (M_PI * 10), 0.005);
}
