#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "eprsim/budget.hpp"
#include "eprsim/io/json.hpp"
#include "eprsim/monte_carlo.hpp"
#include "eprsim/rate_budget.hpp"
#include "eprsim/sweep.hpp"

using namespace eprsim;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

int failures = 0;

void check(int id, const char* title, const std::function<Outcome()>& body) {
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s criterion %2d: %s (%s)\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

SimulationOptions conditioned(unsigned workers = 1) {
    SimulationOptions o;
    o.sampling = SamplingMode::conditioned;
    o.target = EventTarget::accepted;
    o.workers = workers;
    return o;
}

Outcome quadrature_monotonicity() {
    std::mt19937 gen(101);
    std::uniform_real_distribution<double> u(0.1, 10);
    for (int i = 0; i < 5000; ++i) {
        double in[5] = {u(gen) * 1e-6, u(gen) * 1e-8, u(gen), u(gen) * 1e-2, u(gen) * 1e-2};
        auto eval = [&](const double* p) {
            return arrival_time_dispersion(seconds(p[0]), metres(p[1]), metres_per_second(p[2]), metres(p[3]),
                                           metres_per_second(p[4]))
                .value();
        };
        const double base = eval(in);
        for (int k : {0, 1, 3, 4}) {
            double bumped[5];
            std::copy(in, in + 5, bumped);
            bumped[k] *= 1 + u(gen);
            if (eval(bumped) < base) return {false, "quadrature total decreased"};
        }
    }
    return {true, "5000 random points"};
}

Outcome round_trip() {
    std::mt19937 gen(102);
    std::uniform_real_distribution<double> u(-3, 1);
    double worst = 0;
    for (int i = 0; i < 5000; ++i) {
        const auto dt = seconds(std::pow(10, u(gen) - 3));
        const auto v = metres_per_second(std::pow(10, u(gen)));
        const auto x = metres(std::pow(10, u(gen) - 1));
        const auto back =
            arrival_time_dispersion(seconds(0), metres(0), v, x, required_velocity_resolution(dt, v, x));
        worst = std::max(worst, rel(back.value(), dt.value()));
    }
    return {worst <= 1e-12, fmt("worst relative error %.3g", worst)};
}

Outcome dimension_fuzz() {
    std::mt19937 gen(103);
    std::uniform_int_distribution<int> e(-4, 4);
    std::uniform_real_distribution<double> mag(0.1, 10);
    auto random_dim = [&] {
        Dimension d;
        for (auto& x : d.exponents) x = e(gen);
        return d;
    };
    for (int i = 0; i < 20000; ++i) {
        const Quantity a(mag(gen), random_dim()), b(mag(gen), random_dim());
        if (((a * b) / b).dimension() != a.dimension()) return {false, "(a*b)/b changed dimension"};
        if (a.dimension() != b.dimension()) {
            bool threw = false;
            try {
                (void)(a + b);
            } catch (const DimensionError&) {
                threw = true;
            }
            if (!threw) return {false, "mismatched addition accepted"};
        }
    }
    return {true, "20000 random pairs"};
}

Outcome permutation_invariance() {
    auto chain = paper_chain(table1_default());
    const double base = chain.final_rate();
    std::mt19937 gen(104);
    double worst = 0;
    for (int i = 0; i < 1000; ++i) {
        std::shuffle(chain.factors.begin(), chain.factors.end(), gen);
        worst = std::max(worst, rel(chain.final_rate(), base));
    }
    return {worst <= 1e-12, fmt("worst relative change %.3g", worst)};
}

}  // namespace

int main() {
    const auto c = table1_default();
    const auto budget = full_budget(c);

    check(1, "required velocity resolution 0.05 m/s", [] {
        const double v = required_velocity_resolution(seconds(5e-4), metres_per_second(1), metres(0.01)).value();
        return Outcome{rel(v, 0.05) <= 1e-12, fmt("%.17g m/s", v)};
    });

    check(2, "laser-focus exit spread within 5% of 0.6e-2 m/s", [] {
        const double v = laser_focus_velocity_spread(radians(0.05), joules(4.2e-19), kilograms(1.165e-26)).value();
        return Outcome{rel(v, 0.6e-2) <= 0.05, fmt("%.6g m/s", v)};
    });

    check(3, "recoil velocity within 5% of 0.12 m/s", [] {
        const double v = recoil_velocity(li7_species()).value();
        return Outcome{rel(v, 0.12) <= 0.05, fmt("%.6g m/s", v)};
    });

    check(4, "linewidth-limited resolution within x1.5 of 7e9", [] {
        const double r = max_useful_resolution(li7_species()).value();
        return Outcome{r >= 7e9 / 1.5 && r <= 7e9 * 1.5, fmt("%.4g", r)};
    });

    check(5, "dispersion product in [hbar/25, hbar/10]", [&] {
        const double p = budget.dispersion_product_over_hbar.value();
        return Outcome{p >= 1.0 / 25 && p <= 1.0 / 10, fmt("hbar/%.3g, paper quotes hbar/17", 1 / p)};
    });

    check(6, "paper-mode rate within x5 of 0.1/min, largest loss is solid angle", [&] {
        const auto chain = paper_chain(c);
        const double per_min = chain.per_minute();
        const auto largest = sensitivity(chain).front().name;
        return Outcome{per_min >= 0.1 / 5 && per_min <= 0.1 * 5 && largest == "spectrometer_solid_angle",
                       fmt("%.4g counts/min, largest loss ", per_min) + largest};
    });

    check(7, "Monte Carlo agrees with closed form at 1e5 accepted events", [&] {
        const auto t0 = std::chrono::steady_clock::now();
        const auto s = run_simulation(c, 100000, 1998, conditioned());
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const double dt_ratio = s.empirical_arrival_time_dispersion / budget.arrival_time_dispersion.value();
        const double dv_ratio = s.empirical_velocity_dispersion / 0.05;
        const bool ok = s.n_accepted >= 100000 && std::abs(dt_ratio - 1) <= 0.20 && std::abs(dv_ratio - 1) <= 0.25 &&
                        secs < 60;
        return Outcome{ok, fmt("dt ratio %.4f, dv ratio %.4f, %.1f s", dt_ratio, dv_ratio, secs) + ", " +
                               std::to_string(s.n_accepted) + " accepted"};
    });

    check(8, "summary JSON identical for 1 and 8 workers", [&] {
        const auto a = io::summary_json(run_simulation(c, 20000, 42, conditioned(1))).dump();
        const auto b = io::summary_json(run_simulation(c, 20000, 42, conditioned(8))).dump();
        SimulationOptions r1, r8;
        r8.workers = 8;
        const auto d = io::summary_json(run_simulation(c, 300000, 43, r1)).dump();
        const auto e = io::summary_json(run_simulation(c, 300000, 43, r8)).dump();
        return Outcome{a == b && d == e, std::to_string(a.size()) + " and " + std::to_string(d.size()) + " bytes"};
    });

    SimulationOptions rejection;
    const std::uint64_t n_gate = 1000000;
    const auto gates = run_simulation(c, n_gate, 7, rejection);

    check(9, "emission-window acceptance within 25% of exponential gate", [&] {
        const double tau = c.species.lifetime;
        const double lo = c.excitation_to_slit_distance / c.trap_z_velocity;
        const double hi = (c.excitation_to_slit_distance + c.emission_window_length) / c.trap_z_velocity;
        const double oracle = std::exp(-lo / tau) - std::exp(-hi / tau);
        return Outcome{rel(gates.window_acceptance, oracle) <= 0.25,
                       fmt("MC %.5f vs %.5f", gates.window_acceptance, oracle)};
    });

    check(10, "cone acceptance within 3 sigma at N = 1e6", [&] {
        const double p = (1 - std::cos(c.acceptance_half_angle)) / 2;
        const double n = static_cast<double>(gates.n_sampled);
        const double sigma = std::sqrt(n * p * (1 - p));
        const double z = (static_cast<double>(gates.n_cone) - n * p) / sigma;
        return Outcome{gates.n_sampled == n_gate && std::abs(z) <= 3,
                       fmt("%.0f in cone, expected %.1f, z = %.2f", static_cast<double>(gates.n_cone), n * p, z)};
    });

    check(11, "cone projection error negligible", [&] {
        const double e = acceptance_cosine_error(metres_per_second(1), radians(2.7e-2)).value();
        const double frac = e / budget.velocity_dispersion.value();
        return Outcome{e <= 4e-4 && frac < 0.01, fmt("%.4g m/s = %.3g%% of dv", e, 100 * frac)};
    });

    check(12, "constrained descent improves perturbed start; Pareto front non-dominated", [&] {
        auto start = with_parameter(c, "slit_position_sigma", 1.5 * c.slit_position_sigma);
        start = with_parameter(start, "detector_position_sigma", 1.5 * c.detector_position_sigma);
        start = with_parameter(start, "mean_atom_x_velocity", 1.5 * c.mean_atom_x_velocity);
        const std::vector<DescentBound> bounds{
            {"slit_position_sigma", 0.1 * c.slit_position_sigma, 4 * c.slit_position_sigma},
            {"detector_position_sigma", 0.1 * c.detector_position_sigma, 4 * c.detector_position_sigma},
            {"mean_atom_x_velocity", 0.1 * c.mean_atom_x_velocity, 4 * c.mean_atom_x_velocity}};
        DescentOptions o;
        o.min_rate_per_min = 0.001;
        const auto r = coordinate_descent(start, bounds, o);
        const double start_product = full_budget(start).dispersion_product.value();
        const double rate = paper_chain(r.config).per_minute();
        const bool descent_ok = r.feasible && rate >= 0.001 && validate(r.config).accepted() &&
                                r.budget.dispersion_product.value() <= start_product;

        SweepSpec spec;
        spec.axes.push_back(SweepAxis::range("slit_position_sigma", 0.1e-8, 2e-8, 8, GridScale::log));
        spec.axes.push_back(SweepAxis::range("detector_position_sigma", 0.1e-8, 2e-8, 8, GridScale::log));
        spec.axes.push_back({"spectrometer_solid_angle_fraction", {1e-4, 3e-4, 1e-3}});
        const auto sweep = run_sweep(spec, c);
        bool front_ok = !sweep.pareto_front.empty();
        for (const auto& p : sweep.pareto_front)
            for (const auto& row : sweep.rows) {
                if (!row.valid) continue;
                const double prod = row.budget->dispersion_product.value();
                if (prod <= p.dispersion_product && row.rate_per_min >= p.rate_per_min &&
                    (prod < p.dispersion_product || row.rate_per_min > p.rate_per_min))
                    front_ok = false;
            }
        for (std::size_t i = 1; i < sweep.pareto_front.size(); ++i)
            if (sweep.pareto_front[i - 1].rate_per_min > sweep.pareto_front[i].rate_per_min) front_ok = false;
        return Outcome{descent_ok && front_ok,
                       fmt("product %.4g -> %.4g J s at %.3g counts/min", start_product,
                           r.budget.dispersion_product.value(), rate) +
                           ", front of " + std::to_string(sweep.pareto_front.size()) + " points"};
    });

    check(13, "property suite", [] {
        const Outcome parts[] = {quadrature_monotonicity(), round_trip(), dimension_fuzz(), permutation_invariance()};
        const char* names[] = {"quadrature monotonicity", "round trip", "dimension fuzz", "permutation invariance"};
        bool ok = true;
        std::string detail;
        for (int i = 0; i < 4; ++i) {
            ok = ok && parts[i].pass;
            if (i) detail += "; ";
            detail += std::string(names[i]) + (parts[i].pass ? " ok" : " FAILED") + ": " + parts[i].detail;
        }
        return Outcome{ok, detail};
    });

    std::printf("%d of 13 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
