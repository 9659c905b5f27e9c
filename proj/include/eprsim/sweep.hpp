#pragma once

// Grid sweeps over apparatus parameters and a constrained coordinate
// descent on the analytic dispersion budget.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "eprsim/apparatus.hpp"
#include "eprsim/budget.hpp"
#include "eprsim/monte_carlo.hpp"
#include "eprsim/rate_budget.hpp"

namespace eprsim {

enum class Objective { dispersion_product, arrival_time_dispersion, rate };
enum class GridScale { linear, log };

inline const char* to_string(Objective o) {
    switch (o) {
        case Objective::dispersion_product: return "dispersion_product";
        case Objective::arrival_time_dispersion: return "arrival_time_dispersion";
        case Objective::rate: return "rate";
    }
    return "";
}

struct SweepAxis {
    std::string parameter;
    std::vector<double> values;

    static SweepAxis range(std::string parameter, double min, double max, std::size_t n, GridScale scale) {
        if (n == 0) throw std::invalid_argument("sweep range for '" + parameter + "' needs n >= 1");
        if (!(min < max) && n > 1) throw std::invalid_argument("sweep range for '" + parameter + "' needs min < max");
        if (scale == GridScale::log && !(min > 0)) throw std::invalid_argument("log range needs min > 0");
        SweepAxis a{std::move(parameter), {}};
        for (std::size_t i = 0; i < n; ++i) {
            const double t = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
            a.values.push_back(scale == GridScale::linear ? min + t * (max - min)
                                                          : std::exp(std::log(min) + t * (std::log(max) - std::log(min))));
        }
        if (n > 1) a.values.back() = max;
        return a;
    }
};

struct MonteCarloEvaluation {
    std::uint64_t accepted_events = 10000;
    std::uint64_t seed = 1;
};

struct SweepSpec {
    std::vector<SweepAxis> axes;
    Objective objective = Objective::dispersion_product;
    std::optional<double> min_rate_per_min;
    std::optional<MonteCarloEvaluation> monte_carlo;
    VelocitySpaceMode rate_mode = VelocitySpaceMode::paper;
    unsigned workers = 1;

    void check() const {
        if (axes.empty()) throw std::invalid_argument("sweep needs at least one parameter");
        for (const auto& a : axes) {
            if (!find_parameter(a.parameter)) throw std::invalid_argument("unknown sweep parameter '" + a.parameter + "'");
            if (a.values.empty()) throw std::invalid_argument("empty grid for '" + a.parameter + "'");
        }
    }
};

struct MonteCarloMetrics {
    bool has_statistics = false;
    double arrival_time_dispersion = 0;
    double velocity_dispersion = 0;
    double product_over_hbar = 0;
};

struct SweepRow {
    std::vector<double> point;
    ApparatusConfig config;
    bool valid = false;
    std::vector<std::string> errors;
    std::optional<BudgetReport> budget;
    double rate_per_min = 0;
    bool feasible = false;
    double objective = std::numeric_limits<double>::infinity();
    std::optional<MonteCarloMetrics> monte_carlo;
};

struct ParetoPoint {
    std::size_t row = 0;
    double dispersion_product = 0;  // J s
    double rate_per_min = 0;
};

struct SweepResult {
    std::vector<std::string> parameters;
    std::vector<SweepRow> rows;
    std::optional<std::size_t> best_feasible;
    std::vector<ParetoPoint> pareto_front;
};

inline double objective_value(Objective o, const BudgetReport& b, double rate_per_min) {
    switch (o) {
        case Objective::dispersion_product: return b.dispersion_product.value();
        case Objective::arrival_time_dispersion: return b.arrival_time_dispersion.value();
        case Objective::rate: return -rate_per_min;
    }
    return std::numeric_limits<double>::infinity();
}

inline SweepRow evaluate_point(const SweepSpec& spec, const ApparatusConfig& base, const std::vector<double>& point) {
    SweepRow row;
    row.point = point;
    row.config = base;
    try {
        for (std::size_t i = 0; i < spec.axes.size(); ++i)
            row.config = with_parameter(row.config, spec.axes[i].parameter, point[i]);
    } catch (const std::exception& e) {
        row.errors.push_back(e.what());
        return row;
    }
    const auto report = validate(row.config);
    for (const auto& issue : report.errors()) row.errors.push_back(issue.field + ": " + issue.message);
    row.valid = report.accepted();
    if (!row.valid) return row;
    row.budget = full_budget(row.config);
    row.rate_per_min = paper_chain(row.config, spec.rate_mode).per_minute();
    row.feasible = !spec.min_rate_per_min || row.rate_per_min >= *spec.min_rate_per_min;
    row.objective = objective_value(spec.objective, *row.budget, row.rate_per_min);
    if (spec.monte_carlo) {
        SimulationOptions opts;
        opts.sampling = SamplingMode::conditioned;
        opts.target = EventTarget::accepted;
        const auto sim = run_simulation(row.config, spec.monte_carlo->accepted_events, spec.monte_carlo->seed, opts);
        row.monte_carlo = MonteCarloMetrics{sim.has_statistics, sim.empirical_arrival_time_dispersion,
                                            sim.empirical_velocity_dispersion, sim.empirical_product_over_hbar};
    }
    return row;
}

/// Non-dominated (lower product, higher rate) points among valid rows,
/// sorted by rate.
inline std::vector<ParetoPoint> pareto_front(const std::vector<SweepRow>& rows) {
    std::vector<ParetoPoint> pts;
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (rows[i].valid) pts.push_back({i, rows[i].budget->dispersion_product.value(), rows[i].rate_per_min});
    std::vector<ParetoPoint> front;
    for (const auto& p : pts) {
        const bool dominated = std::any_of(pts.begin(), pts.end(), [&](const ParetoPoint& q) {
            return q.dispersion_product <= p.dispersion_product && q.rate_per_min >= p.rate_per_min &&
                   (q.dispersion_product < p.dispersion_product || q.rate_per_min > p.rate_per_min);
        });
        if (!dominated) front.push_back(p);
    }
    std::stable_sort(front.begin(), front.end(), [](const ParetoPoint& a, const ParetoPoint& b) {
        return a.rate_per_min < b.rate_per_min;
    });
    return front;
}

/// Exhaustive Cartesian sweep. Rows are in lexicographic grid order (first
/// axis slowest) whatever the number of workers.
inline SweepResult run_sweep(const SweepSpec& spec, const ApparatusConfig& base) {
    spec.check();
    SweepResult result;
    std::vector<std::vector<double>> points{{}};
    for (const auto& axis : spec.axes) {
        result.parameters.push_back(axis.parameter);
        std::vector<std::vector<double>> next;
        for (const auto& p : points)
            for (double v : axis.values) {
                auto q = p;
                q.push_back(v);
                next.push_back(std::move(q));
            }
        points = std::move(next);
    }

    result.rows.resize(points.size());
    const unsigned workers = std::max(1u, std::min<unsigned>(spec.workers, static_cast<unsigned>(points.size())));
    if (workers == 1) {
        for (std::size_t i = 0; i < points.size(); ++i) result.rows[i] = evaluate_point(spec, base, points[i]);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                for (std::size_t i = w; i < points.size(); i += workers)
                    result.rows[i] = evaluate_point(spec, base, points[i]);
            });
        for (auto& t : pool) t.join();
    }

    for (std::size_t i = 0; i < result.rows.size(); ++i) {
        const auto& r = result.rows[i];
        if (!r.feasible) continue;
        if (!result.best_feasible) {
            result.best_feasible = i;
            continue;
        }
        const auto& b = result.rows[*result.best_feasible];
        if (r.objective < b.objective || (r.objective == b.objective && r.point < b.point)) result.best_feasible = i;
    }
    result.pareto_front = pareto_front(result.rows);
    return result;
}

struct DescentBound {
    std::string parameter;
    double lo = 0;
    double hi = 0;
};

struct DescentOptions {
    Objective objective = Objective::dispersion_product;
    std::optional<double> min_rate_per_min;
    VelocitySpaceMode rate_mode = VelocitySpaceMode::paper;
    int max_iters = 20;
    double tolerance = 1e-6;
};

struct DescentResult {
    ApparatusConfig config;
    BudgetReport budget;
    double objective = 0;
    bool feasible = false;
    int iterations = 0;
    std::vector<double> history;  // best objective after each iteration, starting with the base
};

namespace detail {
// Infeasible points score above any feasible one.
inline constexpr double kInfeasiblePenalty = 1e300;

struct Scored {
    double value = kInfeasiblePenalty;
    bool feasible = false;
};

inline Scored score(const ApparatusConfig& c, const DescentOptions& o) {
    if (!validate(c).accepted()) return {};
    const auto b = full_budget(c);
    const double rate = paper_chain(c, o.rate_mode).per_minute();
    const double obj = objective_value(o.objective, b, rate);
    if (!std::isfinite(obj)) return {};
    if (o.min_rate_per_min && rate < *o.min_rate_per_min) return {kInfeasiblePenalty, false};
    return {obj, true};
}
}  // namespace detail

/// Per-parameter golden-section line searches, repeated until a full pass
/// improves the objective by less than `tolerance` (relative). Bounds with a
/// positive lower end are searched in log space. Returns a local optimum.
inline DescentResult coordinate_descent(const ApparatusConfig& base, const std::vector<DescentBound>& bounds,
                                        const DescentOptions& options = {}) {
    for (const auto& b : bounds) {
        const double v = parameter(b.parameter).get(base);
        if (!(b.lo <= v && v <= b.hi)) throw std::invalid_argument("bounds for '" + b.parameter + "' must contain the base value");
    }
    if (!validate(base).accepted()) throw ValidationError(validate(base));
    const auto b0 = full_budget(base);
    const double base_obj = objective_value(options.objective, b0, paper_chain(base, options.rate_mode).per_minute());
    if (!std::isfinite(base_obj)) throw DomainError("coordinate_descent: objective is not finite at the base point");

    ApparatusConfig current = base;
    detail::Scored current_score = detail::score(base, options);
    DescentResult result;
    result.history.push_back(current_score.value);

    constexpr double kGolden = 0.6180339887498949;
    for (int iter = 0; iter < options.max_iters; ++iter) {
        const double before = current_score.value;
        for (const auto& b : bounds) {
            const bool log_space = b.lo > 0;
            auto to_value = [&](double t) { return log_space ? std::exp(t) : t; };
            double a = log_space ? std::log(b.lo) : b.lo;
            double z = log_space ? std::log(b.hi) : b.hi;
            const double width0 = z - a;

            double best_t = log_space ? std::log(parameter(b.parameter).get(current)) : parameter(b.parameter).get(current);
            detail::Scored best = current_score;
            auto eval = [&](double t) {
                const auto cand = with_parameter(current, b.parameter, to_value(t));
                const auto s = detail::score(cand, options);
                if (s.value < best.value || (s.value == best.value && t < best_t)) {
                    best = s;
                    best_t = t;
                }
                return s.value;
            };

            eval(a);
            eval(z);
            double x1 = z - kGolden * (z - a), x2 = a + kGolden * (z - a);
            double f1 = eval(x1), f2 = eval(x2);
            for (int k = 0; k < 200 && (z - a) > options.tolerance * std::max(width0, 1e-300); ++k) {
                if (f1 <= f2) {
                    z = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = z - kGolden * (z - a);
                    f1 = eval(x1);
                } else {
                    a = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = a + kGolden * (z - a);
                    f2 = eval(x2);
                }
            }
            if (best.value < current_score.value) {
                current = with_parameter(current, b.parameter, to_value(best_t));
                current_score = best;
            }
        }
        result.history.push_back(current_score.value);
        result.iterations = iter + 1;
        const double scale = std::max(std::abs(before), 1e-300);
        if (before - current_score.value <= options.tolerance * scale) break;
    }

    result.config = current;
    result.budget = full_budget(current);
    result.feasible = current_score.feasible;
    result.objective = objective_value(options.objective, result.budget,
                                       paper_chain(current, options.rate_mode).per_minute());
    return result;
}

}  // namespace eprsim
