#pragma once

// Flat `key = value` configuration files (a TOML subset: comments with '#',
// numbers, booleans, double-quoted strings, and for sweep files, arrays and
// linspace/logspace ranges).

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "eprsim/apparatus.hpp"
#include "eprsim/sweep.hpp"

namespace eprsim::io {

class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string source, int line, const std::string& message)
        : std::runtime_error(source + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + message),
          source_(std::move(source)),
          line_(line) {}
    int line() const { return line_; }
    const std::string& source() const { return source_; }

private:
    std::string source_;
    int line_;
};

struct KeyValue {
    std::string key;
    std::string value;
    int line = 0;
};

namespace detail {
inline std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline std::size_t edit_distance(std::string_view a, std::string_view b) {
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j)
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

inline std::string strip_comment(std::string_view line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') quoted = !quoted;
        if (line[i] == '#' && !quoted) return std::string(line.substr(0, i));
    }
    return std::string(line);
}
}  // namespace detail

inline std::vector<KeyValue> parse_key_values(std::string_view text, const std::string& source) {
    std::vector<KeyValue> out;
    std::map<std::string, int> seen;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = detail::trim(detail::strip_comment(raw));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(source, line_no, "expected 'key = value'");
        KeyValue kv{detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)), line_no};
        if (kv.key.empty()) throw ConfigError(source, line_no, "missing key before '='");
        if (kv.value.empty()) throw ConfigError(source, line_no, "missing value for '" + kv.key + "'");
        if (auto it = seen.find(kv.key); it != seen.end())
            throw ConfigError(source, line_no,
                              "duplicate key '" + kv.key + "' (first set on line " + std::to_string(it->second) + ")");
        seen[kv.key] = line_no;
        out.push_back(std::move(kv));
    }
    return out;
}

inline double parse_number(const KeyValue& kv, const std::string& source) {
    const std::string& s = kv.value;
    const char* first = s.data();
    if (s.size() > 1 && s[0] == '+' && s[1] != '-') ++first;
    double v = 0;
    auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw ConfigError(source, kv.line, "value of '" + kv.key + "' is not a number: " + s);
    if (!std::isfinite(v)) throw ConfigError(source, kv.line, "value of '" + kv.key + "' must be finite");
    return v;
}

inline bool parse_bool(const KeyValue& kv, const std::string& source) {
    if (kv.value == "true") return true;
    if (kv.value == "false") return false;
    throw ConfigError(source, kv.line, "value of '" + kv.key + "' must be true or false");
}

inline std::string parse_string(const KeyValue& kv, const std::string& source) {
    const auto& s = kv.value;
    if (s.size() < 2 || s.front() != '"' || s.back() != '"')
        throw ConfigError(source, kv.line, "value of '" + kv.key + "' must be a double-quoted string");
    return s.substr(1, s.size() - 2);
}

inline std::string nearest_key(std::string_view key, const std::vector<std::string>& candidates) {
    std::string best;
    std::size_t best_d = std::string::npos;
    for (const auto& c : candidates) {
        const auto d = detail::edit_distance(key, c);
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return best;
}

inline constexpr std::string_view kSpeciesLabelKey = "species_label";
inline constexpr std::string_view kOverrideKey = "allow_slit_sigma_override";

inline std::vector<std::string> config_keys() {
    std::vector<std::string> keys;
    for (const auto& p : parameter_registry()) keys.emplace_back(p.name);
    keys.emplace_back(kSpeciesLabelKey);
    keys.emplace_back(kOverrideKey);
    return keys;
}

struct ParsedConfig {
    ApparatusConfig config;
    std::vector<std::string> defaulted_keys;  // keys not present in the file
    std::map<std::string, int> key_lines;
};

/// Parse and validate a configuration. Unknown keys are errors; keys that
/// are absent keep their reference default and are listed in defaulted_keys.
inline ParsedConfig parse_config_text(std::string_view text, const std::string& source = "<config>") {
    ParsedConfig parsed;
    parsed.config = table1_default();
    const auto keys = config_keys();
    for (const auto& kv : parse_key_values(text, source)) {
        parsed.key_lines[kv.key] = kv.line;
        if (kv.key == kSpeciesLabelKey) {
            parsed.config.species.label = parse_string(kv, source);
        } else if (kv.key == kOverrideKey) {
            parsed.config.allow_slit_sigma_override = parse_bool(kv, source);
        } else if (const auto* p = find_parameter(kv.key)) {
            p->set(parsed.config, parse_number(kv, source));
        } else {
            throw ConfigError(source, kv.line,
                              "unknown key '" + kv.key + "' (did you mean '" + nearest_key(kv.key, keys) + "'?)");
        }
    }
    for (const auto& k : keys)
        if (!parsed.key_lines.count(k)) parsed.defaulted_keys.push_back(k);

    const auto report = validate(parsed.config);
    if (!report.accepted()) {
        const auto first = report.errors().front();
        const auto it = parsed.key_lines.find(first.field);
        const int line = it == parsed.key_lines.end() ? 0 : it->second;
        throw ConfigError(source, line, "invalid configuration:\n" + report.summary());
    }
    return parsed;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path, 0, "cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline ParsedConfig parse_config(const std::string& path) { return parse_config_text(read_file(path), path); }

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Canonical text form: every key, registry order, round-trip precision.
inline std::string serialize_config(const ApparatusConfig& c) {
    std::ostringstream os;
    for (const auto& p : parameter_registry()) os << p.name << " = " << format_double(p.get(c)) << '\n';
    os << kSpeciesLabelKey << " = \"" << c.species.label << "\"\n";
    os << kOverrideKey << " = " << (c.allow_slit_sigma_override ? "true" : "false") << '\n';
    return os.str();
}

namespace detail {
inline std::vector<double> parse_number_list(const KeyValue& kv, std::string_view body, const std::string& source) {
    std::vector<double> out;
    std::string item;
    std::istringstream in{std::string(body)};
    while (std::getline(in, item, ',')) {
        KeyValue sub{kv.key, trim(item), kv.line};
        if (sub.value.empty()) throw ConfigError(source, kv.line, "empty element in list for '" + kv.key + "'");
        out.push_back(parse_number(sub, source));
    }
    return out;
}

inline SweepAxis parse_axis(const std::string& parameter, const KeyValue& kv, const std::string& source) {
    const auto& v = kv.value;
    if (v.front() == '[' && v.back() == ']') {
        auto values = parse_number_list(kv, std::string_view(v).substr(1, v.size() - 2), source);
        if (values.empty()) throw ConfigError(source, kv.line, "empty grid for '" + parameter + "'");
        return {parameter, values};
    }
    for (auto [prefix, scale] : {std::pair{"linspace(", GridScale::linear}, std::pair{"logspace(", GridScale::log}}) {
        const std::string_view p(prefix);
        if (v.rfind(p, 0) == 0 && v.back() == ')') {
            auto args = parse_number_list(kv, std::string_view(v).substr(p.size(), v.size() - p.size() - 1), source);
            if (args.size() != 3 || args[2] < 1 || args[2] != std::floor(args[2]))
                throw ConfigError(source, kv.line, "expected " + std::string(p) + "min, max, n)");
            try {
                return SweepAxis::range(parameter, args[0], args[1], static_cast<std::size_t>(args[2]), scale);
            } catch (const std::exception& e) {
                throw ConfigError(source, kv.line, e.what());
            }
        }
    }
    throw ConfigError(source, kv.line, "grid for '" + parameter + "' must be [a, b, ...], linspace(...) or logspace(...)");
}
}  // namespace detail

/// Sweep description: `objective`, `min_rate_per_min`, `rate_mode`,
/// `monte_carlo_events`, `monte_carlo_seed`, `workers`, and one
/// `sweep.<parameter> = grid` line per swept parameter, in order.
inline SweepSpec parse_sweep_text(std::string_view text, const std::string& source = "<sweep>") {
    SweepSpec spec;
    std::optional<std::uint64_t> mc_events;
    std::uint64_t mc_seed = 1;
    const std::vector<std::string> top = {"objective", "min_rate_per_min", "rate_mode", "monte_carlo_events",
                                          "monte_carlo_seed", "workers"};
    for (const auto& kv : parse_key_values(text, source)) {
        if (kv.key.rfind("sweep.", 0) == 0) {
            const std::string name = kv.key.substr(6);
            if (!find_parameter(name)) {
                std::vector<std::string> names;
                for (const auto& p : parameter_registry()) names.emplace_back(p.name);
                throw ConfigError(source, kv.line,
                                  "unknown sweep parameter '" + name + "' (did you mean '" + nearest_key(name, names) + "'?)");
            }
            spec.axes.push_back(detail::parse_axis(name, kv, source));
        } else if (kv.key == "objective") {
            if (kv.value == "dispersion_product") spec.objective = Objective::dispersion_product;
            else if (kv.value == "arrival_time_dispersion") spec.objective = Objective::arrival_time_dispersion;
            else if (kv.value == "rate") spec.objective = Objective::rate;
            else throw ConfigError(source, kv.line, "objective must be dispersion_product, arrival_time_dispersion or rate");
        } else if (kv.key == "min_rate_per_min") {
            spec.min_rate_per_min = parse_number(kv, source);
        } else if (kv.key == "rate_mode") {
            if (kv.value == "paper") spec.rate_mode = VelocitySpaceMode::paper;
            else if (kv.value == "derived") spec.rate_mode = VelocitySpaceMode::derived;
            else throw ConfigError(source, kv.line, "rate_mode must be paper or derived");
        } else if (kv.key == "monte_carlo_events") {
            const double n = parse_number(kv, source);
            if (n < 0 || n != std::floor(n)) throw ConfigError(source, kv.line, "monte_carlo_events must be a count");
            if (n > 0) mc_events = static_cast<std::uint64_t>(n);
        } else if (kv.key == "monte_carlo_seed") {
            mc_seed = static_cast<std::uint64_t>(parse_number(kv, source));
        } else if (kv.key == "workers") {
            spec.workers = static_cast<unsigned>(std::max(1.0, parse_number(kv, source)));
        } else {
            throw ConfigError(source, kv.line,
                              "unknown key '" + kv.key + "' (did you mean '" + nearest_key(kv.key, top) + "'?)");
        }
    }
    if (mc_events) spec.monte_carlo = MonteCarloEvaluation{*mc_events, mc_seed};
    if (spec.axes.empty()) throw ConfigError(source, 0, "sweep needs at least one 'sweep.<parameter> = ...' line");
    return spec;
}

inline SweepSpec parse_sweep(const std::string& path) { return parse_sweep_text(read_file(path), path); }

}  // namespace eprsim::io
