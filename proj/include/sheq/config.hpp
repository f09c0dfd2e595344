#pragma once

/**
 * @file config.hpp
 * @brief Experiment configuration: a JSON tree with every key validated.
 *
 * Unknown keys are errors. `to_json` emits the effective configuration with
 * all defaults resolved; parsing it again gives an identical configuration.
 */

#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "sheq/drift.hpp"
#include "sheq/errors.hpp"
#include "sheq/io.hpp"
#include "sheq/noise.hpp"
#include "sheq/solver.hpp"
#include "sheq/spectral.hpp"

namespace sheq {

using Json = nlohmann::json;

struct NoiseSpec {
    std::string kind = "identity";  // identity | smoothed | custom
    double m_q = 1.0;
    std::vector<double> q;
};

/**
 * Drift f~ + b x + s sin(x) with f~ from the catalog. The Lipschitz part is
 * absorbed by normalisation into a monotone drift and a linear term eta.
 */
struct DriftSpec {
    std::string kind = "cubic";  // zero | cubic | cubic_plus_linear | linear | polynomial | cubic_sine
    double slope = 1.0;          // for "linear"
    std::vector<double> coefficients;
    double lipschitz_linear = 0.0;
    double lipschitz_sine = 0.0;
    std::string variant = "exact";  // exact | yosida | mollified
    std::optional<double> lambda;
    std::optional<double> beta;
    double newton_tolerance = 1e-12;
    int newton_max_iterations = 200;
};

struct InitialSpec {
    std::string kind = "zero";  // zero | sine | constant | bump
    double amplitude = 1.0;
};

struct ProbeSpec {
    double t = 0.0;
    std::vector<double> x;
};

struct GxtSpec {
    double t_min = 1e-4;
    double t_max = 1.0;
    int points = 60;
    std::vector<std::vector<double>> x;  // empty: the centre
};

struct DensitySpec {
    int grid_points = 401;
    std::vector<double> eps;     // empty: derived from the sample
    double moment_q = 2.0;
    std::vector<double> deltas{0.1, 0.03, 0.01, 0.003};
};

struct ExperimentConfig {
    int dim = 1;
    int modes = 16;
    double horizon = 1.0;
    int steps = 64;
    double eta = 0.0;
    std::uint64_t seed = 1;
    NoiseSpec noise;
    DriftSpec drift;
    InitialSpec initial;
    std::vector<ProbeSpec> probes;
    std::size_t paths = 1000;
    double gamma = 0.5;
    std::string output = "out";
    unsigned workers = 1;
    bool dealias = false;
    GxtSpec gxt;
    DensitySpec density;

    // Derived objects -------------------------------------------------------

    [[nodiscard]] SineBasis basis() const { return SineBasis(dim, modes); }

    [[nodiscard]] NoiseModel noise_model() const {
        const SineBasis b = basis();
        if (noise.kind == "identity") return NoiseModel::identity(b);
        if (noise.kind == "smoothed") return NoiseModel::smoothed(b, noise.m_q);
        return NoiseModel::custom(b, noise.q);
    }

    /// f~ before normalisation.
    [[nodiscard]] DriftFunction catalog_drift() const {
        if (drift.kind == "zero") return DriftFunction::zero();
        if (drift.kind == "cubic" || drift.kind == "cubic_sine") return DriftFunction::cubic();
        if (drift.kind == "cubic_plus_linear") return DriftFunction::cubic_plus_linear();
        if (drift.kind == "linear") return DriftFunction::linear(drift.slope);
        return DriftFunction::polynomial(drift.coefficients);
    }

    /// Lipschitz perturbation (b, s); cubic_sine carries s = 1 on top of the explicit keys.
    [[nodiscard]] std::pair<double, double> lipschitz_part() const {
        return {drift.lipschitz_linear, drift.lipschitz_sine + (drift.kind == "cubic_sine" ? 1.0 : 0.0)};
    }

    /// f~ + g and the configured eta: the equation as written.
    [[nodiscard]] std::pair<DriftFunction, double> raw_form() const {
        const auto [b, s] = lipschitz_part();
        const DriftFunction f = catalog_drift();
        if (b == 0.0 && s == 0.0) return {f, eta};
        return {f.plus(b, s, f.label() + "+g"), eta};
    }

    /// (monotone drift, eta + Lipschitz constant of g): the same equation, normalised.
    [[nodiscard]] std::pair<DriftFunction, double> normalized_form() const {
        const auto [b, s] = lipschitz_part();
        if (b == 0.0 && s == 0.0) return {catalog_drift(), eta};
        const auto split = normalize_quasi_monotone(catalog_drift(), b, s);
        return {split.monotone, eta + split.eta};
    }

    [[nodiscard]] DriftEvaluator drift_evaluator() const {
        const DriftFunction f = normalized_form().first;
        if (drift.variant == "exact") return DriftEvaluator(f);
        const NewtonSettings ns{drift.newton_tolerance, drift.newton_max_iterations};
        if (drift.variant == "yosida") return DriftEvaluator(RegularizedDrift(f, *drift.lambda, std::nullopt, ns));
        return DriftEvaluator(RegularizedDrift(f, *drift.lambda, drift.beta, ns));
    }

    [[nodiscard]] SpectralField initial_field() const {
        const SineBasis b = basis();
        if (initial.kind == "zero") return initial_zero(b);
        if (initial.kind == "sine") return initial_sine(b, initial.amplitude);
        if (initial.kind == "constant") return initial_constant(b, initial.amplitude);
        return initial_bump(b, initial.amplitude);
    }

    [[nodiscard]] SolverConfig solver_config() const {
        return SolverConfig(noise_model(), horizon, steps, normalized_form().second, initial_field(), seed, dealias);
    }

    [[nodiscard]] std::vector<Point> probe_points() const {
        std::vector<Point> out;
        for (const auto& p : probes) out.emplace_back(std::span<const double>(p.x));
        return out;
    }
};

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace detail {

inline void reject_unknown(const Json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ConfigError(where + ": expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : obj.items())
        if (!ok.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
}

template <class T>
void read(const Json& obj, const char* key, T& out, const std::string& where) {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(where + "." + key + ": " + e.what());
    }
}

inline void read_opt(const Json& obj, const char* key, std::optional<double>& out, const std::string& where) {
    if (!obj.contains(key)) return;
    if (obj.at(key).is_null()) {
        out.reset();
        return;
    }
    double v = 0.0;
    read(obj, key, v, where);
    out = v;
}

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw ConfigError(msg);
}

}  // namespace detail

inline void validate(const ExperimentConfig& c) {
    using detail::require;
    require(c.dim >= 1 && c.dim <= kMaxDim, "dim must be 1.." + std::to_string(kMaxDim));
    require(c.modes >= 1, "modes must be >= 1");
    require(c.horizon > 0.0 && std::isfinite(c.horizon), "horizon must be > 0");
    require(c.steps >= 1, "steps must be >= 1");
    require(c.eta >= 0.0, "eta must be >= 0");
    require(c.gamma > 0.0 && c.gamma < 2.0, "gamma must lie in (0,2)");
    require(c.paths >= 1, "paths must be >= 1");
    require(c.workers >= 1, "workers must be >= 1");

    const std::set<std::string> noise_kinds{"identity", "smoothed", "custom"};
    require(noise_kinds.count(c.noise.kind) == 1, "noise.kind must be identity, smoothed or custom");
    if (c.noise.kind == "identity") require(c.dim == 1, "identity noise requires dim = 1");
    if (c.noise.kind == "smoothed")
        require(c.noise.m_q >= 0.0 && c.noise.m_q > 0.5 * c.dim - 1.0, "noise.m_q must satisfy m_q > dim/2 - 1");
    if (c.noise.kind == "custom") {
        std::size_t n = 1;
        for (int i = 0; i < c.dim; ++i) n *= static_cast<std::size_t>(c.modes);
        require(c.noise.q.size() == n, "noise.q must list one eigenvalue per mode");
        for (double v : c.noise.q) require(v >= 0.0 && std::isfinite(v), "noise.q entries must be >= 0");
    }

    const std::set<std::string> drift_kinds{"zero", "cubic", "cubic_plus_linear", "linear", "polynomial", "cubic_sine"};
    require(drift_kinds.count(c.drift.kind) == 1, "drift.kind is not in the catalog");
    if (c.drift.kind == "linear") require(c.drift.slope >= 0.0, "drift.slope must be >= 0 for a monotone drift");
    if (c.drift.kind == "polynomial") require(!c.drift.coefficients.empty(), "drift.coefficients must not be empty");
    const std::set<std::string> variants{"exact", "yosida", "mollified"};
    require(variants.count(c.drift.variant) == 1, "drift.variant must be exact, yosida or mollified");
    if (c.drift.beta) require(c.drift.lambda.has_value(), "drift.beta requires drift.lambda");
    if (c.drift.variant != "exact") {
        require(c.drift.lambda && *c.drift.lambda > 0.0, "drift.lambda > 0 is required for regularised variants");
    }
    if (c.drift.variant == "mollified")
        require(c.drift.beta && *c.drift.beta > 0.0 && *c.drift.beta <= 1.0, "drift.beta in (0,1] is required");
    if (c.drift.variant == "yosida") require(!c.drift.beta, "drift.beta is only meaningful for the mollified variant");
    require(c.drift.newton_tolerance > 0.0 && c.drift.newton_max_iterations >= 1, "invalid Newton settings");
    {
        const DriftFunction f = c.normalized_form().first;
        std::vector<double> grid;
        for (int i = -400; i <= 400; ++i) grid.push_back(i * 0.025);
        require(f.monotone_on(grid), "drift is not monotone after normalisation");
    }

    const std::set<std::string> initial_kinds{"zero", "sine", "constant", "bump"};
    require(initial_kinds.count(c.initial.kind) == 1, "initial.kind must be zero, sine, constant or bump");
    require(std::isfinite(c.initial.amplitude), "initial.amplitude must be finite");

    const double dt = c.horizon / c.steps;
    for (const auto& p : c.probes) {
        require(static_cast<int>(p.x.size()) == c.dim, "probe x must have dim coordinates");
        for (double v : p.x) require(v > 0.0 && v < std::numbers::pi, "probe x must lie inside (0,pi)^dim");
        const double r = p.t / dt;
        require(p.t > 0.0 && p.t <= c.horizon * (1 + 1e-12), "probe t must lie in (0, horizon]");
        require(std::abs(r - std::round(r)) <= 1e-9 * std::max(1.0, r), "probe t must be a multiple of horizon/steps");
    }

    require(c.gxt.t_min > 0.0 && c.gxt.t_max <= 1.0 && c.gxt.t_min < c.gxt.t_max, "gxt t-range must lie in (0,1]");
    require(c.gxt.points >= 2, "gxt.points must be >= 2");
    for (const auto& x : c.gxt.x) {
        require(static_cast<int>(x.size()) == c.dim, "gxt.x entries must have dim coordinates");
        for (double v : x) require(v > 0.0 && v < std::numbers::pi, "gxt.x must lie inside (0,pi)^dim");
    }
    require(c.density.grid_points >= 2, "density.grid_points must be >= 2");
    require(c.density.moment_q >= 0.0, "density.moment_q must be >= 0");
    for (double e : c.density.eps) require(e > 0.0, "density.eps must be > 0");
    for (double d : c.density.deltas) require(d > 0.0 && d < 1.0, "density.deltas must lie in (0,1)");
}

inline ExperimentConfig parse_config(const Json& j) {
    using detail::read;
    ExperimentConfig c;
    detail::reject_unknown(j, "config",
                           {"dim", "modes", "horizon", "steps", "eta", "seed", "noise", "drift", "initial", "probes",
                            "paths", "gamma", "output", "workers", "dealias", "gxt", "density"});
    read(j, "dim", c.dim, "config");
    read(j, "modes", c.modes, "config");
    read(j, "horizon", c.horizon, "config");
    read(j, "steps", c.steps, "config");
    read(j, "eta", c.eta, "config");
    read(j, "seed", c.seed, "config");
    read(j, "paths", c.paths, "config");
    read(j, "gamma", c.gamma, "config");
    read(j, "output", c.output, "config");
    read(j, "workers", c.workers, "config");
    read(j, "dealias", c.dealias, "config");
    if (j.contains("noise")) {
        const auto& n = j.at("noise");
        detail::reject_unknown(n, "noise", {"kind", "m_q", "q"});
        read(n, "kind", c.noise.kind, "noise");
        read(n, "m_q", c.noise.m_q, "noise");
        read(n, "q", c.noise.q, "noise");
    }
    if (j.contains("drift")) {
        const auto& d = j.at("drift");
        detail::reject_unknown(d, "drift",
                               {"kind", "slope", "coefficients", "lipschitz_linear", "lipschitz_sine", "variant",
                                "lambda", "beta", "newton_tolerance", "newton_max_iterations"});
        read(d, "kind", c.drift.kind, "drift");
        read(d, "slope", c.drift.slope, "drift");
        read(d, "coefficients", c.drift.coefficients, "drift");
        read(d, "lipschitz_linear", c.drift.lipschitz_linear, "drift");
        read(d, "lipschitz_sine", c.drift.lipschitz_sine, "drift");
        read(d, "variant", c.drift.variant, "drift");
        detail::read_opt(d, "lambda", c.drift.lambda, "drift");
        detail::read_opt(d, "beta", c.drift.beta, "drift");
        read(d, "newton_tolerance", c.drift.newton_tolerance, "drift");
        read(d, "newton_max_iterations", c.drift.newton_max_iterations, "drift");
    }
    if (j.contains("initial")) {
        const auto& i = j.at("initial");
        detail::reject_unknown(i, "initial", {"kind", "amplitude"});
        read(i, "kind", c.initial.kind, "initial");
        read(i, "amplitude", c.initial.amplitude, "initial");
    }
    if (j.contains("probes")) {
        if (!j.at("probes").is_array()) throw ConfigError("probes: expected an array");
        for (const auto& p : j.at("probes")) {
            detail::reject_unknown(p, "probes[]", {"t", "x"});
            ProbeSpec ps;
            read(p, "t", ps.t, "probes[]");
            read(p, "x", ps.x, "probes[]");
            c.probes.push_back(std::move(ps));
        }
    }
    if (j.contains("gxt")) {
        const auto& g = j.at("gxt");
        detail::reject_unknown(g, "gxt", {"t_min", "t_max", "points", "x"});
        read(g, "t_min", c.gxt.t_min, "gxt");
        read(g, "t_max", c.gxt.t_max, "gxt");
        read(g, "points", c.gxt.points, "gxt");
        read(g, "x", c.gxt.x, "gxt");
    }
    if (j.contains("density")) {
        const auto& d = j.at("density");
        detail::reject_unknown(d, "density", {"grid_points", "eps", "moment_q", "deltas"});
        read(d, "grid_points", c.density.grid_points, "density");
        read(d, "eps", c.density.eps, "density");
        read(d, "moment_q", c.density.moment_q, "density");
        read(d, "deltas", c.density.deltas, "density");
    }
    if (c.probes.empty()) {
        std::vector<double> centre(c.dim, std::numbers::pi / 2.0);
        c.probes.push_back({c.horizon, centre});
    }
    validate(c);
    return c;
}

inline ExperimentConfig parse_config_text(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(j);
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

/// Effective configuration with every default written out.
inline Json to_json(const ExperimentConfig& c) {
    Json j;
    j["dim"] = c.dim;
    j["modes"] = c.modes;
    j["horizon"] = c.horizon;
    j["steps"] = c.steps;
    j["eta"] = c.eta;
    j["seed"] = c.seed;
    j["paths"] = c.paths;
    j["gamma"] = c.gamma;
    j["output"] = c.output;
    j["workers"] = c.workers;
    j["dealias"] = c.dealias;
    j["noise"] = {{"kind", c.noise.kind}, {"m_q", c.noise.m_q}, {"q", c.noise.q}};
    Json d = {{"kind", c.drift.kind},
              {"slope", c.drift.slope},
              {"coefficients", c.drift.coefficients},
              {"lipschitz_linear", c.drift.lipschitz_linear},
              {"lipschitz_sine", c.drift.lipschitz_sine},
              {"variant", c.drift.variant},
              {"newton_tolerance", c.drift.newton_tolerance},
              {"newton_max_iterations", c.drift.newton_max_iterations}};
    d["lambda"] = c.drift.lambda ? Json(*c.drift.lambda) : Json(nullptr);
    d["beta"] = c.drift.beta ? Json(*c.drift.beta) : Json(nullptr);
    j["drift"] = d;
    j["initial"] = {{"kind", c.initial.kind}, {"amplitude", c.initial.amplitude}};
    Json probes = Json::array();
    for (const auto& p : c.probes) probes.push_back({{"t", p.t}, {"x", p.x}});
    j["probes"] = probes;
    j["gxt"] = {{"t_min", c.gxt.t_min}, {"t_max", c.gxt.t_max}, {"points", c.gxt.points}, {"x", c.gxt.x}};
    j["density"] = {{"grid_points", c.density.grid_points},
                    {"eps", c.density.eps},
                    {"moment_q", c.density.moment_q},
                    {"deltas", c.density.deltas}};
    return j;
}

inline bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) { return to_json(a) == to_json(b); }

}  // namespace sheq
