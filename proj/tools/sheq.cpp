// Command-line driver: simulate | verify | gxt | density | malliavin.
//
// Exit codes: 0 ok, 1 invalid input, 2 numerical failure, 3 invariant suite failure.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "sheq/config.hpp"
#include "sheq/density.hpp"
#include "sheq/errors.hpp"
#include "sheq/io.hpp"
#include "sheq/malliavin.hpp"
#include "sheq/noise.hpp"
#include "sheq/solver.hpp"
#include "sheq/verify.hpp"

namespace fs = std::filesystem;
using namespace sheq;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitSuite = 3;

struct CommonFlags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<unsigned> workers;
};

ExperimentConfig load_with_overrides(const CommonFlags& flags) {
    ExperimentConfig cfg = flags.config_path.empty() ? parse_config(Json::object()) : load_config(flags.config_path);
    if (flags.seed) cfg.seed = *flags.seed;
    if (flags.out) cfg.output = *flags.out;
    if (flags.workers) cfg.workers = *flags.workers;
    validate(cfg);
    return cfg;
}

fs::path prepare_output(const ExperimentConfig& cfg) {
    const fs::path dir(cfg.output);
    fs::create_directories(dir);
    std::ofstream(dir / "effective_config.json") << to_json(cfg).dump(2) << '\n';
    return dir;
}

void write_summary(const fs::path& dir, const Json& summary) {
    std::ofstream(dir / "summary.json") << summary.dump(2) << '\n';
}

std::string point_label(const Point& x) {
    std::string s;
    for (double c : x.coords()) s += (s.empty() ? "" : ",") + format_double(c);
    return s;
}

// ---------------------------------------------------------------------------

int cmd_simulate(const CommonFlags& flags) {
    const auto cfg = load_with_overrides(flags);
    const auto dir = prepare_output(cfg);
    const auto solver = cfg.solver_config();
    const auto drift = cfg.drift_evaluator();
    const Trajectory traj = solve_path(solver, drift, 0);
    {
        std::ofstream os(dir / "trajectory.txt");
        write_trajectory_table(os, traj);
    }
    {
        std::ofstream os(dir / "probes.txt");
        const auto pts = cfg.probe_points();
        write_probe_series(os, traj, pts);
    }
    {
        std::ofstream os(dir / "trajectory.bin", std::ios::binary);
        write_trajectory_binary(os, traj);
    }
    Json summary = {{"command", "simulate"},
                    {"steps", traj.steps()},
                    {"sup_grid_norm", sup_grid_norm(traj)},
                    {"drift_variant", to_string(drift.variant())},
                    {"eta_effective", solver.eta}};
    write_summary(dir, summary);
    std::cout << "simulate: " << traj.steps() << " steps written to " << dir.string() << '\n';
    return kExitOk;
}

int cmd_verify(const std::string& suite, const CommonFlags& flags) {
    const std::uint64_t seed = flags.seed.value_or(1);
    std::vector<std::string> suites;
    if (suite == "all") {
        suites = suite_names();
    } else {
        bool known = false;
        for (const auto& s : suite_names()) known = known || s == suite;
        if (!known) throw ConfigError("unknown suite '" + suite + "'");
        suites = {suite};
    }
    bool ok = true;
    for (const auto& s : suites) {
        const auto report = run_suite(s, seed);
        print_report(std::cout, report);
        ok = ok && report.passed();
    }
    return ok ? kExitOk : kExitSuite;
}

int cmd_gxt(const CommonFlags& flags) {
    const auto cfg = load_with_overrides(flags);
    const auto dir = prepare_output(cfg);
    const auto noise = cfg.noise_model();
    std::vector<Point> xs;
    for (const auto& x : cfg.gxt.x) xs.emplace_back(std::span<const double>(x));
    if (xs.empty()) xs.push_back(Point::centre(cfg.dim));

    // Log-spaced t-grid.
    std::vector<double> ts;
    const double a = std::log(cfg.gxt.t_min), b = std::log(cfg.gxt.t_max);
    for (int i = 0; i < cfg.gxt.points; ++i) ts.push_back(std::exp(a + (b - a) * i / (cfg.gxt.points - 1)));

    std::ofstream table(dir / "gxt.txt");
    table << "x t g g_over_t_gamma\n";
    Json reports = Json::array();
    for (const auto& x : xs) {
        for (double t : ts) {
            const double g = g_closed_form(noise, x, t);
            table << point_label(x) << ' ' << format_double(t) << ' ' << format_double(g) << ' '
                  << format_double(g / std::pow(t, cfg.gamma)) << '\n';
        }
        const double inf = g_lower_bound_check(noise, x, cfg.gamma, ts);
        Json rep = {{"x", x.coords()}, {"gamma", cfg.gamma}, {"infimum", inf}, {"positive", inf > 0.0}};
        if (noise.kind() == NoiseKind::smoothed) {
            // q_k = (1+|k|^2)^{-2 m_Q}: the exponent of the eigenvalues is 2 m_Q.
            const double e = 2.0 * noise.m_q();
            rep["c_x_formula"] = cube_example_constant(cfg.dim, e, cfg.horizon, x);
            rep["c_x_first_mode"] = cube_constant_from_first_mode(cfg.dim, e, cfg.horizon, x);
        } else if (noise.kind() == NoiseKind::identity) {
            rep["c_x_formula"] = cube_example_constant(cfg.dim, 0.0, cfg.horizon, x);
            rep["c_x_first_mode"] = cube_constant_from_first_mode(cfg.dim, 0.0, cfg.horizon, x);
        }
        reports.push_back(rep);
    }
    write_summary(dir, {{"command", "gxt"}, {"reports", reports}});
    std::cout << reports.dump(2) << '\n';
    return kExitOk;
}

void write_two_columns(const fs::path& path, const std::string& header, const std::vector<double>& a,
                       const std::vector<double>& b) {
    std::ofstream os(path);
    os << header << '\n';
    for (std::size_t i = 0; i < a.size(); ++i) os << format_double(a[i]) << ' ' << format_double(b[i]) << '\n';
}

int cmd_density(const CommonFlags& flags) {
    const auto cfg = load_with_overrides(flags);
    if (cfg.paths < 100) throw ConfigError("density needs at least 100 paths");
    const auto dir = prepare_output(cfg);
    const auto solver = cfg.solver_config();
    const auto drift = cfg.drift_evaluator();
    std::vector<Probe> probes;
    for (const auto& p : cfg.probes) probes.push_back({p.t, Point(std::span<const double>(p.x))});
    const Ensemble ens = run_ensemble(solver, drift, cfg.paths, probes, cfg.workers, true);
    {
        std::ofstream os(dir / "ensemble.txt");
        write_ensemble(os, ens);
    }
    const auto noise = cfg.noise_model();
    Json per_probe = Json::array();
    for (std::size_t p = 0; p < ens.probes.size(); ++p) {
        const auto values = ens.values(p);
        const auto norms = ens.norms(p);
        const std::string tag = std::to_string(p);
        Json rep = {{"t", ens.probes[p].t}, {"x", ens.probes[p].x.coords()}, {"samples", values.size()}};

        const auto est = kde(values, six_sigma_grid(values, static_cast<std::size_t>(cfg.density.grid_points)));
        write_two_columns(dir / ("kde_" + tag + ".txt"), "value density", est.grid, est.density);
        rep["kde"] = {{"bandwidth", est.bandwidth}, {"mass", est.mass()}, {"modes", count_modes(est)}};

        if (drift.vanishes() && solver.eta == 0.0) {
            const double mean = evaluate(apply_semigroup(ens.probes[p].t, solver.u0), ens.probes[p].x);
            const double var = g_closed_form(noise, ens.probes[p].x, ens.probes[p].t);
            const double err = gaussian_sup_error(est, mean, var);
            rep["gaussian_benchmark"] = {{"mean", mean},
                                         {"variance", var},
                                         {"sup_error", err},
                                         {"sup_error_over_peak", err / gaussian_density(mean, mean, var)}};
        }

        std::vector<double> eps = cfg.density.eps;
        if (eps.empty()) {
            const double top = *std::max_element(norms.begin(), norms.end());
            for (int i = 0; i < 20; ++i) eps.push_back(top * 1.1 * std::pow(0.8, i));
        }
        std::sort(eps.begin(), eps.end(), std::greater<>());
        eps.erase(std::unique(eps.begin(), eps.end()), eps.end());
        const auto curve = small_ball_curve(norms, eps);
        {
            std::ofstream os(dir / ("small_ball_" + tag + ".txt"));
            os << "eps probability wilson_lo wilson_hi\n";
            for (const auto& c : curve)
                os << format_double(c.eps) << ' ' << format_double(c.prob.p) << ' ' << format_double(c.prob.lo) << ' '
                   << format_double(c.prob.hi) << '\n';
        }
        const auto exponent = small_ball_exponent(cfg.density.moment_q, cfg.gamma);
        const auto slope = small_ball_slope(curve);
        rep["small_ball"] = {{"min_norm2", *std::min_element(norms.begin(), norms.end())},
                             {"predicted_p", exponent.p},
                             {"predicted_exponent", exponent.exponent},
                             {"empirical_log_slope", slope ? Json(*slope) : Json(nullptr)}};
        const auto nm = negative_moment(norms, cfg.density.moment_q);
        rep["negative_moment"] = {{"q", nm.q},
                                  {"estimate", nm.estimate},
                                  {"trimmed", nm.trimmed},
                                  {"trim_sensitivity", nm.trim_sensitivity()},
                                  {"stable", nm.stable()}};
        const auto ndg = nondegeneracy_ratio(noise, ens.probes[p].x, cfg.density.deltas);
        write_two_columns(dir / ("nondegeneracy_" + tag + ".txt"), "delta value", ndg.delta, ndg.value);
        rep["weakened_lower_bound"] = {{"condition_a_violated", ndg.condition_a_violated},
                                       {"decreasing", ndg.decreasing},
                                       {"tends_to_zero", ndg.tends_to_zero()}};
        per_probe.push_back(rep);
    }
    write_summary(dir, {{"command", "density"},
                        {"paths", ens.n_paths()},
                        {"failures", ens.failures()},
                        {"config_hash", ens.config_hash},
                        {"probes", per_probe}});
    std::cout << "density: " << ens.n_paths() << " paths (" << ens.failures() << " failed), outputs in "
              << dir.string() << '\n';
    return ens.failures() == 0 ? kExitOk : kExitNumerical;
}

int cmd_malliavin(const CommonFlags& flags, bool second) {
    const auto cfg = load_with_overrides(flags);
    const auto dir = prepare_output(cfg);
    const auto solver = cfg.solver_config();
    const auto drift = cfg.drift_evaluator();
    std::ofstream os(dir / "malliavin.txt");
    os << "path t x norm2" << (second ? " second_norm2" : "") << '\n';
    std::size_t failures = 0;
    for (std::uint64_t path = 0; path < cfg.paths; ++path) {
        try {
            const auto traj = solve_path(solver, drift, path);
            const auto coeffs = coefficient_path(traj, drift);
            for (const auto& p : cfg.probes) {
                const Point x(std::span<const double>(p.x));
                const int n = traj.time_index(p.t);
                os << path << ' ' << format_double(p.t) << ' ' << point_label(x) << ' '
                   << format_double(malliavin_norm_adjoint(traj, coeffs, n, x));
                if (second) os << ' ' << format_double(second_malliavin_norm(traj, drift, n, x));
                os << '\n';
            }
        } catch (const NumericalError& e) {
            ++failures;
            std::cerr << "path " << path << ": " << e.what() << '\n';
        }
    }
    write_summary(dir, {{"command", "malliavin"}, {"paths", cfg.paths}, {"failures", failures}});
    std::cout << "malliavin: " << cfg.paths << " paths written to " << (dir / "malliavin.txt").string() << '\n';
    return failures == 0 ? kExitOk : kExitNumerical;
}

void add_common(CLI::App* cmd, CommonFlags& flags, bool needs_config) {
    auto* opt = cmd->add_option("--config", flags.config_path, "JSON experiment configuration");
    if (needs_config) opt->check(CLI::ExistingFile);
    cmd->add_option("--seed", flags.seed, "Master seed (overrides the file)");
    cmd->add_option("--out", flags.out, "Output directory (overrides the file)");
    cmd->add_option("--workers", flags.workers, "Worker threads for ensembles")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sheq: stochastic heat equation laboratory"};
    app.require_subcommand(1);
    CommonFlags flags;

    auto* simulate = app.add_subcommand("simulate", "Solve one path and export it");
    add_common(simulate, flags, true);
    std::string suite = "all";
    auto* verify = app.add_subcommand("verify", "Run an invariant suite");
    verify->add_option("suite", suite, "drift | kernels | noise | malliavin | convergence | all");
    add_common(verify, flags, false);
    auto* gxt = app.add_subcommand("gxt", "Tabulate g(x,t) and the lower-bound report");
    add_common(gxt, flags, true);
    auto* density = app.add_subcommand("density", "Ensemble, KDE, small balls, negative moments");
    add_common(density, flags, true);
    bool second = false;
    auto* malliavin = app.add_subcommand("malliavin", "Malliavin norms per path and probe");
    add_common(malliavin, flags, true);
    malliavin->add_flag("--second", second, "Also compute the second-derivative norm (small K, M only)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (*simulate) return cmd_simulate(flags);
        if (*verify) return cmd_verify(suite, flags);
        if (*gxt) return cmd_gxt(flags);
        if (*density) return cmd_density(flags);
        if (*malliavin) return cmd_malliavin(flags, second);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::domain_error& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kExitValidation;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
    return kExitValidation;
}
