// ratex: command-line front end for the rational-exercise put library.

#include "ratex/errors.hpp"
#include "ratex/exercise_mc.hpp"
#include "ratex/harness.hpp"
#include "ratex/intensity.hpp"
#include "ratex/penalty_pde.hpp"
#include "ratex/reference_pricers.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

struct GlobalFlags {
    std::string config_path;
    std::string out_path;
    std::optional<std::size_t> nx;
    std::optional<std::size_t> nt;
    std::optional<double> log_half_width;
    std::optional<std::uint64_t> seed;
    std::optional<double> newton_tol;
    std::optional<int> newton_max_iter;
    std::optional<unsigned> threads;
};

ratex::RunConfig resolve_config(const GlobalFlags& flags) {
    ratex::RunConfig cfg = flags.config_path.empty() ? ratex::RunConfig::defaults()
                                                     : ratex::load_run_config(flags.config_path);
    if (flags.nx) cfg.grid.n_space = *flags.nx;
    if (flags.nt) cfg.grid.n_time = *flags.nt;
    if (flags.log_half_width) cfg.grid.log_half_width = *flags.log_half_width;
    if (flags.seed) cfg.mc.seed = *flags.seed;
    if (flags.newton_tol) cfg.solver.newton_tol = *flags.newton_tol;
    if (flags.newton_max_iter) cfg.solver.newton_max_iter = *flags.newton_max_iter;
    if (flags.threads) {
        cfg.threads = *flags.threads;
        cfg.mc.threads = *flags.threads;
    }
    cfg.output_path = flags.out_path;
    cfg.validate();
    return cfg;
}

// Writes `text` to the --out path, or stdout when none was given.
void emit(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ratex::IoError("cannot open " + path + " for writing");
    out << text;
    if (!out) throw ratex::IoError("failed writing " + path);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Put pricing under intensity-driven (rationality-parameter) exercise"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalFlags flags;
    app.add_option("--config", flags.config_path, "JSON run configuration")->check(CLI::ExistingFile);
    app.add_option("--out", flags.out_path, "Output file (default: stdout)");
    app.add_option("--nx", flags.nx, "Spatial node count (odd)");
    app.add_option("--nt", flags.nt, "Time step count");
    app.add_option("--log-half-width", flags.log_half_width, "Half width of the log-price domain");
    app.add_option("--seed", flags.seed, "Monte Carlo seed");
    app.add_option("--newton-tol", flags.newton_tol, "Newton residual tolerance (currency)");
    app.add_option("--newton-max-iter", flags.newton_max_iter, "Newton iteration cap per step");
    app.add_option("--threads", flags.threads, "Worker threads (0 = all cores)");

    std::optional<double> theta;
    std::optional<std::string> family_name;
    std::optional<double> lambda;

    auto* price = app.add_subcommand("price", "Solve the fixed-point penalty PDE for one theta");
    price->add_option("--theta", theta, "Rationality parameter");
    price->add_option("--family", family_name, "exp | capped_exp | const");
    price->add_option("--lambda", lambda, "Level of the constant family");

    std::string method = "psor";
    std::size_t tree_steps = 10000;
    auto* american = app.add_subcommand("american", "American put reference price");
    american->add_option("--method", method, "tree | psor")->check(CLI::IsMember({"tree", "psor"}));
    american->add_option("--steps", tree_steps, "Binomial steps");

    auto* european = app.add_subcommand("european", "Black-Scholes European put");

    std::optional<std::size_t> paths;
    std::optional<std::size_t> steps;
    bool no_antithetic = false;
    auto* mc = app.add_subcommand("mc-validate", "Monte Carlo check of the fixed-point price");
    mc->add_option("--theta", theta, "Rationality parameter");
    mc->add_option("--paths", paths, "Number of paths");
    mc->add_option("--steps", steps, "Time steps per path");
    mc->add_flag("--no-antithetic", no_antithetic, "Disable antithetic pairing");

    bool full_surface = false;
    auto* sweep = app.add_subcommand("sweep", "Convergence of P_theta to the American price");
    sweep->add_flag("--full-surface", full_surface, "Add the max-over-grid error column");

    double epsilon_power = 0.5;
    auto* conditions = app.add_subcommand("check-conditions", "Check the convergence conditions on the ladder");
    conditions->add_option("--epsilon-power", epsilon_power, "epsilon(theta) = theta^-p");
    conditions->add_option("--family", family_name, "exp | capped_exp | const");
    conditions->add_option("--lambda", lambda, "Level of the constant family");

    CLI11_PARSE(app, argc, argv);

    try {
        ratex::RunConfig cfg = resolve_config(flags);
        if (family_name) cfg.family.kind = ratex::parse_intensity_kind(*family_name);
        if (lambda) cfg.family.level = *lambda;
        if (theta) cfg.family.theta = *theta;
        cfg.family.validate();
        const double s0 = cfg.grid.anchor_spot;

        if (*price) {
            const auto sol = ratex::solve_rational_detailed(cfg.market, cfg.grid, cfg.family, cfg.solver);
            if (!flags.out_path.empty()) ratex::write_surface_csv(sol.surface, flags.out_path);
            fmt::print("theta={} s0={} p_theta={:.17g} newton_iters_max={}\n", cfg.family.theta, s0,
                       sol.surface.anchor_value(), sol.stats.max_iterations);
        } else if (*american) {
            if (method == "tree") {
                fmt::print("{:.17g}\n", ratex::binomial_american(cfg.market, 0.0, s0, tree_steps));
            } else {
                const auto sol = ratex::psor_american(cfg.market, cfg.grid, cfg.solver);
                if (!flags.out_path.empty()) {
                    std::ofstream out(flags.out_path, std::ios::binary);
                    if (!out) throw ratex::IoError("cannot open " + flags.out_path + " for writing");
                    ratex::write_boundary_csv(sol, out);
                }
                fmt::print("{:.17g}\n", sol.surface.anchor_value());
            }
        } else if (*european) {
            emit(flags.out_path, fmt::format("{:.17g}\n", ratex::european_put(cfg.market, 0.0, s0)));
        } else if (*mc) {
            if (paths) cfg.mc.n_paths = *paths;
            if (steps) cfg.mc.n_steps = *steps;
            if (no_antithetic) cfg.mc.antithetic = false;
            const auto surface = ratex::solve_rational(cfg.market, cfg.grid, cfg.family, cfg.solver);
            const auto est = ratex::mc_price(cfg.market, surface, cfg.family, cfg.mc, s0);
            fmt::print(std::cerr, "pde={:.10f} mc={:.10f} se={:.6f} z={:.3f}\n",
                       surface.anchor_value(), est.price, est.std_error,
                       (est.price - surface.anchor_value()) / est.std_error);
            emit(flags.out_path, ratex::format_mc_row(est));
        } else if (*sweep) {
            cfg.full_surface = full_surface;
            const auto rows = ratex::run_sweep(cfg);
            if (flags.out_path.empty()) {
                ratex::emit_csv(rows, std::cout);
            } else {
                ratex::emit_csv(rows, flags.out_path);
            }
        } else if (*conditions) {
            const auto base = cfg.family;
            const auto report = ratex::check_conditions(
                [&](double th) {
                    auto f = base;
                    f.theta = th;
                    return f;
                },
                cfg.theta_ladder, [&](double th) { return std::pow(th, -epsilon_power); });
            std::string text = "theta,nu_at_zero_plus,epsilon,term_bad,term_ok\n";
            for (const auto& r : report.rows) {
                text += fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", r.theta,
                                    r.nu_at_zero_plus, r.epsilon_of_theta, r.term_bad, r.term_ok);
            }
            text += fmt::format("passes={}\n", report.passes);
            emit(flags.out_path, text);
        }
    } catch (const std::exception& e) {
        fmt::print(std::cerr, "ratex: {}\n", e.what());
        return 1;
    }
    return 0;
}
