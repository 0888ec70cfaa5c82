// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include "ratex/exercise_mc.hpp"
#include "ratex/harness.hpp"
#include "ratex/intensity.hpp"
#include "ratex/penalty_pde.hpp"
#include "ratex/reference_pricers.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

using namespace ratex;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

int failures = 0;

void verdict(int id, const std::string& name, bool ok, const std::string& detail) {
    fmt::print("[{}] criterion {}: {} | {}\n", ok ? "PASS" : "FAIL", id, name, detail);
    std::fflush(stdout);
    if (!ok) ++failures;
}

void note(const std::string& line) {
    fmt::print("    {}\n", line);
}

// Runs one criterion, turning an unexpected exception into a failure line.
void run(int id, const std::string& name, const std::function<void()>& body) {
    try {
        body();
    } catch (const std::exception& e) {
        verdict(id, name, false, std::string("exception: ") + e.what());
    }
}

struct Shared {
    RunConfig config = RunConfig::defaults();
    double tol_grid = 0.0;
    double raw_refinement = 0.0;
};

void criterion_1() {
    bool ok = true;
    double worst_rel = 0.0;
    double worst_time = 0.0;
    for (double sigma : {0.1, 0.2, 0.4}) {
        for (double r : {0.0, 0.05}) {
            MarketParams m;
            m.sigma = sigma;
            m.r = r;
            const GridSpec g = GridSpec::defaults_for(m, m.strike);
            const auto start = Clock::now();
            const PriceSurface s = solve_exogenous(m, g, [](double, double) { return 0.0; },
                                                   SolverConfig::defaults_for(m));
            const double elapsed = seconds_since(start);
            const double exact = european_put(m, 0.0, m.strike);
            const double rel = std::abs(s.anchor_value() - exact) / exact;
            note(fmt::format("sigma={} r={} pde={:.8f} closed_form={:.8f} rel_err={:.2e} time={:.3f}s",
                             sigma, r, s.anchor_value(), exact, rel, elapsed));
            ok = ok && rel < 1e-3 && elapsed < 5.0;
            worst_rel = std::max(worst_rel, rel);
            worst_time = std::max(worst_time, elapsed);
        }
    }
    verdict(1, "European recovery", ok,
            fmt::format("max rel err {:.2e} (< 1e-3), max solve time {:.3f}s (< 5s)", worst_rel, worst_time));
}

void criterion_2() {
    bool ok = true;
    double worst = 0.0;
    for (double r : {0.05, 0.0}) {
        MarketParams m;
        m.r = r;
        const GridSpec g = GridSpec::defaults_for(m, m.strike);
        for (double lambda : {0.5, 1.0, 5.0}) {
            const PriceSurface s = solve_exogenous(m, g, [lambda](double, double) { return lambda; },
                                                   SolverConfig::defaults_for(m));
            const double ref = constant_intensity_quadrature(m, lambda, 0.0, m.strike);
            const double rel = std::abs(s.anchor_value() - ref) / ref;
            note(fmt::format("r={} lambda={} pde={:.8f} quadrature={:.8f} rel_err={:.2e}", r, lambda,
                             s.anchor_value(), ref, rel));
            ok = ok && rel < 2e-3;
            worst = std::max(worst, rel);
        }
    }
    verdict(2, "constant-intensity oracle", ok, fmt::format("max rel err {:.2e} (< 2e-3)", worst));
}

void criterion_3(const Shared& sh) {
    bool ok = true;
    std::string summary;
    for (double theta : {1.0, 10.0}) {
        const auto fam = IntensityFamily::exponential(theta);
        const RunConfig& c = sh.config;
        const PriceSurface s = solve_rational(c.market, c.grid, fam, c.solver);
        MCConfig mc = c.mc;
        mc.n_paths = 200000;
        const MCEstimate est = mc_price(c.market, s, fam, mc, c.grid.anchor_spot);
        const double pde = s.anchor_value();
        const double z = (est.price - pde) / est.std_error;
        const double se_share = est.std_error / est.price;
        note(fmt::format("theta={} pde={:.6f} mc={:.6f} se={:.6f} z={:.2f} se/price={:.3f}% exercised={:.3f}",
                         theta, pde, est.price, est.std_error, z, 100.0 * se_share, est.exercise_fraction));
        ok = ok && std::abs(z) <= 3.0 && se_share < 5e-3;
        summary += fmt::format("{}theta={}: |z|={:.2f}", summary.empty() ? "" : ", ", theta, std::abs(z));
    }
    verdict(3, "fixed point by Monte Carlo", ok, summary + " (<= 3), se < 0.5% of price");
}

void criterion_4_5(Shared& sh) {
    const RunConfig& c = sh.config;

    // Grid error of the default-grid PSOR value, estimated from three nested
    // grids by Richardson extrapolation with the observed convergence ratio.
    GridSpec coarse = c.grid;
    coarse.n_space = (c.grid.n_space - 1) / 2 + 1;
    coarse.n_time = c.grid.n_time / 2;
    const double p0 = psor_american(c.market, coarse, c.solver).surface.anchor_value();
    const double p1 = psor_american(c.market, c.grid, c.solver).surface.anchor_value();
    const double p2 = psor_american(c.market, c.grid.refined(), c.solver).surface.anchor_value();
    const double d1 = std::abs(p1 - p0);
    const double d2 = std::abs(p2 - p1);
    const double q = d1 / d2;
    sh.raw_refinement = d2;
    sh.tol_grid = q > 1.0 ? d2 * q / (q - 1.0) : std::numeric_limits<double>::infinity();
    note(fmt::format("PSOR P_A(0,s0): {:.10f} ({}x{}), {:.10f} ({}x{}), {:.10f} ({}x{})", p0, coarse.n_space,
                     coarse.n_time, p1, c.grid.n_space, c.grid.n_time, p2, c.grid.refined().n_space,
                     c.grid.refined().n_time));
    note(fmt::format("refinement difference {:.4e}, observed ratio {:.3f}, tol_grid (Richardson) {:.4e}", d2, q,
                     sh.tol_grid));

    const auto start = Clock::now();
    const auto rows = run_sweep(c);
    const double elapsed = seconds_since(start);
    bool decreasing = true;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        note(fmt::format("theta={} p_theta={:.8f} abs_error={:.4e} newton_iters_max={}", rows[i].theta,
                         rows[i].p_theta, rows[i].abs_error, rows[i].newton_iters_max));
        if (i > 0 && !(rows[i].abs_error < rows[i - 1].abs_error)) decreasing = false;
    }
    const double final_error = rows.back().abs_error;
    const bool ok4 = decreasing && final_error < 10.0 * sh.tol_grid && elapsed < 120.0;
    verdict(4, "convergence to the American price", ok4,
            fmt::format("strictly decreasing={}, final error {:.4e} < 10*tol_grid {:.4e} "
                        "(10*refinement difference = {:.4e}), sweep {:.1f}s (< 120s)",
                        decreasing, final_error, 10.0 * sh.tol_grid, 10.0 * d2, elapsed));

    // Domination over every node, reusing the shared-grid PSOR surface.
    const AmericanSolution american = psor_american(c.market, c.grid, c.solver);
    double worst = -std::numeric_limits<double>::infinity();
    for (double theta : c.theta_ladder) {
        IntensityFamily fam = c.family;
        fam.theta = theta;
        const PriceSurface p = solve_rational(c.market, c.grid, fam, c.solver);
        double excess = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < p.values().size(); ++k) {
            excess = std::max(excess, p.values()[k] - american.surface.values()[k]);
        }
        note(fmt::format("theta={} max(P_theta - P_A) = {:.3e}", theta, excess));
        worst = std::max(worst, excess);
    }
    verdict(5, "domination by optimal stopping", worst <= sh.tol_grid,
            fmt::format("max excess {:.3e} <= tol_grid {:.3e}", worst, sh.tol_grid));
}

void criterion_6(const Shared& sh) {
    const auto& ladder = sh.config.theta_ladder;
    auto exp_at = [](double th) { return IntensityFamily::exponential(th); };
    auto const_at = [](double) { return IntensityFamily::constant(1.0); };
    const bool a = check_conditions(exp_at, ladder, default_epsilon_rule).passes;
    const bool b = check_conditions(const_at, ladder, default_epsilon_rule).passes;
    const bool c = check_conditions(exp_at, ladder, [](double) { return 1.0; }).passes;
    verdict(6, "condition checker verdicts", a && !b && !c,
            fmt::format("exp with theta^-1/2: {} (want true), constant: {} (want false), "
                        "exp with eps=1: {} (want false)",
                        a, b, c));
}

void criterion_7(const Shared& sh) {
    bool ok = true;
    std::string summary;
    for (double r : {0.05, 0.0}) {
        MarketParams m = sh.config.market;
        m.r = r;
        const GridSpec g = GridSpec::defaults_for(m, m.strike);
        const double tol = 2e-3 * m.strike;
        const double tree = binomial_american(m, 0.0, m.strike, 10000);
        const double psor = psor_american(m, g, SolverConfig::defaults_for(m)).surface.anchor_value();
        note(fmt::format("r={} tree={:.8f} psor={:.8f} |diff|={:.3e}", r, tree, psor, std::abs(tree - psor)));
        ok = ok && std::abs(tree - psor) <= tol;
        summary += fmt::format("r={}: |tree-psor|={:.2e}", r, std::abs(tree - psor));
        if (r == 0.0) {
            const double euro = european_put(m, 0.0, m.strike);
            note(fmt::format("r=0 european={:.8f} |tree-eu|={:.3e} |psor-eu|={:.3e}", euro,
                             std::abs(tree - euro), std::abs(psor - euro)));
            ok = ok && std::abs(tree - euro) <= tol && std::abs(psor - euro) <= tol;
            summary += fmt::format(" |tree-eu|={:.2e} |psor-eu|={:.2e}", std::abs(tree - euro),
                                   std::abs(psor - euro));
        } else {
            summary += "; ";
        }
    }
    verdict(7, "tree and PSOR cross-check", ok, summary + " (all <= 0.2)");
}

void criterion_8(const Shared& sh) {
    const RunConfig& c = sh.config;
    const AmericanSolution a = psor_american(c.market, c.grid, c.solver);
    long worst_drop = 0;
    std::size_t rows_with_boundary = 0;
    long prev = -1;
    for (std::size_t i = 0; i < a.boundary_node.size(); ++i) {
        const long node = a.boundary_node[i];
        if (node < 0) continue;
        ++rows_with_boundary;
        if (prev >= 0) worst_drop = std::max(worst_drop, prev - node);
        prev = node;
    }
    note(fmt::format("boundary at t=0: {:.4f}, near expiry: {:.4f}, rows with a boundary: {}/{}",
                     a.boundary.front(), a.boundary[a.boundary.size() - 2], rows_with_boundary,
                     a.boundary.size()));
    verdict(8, "exercise boundary nondecreasing in time", rows_with_boundary > 0 && worst_drop <= 1,
            fmt::format("largest backward step {} cell(s) (<= 1)", worst_drop));
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void criterion_9([[maybe_unused]] const Shared& sh) {
    bool ok = true;
    std::string summary;
#ifdef RATEX_CLI_PATH
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "ratex_acceptance";
    fs::create_directories(dir);
    const fs::path config = dir / "config.json";
    std::ofstream(config) << R"({"intensity": {"family": "exp", "theta": 10}, "mc": {"n_paths": 20000}})";
    auto cli = [&](const std::string& args, const fs::path& out) {
        const std::string cmd = fmt::format("\"{}\" --config \"{}\" --out \"{}\" {} 2>/dev/null", RATEX_CLI_PATH,
                                            config.string(), out.string(), args);
        return std::system(cmd.c_str()) == 0;
    };
    for (const std::string sub : {"sweep", "mc-validate"}) {
        std::vector<std::string> outputs;
        for (const std::string threads : {"1", "4", "1"}) {
            const fs::path out = dir / fmt::format("{}_{}_{}.csv", sub, threads, outputs.size());
            const bool ran = cli(fmt::format("--threads {} {}", threads, sub), out);
            ok = ok && ran;
            outputs.push_back(ran ? slurp(out) : std::string());
        }
        const bool same = !outputs[0].empty() && outputs[0] == outputs[1] && outputs[0] == outputs[2];
        note(fmt::format("ratex {}: 3 runs (threads 1, 4, 1), {} bytes, identical={}", sub, outputs[0].size(),
                         same));
        ok = ok && same;
        summary += fmt::format("{}{} identical={}", summary.empty() ? "" : ", ", sub, same);
    }
    fs::remove_all(dir);
#else
    RunConfig c = sh.config;
    std::vector<std::string> sweeps;
    for (unsigned threads : {1u, 4u, 1u}) {
        c.threads = threads;
        std::ostringstream out;
        emit_csv(run_sweep(c), out);
        sweeps.push_back(out.str());
    }
    const bool sweep_same = sweeps[0] == sweeps[1] && sweeps[0] == sweeps[2];
    const auto fam = IntensityFamily::exponential(10.0);
    const PriceSurface s = solve_rational(c.market, c.grid, fam, c.solver);
    std::vector<std::string> rows;
    for (unsigned threads : {1u, 4u, 1u}) {
        MCConfig mc = c.mc;
        mc.n_paths = 20000;
        mc.threads = threads;
        rows.push_back(format_mc_row(mc_price(c.market, s, fam, mc, c.grid.anchor_spot)));
    }
    const bool mc_same = rows[0] == rows[1] && rows[0] == rows[2];
    ok = sweep_same && mc_same;
    summary = fmt::format("sweep identical={}, mc-validate identical={}", sweep_same, mc_same);
#endif
    verdict(9, "byte-identical CSV across runs and thread counts", ok, summary);
}

}  // namespace

int main() {
    const auto start = Clock::now();
    Shared sh;
    run(1, "European recovery", criterion_1);
    run(2, "constant-intensity oracle", criterion_2);
    run(3, "fixed point by Monte Carlo", [&] { criterion_3(sh); });
    run(4, "convergence to the American price", [&] { criterion_4_5(sh); });
    run(6, "condition checker verdicts", [&] { criterion_6(sh); });
    run(7, "tree and PSOR cross-check", [&] { criterion_7(sh); });
    run(8, "exercise boundary nondecreasing in time", [&] { criterion_8(sh); });
    run(9, "byte-identical CSV across runs and thread counts", [&] { criterion_9(sh); });
    fmt::print("{} criteria failed, total time {:.1f}s\n", failures, seconds_since(start));
    return failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
