#include "ratex/harness.hpp"

#include "ratex/errors.hpp"
#include "ratex/reference_pricers.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <ostream>
#include <thread>

namespace ratex {

RunConfig RunConfig::defaults() {
    RunConfig cfg;
    cfg.grid = GridSpec::defaults_for(cfg.market, cfg.market.strike);
    cfg.family = IntensityFamily::exponential(10.0);
    cfg.solver = SolverConfig::defaults_for(cfg.market);
    return cfg;
}

void RunConfig::validate() const {
    market.validate();
    grid.validate();
    family.validate();
    mc.validate();
    solver.validate();
    if (tree_steps < 1) throw ArgumentError("config: tree_steps must be >= 1");
}

namespace {

template <typename T>
void read(const nlohmann::json& obj, const char* key, T& target) {
    if (!obj.contains(key)) return;
    try {
        target = obj.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ArgumentError(fmt::format("config: bad value for '{}': {}", key, e.what()));
    }
}

const nlohmann::json& section(const nlohmann::json& doc, const char* key) {
    static const nlohmann::json empty = nlohmann::json::object();
    if (!doc.contains(key)) return empty;
    const auto& s = doc.at(key);
    if (!s.is_object()) throw ArgumentError(fmt::format("config: '{}' must be an object", key));
    return s;
}

}  // namespace

RunConfig parse_run_config(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ArgumentError("config: top level must be an object");
    RunConfig cfg = RunConfig::defaults();

    const auto& m = section(doc, "market");
    read(m, "r", cfg.market.r);
    read(m, "sigma", cfg.market.sigma);
    read(m, "strike", cfg.market.strike);
    read(m, "expiry", cfg.market.expiry);
    cfg.market.validate();

    cfg.grid = GridSpec::defaults_for(cfg.market, cfg.market.strike);
    const auto& g = section(doc, "grid");
    read(g, "n_space", cfg.grid.n_space);
    read(g, "n_time", cfg.grid.n_time);
    read(g, "log_half_width", cfg.grid.log_half_width);
    read(g, "anchor_spot", cfg.grid.anchor_spot);

    const auto& in = section(doc, "intensity");
    std::string family_name = "exp";
    read(in, "family", family_name);
    cfg.family.kind = parse_intensity_kind(family_name);
    read(in, "theta", cfg.family.theta);
    read(in, "lambda", cfg.family.level);
    read(in, "cap", cfg.family.cap);

    const auto& mc = section(doc, "mc");
    read(mc, "n_paths", cfg.mc.n_paths);
    read(mc, "n_steps", cfg.mc.n_steps);
    read(mc, "seed", cfg.mc.seed);
    read(mc, "antithetic", cfg.mc.antithetic);

    read(doc, "theta_ladder", cfg.theta_ladder);
    cfg.solver = SolverConfig::defaults_for(cfg.market);
    cfg.validate();
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ArgumentError(fmt::format("config {}: {}", path, e.what()));
    }
    return parse_run_config(doc);
}

namespace {

void check_ladder(const std::vector<double>& ladder) {
    if (ladder.size() < 3) throw ArgumentError("sweep: theta ladder needs >= 3 entries");
    for (std::size_t i = 0; i < ladder.size(); ++i) {
        if (!(std::isfinite(ladder[i]) && ladder[i] >= 0.0)) {
            throw ArgumentError("sweep: theta values must be finite and >= 0");
        }
        if (i > 0 && !(ladder[i] > ladder[i - 1])) {
            throw ArgumentError("sweep: theta ladder must be strictly increasing");
        }
    }
}

SweepRow solve_rung(const RunConfig& config, const AmericanSolution& american, double tree,
                    double theta) {
    IntensityFamily family = config.family;
    family.theta = theta;
    const RationalSolution sol = [&] {
        try {
            return solve_rational_detailed(config.market, config.grid, family, config.solver);
        } catch (const NumericalError& e) {
            throw NumericalError(fmt::format("sweep failed at theta={}: {}", theta, e.what()),
                                 e.time_step(), e.residual());
        }
    }();
    SweepRow row;
    row.theta = theta;
    row.p_theta = sol.surface.anchor_value();
    row.p_american_psor = american.surface.anchor_value();
    row.p_american_tree = tree;
    row.abs_error = std::abs(row.p_american_psor - row.p_theta);
    const VanishingTerms terms = vanishing_terms(family, default_epsilon_rule(theta),
                                                 config.market.expiry, config.market.strike);
    row.term_bad = terms.term_bad_regret;
    row.term_ok = terms.term_ok_regret;
    row.newton_iters_max = sol.stats.max_iterations;
    if (config.full_surface) {
        row.has_grid_error = true;
        const auto a = american.surface.values();
        const auto p = sol.surface.values();
        for (std::size_t k = 0; k < a.size(); ++k) {
            row.max_grid_error = std::max(row.max_grid_error, std::abs(a[k] - p[k]));
        }
    }
    return row;
}

}  // namespace

std::vector<SweepRow> run_sweep(const RunConfig& config) {
    check_ladder(config.theta_ladder);
    config.validate();

    const AmericanSolution american = psor_american(config.market, config.grid, config.solver);
    const double tree =
        binomial_american(config.market, 0.0, config.grid.anchor_spot, config.tree_steps);

    const std::size_t n = config.theta_ladder.size();
    std::vector<SweepRow> rows(n);
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t width = std::min<std::size_t>(n, config.threads == 0 ? hw : config.threads);

    // Rungs run in waves of `width`; results land in ladder order.
    for (std::size_t begin = 0; begin < n; begin += width) {
        const std::size_t end = std::min(n, begin + width);
        if (end - begin == 1) {
            rows[begin] = solve_rung(config, american, tree, config.theta_ladder[begin]);
            continue;
        }
        std::vector<std::future<SweepRow>> pending;
        for (std::size_t i = begin; i < end; ++i) {
            pending.push_back(std::async(std::launch::async, solve_rung, std::cref(config),
                                         std::cref(american), tree, config.theta_ladder[i]));
        }
        for (std::size_t i = begin; i < end; ++i) rows[i] = pending[i - begin].get();
    }
    return rows;
}

void emit_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
    if (rows.empty()) throw ArgumentError("emit_csv: no rows");
    const bool grid_column = std::any_of(rows.begin(), rows.end(),
                                         [](const SweepRow& r) { return r.has_grid_error; });
    fmt::memory_buffer buf;
    auto it = std::back_inserter(buf);
    fmt::format_to(it, "theta,p_theta,p_american_psor,p_american_tree,abs_error,term_bad,term_ok,"
                       "newton_iters_max{}\n",
                   grid_column ? ",max_grid_error" : "");
    for (const SweepRow& r : rows) {
        fmt::format_to(it, "{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{}", r.theta,
                       r.p_theta, r.p_american_psor, r.p_american_tree, r.abs_error, r.term_bad,
                       r.term_ok, r.newton_iters_max);
        if (grid_column) fmt::format_to(it, ",{:.17g}", r.max_grid_error);
        fmt::format_to(it, "\n");
    }
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw IoError("emit_csv: stream write failed");
}

void emit_csv(const std::vector<SweepRow>& rows, const std::string& path) {
    if (rows.empty()) throw ArgumentError("emit_csv: no rows");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    emit_csv(rows, out);
    out.close();
    if (!out) throw IoError("failed writing " + path);
}

double psor_refinement_error(const MarketParams& market, const GridSpec& grid,
                             const SolverConfig& cfg) {
    const double coarse = psor_american(market, grid, cfg).surface.anchor_value();
    const double fine = psor_american(market, grid.refined(), cfg).surface.anchor_value();
    return std::abs(fine - coarse);
}

std::string format_mc_row(const MCEstimate& est) {
    return fmt::format("{:.17g},{:.17g},{:.17g},{:.17g}\n", est.price, est.std_error,
                       est.exercise_fraction, est.mean_exercise_time);
}

}  // namespace ratex
