#pragma once

#include "ratex/exercise_mc.hpp"
#include "ratex/intensity.hpp"
#include "ratex/market.hpp"
#include "ratex/penalty_pde.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace ratex {

/// Everything a CLI run needs. Field defaults reproduce the reference setup:
/// r = 0.05, sigma = 0.2, K = 100, T = 1, s0 = K, ladder {1, 5, 25, 125, 625}.
struct RunConfig {
    MarketParams market;
    GridSpec grid;
    IntensityFamily family;        ///< theta is overridden per ladder rung
    std::vector<double> theta_ladder{1.0, 5.0, 25.0, 125.0, 625.0};
    MCConfig mc;
    SolverConfig solver;
    std::size_t tree_steps = 10000;
    bool full_surface = false;     ///< add the max-over-grid error column
    unsigned threads = 0;          ///< concurrent theta solves; 0 = hardware
    std::string output_path;       ///< empty = stdout

    static RunConfig defaults();
    void validate() const;
};

/**
 * Parses the JSON layout
 *   {"market": {"r", "sigma", "strike", "expiry"},
 *    "grid": {"n_space", "n_time", "log_half_width", "anchor_spot"},
 *    "intensity": {"family", "theta", "lambda", "cap"},
 *    "mc": {"n_paths", "n_steps", "seed", "antithetic"},
 *    "theta_ladder": [...]}
 * Every key is optional; missing grid width and anchor follow the market
 * (8 sigma sqrt(T), strike). Throws ArgumentError on malformed input.
 */
RunConfig parse_run_config(const nlohmann::json& doc);
RunConfig load_run_config(const std::string& path);

struct SweepRow {
    double theta = 0.0;
    double p_theta = 0.0;
    double p_american_psor = 0.0;
    double p_american_tree = 0.0;
    double abs_error = 0.0;
    double term_bad = 0.0;
    double term_ok = 0.0;
    int newton_iters_max = 0;
    bool has_grid_error = false;
    double max_grid_error = 0.0;   ///< max_j |P_A - P_theta| over every node
};

/**
 * Solves the grid-matched American put once, then P_theta for every rung, and
 * returns one row per rung in ladder order. Rungs are solved concurrently.
 * Throws ArgumentError for a ladder with fewer than 3 or non-increasing rungs;
 * solver failures are rethrown naming the failing theta.
 */
std::vector<SweepRow> run_sweep(const RunConfig& config);

/// CSV with header theta,p_theta,p_american_psor,p_american_tree,abs_error,
/// term_bad,term_ok,newton_iters_max (plus max_grid_error when present).
void emit_csv(const std::vector<SweepRow>& rows, std::ostream& out);
void emit_csv(const std::vector<SweepRow>& rows, const std::string& path);

/// |P_A(0, s0)| difference between PSOR on `grid` and on grid.refined().
double psor_refinement_error(const MarketParams& market, const GridSpec& grid,
                             const SolverConfig& cfg);

/// One CSV line `price,std_error,exercise_fraction,mean_exercise_time`.
std::string format_mc_row(const MCEstimate& est);

}  // namespace ratex
