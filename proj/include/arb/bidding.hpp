#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "arb/forecaster.hpp"
#include "arb/storage.hpp"

namespace arb {

struct DispatchResult {
    std::vector<Action> actions;
    double profit = 0.0;  // objective value of the solved program
    double final_soc = 0.0;
};

// Deterministic-price dispatch solved exactly by backward induction on a SoC
// lattice (grid-to-grid actions; the start SoC is inserted as an extra level
// when off-grid). Maximizes sum pi*(p-b) - c*sum p under power/SoC bounds and
// the no-discharge-at-negative-price rule.
DispatchResult perfect_foresight_dispatch(const std::vector<double>& prices, double e0,
                                          const BatterySpec& spec, Scale scale,
                                          int grid_levels = 100, double tie_tol = 1e-9);

// Time-of-day opportunity values of stored energy: rows are interval
// boundaries (terminal row zero), columns the SoC grid.
struct ValueTable {
    std::vector<double> grid;                 // K+1 levels, ascending, 0..E
    std::vector<std::vector<double>> values;  // (intervals+1) x (K+1), $
    std::string spec_fingerprint;
    std::string training_span;
    // Largest entry displacement made by the monotone-concave projection.
    double max_projection_adjustment = 0.0;

    double interp(size_t row, double e) const;
};

// Solves each training day by backward induction and averages the per-day
// tables; the mean is projected onto the monotone non-decreasing, concave
// cone (non-negligible projections arise only from negative-price days).
ValueTable build_value_table(const std::vector<std::vector<double>>& training_days,
                             const BatterySpec& spec, int grid_levels,
                             double tie_tol = 1e-9);

void save_value_table(const ValueTable& table, const std::string& path);
ValueTable load_value_table(const std::string& path);

std::string battery_fingerprint(const BatterySpec& spec, int grid_levels);

// One non-anticipatory step: argmax over grid-target actions of immediate
// reward plus interpolated next-interval value; ties go to the null action;
// p = 0 whenever pi < 0.
Action rt_policy_step(double e, double pi, const std::vector<double>& grid,
                      const std::vector<double>& v_next, const BatterySpec& spec,
                      double tie_tol = 1e-9);

// Replays rt_policy_step across a day of prices.
DispatchResult replay_policy(const std::vector<double>& prices, double e0,
                             const ValueTable& table, const BatterySpec& spec,
                             double tie_tol = 1e-9);

struct DaySchedule {
    std::vector<double> p_da;  // hourly discharge energy
    std::vector<double> b_da;  // hourly charge energy
    std::vector<bool> cleared;
    double objective = 0.0;  // sum (lambda - pi_hat) * (p - b)
    double final_soc = 0.0;
};

// Day-ahead clearing under price-taker assumptions: hourly bids priced at the
// expected average real-time price clear exactly when the spread favors them,
// so the cleared schedule is the optimizer of the spread objective.
DaySchedule da_clear(const std::vector<double>& pi_hat, const std::vector<double>& lambda,
                     double e0, const BatterySpec& spec, int grid_levels = 100,
                     double tie_tol = 1e-9);

enum class VbDirection { none, supply, demand };
enum class VbMode { forecast, perfect };

struct VbPosition {
    VbDirection direction = VbDirection::none;
    double quantity = 0.0;  // MWh
    bool cleared = false;
    double profit = 0.0;  // $
};

// Hourly virtual positions priced at the forecast: a supply offer clears when
// lambda exceeds it (profit q*(lambda - realized mean)), a demand bid when
// lambda is below it; equality clears neither. Perfect mode prices at the
// realized mean itself.
std::vector<VbPosition> vb_positions(const std::vector<double>& pi_hat,
                                     const std::vector<double>& lambda,
                                     const std::vector<double>& pi_bar, double q_max,
                                     VbMode mode);

}  // namespace arb
