#include "arb/bidding.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace arb {

using nlohmann::json;

namespace {

std::vector<double> uniform_grid(double energy, int k) {
    if (k < 2) throw ConfigError("SoC grid needs at least 2 intervals");
    std::vector<double> g(static_cast<size_t>(k) + 1);
    for (int i = 0; i <= k; ++i) g[static_cast<size_t>(i)] = energy * i / k;
    return g;
}

// Action moving the SoC from level `from` to `to`; infeasible moves return
// false. Level differences translate through the one-way efficiency.
bool level_action(double from, double to, const BatterySpec& spec, Scale scale,
                  bool enforce_2g, double pi, Action& out) {
    const double limit = power_limit(spec, scale);
    if (to < from) {
        const double p = (from - to) * spec.eta;
        if (p > limit + kSocTolerance) return false;
        if (enforce_2g && pi < 0.0) return false;
        out = {p, 0.0};
        return true;
    }
    if (to > from) {
        const double b = (to - from) / spec.eta;
        if (b > limit + kSocTolerance) return false;
        out = {0.0, b};
        return true;
    }
    out = {0.0, 0.0};
    return true;
}

struct DpOptions {
    Scale scale = Scale::rt;
    bool enforce_2g = true;
    double discharge_cost = 0.0;
    double tie_tol = 1e-9;
};

struct DpSolution {
    std::vector<double> value_at_start;  // V[0][.] over the grid
    DispatchResult dispatch;
};

// Backward induction over grid states; forward pass recovers the action path
// from start_index.
DpSolution grid_dp(const std::vector<double>& prices, const std::vector<double>& grid,
                   size_t start_index, const BatterySpec& spec, const DpOptions& opt,
                   std::vector<std::vector<double>>* all_rows = nullptr) {
    const size_t steps = prices.size();
    const size_t k = grid.size();
    std::vector<double> next(k, 0.0), cur(k, 0.0);
    std::vector<std::vector<size_t>> choice(steps, std::vector<size_t>(k, 0));
    if (all_rows) {
        all_rows->assign(steps + 1, std::vector<double>(k, 0.0));
    }

    for (size_t s = steps; s-- > 0;) {
        const double pi = prices[s];
        for (size_t i = 0; i < k; ++i) {
            double best = next[i];  // null action
            size_t best_j = i;
            Action a;
            for (size_t j = 0; j < k; ++j) {
                if (j == i) continue;
                if (!level_action(grid[i], grid[j], spec, opt.scale, opt.enforce_2g, pi, a))
                    continue;
                const double reward = pi * (a.discharge - a.charge) -
                                      opt.discharge_cost * a.discharge;
                const double v = reward + next[j];
                if (v > best + opt.tie_tol) {
                    best = v;
                    best_j = j;
                }
            }
            cur[i] = best;
            choice[s][i] = best_j;
        }
        if (all_rows) (*all_rows)[s] = cur;
        std::swap(cur, next);
    }

    DpSolution sol;
    sol.value_at_start = next;
    sol.dispatch.profit = next[start_index];
    size_t state = start_index;
    for (size_t s = 0; s < steps; ++s) {
        const size_t to = choice[s][state];
        Action a;
        level_action(grid[state], grid[to], spec, opt.scale, opt.enforce_2g, prices[s], a);
        sol.dispatch.actions.push_back(a);
        state = to;
    }
    sol.dispatch.final_soc = grid[state];
    return sol;
}

}  // namespace

DispatchResult perfect_foresight_dispatch(const std::vector<double>& prices, double e0,
                                          const BatterySpec& spec, Scale scale,
                                          int grid_levels, double tie_tol) {
    spec.validate();
    if (e0 < -kSocTolerance || e0 > spec.energy + kSocTolerance)
        throw InfeasibleStartError("start SoC outside [0, E]");
    for (double p : prices)
        if (!std::isfinite(p)) throw DataError("non-finite price");

    std::vector<double> grid = uniform_grid(spec.energy, grid_levels);
    e0 = std::clamp(e0, 0.0, spec.energy);
    auto it = std::lower_bound(grid.begin(), grid.end(), e0 - kSocTolerance);
    size_t start;
    if (it != grid.end() && std::abs(*it - e0) <= kSocTolerance) {
        start = static_cast<size_t>(it - grid.begin());
    } else {
        start = static_cast<size_t>(it - grid.begin());
        grid.insert(it, e0);
    }

    DpOptions opt;
    opt.scale = scale;
    opt.enforce_2g = true;
    opt.discharge_cost = spec.discharge_cost;
    opt.tie_tol = tie_tol;
    return grid_dp(prices, grid, start, spec, opt).dispatch;
}

// --- value table ----------------------------------------------------------

double ValueTable::interp(size_t row, double e) const {
    const auto& v = values[row];
    if (e <= grid.front()) return v.front();
    if (e >= grid.back()) return v.back();
    auto it = std::upper_bound(grid.begin(), grid.end(), e);
    const size_t hi = static_cast<size_t>(it - grid.begin());
    const size_t lo = hi - 1;
    const double w = (e - grid[lo]) / (grid[hi] - grid[lo]);
    return v[lo] * (1.0 - w) + v[hi] * w;
}

ValueTable build_value_table(const std::vector<std::vector<double>>& training_days,
                             const BatterySpec& spec, int grid_levels, double tie_tol) {
    spec.validate();
    if (training_days.empty()) throw EmptyTrainingSetError("no training days");
    const size_t steps = training_days.front().size();
    for (const auto& d : training_days)
        if (d.size() != steps) throw DataError("training days differ in length");

    // A lattice coarser than one interval's charge throughput freezes the
    // policy (null is the only feasible transition), so reject it early.
    const double spacing = spec.energy / grid_levels;
    if (spacing > spec.interval_power() * spec.eta + kSocTolerance)
        throw ConfigError(
            "SoC grid too coarse for one real-time interval; raise grid levels to at least " +
            std::to_string(static_cast<int>(
                std::ceil(spec.energy * spec.intervals_per_hour / (spec.power * spec.eta)))));

    ValueTable table;
    table.grid = uniform_grid(spec.energy, grid_levels);
    table.values.assign(steps + 1, std::vector<double>(table.grid.size(), 0.0));
    table.spec_fingerprint = battery_fingerprint(spec, grid_levels);

    DpOptions opt;
    opt.scale = Scale::rt;
    opt.enforce_2g = true;
    opt.discharge_cost = spec.discharge_cost;
    opt.tie_tol = tie_tol;

    std::vector<std::vector<double>> rows;
    for (const auto& day : training_days) {
        grid_dp(day, table.grid, 0, spec, opt, &rows);
        for (size_t r = 0; r <= steps; ++r)
            for (size_t i = 0; i < table.grid.size(); ++i)
                table.values[r][i] += rows[r][i] / static_cast<double>(training_days.size());
    }

    // Project each row onto the monotone-concave cone: clip negative SoC
    // increments, then order increments non-increasing.
    double max_adj = 0.0;
    for (auto& row : table.values) {
        std::vector<double> before = row;
        std::vector<double> inc(row.size() - 1);
        for (size_t i = 0; i + 1 < row.size(); ++i)
            inc[i] = std::max(0.0, row[i + 1] - row[i]);
        std::sort(inc.begin(), inc.end(), std::greater<double>());
        for (size_t i = 0; i + 1 < row.size(); ++i) row[i + 1] = row[i] + inc[i];
        for (size_t i = 0; i < row.size(); ++i)
            max_adj = std::max(max_adj, std::abs(row[i] - before[i]));
    }
    table.max_projection_adjustment = max_adj;
    return table;
}

std::string battery_fingerprint(const BatterySpec& spec, int grid_levels) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "P=%.17g,E=%.17g,eta=%.17g,c=%.17g,S=%d,K=%d", spec.power,
                  spec.energy, spec.eta, spec.discharge_cost, spec.intervals_per_hour,
                  grid_levels);
    return buf;
}

void save_value_table(const ValueTable& table, const std::string& path) {
    json doc;
    doc["grid"] = table.grid;
    doc["values"] = table.values;
    doc["spec_fingerprint"] = table.spec_fingerprint;
    doc["training_span"] = table.training_span;
    doc["max_projection_adjustment"] = table.max_projection_adjustment;
    std::ofstream out(path);
    if (!out.is_open()) throw DataError("cannot write value table: " + path);
    out << doc.dump(1) << '\n';
}

ValueTable load_value_table(const std::string& path) {
    std::ifstream in(path);
    if (!in.is_open()) throw DataError("cannot read value table: " + path);
    json doc = json::parse(in);
    ValueTable t;
    t.grid = doc.at("grid").get<std::vector<double>>();
    t.values = doc.at("values").get<std::vector<std::vector<double>>>();
    t.spec_fingerprint = doc.at("spec_fingerprint").get<std::string>();
    t.training_span = doc.at("training_span").get<std::string>();
    t.max_projection_adjustment = doc.at("max_projection_adjustment").get<double>();
    return t;
}

// --- real-time policy -------------------------------------------------------

Action rt_policy_step(double e, double pi, const std::vector<double>& grid,
                      const std::vector<double>& v_next, const BatterySpec& spec,
                      double tie_tol) {
    auto interp = [&](double x) {
        if (x <= grid.front()) return v_next.front();
        if (x >= grid.back()) return v_next.back();
        auto it = std::upper_bound(grid.begin(), grid.end(), x);
        const size_t hi = static_cast<size_t>(it - grid.begin());
        const double w = (x - grid[hi - 1]) / (grid[hi] - grid[hi - 1]);
        return v_next[hi - 1] * (1.0 - w) + v_next[hi] * w;
    };

    double best = interp(e);  // null action
    Action best_action{0.0, 0.0};
    Action a;
    for (size_t j = 0; j < grid.size(); ++j) {
        if (!level_action(e, grid[j], spec, Scale::rt, true, pi, a)) continue;
        if (a.discharge == 0.0 && a.charge == 0.0) continue;
        const double v = pi * (a.discharge - a.charge) - spec.discharge_cost * a.discharge +
                         interp(grid[j]);
        if (v > best + tie_tol) {
            best = v;
            best_action = a;
        }
    }
    return best_action;
}

DispatchResult replay_policy(const std::vector<double>& prices, double e0,
                             const ValueTable& table, const BatterySpec& spec,
                             double tie_tol) {
    if (prices.size() + 1 != table.values.size())
        throw AlignmentError("price count does not match value table rows");
    if (e0 < -kSocTolerance || e0 > spec.energy + kSocTolerance)
        throw InfeasibleStartError("start SoC outside [0, E]");
    DispatchResult r;
    SoCState e{std::clamp(e0, 0.0, spec.energy)};
    for (size_t s = 0; s < prices.size(); ++s) {
        Action a = rt_policy_step(e.e, prices[s], table.grid, table.values[s + 1], spec, tie_tol);
        e = soc_step(e, a.discharge, a.charge, spec, Scale::rt);
        r.profit += prices[s] * (a.discharge - a.charge) - spec.discharge_cost * a.discharge;
        r.actions.push_back(a);
    }
    r.final_soc = e.e;
    return r;
}

// --- day-ahead clearing -------------------------------------------------------

DaySchedule da_clear(const std::vector<double>& pi_hat, const std::vector<double>& lambda,
                     double e0, const BatterySpec& spec, int grid_levels, double tie_tol) {
    spec.validate();
    if (pi_hat.size() != lambda.size()) throw AlignmentError("forecast/DA price size mismatch");
    if (e0 < -kSocTolerance || e0 > spec.energy + kSocTolerance)
        throw InfeasibleStartError("start SoC outside [0, E]");

    std::vector<double> spread(lambda.size());
    for (size_t t = 0; t < lambda.size(); ++t) spread[t] = lambda[t] - pi_hat[t];

    std::vector<double> grid = uniform_grid(spec.energy, grid_levels);
    e0 = std::clamp(e0, 0.0, spec.energy);
    auto it = std::lower_bound(grid.begin(), grid.end(), e0 - kSocTolerance);
    size_t start;
    if (it != grid.end() && std::abs(*it - e0) <= kSocTolerance) {
        start = static_cast<size_t>(it - grid.begin());
    } else {
        start = static_cast<size_t>(it - grid.begin());
        grid.insert(it, e0);
    }

    DpOptions opt;
    opt.scale = Scale::hourly;
    opt.enforce_2g = false;  // spreads are not prices; Eq. 2g is RT-only
    opt.discharge_cost = 0.0;
    opt.tie_tol = tie_tol;
    DpSolution sol = grid_dp(spread, grid, start, spec, opt);

    DaySchedule sched;
    sched.objective = sol.dispatch.profit;
    sched.final_soc = sol.dispatch.final_soc;
    for (const auto& a : sol.dispatch.actions) {
        sched.p_da.push_back(a.discharge);
        sched.b_da.push_back(a.charge);
        sched.cleared.push_back(a.discharge > 0.0 || a.charge > 0.0);
    }
    return sched;
}

// --- virtual bidding -------------------------------------------------------------

std::vector<VbPosition> vb_positions(const std::vector<double>& pi_hat,
                                     const std::vector<double>& lambda,
                                     const std::vector<double>& pi_bar, double q_max,
                                     VbMode mode) {
    if (lambda.size() != pi_bar.size() ||
        (mode == VbMode::forecast && pi_hat.size() != lambda.size()))
        throw AlignmentError("vb_positions: misaligned inputs");
    if (q_max < 0) throw ConfigError("vb quantity must be >= 0");

    std::vector<VbPosition> out(lambda.size());
    for (size_t t = 0; t < lambda.size(); ++t) {
        const double bid = mode == VbMode::perfect ? pi_bar[t] : pi_hat[t];
        VbPosition& p = out[t];
        p.quantity = q_max;
        if (lambda[t] > bid) {
            p.direction = VbDirection::supply;
            p.cleared = true;
            p.profit = q_max * (lambda[t] - pi_bar[t]);
        } else if (lambda[t] < bid) {
            p.direction = VbDirection::demand;
            p.cleared = true;
            p.profit = q_max * (pi_bar[t] - lambda[t]);
        } else {
            p.direction = VbDirection::none;
            p.quantity = 0.0;
        }
    }
    return out;
}

}  // namespace arb
