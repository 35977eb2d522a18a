#pragma once

#include <iosfwd>
#include <string>

#include "arb/config.hpp"
#include "arb/settlement.hpp"

namespace arb {

// What a participation mode needs before it can run. RT-only modes never
// touch forecast artifacts: real-time bids are independent of DA settlements.
struct ModeRequirements {
    bool forecast = false;
    bool value_table = false;
    bool da_prices = false;
};
ModeRequirements mode_requirements(const std::string& label);

int cmd_synth(const RunConfig& cfg, std::ostream& out);
int cmd_ingest(const RunConfig& cfg, std::ostream& out);
int cmd_stats(const RunConfig& cfg, std::ostream& out);
int cmd_train(const RunConfig& cfg, std::ostream& out);
int cmd_forecast(const RunConfig& cfg, std::ostream& out);
int cmd_backtest(const RunConfig& cfg, std::ostream& out);
int cmd_sweep(const RunConfig& cfg, std::ostream& out);
int cmd_report(const RunConfig& cfg, std::ostream& out);

// Shared helpers, exposed for tests.
MarketDataset load_run_dataset(const RunConfig& cfg);
ValueTable build_table_for_run(const RunConfig& cfg, const MarketDataset& ds, Date train_end);

struct BacktestContext {
    const MarketDataset* ds = nullptr;
    std::string zone;
    Date first_test_day;
    Date last_test_day;
    BatterySpec battery;
    PolicyConfig policy;
    const ValueTable* table = nullptr;  // RT policy legs
    ForecastModel* model = nullptr;     // forecast-driven DA/VB legs
    WindowSpec window;
};

RunReport simulate_mode(const std::string& label, BacktestContext& ctx);

}  // namespace arb
