#pragma once

#include <optional>
#include <string>
#include <vector>

#include "arb/bidding.hpp"
#include "arb/dates.hpp"
#include "arb/storage.hpp"

namespace arb {

enum class ParticipationMode { rt, da, da_rt, vb };
enum class ForecastSource { forecast, perfect };

std::string mode_label(ParticipationMode mode, ForecastSource source);
// Parses labels like "RT-F", "DA-PF", "DA+RT-F", "VB-PF".
std::pair<ParticipationMode, ForecastSource> parse_mode_label(const std::string& label);

struct DayResult {
    Date date;
    ParticipationMode mode = ParticipationMode::rt;
    ForecastSource source = ForecastSource::forecast;
    double da_revenue = 0.0;
    double rt_settlement = 0.0;
    double discharge_cost = 0.0;
    double total = 0.0;
    double soc_end = 0.0;
};

// Money for one day: DA revenue at lambda, real-time re-settlement of the
// physical deviation from the hourly DA position, and the physical discharge
// cost. The DA schedule may be empty (RT-only participation).
DayResult settle_day(const std::vector<double>& lambda, const std::vector<double>& pi,
                     const DaySchedule& sched, const std::vector<Action>& dispatch, double e0,
                     const BatterySpec& spec);

// Financial-only settlement of hourly virtual positions.
DayResult settle_vb_day(const std::vector<VbPosition>& positions,
                        const std::vector<double>& lambda, const std::vector<double>& pi_bar);

// |two-settlement total - decomposed total| where the decomposition prices the
// DA position at the realized hourly mean of the RT intervals. Zero up to
// float noise for any inputs with hour-constant DA quantities.
double decomposition_residual(const std::vector<double>& lambda, const std::vector<double>& pi,
                              const DaySchedule& sched, const std::vector<Action>& dispatch,
                              double e0, const BatterySpec& spec);

struct RunReport {
    std::string label;
    std::vector<DayResult> days;
    std::vector<double> cumulative;  // prefix sums of daily totals
    double total = 0.0;
    int negative_days = 0;
    std::optional<double> ipm;  // vs RT-only; absent when undefined
};

RunReport aggregate(const std::vector<DayResult>& days, const RunReport* baseline_rt);

// --- report files ---------------------------------------------------------

struct ReportMeta {
    std::string config_hash;
    std::uint64_t seed = 0;
    std::string zone;
};

void write_daily_csv(const std::string& path, const std::vector<RunReport>& reports,
                     const ReportMeta& meta);
void write_cumulative_csv(const std::string& path, const std::vector<RunReport>& reports,
                          const ReportMeta& meta);
void write_report_json(const std::string& path, const std::vector<RunReport>& reports,
                       const ReportMeta& meta);
// Gnuplot script drawing the cumulative profit curves from cumulative.csv.
void write_plot_script(const std::string& path, const std::vector<RunReport>& reports);

}  // namespace arb
