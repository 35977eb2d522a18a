#include "arb/settlement.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace arb {

using nlohmann::json;

std::string mode_label(ParticipationMode mode, ForecastSource source) {
    std::string m;
    switch (mode) {
        case ParticipationMode::rt: m = "RT"; break;
        case ParticipationMode::da: m = "DA"; break;
        case ParticipationMode::da_rt: m = "DA+RT"; break;
        case ParticipationMode::vb: m = "VB"; break;
    }
    return m + (source == ForecastSource::perfect ? "-PF" : "-F");
}

std::pair<ParticipationMode, ForecastSource> parse_mode_label(const std::string& label) {
    const auto dash = label.rfind('-');
    if (dash == std::string::npos) throw ConfigError("bad mode label: " + label);
    const std::string m = label.substr(0, dash);
    const std::string s = label.substr(dash + 1);
    ParticipationMode mode;
    if (m == "RT") mode = ParticipationMode::rt;
    else if (m == "DA") mode = ParticipationMode::da;
    else if (m == "DA+RT") mode = ParticipationMode::da_rt;
    else if (m == "VB") mode = ParticipationMode::vb;
    else throw ConfigError("bad mode label: " + label);
    ForecastSource source;
    if (s == "F") source = ForecastSource::forecast;
    else if (s == "PF") source = ForecastSource::perfect;
    else throw ConfigError("bad mode label: " + label);
    return {mode, source};
}

DayResult settle_day(const std::vector<double>& lambda, const std::vector<double>& pi,
                     const DaySchedule& sched, const std::vector<Action>& dispatch, double e0,
                     const BatterySpec& spec) {
    const size_t hours = lambda.size();
    const size_t s_per_hour = static_cast<size_t>(spec.intervals_per_hour);
    if (pi.size() != hours * s_per_hour)
        throw AlignmentError("interval price count does not match hours * S");
    if (dispatch.size() != pi.size())
        throw AlignmentError("dispatch length does not match interval count");
    const bool has_da = !sched.p_da.empty();
    if (has_da && (sched.p_da.size() != hours || sched.b_da.size() != hours))
        throw AlignmentError("DA schedule length does not match hours");

    FeasibilityReport feas = check_schedule(dispatch, e0, spec, Scale::rt);
    if (!feas.feasible)
        throw DataError("settle_day: infeasible dispatch (" +
                        std::to_string(feas.violations.size()) + " violations)");

    DayResult r;
    double da_revenue = 0.0, rt_settlement = 0.0, cost = 0.0;
    for (size_t t = 0; t < hours; ++t) {
        const double p_da = has_da ? sched.p_da[t] : 0.0;
        const double b_da = has_da ? sched.b_da[t] : 0.0;
        da_revenue += lambda[t] * (p_da - b_da);
        for (size_t j = 0; j < s_per_hour; ++j) {
            const size_t s = t * s_per_hour + j;
            const double dev = dispatch[s].discharge - dispatch[s].charge -
                               p_da / spec.intervals_per_hour +
                               b_da / spec.intervals_per_hour;
            rt_settlement += pi[s] * dev;
            cost += spec.discharge_cost * dispatch[s].discharge;
        }
    }
    r.da_revenue = da_revenue;
    r.rt_settlement = rt_settlement;
    r.discharge_cost = cost;
    r.total = da_revenue + rt_settlement - cost;
    r.soc_end = feas.final_soc;
    return r;
}

DayResult settle_vb_day(const std::vector<VbPosition>& positions,
                        const std::vector<double>& lambda, const std::vector<double>& pi_bar) {
    if (positions.size() != lambda.size() || positions.size() != pi_bar.size())
        throw AlignmentError("settle_vb_day: misaligned inputs");
    DayResult r;
    r.mode = ParticipationMode::vb;
    for (size_t t = 0; t < positions.size(); ++t) {
        const auto& p = positions[t];
        if (!p.cleared) continue;
        const double sign = p.direction == VbDirection::supply ? 1.0 : -1.0;
        r.da_revenue += sign * p.quantity * lambda[t];
        r.rt_settlement -= sign * p.quantity * pi_bar[t];
    }
    r.total = r.da_revenue + r.rt_settlement;
    return r;
}

double decomposition_residual(const std::vector<double>& lambda, const std::vector<double>& pi,
                              const DaySchedule& sched, const std::vector<Action>& dispatch,
                              double e0, const BatterySpec& spec) {
    DayResult settled = settle_day(lambda, pi, sched, dispatch, e0, spec);

    const size_t s_per_hour = static_cast<size_t>(spec.intervals_per_hour);
    double decomposed = 0.0;
    for (size_t t = 0; t < lambda.size(); ++t) {
        double pi_bar = 0.0;
        for (size_t j = 0; j < s_per_hour; ++j) pi_bar += pi[t * s_per_hour + j];
        pi_bar /= static_cast<double>(s_per_hour);
        const double p_da = sched.p_da.empty() ? 0.0 : sched.p_da[t];
        const double b_da = sched.b_da.empty() ? 0.0 : sched.b_da[t];
        decomposed += (lambda[t] - pi_bar) * (p_da - b_da);
        for (size_t j = 0; j < s_per_hour; ++j) {
            const size_t s = t * s_per_hour + j;
            decomposed += pi[s] * (dispatch[s].discharge - dispatch[s].charge) -
                          spec.discharge_cost * dispatch[s].discharge;
        }
    }
    return std::abs(settled.total - decomposed);
}

RunReport aggregate(const std::vector<DayResult>& days, const RunReport* baseline_rt) {
    if (days.empty()) throw EmptyRunError("no day results to aggregate");
    RunReport r;
    r.label = mode_label(days.front().mode, days.front().source);
    r.days = days;
    double cum = 0.0;
    for (const auto& d : days) {
        cum += d.total;
        r.cumulative.push_back(cum);
        if (d.total < 0.0) ++r.negative_days;
    }
    r.total = cum;
    if (baseline_rt && baseline_rt->total > 0.0)
        r.ipm = (r.total - baseline_rt->total) / baseline_rt->total;
    return r;
}

// --- report files -----------------------------------------------------------

namespace {

std::string g17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out.is_open()) throw DataError("cannot write: " + path);
    return out;
}

void meta_comment(std::ofstream& out, const ReportMeta& meta) {
    out << "# config_hash=" << meta.config_hash << " seed=" << meta.seed
        << " zone=" << meta.zone << '\n';
}

}  // namespace

void write_daily_csv(const std::string& path, const std::vector<RunReport>& reports,
                     const ReportMeta& meta) {
    auto out = open_out(path);
    meta_comment(out, meta);
    out << "date,mode,da_revenue,rt_settlement,discharge_cost,total,soc_end\n";
    for (const auto& rep : reports)
        for (const auto& d : rep.days)
            out << format_date(d.date) << ',' << rep.label << ',' << g17(d.da_revenue) << ','
                << g17(d.rt_settlement) << ',' << g17(d.discharge_cost) << ',' << g17(d.total)
                << ',' << g17(d.soc_end) << '\n';
}

void write_cumulative_csv(const std::string& path, const std::vector<RunReport>& reports,
                          const ReportMeta& meta) {
    auto out = open_out(path);
    meta_comment(out, meta);
    out << "date";
    for (const auto& rep : reports) out << ',' << rep.label;
    out << '\n';
    if (reports.empty()) return;
    const size_t n = reports.front().days.size();
    for (const auto& rep : reports)
        if (rep.days.size() != n)
            throw AlignmentError("reports cover different day counts");
    for (size_t i = 0; i < n; ++i) {
        out << format_date(reports.front().days[i].date);
        for (const auto& rep : reports) out << ',' << g17(rep.cumulative[i]);
        out << '\n';
    }
}

void write_report_json(const std::string& path, const std::vector<RunReport>& reports,
                       const ReportMeta& meta) {
    json doc;
    doc["config_hash"] = meta.config_hash;
    doc["seed"] = meta.seed;
    doc["zone"] = meta.zone;
    json modes = json::object();
    for (const auto& rep : reports) {
        json m;
        m["total"] = rep.total;
        m["negative_days"] = rep.negative_days;
        if (rep.ipm) m["ipm"] = *rep.ipm;
        else m["ipm"] = nullptr;
        json days = json::array();
        for (const auto& d : rep.days) {
            json day;
            day["date"] = format_date(d.date);
            day["da_revenue"] = d.da_revenue;
            day["rt_settlement"] = d.rt_settlement;
            day["discharge_cost"] = d.discharge_cost;
            day["total"] = d.total;
            day["soc_end"] = d.soc_end;
            days.push_back(std::move(day));
        }
        m["days"] = std::move(days);
        m["cumulative"] = rep.cumulative;
        modes[rep.label] = std::move(m);
    }
    doc["modes"] = std::move(modes);
    auto out = open_out(path);
    out << doc.dump(1) << '\n';
}

void write_plot_script(const std::string& path, const std::vector<RunReport>& reports) {
    auto out = open_out(path);
    out << "# gnuplot script: cumulative profit per participation mode\n"
        << "set datafile separator ','\n"
        << "set xdata time\n"
        << "set timefmt '%Y-%m-%d'\n"
        << "set format x '%b %d'\n"
        << "set ylabel 'Cumulative profit ($)'\n"
        << "set key left top\n"
        << "plot \\\n";
    for (size_t i = 0; i < reports.size(); ++i) {
        out << "  'cumulative.csv' using 1:" << i + 2 << " with lines title '"
            << reports[i].label << "'";
        out << (i + 1 < reports.size() ? ", \\\n" : "\n");
    }
}

}  // namespace arb
