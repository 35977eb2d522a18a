#include "arb/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "arb/bidding.hpp"
#include "arb/forecaster.hpp"

namespace arb {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string g17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

ReportMeta meta_for(const RunConfig& cfg) {
    return ReportMeta{cfg.config_hash, cfg.seed, cfg.zone};
}

void ensure_out_dir(const RunConfig& cfg) { fs::create_directories(cfg.out_dir); }

std::vector<double> day_slice(const PriceSeries& s, Date day) {
    const int per_day = intervals_per_day(s.resolution);
    const size_t begin = static_cast<size_t>((day - s.start) * per_day);
    return {s.values.begin() + begin, s.values.begin() + begin + per_day};
}

void print_stats_table(std::ostream& out, const MarketDataset& ds) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-10s %10s %10s %10s %10s %14s", "Zone", "mu DAP",
                  "sigma DAP", "mu RTP", "sigma RTP", "Negative RTP");
    out << buf << '\n';
    for (const auto& [name, z] : ds.zones) {
        (void)z;
        ZoneStats s = zone_stats(ds, name);
        std::snprintf(buf, sizeof buf, "%-10s %10.2f %10.2f %10.2f %10.2f %14lld", name.c_str(),
                      s.mean_dap, s.std_dap, s.mean_rtp, s.std_rtp,
                      static_cast<long long>(s.negative_rtp_count));
        out << buf << '\n';
    }
}

void write_stats_csv(const RunConfig& cfg, const MarketDataset& ds) {
    std::ofstream out(cfg.out_dir + "/stats.csv");
    if (!out.is_open()) throw DataError("cannot write stats.csv");
    out << "# config_hash=" << cfg.config_hash << " seed=" << cfg.seed << '\n';
    out << "zone,mean_dap,std_dap,mean_rtp,std_rtp,negative_rtp\n";
    for (const auto& [name, z] : ds.zones) {
        (void)z;
        ZoneStats s = zone_stats(ds, name);
        out << name << ',' << g17(s.mean_dap) << ',' << g17(s.std_dap) << ',' << g17(s.mean_rtp)
            << ',' << g17(s.std_rtp) << ',' << s.negative_rtp_count << '\n';
    }
}

std::string checkpoint_path(const RunConfig& cfg) { return cfg.out_dir + "/checkpoint.json"; }

Date require_test_start(const RunConfig& cfg, const MarketDataset& ds) {
    if (!cfg.test_start) throw ConfigError("split.test_start is required for this command");
    if (*cfg.test_start <= ds.first_day || *cfg.test_start > ds.last_day)
        throw ConfigError("split.test_start outside the dataset span");
    return *cfg.test_start;
}

}  // namespace

MarketDataset load_run_dataset(const RunConfig& cfg) {
    if (cfg.source == "synth") return synth_generate(cfg.seed, cfg.synth_days, cfg.synth);
    std::vector<std::string> zones;
    if (!cfg.zone.empty()) zones.push_back(cfg.zone);
    return load_dataset_csv(cfg.csv_dir, zones, cfg.ingest);
}

ModeRequirements mode_requirements(const std::string& label) {
    auto [mode, source] = parse_mode_label(label);
    ModeRequirements req;
    switch (mode) {
        case ParticipationMode::rt:
            req.value_table = source == ForecastSource::forecast;
            break;
        case ParticipationMode::da:
            req.forecast = source == ForecastSource::forecast;
            req.da_prices = true;
            break;
        case ParticipationMode::da_rt:
            req.forecast = source == ForecastSource::forecast;
            req.value_table = source == ForecastSource::forecast;
            req.da_prices = true;
            break;
        case ParticipationMode::vb:
            req.forecast = source == ForecastSource::forecast;
            req.da_prices = true;
            break;
    }
    return req;
}

ValueTable build_table_for_run(const RunConfig& cfg, const MarketDataset& ds, Date train_end) {
    const ZoneData& z = ds.zone(cfg.zone);
    std::vector<std::vector<double>> days;
    for (Date d = ds.first_day; d <= train_end; ++d) days.push_back(day_slice(z.rt_5min, d));
    ValueTable table =
        build_value_table(days, cfg.battery, cfg.policy.grid_levels, cfg.policy.tie_tolerance);
    table.training_span = format_date(ds.first_day) + ".." + format_date(train_end);
    return table;
}

// --- per-mode simulation ---------------------------------------------------

namespace {

// Physical follow-through of a DA schedule: planned interval quantities with
// the no-discharge-at-negative-price rule and SoC headroom clamps (the clamps
// only bind after rule-driven deviations).
std::vector<Action> follow_da_dispatch(const DaySchedule& sched, const std::vector<double>& pi,
                                       double e0, const BatterySpec& spec) {
    std::vector<Action> actions;
    const int s_per_hour = spec.intervals_per_hour;
    double e = e0;
    for (size_t t = 0; t < sched.p_da.size(); ++t) {
        for (int j = 0; j < s_per_hour; ++j) {
            const size_t s = t * static_cast<size_t>(s_per_hour) + static_cast<size_t>(j);
            double p = sched.p_da[t] / s_per_hour;
            double b = sched.b_da[t] / s_per_hour;
            if (pi[s] < 0.0) p = 0.0;
            p = std::min(p, e * spec.eta);
            b = std::min(b, (spec.energy - e) / spec.eta);
            p = std::max(0.0, p);
            b = std::max(0.0, b);
            e = e - p / spec.eta + b * spec.eta;
            actions.push_back({p, b});
        }
    }
    return actions;
}

}  // namespace

RunReport simulate_mode(const std::string& label, BacktestContext& ctx) {
    auto [mode, source] = parse_mode_label(label);
    const ModeRequirements req = mode_requirements(label);
    if (req.value_table && !ctx.table) throw ConfigError(label + " requires a value table");
    if (req.forecast && !ctx.model) throw ConfigError(label + " requires a trained forecaster");

    const ZoneData& z = ctx.ds->zone(ctx.zone);
    const bool perfect = source == ForecastSource::perfect;

    std::vector<DayResult> days;
    double e_phys = ctx.policy.initial_soc;
    double e_da = ctx.policy.initial_soc;
    for (Date d = ctx.first_test_day; d <= ctx.last_test_day; ++d) {
        const std::vector<double> lambda = day_slice(z.da_hourly, d);
        const std::vector<double> pi = day_slice(z.rt_5min, d);
        const std::vector<double> pi_bar = day_slice(z.rt_hourly_mean, d);

        std::vector<double> pi_hat;
        if (mode != ParticipationMode::rt) {
            if (perfect) {
                pi_hat = pi_bar;
            } else {
                WindowSample w = build_window_for_day(*ctx.ds, ctx.zone, d, ctx.window);
                pi_hat = ctx.model->predict(w).values;
            }
        }

        DayResult r;
        switch (mode) {
            case ParticipationMode::rt: {
                DispatchResult disp =
                    perfect ? perfect_foresight_dispatch(pi, e_phys, ctx.battery, Scale::rt,
                                                         ctx.policy.grid_levels,
                                                         ctx.policy.tie_tolerance)
                            : replay_policy(pi, e_phys, *ctx.table, ctx.battery,
                                            ctx.policy.tie_tolerance);
                r = settle_day(lambda, pi, DaySchedule{}, disp.actions, e_phys, ctx.battery);
                e_phys = disp.final_soc;
                break;
            }
            case ParticipationMode::da: {
                DaySchedule sched = da_clear(pi_hat, lambda, e_da, ctx.battery,
                                             ctx.policy.grid_levels, ctx.policy.tie_tolerance);
                std::vector<Action> disp = follow_da_dispatch(sched, pi, e_phys, ctx.battery);
                r = settle_day(lambda, pi, sched, disp, e_phys, ctx.battery);
                e_da = sched.final_soc;
                e_phys = r.soc_end;
                break;
            }
            case ParticipationMode::da_rt: {
                DaySchedule sched = da_clear(pi_hat, lambda, e_da, ctx.battery,
                                             ctx.policy.grid_levels, ctx.policy.tie_tolerance);
                DispatchResult disp =
                    perfect ? perfect_foresight_dispatch(pi, e_phys, ctx.battery, Scale::rt,
                                                         ctx.policy.grid_levels,
                                                         ctx.policy.tie_tolerance)
                            : replay_policy(pi, e_phys, *ctx.table, ctx.battery,
                                            ctx.policy.tie_tolerance);
                r = settle_day(lambda, pi, sched, disp.actions, e_phys, ctx.battery);
                e_da = sched.final_soc;
                e_phys = disp.final_soc;
                const bool stack_vb = perfect ? ctx.policy.include_vb_in_joint_pf
                                              : ctx.policy.include_vb_in_joint_f;
                if (stack_vb) {
                    auto positions = vb_positions(pi_hat, lambda, pi_bar, ctx.policy.vb_q_max,
                                                  perfect ? VbMode::perfect : VbMode::forecast);
                    DayResult vb = settle_vb_day(positions, lambda, pi_bar);
                    r.da_revenue += vb.da_revenue;
                    r.rt_settlement += vb.rt_settlement;
                    r.total += vb.total;
                }
                break;
            }
            case ParticipationMode::vb: {
                auto positions = vb_positions(pi_hat, lambda, pi_bar, ctx.policy.vb_q_max,
                                              perfect ? VbMode::perfect : VbMode::forecast);
                r = settle_vb_day(positions, lambda, pi_bar);
                break;
            }
        }
        r.date = d;
        r.mode = mode;
        r.source = source;
        days.push_back(r);
        if (!ctx.policy.carry_over_soc) {
            e_phys = ctx.policy.initial_soc;
            e_da = ctx.policy.initial_soc;
        }
    }
    return aggregate(days, nullptr);
}

// --- commands ----------------------------------------------------------------

int cmd_synth(const RunConfig& cfg, std::ostream& out) {
    ensure_out_dir(cfg);
    MarketDataset ds = synth_generate(cfg.seed, cfg.synth_days, cfg.synth);
    write_dataset_csv(ds, cfg.out_dir + "/dataset");
    out << "synth: " << cfg.synth_days << " days, zone " << cfg.synth.zone << ", "
        << format_date(ds.first_day) << ".." << format_date(ds.last_day) << " -> "
        << cfg.out_dir << "/dataset\n";
    return 0;
}

int cmd_ingest(const RunConfig& cfg, std::ostream& out) {
    if (cfg.csv_dir.empty()) throw ConfigError("data.csv_dir required for ingest");
    ensure_out_dir(cfg);
    std::vector<std::string> zones;
    if (!cfg.zone.empty()) zones.push_back(cfg.zone);
    MarketDataset ds = load_dataset_csv(cfg.csv_dir, zones, cfg.ingest);
    write_dataset_csv(ds, cfg.out_dir + "/dataset");
    out << "ingest: " << ds.zones.size() << " zone(s), " << format_date(ds.first_day) << ".."
        << format_date(ds.last_day) << " -> " << cfg.out_dir << "/dataset\n";
    return 0;
}

int cmd_stats(const RunConfig& cfg, std::ostream& out) {
    ensure_out_dir(cfg);
    MarketDataset ds = load_run_dataset(cfg);
    print_stats_table(out, ds);
    write_stats_csv(cfg, ds);
    return 0;
}

int cmd_train(const RunConfig& cfg, std::ostream& out) {
    ensure_out_dir(cfg);
    if (cfg.model_kind == ModelKind::naive)
        throw ConfigError("the naive model has no training step");
    MarketDataset ds = load_run_dataset(cfg);
    if (!cfg.val_start) throw ConfigError("split.val_start is required for train");
    const Date test_start = require_test_start(cfg, ds);
    const Date val_start = *cfg.val_start;

    std::vector<WindowSample> all = build_windows(ds, cfg.zone, cfg.window_spec());
    std::vector<WindowSample> train_w, val_w;
    for (auto& w : all) {
        if (w.target_day < val_start) train_w.push_back(std::move(w));
        else if (w.target_day < test_start) val_w.push_back(std::move(w));
    }
    if (train_w.empty()) throw DataError("no training windows before split.val_start");

    ForecastModel model = make_forecast_model(cfg.model_kind, cfg.transform, cfg.hyper, cfg.seed);
    TrainConfig tc = cfg.train;
    tc.seed = cfg.seed;
    TrainHistory history = train(model, train_w, val_w, tc);
    if (cfg.train.max_epochs > 0 && history.train_mse.empty())
        throw NumericError("training produced no epochs");

    save_checkpoint(model, checkpoint_path(cfg));
    std::ofstream hist(cfg.out_dir + "/history.csv");
    hist << "# config_hash=" << cfg.config_hash << " seed=" << cfg.seed << '\n';
    hist << "epoch,train_mse,val_mse\n";
    for (size_t e = 0; e < history.train_mse.size(); ++e) {
        hist << e << ',' << g17(history.train_mse[e]) << ',';
        hist << (e < history.val_mse.size() ? g17(history.val_mse[e]) : "") << '\n';
    }

    out << "train: " << train_w.size() << " train / " << val_w.size() << " val windows, "
        << history.train_mse.size() << " epochs";
    if (history.best_epoch >= 0)
        out << ", best val MSE " << g17(history.val_mse[static_cast<size_t>(history.best_epoch)])
            << " at epoch " << history.best_epoch;
    out << " -> " << checkpoint_path(cfg) << '\n';
    return 0;
}

int cmd_forecast(const RunConfig& cfg, std::ostream& out) {
    ensure_out_dir(cfg);
    MarketDataset ds = load_run_dataset(cfg);
    const Date test_start = require_test_start(cfg, ds);
    const ZoneData& z = ds.zone(cfg.zone);

    ForecastModel model = load_checkpoint(checkpoint_path(cfg));
    if (model.transform != cfg.transform)
        throw ConfigError("checkpoint transform differs from config");

    std::vector<HourlyForecast> forecasts, naive;
    WindowSpec wspec = cfg.window_spec();
    for (Date d = test_start; d <= ds.last_day; ++d) {
        WindowSample w = build_window_for_day(ds, cfg.zone, d, wspec);
        forecasts.push_back(model.predict(w));
        naive.push_back(naive_forecast(ds, cfg.zone, d));
    }
    AccuracyReport report = evaluate(forecasts, z.rt_hourly_mean, naive, model.transform);

    std::ofstream fc(cfg.out_dir + "/forecasts.csv");
    fc << "# config_hash=" << cfg.config_hash << " seed=" << cfg.seed << '\n';
    fc << "date,hour,actual,forecast,naive\n";
    for (size_t i = 0; i < forecasts.size(); ++i)
        for (int h = 0; h < 24; ++h)
            fc << format_date(forecasts[i].target_day) << ',' << h << ','
               << g17(z.rt_hourly_mean.at(forecasts[i].target_day, h)) << ','
               << g17(forecasts[i].values[static_cast<size_t>(h)]) << ','
               << g17(naive[i].values[static_cast<size_t>(h)]) << '\n';

    json metrics;
    metrics["config_hash"] = cfg.config_hash;
    metrics["seed"] = cfg.seed;
    metrics["days"] = forecasts.size();
    metrics["mse_transform_space"] = report.mse;
    metrics["mae"] = report.mae;
    metrics["rmae"] = report.rmae;
    std::ofstream mj(cfg.out_dir + "/forecast_metrics.json");
    mj << metrics.dump(1) << '\n';

    out << "forecast: " << forecasts.size() << " days, MAE " << g17(report.mae) << " $/MWh, rMAE "
        << g17(report.rmae) << '\n';
    return 0;
}

int cmd_backtest(const RunConfig& cfg, std::ostream& out) {
    ensure_out_dir(cfg);
    if (cfg.modes.empty()) throw ConfigError("backtest.modes is empty");
    MarketDataset ds = load_run_dataset(cfg);
    const Date test_start = require_test_start(cfg, ds);

    bool needs_forecast = false, needs_table = false;
    for (const auto& m : cfg.modes) {
        ModeRequirements req = mode_requirements(m);
        needs_forecast |= req.forecast;
        needs_table |= req.value_table;
    }
    // IPM baselines: any -F mode needs the RT-F baseline (value table),
    // any -PF mode needs RT-PF (no artifacts).
    for (const auto& m : cfg.modes)
        if (parse_mode_label(m).second == ForecastSource::forecast) needs_table = true;

    ValueTable table;
    if (needs_table) {
        table = build_table_for_run(cfg, ds, test_start - 1);
        save_value_table(table, cfg.out_dir + "/value_table.json");
    }
    ForecastModel model;
    if (needs_forecast) {
        model = load_checkpoint(checkpoint_path(cfg));
        if (model.transform != cfg.transform)
            throw ConfigError("checkpoint transform differs from config");
    }

    BacktestContext ctx;
    ctx.ds = &ds;
    ctx.zone = cfg.zone;
    ctx.first_test_day = test_start;
    ctx.last_test_day = ds.last_day;
    ctx.battery = cfg.battery;
    ctx.policy = cfg.policy;
    ctx.table = needs_table ? &table : nullptr;
    ctx.model = needs_forecast ? &model : nullptr;
    ctx.window = cfg.window_spec();

    // RT baselines for IPM, one per forecast source present.
    std::map<std::string, RunReport> baselines;
    auto baseline_for = [&](ForecastSource src) -> const RunReport* {
        const std::string label = src == ForecastSource::perfect ? "RT-PF" : "RT-F";
        auto it = baselines.find(label);
        if (it == baselines.end()) it = baselines.emplace(label, simulate_mode(label, ctx)).first;
        return &it->second;
    };

    std::vector<RunReport> reports;
    for (const auto& label : cfg.modes) {
        auto [mode, source] = parse_mode_label(label);
        RunReport rep = simulate_mode(label, ctx);
        if (mode != ParticipationMode::rt)
            rep = aggregate(rep.days, baseline_for(source));
        reports.push_back(std::move(rep));
    }

    write_daily_csv(cfg.out_dir + "/daily.csv", reports, meta_for(cfg));
    write_cumulative_csv(cfg.out_dir + "/cumulative.csv", reports, meta_for(cfg));
    write_report_json(cfg.out_dir + "/report.json", reports, meta_for(cfg));
    write_plot_script(cfg.out_dir + "/plot.gp", reports);

    for (const auto& rep : reports) {
        out << rep.label << ": total " << g17(rep.total) << " $, negative days "
            << rep.negative_days;
        if (rep.ipm) out << ", IPM " << g17(*rep.ipm * 100.0) << "%";
        out << '\n';
    }
    return 0;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out) {
    ensure_out_dir(cfg);
    MarketDataset ds = load_run_dataset(cfg);
    const Date test_start = require_test_start(cfg, ds);
    if (!cfg.val_start) throw ConfigError("split.val_start is required for sweep");
    const ZoneData& z = ds.zone(cfg.zone);

    ValueTable table = build_table_for_run(cfg, ds, test_start - 1);

    std::mt19937_64 master(cfg.seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    std::ofstream sw(cfg.out_dir + "/sweep.csv");
    sw << "# config_hash=" << cfg.config_hash << " seed=" << cfg.seed << '\n';
    sw << "sample,sub_seed,learning_rate,d_model,n_layers,dropout,val_mse,test_mae,test_rmae,"
          "profit\n";

    for (int i = 0; i < cfg.sweep.n_samples; ++i) {
        const std::uint64_t sub_seed = master();
        const double lr = std::exp(std::log(cfg.sweep.lr_min) +
                                   unif(master) *
                                       (std::log(cfg.sweep.lr_max) - std::log(cfg.sweep.lr_min)));
        const auto& dms = cfg.sweep.d_model_choices;
        const auto& nls = cfg.sweep.n_layers_choices;
        const int d_model = static_cast<int>(dms[static_cast<size_t>(unif(master) * dms.size()) %
                                                 dms.size()]);
        const int n_layers = static_cast<int>(nls[static_cast<size_t>(unif(master) * nls.size()) %
                                                  nls.size()]);
        const double dropout =
            cfg.sweep.dropout_min + unif(master) * (cfg.sweep.dropout_max - cfg.sweep.dropout_min);

        RunConfig sample = cfg;
        sample.hyper.d_model = d_model;
        sample.hyper.ffn_dim = 2 * d_model;
        sample.hyper.n_heads = std::min(cfg.hyper.n_heads, d_model);
        while (d_model % sample.hyper.n_heads != 0) --sample.hyper.n_heads;
        sample.hyper.n_layers = n_layers;
        sample.hyper.dropout = dropout;
        sample.train.learning_rate = lr;
        sample.train.max_epochs = cfg.sweep.max_epochs;
        sample.train.seed = sub_seed;

        std::vector<WindowSample> all = build_windows(ds, cfg.zone, sample.window_spec());
        std::vector<WindowSample> train_w, val_w;
        for (auto& w : all) {
            if (w.target_day < *cfg.val_start) train_w.push_back(std::move(w));
            else if (w.target_day < test_start) val_w.push_back(std::move(w));
        }
        ForecastModel model =
            make_forecast_model(sample.model_kind, sample.transform, sample.hyper, sub_seed);
        TrainHistory history = train(model, train_w, val_w, sample.train);
        double val_mse = history.val_mse.empty()
                             ? std::numeric_limits<double>::quiet_NaN()
                             : *std::min_element(history.val_mse.begin(), history.val_mse.end());

        std::vector<HourlyForecast> forecasts, naive;
        for (Date d = test_start; d <= ds.last_day; ++d) {
            WindowSample w = build_window_for_day(ds, cfg.zone, d, sample.window_spec());
            forecasts.push_back(model.predict(w));
            naive.push_back(naive_forecast(ds, cfg.zone, d));
        }
        AccuracyReport acc = evaluate(forecasts, z.rt_hourly_mean, naive, model.transform);

        BacktestContext ctx;
        ctx.ds = &ds;
        ctx.zone = cfg.zone;
        ctx.first_test_day = test_start;
        ctx.last_test_day = ds.last_day;
        ctx.battery = cfg.battery;
        ctx.policy = cfg.policy;
        ctx.table = &table;
        ctx.model = &model;
        ctx.window = sample.window_spec();
        RunReport rep = simulate_mode("DA+RT-F", ctx);

        sw << i << ',' << sub_seed << ',' << g17(lr) << ',' << d_model << ',' << n_layers << ','
           << g17(dropout) << ',' << g17(val_mse) << ',' << g17(acc.mae) << ',' << g17(acc.rmae)
           << ',' << g17(rep.total) << '\n';
        out << "sweep " << i << ": lr " << g17(lr) << ", d_model " << d_model << ", MAE "
            << g17(acc.mae) << ", profit " << g17(rep.total) << '\n';
    }
    return 0;
}

int cmd_report(const RunConfig& cfg, std::ostream& out) {
    const std::string daily_path = cfg.out_dir + "/daily.csv";
    std::ifstream in(daily_path);
    if (!in.is_open()) throw DataError("no daily.csv in " + cfg.out_dir + "; run backtest first");

    std::string line;
    std::getline(in, line);  // meta comment
    std::getline(in, line);  // header
    std::map<std::string, std::vector<DayResult>> by_mode;
    std::vector<std::string> order;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string date_s, label, rest;
        std::getline(ss, date_s, ',');
        std::getline(ss, label, ',');
        DayResult d;
        d.date = parse_date(date_s);
        auto [mode, source] = parse_mode_label(label);
        d.mode = mode;
        d.source = source;
        std::getline(ss, rest, ',');
        d.da_revenue = std::stod(rest);
        std::getline(ss, rest, ',');
        d.rt_settlement = std::stod(rest);
        std::getline(ss, rest, ',');
        d.discharge_cost = std::stod(rest);
        std::getline(ss, rest, ',');
        d.total = std::stod(rest);
        std::getline(ss, rest, ',');
        d.soc_end = std::stod(rest);
        if (!by_mode.count(label)) order.push_back(label);
        by_mode[label].push_back(d);
    }
    if (order.empty()) throw DataError("daily.csv has no rows");

    std::map<std::string, RunReport> baselines;
    for (const auto& label : order) {
        auto [mode, source] = parse_mode_label(label);
        if (mode == ParticipationMode::rt)
            baselines[source == ForecastSource::perfect ? "RT-PF" : "RT-F"] =
                aggregate(by_mode[label], nullptr);
    }
    std::vector<RunReport> reports;
    for (const auto& label : order) {
        auto [mode, source] = parse_mode_label(label);
        const RunReport* base = nullptr;
        if (mode != ParticipationMode::rt) {
            auto it = baselines.find(source == ForecastSource::perfect ? "RT-PF" : "RT-F");
            if (it != baselines.end()) base = &it->second;
        }
        reports.push_back(aggregate(by_mode[label], base));
    }

    write_cumulative_csv(cfg.out_dir + "/cumulative.csv", reports, meta_for(cfg));
    write_report_json(cfg.out_dir + "/report.json", reports, meta_for(cfg));
    write_plot_script(cfg.out_dir + "/plot.gp", reports);
    for (const auto& rep : reports) {
        out << rep.label << ": total " << g17(rep.total) << " $, negative days "
            << rep.negative_days;
        if (rep.ipm) out << ", IPM " << g17(*rep.ipm * 100.0) << "%";
        out << '\n';
    }
    return 0;
}

}  // namespace arb
