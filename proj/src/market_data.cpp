#include "arb/market_data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

namespace arb {

const ZoneData& MarketDataset::zone(const std::string& name) const {
    auto it = zones.find(name);
    if (it == zones.end()) throw UnknownZoneError("unknown zone: " + name);
    return it->second;
}

// --- CSV ingestion ------------------------------------------------------

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string tok;
    std::stringstream ss(line);
    while (std::getline(ss, tok, ',')) {
        while (!tok.empty() && (tok.back() == '\r' || tok.back() == ' ')) tok.pop_back();
        size_t b = tok.find_first_not_of(' ');
        out.push_back(b == std::string::npos ? "" : tok.substr(b));
    }
    return out;
}

struct Row {
    Timestamp ts;
    double value;
};

// Parses timestamp,zone,<value> rows for one zone; enforces header presence,
// monotonicity, and no duplicates.
std::vector<Row> read_rows(const std::string& path, const std::string& zone,
                           const std::string& value_column) {
    std::ifstream file(path);
    if (!file.is_open()) throw DataError("cannot open: " + path);

    std::string line;
    if (!std::getline(file, line)) throw MissingColumnError(path + ": empty file");
    auto header = split_line(line);
    int ts_col = -1, zone_col = -1, val_col = -1;
    for (size_t i = 0; i < header.size(); ++i) {
        if (header[i] == "timestamp") ts_col = static_cast<int>(i);
        else if (header[i] == "zone") zone_col = static_cast<int>(i);
        else if (header[i] == value_column) val_col = static_cast<int>(i);
    }
    if (ts_col < 0 || zone_col < 0 || val_col < 0)
        throw MissingColumnError(path + ": header must contain timestamp,zone," + value_column);

    std::vector<Row> rows;
    size_t line_no = 1;
    while (std::getline(file, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        auto cols = split_line(line);
        if (static_cast<int>(cols.size()) <= std::max({ts_col, zone_col, val_col}))
            throw UnparseableValueError(path + ":" + std::to_string(line_no) + ": too few columns");
        if (cols[zone_col] != zone) continue;
        Row r;
        try {
            r.ts = parse_timestamp(cols[ts_col]);
        } catch (const std::exception& e) {
            throw UnparseableValueError(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
        size_t used = 0;
        try {
            r.value = std::stod(cols[val_col], &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != cols[val_col].size() || !std::isfinite(r.value))
            throw UnparseableValueError(path + ":" + std::to_string(line_no) + ": bad value '" +
                                        cols[val_col] + "'");
        if (!rows.empty()) {
            if (r.ts == rows.back().ts)
                throw NonMonotonicTimestampsError(path + ":" + std::to_string(line_no) +
                                                  ": duplicate timestamp");
            if (r.ts < rows.back().ts)
                throw NonMonotonicTimestampsError(path + ":" + std::to_string(line_no) +
                                                  ": timestamps not increasing");
        }
        rows.push_back(r);
    }
    if (rows.empty()) throw DataError(path + ": no rows for zone " + zone);
    return rows;
}

// Aligns rows to the fixed intraday grid and forward-fills gaps up to max_gap.
std::vector<double> grid_fill(const std::vector<Row>& rows, int step_minutes, int max_gap,
                              const std::string& fill_policy, const std::string& what) {
    const Date start = rows.front().ts.date;
    const Date end = rows.back().ts.date;
    const int per_day = 1440 / step_minutes;
    const std::int64_t slots = (end - start + 1) * per_day;

    std::vector<double> values(static_cast<size_t>(slots));
    std::vector<bool> seen(static_cast<size_t>(slots), false);
    for (const auto& r : rows) {
        if (r.ts.minute_of_day % step_minutes != 0)
            throw UnparseableValueError(what + ": timestamp " + format_timestamp(r.ts) +
                                        " off the " + std::to_string(step_minutes) + "-minute grid");
        std::int64_t slot = (r.ts.date - start) * per_day + r.ts.minute_of_day / step_minutes;
        values[static_cast<size_t>(slot)] = r.value;
        seen[static_cast<size_t>(slot)] = true;
    }

    std::int64_t run = 0;
    for (std::int64_t i = 0; i < slots; ++i) {
        if (seen[static_cast<size_t>(i)]) {
            run = 0;
            continue;
        }
        ++run;
        if (fill_policy != "previous")
            throw GapExceedsLimitError(what + ": missing interval at slot " + std::to_string(i) +
                                       " and fill policy is '" + fill_policy + "'");
        if (run > max_gap)
            throw GapExceedsLimitError(what + ": gap of more than " + std::to_string(max_gap) +
                                       " consecutive intervals");
        if (i == 0)
            throw GapExceedsLimitError(what + ": series starts with a gap; cannot forward-fill");
        values[static_cast<size_t>(i)] = values[static_cast<size_t>(i - 1)];
    }
    return values;
}

}  // namespace

PriceSeries load_price_csv(const std::string& path, CsvKind kind, const std::string& zone,
                           const IngestOptions& opts) {
    if (kind == CsvKind::load) throw ConfigError("load_price_csv: kind must be da or rt");
    auto rows = read_rows(path, zone, "price");
    PriceSeries s;
    s.zone = zone;
    s.resolution = kind == CsvKind::rt ? Resolution::five_minute : Resolution::hourly;
    s.start = rows.front().ts.date;
    int step = kind == CsvKind::rt ? 5 : 60;
    int max_gap = kind == CsvKind::rt ? opts.max_gap_5min : opts.max_gap_hourly;
    s.values = grid_fill(rows, step, max_gap, opts.fill_policy, path);
    return s;
}

LoadSeries load_load_csv(const std::string& path, const std::string& zone,
                         const IngestOptions& opts) {
    auto rows = read_rows(path, zone, "mw");
    for (const auto& r : rows)
        if (r.value < 0) throw UnparseableValueError(path + ": negative load");
    LoadSeries s;
    s.zone = zone;
    s.start = rows.front().ts.date;
    s.values = grid_fill(rows, 60, opts.max_gap_hourly, opts.fill_policy, path);
    return s;
}

// --- dataset assembly & CSV round-trip ----------------------------------

MarketDataset make_dataset(std::map<std::string, ZoneData> zones) {
    if (zones.empty()) throw DataError("dataset has no zones");
    MarketDataset ds;
    bool first = true;
    for (auto& [name, z] : zones) {
        if (z.da_hourly.days() == 0) throw DataError(name + ": empty da series");
        Date s = z.da_hourly.start;
        Date e = s + (z.da_hourly.days() - 1);
        auto check_span = [&](Date s2, std::int64_t days, const char* what) {
            if (s2 != s || days != z.da_hourly.days())
                throw DataError(name + ": " + what + " span differs from da_hourly");
        };
        check_span(z.rt_5min.start, z.rt_5min.days(), "rt_5min");
        check_span(z.rt_hourly_mean.start, z.rt_hourly_mean.days(), "rt_hourly_mean");
        check_span(z.load.start, z.load.days(), "load");
        for (size_t t = 0; t < z.rt_hourly_mean.values.size(); ++t) {
            double sum = 0.0;
            for (int j = 0; j < 12; ++j) sum += z.rt_5min.values[t * 12 + j];
            if (std::abs(sum / 12.0 - z.rt_hourly_mean.values[t]) > 1e-9)
                throw DataError(name + ": rt_hourly_mean inconsistent with rt_5min at hour " +
                                std::to_string(t));
        }
        if (first) {
            ds.first_day = s;
            ds.last_day = e;
            first = false;
        } else if (s != ds.first_day || e != ds.last_day) {
            throw DataError("zones cover different day spans");
        }
    }
    ds.zones = std::move(zones);
    return ds;
}

namespace {

std::string fmt_value(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_series_csv(std::ofstream& out, const std::string& zone, const PriceSeries& s) {
    int per_day = intervals_per_day(s.resolution);
    int step = 1440 / per_day;
    for (size_t i = 0; i < s.values.size(); ++i) {
        Timestamp ts{s.start + static_cast<std::int64_t>(i) / per_day,
                     static_cast<int>(i % per_day) * step};
        out << format_timestamp(ts) << ',' << zone << ',' << fmt_value(s.values[i]) << '\n';
    }
}

}  // namespace

void write_dataset_csv(const MarketDataset& ds, const std::string& dir) {
    std::filesystem::create_directories(dir);
    std::ofstream da(dir + "/da_hourly.csv"), rt(dir + "/rt_5min.csv"),
        load(dir + "/load_hourly.csv");
    da << "timestamp,zone,price\n";
    rt << "timestamp,zone,price\n";
    load << "timestamp,zone,mw\n";
    for (const auto& [name, z] : ds.zones) {
        write_series_csv(da, name, z.da_hourly);
        write_series_csv(rt, name, z.rt_5min);
        for (size_t i = 0; i < z.load.values.size(); ++i) {
            Timestamp ts{z.load.start + static_cast<std::int64_t>(i) / 24,
                         static_cast<int>(i % 24) * 60};
            load << format_timestamp(ts) << ',' << name << ',' << fmt_value(z.load.values[i])
                 << '\n';
        }
    }
}

MarketDataset load_dataset_csv(const std::string& dir, const std::vector<std::string>& zones,
                               const IngestOptions& opts) {
    std::vector<std::string> names = zones;
    if (names.empty()) {
        // Discover zones from the DA file header-free scan.
        std::ifstream file(dir + "/da_hourly.csv");
        if (!file.is_open()) throw DataError("cannot open: " + dir + "/da_hourly.csv");
        std::string line;
        std::getline(file, line);
        while (std::getline(file, line)) {
            auto cols = split_line(line);
            if (cols.size() >= 2 && std::find(names.begin(), names.end(), cols[1]) == names.end())
                names.push_back(cols[1]);
        }
        std::sort(names.begin(), names.end());
    }
    std::map<std::string, ZoneData> out;
    for (const auto& name : names) {
        ZoneData z;
        z.da_hourly = load_price_csv(dir + "/da_hourly.csv", CsvKind::da, name, opts);
        z.rt_5min = load_price_csv(dir + "/rt_5min.csv", CsvKind::rt, name, opts);
        z.rt_hourly_mean = resample_hourly_mean(z.rt_5min);
        z.load = load_load_csv(dir + "/load_hourly.csv", name, opts);
        out[name] = std::move(z);
    }
    return make_dataset(std::move(out));
}

// --- transforms ---------------------------------------------------------

PriceSeries resample_hourly_mean(const PriceSeries& rt) {
    if (rt.resolution != Resolution::five_minute)
        throw ConfigError("resample_hourly_mean expects a 5-minute series");
    if (rt.values.size() % 12 != 0)
        throw LengthNotDivisibleError("5-minute series length not divisible by 12");
    PriceSeries out;
    out.zone = rt.zone;
    out.resolution = Resolution::hourly;
    out.start = rt.start;
    out.values.resize(rt.values.size() / 12);
    for (size_t t = 0; t < out.values.size(); ++t) {
        double sum = 0.0;
        for (int j = 0; j < 12; ++j) sum += rt.values[t * 12 + j];
        out.values[t] = sum / 12.0;
    }
    return out;
}

double signed_log(double x) {
    if (!std::isfinite(x)) throw NonFiniteInputError("signed_log: non-finite input");
    return x >= 0 ? std::log1p(x) : -std::log1p(-x);
}

double signed_log_inverse(double y) {
    if (!std::isfinite(y)) throw NonFiniteInputError("signed_log_inverse: non-finite input");
    return y >= 0 ? std::expm1(y) : -std::expm1(-y);
}

double apply_transform(Transform t, double x) {
    return t == Transform::signed_log ? signed_log(x) : x;
}

double invert_transform(Transform t, double y) {
    return t == Transform::signed_log ? signed_log_inverse(y) : y;
}

// --- windows ------------------------------------------------------------

namespace {

// Channel value in transform space at absolute hour h of the zone span.
double channel_value(const ZoneData& z, Date first_day, int channel, std::int64_t h, Transform t) {
    size_t i = static_cast<size_t>((first_day - z.da_hourly.start) * 24 + h);
    switch (channel) {
        case 0: return apply_transform(t, z.rt_hourly_mean.values[i]);
        case 1: return apply_transform(t, z.da_hourly.values[i]);
        default: return z.load.values[i];  // load is not a price; never transformed
    }
}

WindowSample make_window(const MarketDataset& ds, const ZoneData& z, Date target_day,
                         const WindowSpec& spec) {
    WindowSample w;
    w.channels = 3;
    w.lookback = spec.lookback;
    w.horizon = spec.horizon;
    w.target_day = target_day;
    w.transform = spec.transform;
    w.input.resize(static_cast<size_t>(3) * spec.lookback);
    w.norm_stats.resize(3);

    const std::int64_t end_hour = (target_day - ds.first_day) * 24;  // exclusive
    const std::int64_t begin_hour = end_hour - spec.lookback;
    for (int m = 0; m < 3; ++m) {
        double* ch = w.input.data() + static_cast<size_t>(m) * spec.lookback;
        for (int i = 0; i < spec.lookback; ++i)
            ch[i] = channel_value(z, ds.first_day, m, begin_hour + i, spec.transform);
        double mean = 0.0;
        for (int i = 0; i < spec.lookback; ++i) mean += ch[i];
        mean /= spec.lookback;
        double var = 0.0;
        for (int i = 0; i < spec.lookback; ++i) var += (ch[i] - mean) * (ch[i] - mean);
        double sd = std::sqrt(var / spec.lookback);
        w.norm_stats[m] = {mean, sd};
        if (sd < kNormStdEpsilon) {
            for (int i = 0; i < spec.lookback; ++i) ch[i] = 0.0;
        } else {
            for (int i = 0; i < spec.lookback; ++i) ch[i] = (ch[i] - mean) / sd;
        }
    }

    w.target.resize(spec.horizon);
    for (int hm = 0; hm < spec.horizon; ++hm)
        w.target[hm] =
            z.rt_hourly_mean.values[static_cast<size_t>((target_day - z.rt_hourly_mean.start) * 24 + hm)];
    return w;
}

}  // namespace

std::vector<WindowSample> build_windows(const MarketDataset& ds, const std::string& zone,
                                        const WindowSpec& spec) {
    const ZoneData& z = ds.zone(zone);
    if (spec.lookback % 24 != 0 || spec.horizon != 24)
        throw ConfigError("build_windows: lookback must be whole days and horizon 24");
    const std::int64_t span_hours = ds.day_count() * 24;
    if (span_hours < spec.lookback + spec.horizon)
        throw SpanTooShortError("span shorter than lookback + horizon");

    std::vector<WindowSample> out;
    const int lookback_days = spec.lookback / 24;
    const int stride_days = std::max(1, spec.stride / 24);
    for (Date d = ds.first_day + lookback_days; d <= ds.last_day; d = d + stride_days)
        out.push_back(make_window(ds, z, d, spec));
    return out;
}

WindowSample build_window_for_day(const MarketDataset& ds, const std::string& zone,
                                  Date target_day, const WindowSpec& spec) {
    const ZoneData& z = ds.zone(zone);
    if (target_day - ds.first_day < spec.lookback / 24 || target_day > ds.last_day)
        throw InsufficientHistoryError("not enough history before " + format_date(target_day));
    return make_window(ds, z, target_day, spec);
}

// --- splits -------------------------------------------------------------

namespace {

MarketDataset slice_dataset(const MarketDataset& ds, Date first, Date last) {
    std::map<std::string, ZoneData> zones;
    for (const auto& [name, z] : ds.zones) {
        ZoneData s;
        auto cut = [&](const auto& series, auto& out, int per_day) {
            std::int64_t b = (first - series.start) * per_day;
            std::int64_t n = (last - first + 1) * per_day;
            out.zone = series.zone;
            out.start = first;
            out.values.assign(series.values.begin() + b, series.values.begin() + b + n);
        };
        cut(z.da_hourly, s.da_hourly, 24);
        s.da_hourly.resolution = Resolution::hourly;
        cut(z.rt_5min, s.rt_5min, 288);
        s.rt_5min.resolution = Resolution::five_minute;
        cut(z.rt_hourly_mean, s.rt_hourly_mean, 24);
        s.rt_hourly_mean.resolution = Resolution::hourly;
        cut(z.load, s.load, 24);
        zones[name] = std::move(s);
    }
    MarketDataset out;
    out.zones = std::move(zones);
    out.first_day = first;
    out.last_day = last;
    return out;
}

}  // namespace

std::vector<MarketDataset> split_dataset(const MarketDataset& ds, const std::vector<Date>& boundaries) {
    for (size_t i = 0; i < boundaries.size(); ++i) {
        if (boundaries[i] <= ds.first_day || boundaries[i] > ds.last_day)
            throw BoundaryOutOfRangeError("boundary " + format_date(boundaries[i]) +
                                          " outside span");
        if (i > 0 && boundaries[i] <= boundaries[i - 1])
            throw BoundaryOutOfRangeError("boundaries not strictly increasing");
    }
    std::vector<MarketDataset> parts;
    Date cur = ds.first_day;
    for (Date b : boundaries) {
        parts.push_back(slice_dataset(ds, cur, b - 1));
        cur = b;
    }
    parts.push_back(slice_dataset(ds, cur, ds.last_day));
    return parts;
}

// --- synthesis ----------------------------------------------------------

MarketDataset synth_generate(std::uint64_t seed, int days, const SynthParams& p) {
    if (days < 1) throw ConfigError("synth_generate: days must be >= 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    const double pi2 = 2.0 * 3.14159265358979323846;
    auto tmpl = [&](std::int64_t h_abs) {
        int h = static_cast<int>(h_abs % 24);
        int dow = static_cast<int>((h_abs / 24) % 7);
        double v = p.base_price;
        v += p.daily_amplitude * std::sin(pi2 * (h - 6) / 24.0);
        v += p.weekly_amplitude * std::cos(pi2 * dow / 7.0);
        if (p.cross_amplitude != 0.0 && p.cross_period_hours > 0.0)
            v += p.cross_amplitude * std::sin(pi2 * static_cast<double>(h_abs) / p.cross_period_hours);
        return v;
    };

    ZoneData z;
    z.da_hourly = {p.zone, Resolution::hourly, p.start, {}};
    z.rt_5min = {p.zone, Resolution::five_minute, p.start, {}};
    z.load = {p.zone, p.start, {}};
    const std::int64_t hours = static_cast<std::int64_t>(days) * 24;
    z.da_hourly.values.reserve(hours);
    z.rt_5min.values.reserve(hours * 12);
    z.load.values.reserve(hours);

    // DA: smoothed hourly template + noise (draws consumed even when std is 0
    // so toggling noise does not reshuffle the other streams).
    const int k = std::max(1, p.da_smoothing_hours) | 1;  // odd kernel
    for (std::int64_t h = 0; h < hours; ++h) {
        double sum = 0.0;
        for (int j = -(k / 2); j <= k / 2; ++j) sum += tmpl(std::clamp<std::int64_t>(h + j, 0, hours - 1));
        z.da_hourly.values.push_back(sum / k + p.da_noise_std * gauss(rng));
    }

    // RT 5-minute: hourly template held constant within the hour, plus noise,
    // spikes, and negative-price replacements.
    for (std::int64_t h = 0; h < hours; ++h) {
        double base = tmpl(h);
        for (int j = 0; j < 12; ++j) {
            double v = base + p.rt_noise_std * gauss(rng);
            double u_spike = unif(rng);
            double spike_size = std::abs(gauss(rng));
            if (u_spike < p.spike_probability) v += p.spike_magnitude * (0.5 + spike_size);
            double u_neg = unif(rng);
            double neg_draw = unif(rng);
            if (u_neg < p.negative_price_probability)
                v = p.negative_price_floor * (0.1 + 0.9 * neg_draw);
            z.rt_5min.values.push_back(v);
        }
    }

    for (std::int64_t h = 0; h < hours; ++h) {
        double v = p.load_base + p.load_daily_amplitude * std::sin(pi2 * (h % 24 - 5) / 24.0) +
                   p.load_noise_std * gauss(rng);
        z.load.values.push_back(std::max(0.0, v));
    }

    z.rt_hourly_mean = resample_hourly_mean(z.rt_5min);
    std::map<std::string, ZoneData> zones;
    zones[p.zone] = std::move(z);
    return make_dataset(std::move(zones));
}

// --- statistics ---------------------------------------------------------

namespace {

void mean_std(const std::vector<double>& v, double& mean, double& sd) {
    mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    sd = std::sqrt(var / static_cast<double>(v.size()));
}

}  // namespace

ZoneStats zone_stats(const MarketDataset& ds, const std::string& zone) {
    const ZoneData& z = ds.zone(zone);
    ZoneStats s;
    mean_std(z.da_hourly.values, s.mean_dap, s.std_dap);
    mean_std(z.rt_5min.values, s.mean_rtp, s.std_rtp);
    for (double v : z.rt_5min.values)
        if (v < 0) ++s.negative_rtp_count;
    return s;
}

}  // namespace arb
