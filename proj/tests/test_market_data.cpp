#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "arb/market_data.hpp"

using namespace arb;

namespace {

std::string temp_dir() {
    auto dir = std::filesystem::temp_directory_path() / "arb_md_test";
    std::filesystem::create_directories(dir);
    return dir.string();
}

std::string write_file(const std::string& name, const std::string& body) {
    std::string path = temp_dir() + "/" + name;
    std::ofstream out(path);
    out << body;
    return path;
}

}  // namespace

TEST_CASE("load_price_csv ingests a well-formed rt file") {
    // Two full days so the day-grid invariant is satisfied; header present.
    std::ostringstream body;
    body << "timestamp,zone,price\n";
    for (int d = 0; d < 1; ++d)
        for (int i = 0; i < 288; ++i) {
            Timestamp ts{make_date(2021, 3, 1) + d, i * 5};
            body << format_timestamp(ts) << ",NYC," << 40.0 + i * 0.01 << "\n";
        }
    auto path = write_file("rt_ok.csv", body.str());
    PriceSeries s = load_price_csv(path, CsvKind::rt, "NYC");
    CHECK(s.values.size() == 288);
    CHECK(s.resolution == Resolution::five_minute);
    CHECK(s.values[0] == doctest::Approx(40.0));
}

TEST_CASE("load_price_csv fills a single missing interval with the prior value") {
    std::ostringstream body;
    body << "timestamp,zone,price\n";
    for (int i = 0; i < 288; ++i) {
        if (i == 100) continue;  // one missing 5-minute row
        Timestamp ts{make_date(2021, 3, 1), i * 5};
        body << format_timestamp(ts) << ",NYC," << 10.0 + i << "\n";
    }
    auto path = write_file("rt_gap1.csv", body.str());
    PriceSeries s = load_price_csv(path, CsvKind::rt, "NYC");
    CHECK(s.values.size() == 288);
    CHECK(s.values[100] == doctest::Approx(10.0 + 99));  // forward fill
}

TEST_CASE("load_price_csv rejects a gap beyond the configured limit") {
    // 25 consecutive missing hours against a limit of 24.
    std::ostringstream body;
    body << "timestamp,zone,price\n";
    for (int d = 0; d < 3; ++d)
        for (int h = 0; h < 24; ++h) {
            int abs_h = d * 24 + h;
            if (abs_h >= 30 && abs_h < 55) continue;
            Timestamp ts{make_date(2021, 3, 1) + d, h * 60};
            body << format_timestamp(ts) << ",NYC," << 20.0 << "\n";
        }
    auto path = write_file("da_gap25.csv", body.str());
    CHECK_THROWS_AS(load_price_csv(path, CsvKind::da, "NYC"), GapExceedsLimitError);

    IngestOptions loose;
    loose.max_gap_hourly = 25;
    CHECK_NOTHROW(load_price_csv(path, CsvKind::da, "NYC", loose));
}

TEST_CASE("load_price_csv error catalogue") {
    auto missing = write_file("missing_col.csv", "timestamp,price\n2021-03-01T00:00,10\n");
    CHECK_THROWS_AS(load_price_csv(missing, CsvKind::da, "NYC"), MissingColumnError);

    auto dup = write_file("dup.csv",
                          "timestamp,zone,price\n2021-03-01T00:00,NYC,1\n"
                          "2021-03-01T00:00,NYC,2\n");
    CHECK_THROWS_AS(load_price_csv(dup, CsvKind::da, "NYC"), NonMonotonicTimestampsError);

    auto unsorted = write_file("unsorted.csv",
                               "timestamp,zone,price\n2021-03-01T01:00,NYC,1\n"
                               "2021-03-01T00:00,NYC,2\n");
    CHECK_THROWS_AS(load_price_csv(unsorted, CsvKind::da, "NYC"), NonMonotonicTimestampsError);

    auto bad_value = write_file("badval.csv",
                                "timestamp,zone,price\n2021-03-01T00:00,NYC,oops\n");
    CHECK_THROWS_AS(load_price_csv(bad_value, CsvKind::da, "NYC"), UnparseableValueError);
}

TEST_CASE("resample_hourly_mean") {
    PriceSeries rt;
    rt.zone = "Z";
    rt.resolution = Resolution::five_minute;
    rt.start = make_date(2021, 1, 1);

    SUBCASE("mean of constants") {
        rt.values.assign(12, 40.0);
        auto hourly = resample_hourly_mean(rt);
        REQUIRE(hourly.values.size() == 1);
        CHECK(hourly.values[0] == doctest::Approx(40.0).epsilon(1e-12));
    }

    SUBCASE("arithmetic mean") {
        rt.values = {0, 0, 0, 0, 0, 0, 12, 12, 12, 12, 12, 12};
        auto hourly = resample_hourly_mean(rt);
        CHECK(hourly.values[0] == doctest::Approx(6.0).epsilon(1e-12));
    }

    SUBCASE("length not divisible") {
        rt.values.assign(13, 1.0);
        CHECK_THROWS_AS(resample_hourly_mean(rt), LengthNotDivisibleError);
    }

    SUBCASE("full synthetic day matches a naive recomputation") {
        MarketDataset ds = synth_generate(7, 1, SynthParams{});
        const auto& z = ds.zone("SYNTH");
        for (int t = 0; t < 24; ++t) {
            // Independent oracle: naive summation.
            double sum = 0.0;
            for (int j = 0; j < 12; ++j) sum += z.rt_5min.values[static_cast<size_t>(t) * 12 + j];
            CHECK(std::abs(z.rt_hourly_mean.values[static_cast<size_t>(t)] - sum / 12.0) < 1e-9);
        }
    }
}

TEST_CASE("signed_log") {
    CHECK(signed_log(0.0) == 0.0);
    CHECK(signed_log(std::exp(1.0) - 1.0) == doctest::Approx(1.0).epsilon(1e-15));
    // High-precision reference for ln(43.49), computed with 50-digit arithmetic.
    CHECK(signed_log(-42.49) ==
          doctest::Approx(-3.7725310266095470).epsilon(1e-15));
    CHECK(signed_log_inverse(signed_log(-42.49)) == doctest::Approx(-42.49).epsilon(1e-12));
    CHECK_THROWS_AS(signed_log(std::nan("")), NonFiniteInputError);

    // Round-trip identity across magnitudes.
    for (double x : {-1e6, -1234.5, -1.0, -1e-9, 0.0, 1e-9, 0.5, 99.0, 1e6}) {
        double rt = signed_log_inverse(signed_log(x));
        CHECK(std::abs(rt - x) <= 1e-12 * std::max(1.0, std::abs(x)));
    }
}

TEST_CASE("build_windows geometry and normalization") {
    SynthParams p;
    MarketDataset ds = synth_generate(3, 30, p);
    WindowSpec spec;
    spec.transform = Transform::raw;

    auto windows = build_windows(ds, "SYNTH", spec);
    CHECK(windows.size() == 16);  // (720 - 360) / 24 + 1, by direct enumeration

    // Ordered by target day, no future leakage, normalized stats.
    Date prev = ds.first_day;
    for (const auto& w : windows) {
        CHECK(w.target_day > prev);
        prev = w.target_day;
        for (int m = 0; m < w.channels; ++m) {
            double mean = 0.0, var = 0.0;
            const double* ch = w.channel(m);
            for (int i = 0; i < w.lookback; ++i) mean += ch[i];
            mean /= w.lookback;
            for (int i = 0; i < w.lookback; ++i) var += (ch[i] - mean) * (ch[i] - mean);
            double sd = std::sqrt(var / w.lookback);
            CHECK(std::abs(mean) <= 1e-9);
            if (w.norm_stats[static_cast<size_t>(m)].std >= kNormStdEpsilon)
                CHECK(std::abs(sd - 1.0) <= 1e-6);
        }
        // Input ends strictly before the target day: the last lookback hour
        // belongs to target_day - 1, so reconstruct and compare raw values.
        const auto& z = ds.zone("SYNTH");
        const auto& stat = w.norm_stats[0];
        double last_input_raw = w.channel(0)[w.lookback - 1] * stat.std + stat.mean;
        CHECK(last_input_raw ==
              doctest::Approx(z.rt_hourly_mean.at(w.target_day - 1, 23)).epsilon(1e-9));
    }

    SUBCASE("span exactly L+T gives one sample") {
        MarketDataset small = synth_generate(3, 15, p);  // 360 hours
        auto one = build_windows(small, "SYNTH", spec);
        CHECK(one.size() == 1);
    }

    SUBCASE("too short span throws") {
        MarketDataset tiny = synth_generate(3, 14, p);
        CHECK_THROWS_AS(build_windows(tiny, "SYNTH", spec), SpanTooShortError);
    }

    SUBCASE("constant channel normalizes to zeros") {
        SynthParams flat;
        flat.daily_amplitude = 0;
        flat.weekly_amplitude = 0;
        flat.rt_noise_std = 0;
        flat.da_noise_std = 0;
        flat.spike_probability = 0;
        flat.load_noise_std = 0;
        flat.load_daily_amplitude = 0;
        MarketDataset constant = synth_generate(1, 16, flat);
        auto ws = build_windows(constant, "SYNTH", spec);
        REQUIRE(!ws.empty());
        for (int i = 0; i < ws[0].lookback; ++i) CHECK(ws[0].channel(0)[i] == 0.0);
    }
}

TEST_CASE("split_dataset") {
    MarketDataset ds = synth_generate(11, 20, SynthParams{});
    Date b1 = ds.first_day + 10;
    Date b2 = ds.first_day + 15;

    auto parts = split_dataset(ds, {b1, b2});
    REQUIRE(parts.size() == 3);
    CHECK(parts[0].day_count() == 10);
    CHECK(parts[1].day_count() == 5);
    CHECK(parts[2].day_count() == 5);
    // Disjoint and exhaustive.
    CHECK(parts[0].first_day == ds.first_day);
    CHECK(parts[0].last_day + 1 == parts[1].first_day);
    CHECK(parts[1].last_day + 1 == parts[2].first_day);
    CHECK(parts[2].last_day == ds.last_day);
    // Series content preserved across the cut.
    const auto& z = ds.zone("SYNTH");
    const auto& z1 = parts[1].zone("SYNTH");
    CHECK(z1.rt_5min.values[0] == z.rt_5min.values[static_cast<size_t>(10) * 288]);

    SUBCASE("smallest splittable span: one boundary, two one-day partitions") {
        MarketDataset two = synth_generate(11, 2, SynthParams{});
        auto halves = split_dataset(two, {two.first_day + 1});
        REQUIRE(halves.size() == 2);
        CHECK(halves[0].day_count() == 1);
        CHECK(halves[1].day_count() == 1);
    }

    SUBCASE("out-of-range and non-increasing boundaries") {
        CHECK_THROWS_AS(split_dataset(ds, {ds.first_day}), BoundaryOutOfRangeError);
        CHECK_THROWS_AS(split_dataset(ds, {ds.last_day + 1}), BoundaryOutOfRangeError);
        CHECK_THROWS_AS(split_dataset(ds, {b2, b1}), BoundaryOutOfRangeError);
        CHECK_THROWS_AS(split_dataset(ds, {b1, b1}), BoundaryOutOfRangeError);
    }
}

TEST_CASE("synth_generate determinism and structure") {
    SynthParams p;
    p.spike_probability = 0.02;
    p.negative_price_probability = 0.01;

    MarketDataset a = synth_generate(1, 10, p);
    MarketDataset b = synth_generate(1, 10, p);
    CHECK(a.zone("SYNTH").rt_5min.values == b.zone("SYNTH").rt_5min.values);
    CHECK(a.zone("SYNTH").da_hourly.values == b.zone("SYNTH").da_hourly.values);
    CHECK(a.zone("SYNTH").load.values == b.zone("SYNTH").load.values);

    MarketDataset c = synth_generate(2, 10, p);
    CHECK(a.zone("SYNTH").rt_5min.values != c.zone("SYNTH").rt_5min.values);

    SUBCASE("no spikes and no noise reproduces the seasonal template") {
        SynthParams clean;
        clean.rt_noise_std = 0;
        clean.spike_probability = 0;
        clean.negative_price_probability = 0;
        MarketDataset ds = synth_generate(5, 14, clean);
        const auto& z = ds.zone("SYNTH");
        // Template is piecewise-constant within the hour, so the hourly mean
        // equals the template and all 12 intervals of an hour agree.
        for (size_t t = 0; t < z.rt_hourly_mean.values.size(); ++t)
            for (int j = 0; j < 12; ++j)
                CHECK(z.rt_5min.values[t * 12 + j] ==
                      doctest::Approx(z.rt_hourly_mean.values[t]).epsilon(1e-12));
        // Weekly pattern: same hour one week apart matches exactly.
        CHECK(z.rt_hourly_mean.at(ds.first_day + 7, 9) ==
              doctest::Approx(z.rt_hourly_mean.at(ds.first_day, 9)).epsilon(1e-12));
    }

    SUBCASE("negative price count stays within 3 sigma of the binomial") {
        SynthParams neg;
        neg.negative_price_probability = 0.05;
        neg.rt_noise_std = 2.0;  // small against base 40: noise negatives are ~13 sigma events
        neg.spike_probability = 0.0;
        MarketDataset ds = synth_generate(17, 100, neg);
        const std::int64_t n = 100 * 288;
        const double expect = n * 0.05;
        const double sigma = std::sqrt(n * 0.05 * 0.95);
        std::int64_t count = zone_stats(ds, "SYNTH").negative_rtp_count;
        CHECK(count > expect - 3 * sigma);
        CHECK(count < expect + 3 * sigma);
    }
}

TEST_CASE("zone_stats") {
    SUBCASE("constant price: mean 10, std 0, no negatives") {
        SynthParams flat;
        flat.base_price = 10.0;
        flat.daily_amplitude = 0;
        flat.weekly_amplitude = 0;
        flat.rt_noise_std = 0;
        flat.da_noise_std = 0;
        flat.spike_probability = 0;
        MarketDataset ds = synth_generate(1, 3, flat);
        ZoneStats s = zone_stats(ds, "SYNTH");
        CHECK(s.mean_dap == doctest::Approx(10.0).epsilon(1e-12));
        CHECK(s.std_dap == doctest::Approx(0.0));
        CHECK(s.mean_rtp == doctest::Approx(10.0).epsilon(1e-12));
        CHECK(s.std_rtp == doctest::Approx(0.0));
        CHECK(s.negative_rtp_count == 0);
    }

    SUBCASE("negative count: [-1, 1] has one negative") {
        MarketDataset ds = synth_generate(1, 1, SynthParams{});
        auto& z = ds.zones.at("SYNTH");
        z.rt_5min.values.assign(288, 1.0);
        z.rt_5min.values[0] = -1.0;
        ZoneStats s = zone_stats(ds, "SYNTH");
        CHECK(s.negative_rtp_count == 1);
    }

    SUBCASE("unknown zone") {
        MarketDataset ds = synth_generate(1, 1, SynthParams{});
        CHECK_THROWS_AS(zone_stats(ds, "NOPE"), UnknownZoneError);
    }
}

TEST_CASE("dataset CSV round-trip is lossless and reproducible") {
    SynthParams p;
    p.spike_probability = 0.02;
    MarketDataset ds = synth_generate(9, 4, p);
    std::string dir = temp_dir() + "/roundtrip";
    write_dataset_csv(ds, dir);
    MarketDataset back = load_dataset_csv(dir, {"SYNTH"});
    CHECK(back.zone("SYNTH").rt_5min.values == ds.zone("SYNTH").rt_5min.values);
    CHECK(back.zone("SYNTH").da_hourly.values == ds.zone("SYNTH").da_hourly.values);
    CHECK(back.zone("SYNTH").load.values == ds.zone("SYNTH").load.values);
    CHECK(back.first_day == ds.first_day);

    // Byte-identical re-write.
    std::string dir2 = temp_dir() + "/roundtrip2";
    write_dataset_csv(ds, dir2);
    for (const char* name : {"/da_hourly.csv", "/rt_5min.csv", "/load_hourly.csv"}) {
        std::ifstream a(dir + name), b(dir2 + name);
        std::stringstream sa, sb;
        sa << a.rdbuf();
        sb << b.rdbuf();
        CHECK(sa.str() == sb.str());
    }
}

TEST_CASE("rt_hourly_mean consistency invariant is enforced") {
    MarketDataset ds = synth_generate(1, 1, SynthParams{});
    auto zones = ds.zones;
    zones.at("SYNTH").rt_hourly_mean.values[3] += 0.01;
    CHECK_THROWS_AS(make_dataset(std::move(zones)), DataError);
}
