#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "arb/dates.hpp"
#include "arb/errors.hpp"

namespace arb {

enum class Resolution { five_minute, hourly };

inline int intervals_per_day(Resolution r) {
    return r == Resolution::five_minute ? 288 : 24;
}

// Contiguous, gap-free price stream covering whole days at one resolution.
struct PriceSeries {
    std::string zone;
    Resolution resolution = Resolution::hourly;
    Date start;
    std::vector<double> values;  // $/MWh

    std::int64_t days() const {
        return static_cast<std::int64_t>(values.size()) / intervals_per_day(resolution);
    }
    // Hour-indexed access for hourly series, day-local.
    double at(Date day, int idx) const {
        return values[static_cast<size_t>((day - start) * intervals_per_day(resolution) + idx)];
    }
};

// Hourly demand forecast stream, whole days.
struct LoadSeries {
    std::string zone;
    Date start;
    std::vector<double> values;  // MW

    std::int64_t days() const { return static_cast<std::int64_t>(values.size()) / 24; }
};

struct ZoneData {
    PriceSeries da_hourly;
    PriceSeries rt_5min;
    PriceSeries rt_hourly_mean;
    LoadSeries load;
};

struct MarketDataset {
    std::map<std::string, ZoneData> zones;
    Date first_day;
    Date last_day;  // inclusive

    std::int64_t day_count() const { return last_day - first_day + 1; }
    const ZoneData& zone(const std::string& name) const;
};

// Forecast transform applied to price channels before normalization.
enum class Transform { raw, signed_log };

// One supervised sample: normalized model input plus the raw target it must
// reproduce after de-normalization. Channel order: rt_hourly_mean, da_hourly, load.
struct WindowSample {
    int channels = 0;       // M
    int lookback = 0;       // L hours
    int horizon = 0;        // T hours
    std::vector<double> input;   // M x L row-major, transformed + normalized
    std::vector<double> target;  // T raw $/MWh (rt_hourly_mean of target_day)
    Date target_day;
    struct NormStat { double mean = 0.0; double std = 1.0; };
    std::vector<NormStat> norm_stats;  // per channel, in transform space
    Transform transform = Transform::raw;

    const double* channel(int m) const { return input.data() + static_cast<size_t>(m) * lookback; }
};

// --- ingestion ---------------------------------------------------------

enum class CsvKind { da, rt, load };

struct IngestOptions {
    // "previous" forward-fills gaps up to the per-resolution limits below.
    std::string fill_policy = "previous";
    int max_gap_hourly = 24;  // consecutive missing hourly rows
    int max_gap_5min = 12;    // consecutive missing 5-minute rows
};

PriceSeries load_price_csv(const std::string& path, CsvKind kind, const std::string& zone,
                           const IngestOptions& opts = {});
LoadSeries load_load_csv(const std::string& path, const std::string& zone,
                         const IngestOptions& opts = {});

// Writes da_hourly.csv, rt_5min.csv, load_hourly.csv under dir.
void write_dataset_csv(const MarketDataset& ds, const std::string& dir);
// Reads the three files back for the given zones (all zones present if empty).
MarketDataset load_dataset_csv(const std::string& dir, const std::vector<std::string>& zones,
                               const IngestOptions& opts = {});

// Validates per-zone spans and the rt_hourly_mean consistency invariant.
MarketDataset make_dataset(std::map<std::string, ZoneData> zones);

// --- transforms --------------------------------------------------------

PriceSeries resample_hourly_mean(const PriceSeries& rt);

// sign(x) * ln(1 + |x|); bijective on the reals.
double signed_log(double x);
double signed_log_inverse(double y);
double apply_transform(Transform t, double x);
double invert_transform(Transform t, double y);

// --- windows & splits ---------------------------------------------------

struct WindowSpec {
    int lookback = 336;
    int horizon = 24;
    int stride = 24;
    Transform transform = Transform::raw;
};

// Normalization guard: channels with std below this normalize to zero.
inline constexpr double kNormStdEpsilon = 1e-8;

std::vector<WindowSample> build_windows(const MarketDataset& ds, const std::string& zone,
                                        const WindowSpec& spec);
// Single window whose horizon is target_day (input ends the hour before).
WindowSample build_window_for_day(const MarketDataset& ds, const std::string& zone,
                                  Date target_day, const WindowSpec& spec);

// Boundary dates begin the next partition; N boundaries give N+1 datasets.
std::vector<MarketDataset> split_dataset(const MarketDataset& ds, const std::vector<Date>& boundaries);

// --- synthesis ----------------------------------------------------------

struct SynthParams {
    std::string zone = "SYNTH";
    Date start = make_date(2021, 1, 1);
    double base_price = 40.0;
    double daily_amplitude = 12.0;
    double weekly_amplitude = 4.0;
    // Optional extra harmonic whose period does not divide one week, so a
    // 7-day-lag forecast has irreducible error on noise-free data.
    double cross_amplitude = 0.0;
    double cross_period_hours = 36.0;
    double rt_noise_std = 3.0;
    double spike_probability = 0.01;
    double spike_magnitude = 80.0;
    double negative_price_probability = 0.0;
    double negative_price_floor = -10.0;
    // DA is a centered moving average of the hourly template plus noise.
    int da_smoothing_hours = 5;
    double da_noise_std = 1.0;
    double load_base = 1200.0;
    double load_daily_amplitude = 300.0;
    double load_noise_std = 20.0;
};

MarketDataset synth_generate(std::uint64_t seed, int days, const SynthParams& params);

// --- statistics ---------------------------------------------------------

struct ZoneStats {
    double mean_dap = 0.0;
    double std_dap = 0.0;
    double mean_rtp = 0.0;
    double std_rtp = 0.0;
    std::int64_t negative_rtp_count = 0;
};

// DAP stats over hourly DA prices, RTP stats over 5-minute prices.
ZoneStats zone_stats(const MarketDataset& ds, const std::string& zone);

}  // namespace arb
