#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "arb/forecaster.hpp"
#include "arb/market_data.hpp"
#include "arb/storage.hpp"

namespace arb {

struct SweepConfig {
    int n_samples = 5;
    double lr_min = 1e-4;
    double lr_max = 1e-2;
    std::vector<double> d_model_choices = {16, 32, 64};
    std::vector<double> n_layers_choices = {1, 2};
    double dropout_min = 0.0;
    double dropout_max = 0.2;
    int max_epochs = 20;
};

struct PolicyConfig {
    int grid_levels = 100;       // K
    double tie_tolerance = 1e-9;
    double vb_q_max = 0.5;
    bool carry_over_soc = true;
    double initial_soc = 0.0;
    bool include_vb_in_joint_pf = true;
    bool include_vb_in_joint_f = false;
};

struct RunConfig {
    // [run]
    std::string out_dir = "out";
    std::uint64_t seed = 1;
    std::string zone;  // default: synth zone, or single CSV zone
    int jobs = 1;

    // [data]
    std::string source = "synth";  // synth | csv
    std::string csv_dir;
    IngestOptions ingest;

    // [synth]
    SynthParams synth;
    int synth_days = 120;

    // [split]
    std::optional<Date> val_start;
    std::optional<Date> test_start;

    // [forecaster]
    ModelKind model_kind = ModelKind::transformer;
    Transform transform = Transform::signed_log;
    ForecasterHyper hyper;
    int stride_hours = 24;
    TrainConfig train;

    // [battery]
    BatterySpec battery;

    // [policy]
    PolicyConfig policy;

    // [backtest]
    std::vector<std::string> modes = {"RT-F", "DA+RT-F", "VB-F"};

    // [sweep]
    SweepConfig sweep;

    std::string config_hash;  // FNV-1a of the config file bytes

    WindowSpec window_spec() const {
        return {hyper.lookback, hyper.horizon, stride_hours, transform};
    }
};

struct CliOverrides {
    std::optional<std::string> zone;
    std::optional<std::vector<std::string>> modes;
    std::optional<std::uint64_t> seed;
    std::optional<int> jobs;
    std::optional<std::string> out_dir;
};

RunConfig load_config(const std::string& path, const CliOverrides& overrides = {});

}  // namespace arb
