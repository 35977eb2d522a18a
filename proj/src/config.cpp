#include "arb/config.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "arb/settlement.hpp"
#include "arb/toml_lite.hpp"

namespace arb {

RunConfig load_config(const std::string& path, const CliOverrides& overrides) {
    std::ifstream raw(path);
    if (!raw.is_open()) throw ConfigError("cannot open config: " + path);
    std::stringstream bytes;
    bytes << raw.rdbuf();
    TomlLite doc = TomlLite::parse(bytes.str(), path);

    RunConfig c;
    c.config_hash = fnv1a_hex(bytes.str());

    c.out_dir = doc.get_string("run.out_dir", c.out_dir);
    c.seed = static_cast<std::uint64_t>(doc.get_int("run.seed", 1));
    c.zone = doc.get_string("run.zone", "");
    c.jobs = static_cast<int>(doc.get_int("run.jobs", 1));
    if (c.jobs < 1) throw ConfigError("run.jobs must be >= 1");

    c.source = doc.get_string("data.source", c.source);
    if (c.source != "synth" && c.source != "csv")
        throw ConfigError("data.source must be synth or csv");
    c.csv_dir = doc.get_string("data.csv_dir", "");
    c.ingest.fill_policy = doc.get_string("data.fill_policy", c.ingest.fill_policy);
    c.ingest.max_gap_hourly = static_cast<int>(doc.get_int("data.max_gap_hourly", 24));
    c.ingest.max_gap_5min = static_cast<int>(doc.get_int("data.max_gap_5min", 12));
    if (c.source == "csv") {
        if (c.csv_dir.empty()) throw ConfigError("data.csv_dir required when source = csv");
        if (!std::filesystem::exists(c.csv_dir))
            throw ConfigError("data.csv_dir does not exist: " + c.csv_dir);
    }

    c.synth_days = static_cast<int>(doc.get_int("synth.days", c.synth_days));
    c.synth.zone = doc.get_string("synth.zone", c.synth.zone);
    if (doc.has("synth.start")) c.synth.start = parse_date(doc.require_string("synth.start"));
    c.synth.base_price = doc.get_double("synth.base_price", c.synth.base_price);
    c.synth.daily_amplitude = doc.get_double("synth.daily_amplitude", c.synth.daily_amplitude);
    c.synth.weekly_amplitude = doc.get_double("synth.weekly_amplitude", c.synth.weekly_amplitude);
    c.synth.cross_amplitude = doc.get_double("synth.cross_amplitude", c.synth.cross_amplitude);
    c.synth.cross_period_hours =
        doc.get_double("synth.cross_period_hours", c.synth.cross_period_hours);
    c.synth.rt_noise_std = doc.get_double("synth.rt_noise_std", c.synth.rt_noise_std);
    c.synth.spike_probability =
        doc.get_double("synth.spike_probability", c.synth.spike_probability);
    c.synth.spike_magnitude = doc.get_double("synth.spike_magnitude", c.synth.spike_magnitude);
    c.synth.negative_price_probability = doc.get_double("synth.negative_price_probability",
                                                        c.synth.negative_price_probability);
    c.synth.negative_price_floor =
        doc.get_double("synth.negative_price_floor", c.synth.negative_price_floor);
    c.synth.da_smoothing_hours =
        static_cast<int>(doc.get_int("synth.da_smoothing_hours", c.synth.da_smoothing_hours));
    c.synth.da_noise_std = doc.get_double("synth.da_noise_std", c.synth.da_noise_std);
    c.synth.load_base = doc.get_double("synth.load_base", c.synth.load_base);
    c.synth.load_daily_amplitude =
        doc.get_double("synth.load_daily_amplitude", c.synth.load_daily_amplitude);
    c.synth.load_noise_std = doc.get_double("synth.load_noise_std", c.synth.load_noise_std);

    if (doc.has("split.val_start")) c.val_start = parse_date(doc.require_string("split.val_start"));
    if (doc.has("split.test_start"))
        c.test_start = parse_date(doc.require_string("split.test_start"));
    if (c.val_start && c.test_start && !(*c.val_start < *c.test_start))
        throw ConfigError("split.val_start must precede split.test_start");

    c.model_kind = model_kind_from_string(doc.get_string("forecaster.kind", "transformer"));
    c.transform = transform_from_string(doc.get_string("forecaster.transform", "signed_log"));
    c.hyper.lookback = static_cast<int>(doc.get_int("forecaster.lookback_hours", 336));
    c.hyper.horizon = static_cast<int>(doc.get_int("forecaster.horizon_hours", 24));
    c.hyper.patch_len = static_cast<int>(doc.get_int("forecaster.patch_len", 16));
    c.hyper.patch_stride = static_cast<int>(doc.get_int("forecaster.patch_stride", 8));
    c.hyper.d_model = static_cast<int>(doc.get_int("forecaster.d_model", 64));
    c.hyper.n_heads = static_cast<int>(doc.get_int("forecaster.n_heads", 4));
    c.hyper.n_layers = static_cast<int>(doc.get_int("forecaster.n_layers", 2));
    c.hyper.ffn_dim = static_cast<int>(doc.get_int("forecaster.ffn_dim", 128));
    c.hyper.dropout = doc.get_double("forecaster.dropout", 0.1);
    c.stride_hours = static_cast<int>(doc.get_int("forecaster.stride_hours", 24));
    c.train.learning_rate = doc.get_double("forecaster.learning_rate", 1e-3);
    c.train.batch_size = static_cast<int>(doc.get_int("forecaster.batch_size", 32));
    c.train.max_epochs = static_cast<int>(doc.get_int("forecaster.max_epochs", 100));
    c.train.patience = static_cast<int>(doc.get_int("forecaster.patience", 10));
    if (c.model_kind != ModelKind::naive) c.hyper.validate();

    c.battery.power = doc.get_double("battery.p_mwh_per_hour", 0.5);
    c.battery.energy = doc.get_double("battery.e_mwh", 1.0);
    c.battery.eta = doc.get_double("battery.eta", 0.9);
    c.battery.discharge_cost = doc.get_double("battery.discharge_cost", 10.0);
    c.battery.intervals_per_hour =
        static_cast<int>(doc.get_int("battery.intervals_per_hour", 12));
    c.battery.validate();

    c.policy.grid_levels = static_cast<int>(doc.get_int("policy.soc_grid_levels", 100));
    c.policy.tie_tolerance = doc.get_double("policy.tie_tolerance", 1e-9);
    c.policy.vb_q_max = doc.get_double("policy.vb_q_max", c.battery.power);
    c.policy.carry_over_soc = doc.get_bool("policy.carry_over_soc", true);
    c.policy.initial_soc = doc.get_double("policy.initial_soc", 0.0);
    c.policy.include_vb_in_joint_pf = doc.get_bool("policy.include_vb_in_joint_pf", true);
    c.policy.include_vb_in_joint_f = doc.get_bool("policy.include_vb_in_joint_f", false);
    if (c.policy.grid_levels < 2) throw ConfigError("policy.soc_grid_levels must be >= 2");
    if (c.policy.initial_soc < 0.0 || c.policy.initial_soc > c.battery.energy)
        throw ConfigError("policy.initial_soc outside [0, E]");

    if (doc.has("backtest.modes")) c.modes = doc.get_string_array("backtest.modes");

    c.sweep.n_samples = static_cast<int>(doc.get_int("sweep.n_samples", c.sweep.n_samples));
    c.sweep.lr_min = doc.get_double("sweep.lr_min", c.sweep.lr_min);
    c.sweep.lr_max = doc.get_double("sweep.lr_max", c.sweep.lr_max);
    if (doc.has("sweep.d_model_choices"))
        c.sweep.d_model_choices = doc.get_double_array("sweep.d_model_choices");
    if (doc.has("sweep.n_layers_choices"))
        c.sweep.n_layers_choices = doc.get_double_array("sweep.n_layers_choices");
    c.sweep.dropout_min = doc.get_double("sweep.dropout_min", c.sweep.dropout_min);
    c.sweep.dropout_max = doc.get_double("sweep.dropout_max", c.sweep.dropout_max);
    c.sweep.max_epochs = static_cast<int>(doc.get_int("sweep.max_epochs", c.sweep.max_epochs));

    if (overrides.zone) c.zone = *overrides.zone;
    if (overrides.modes) c.modes = *overrides.modes;
    if (overrides.seed) c.seed = *overrides.seed;
    if (overrides.jobs) c.jobs = *overrides.jobs;
    if (overrides.out_dir) c.out_dir = *overrides.out_dir;

    if (c.zone.empty() && c.source == "synth") c.zone = c.synth.zone;
    for (const auto& m : c.modes) parse_mode_label(m);  // validate early
    return c;
}

}  // namespace arb
