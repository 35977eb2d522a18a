#include "arb/forecaster.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>

#include <json.hpp>

namespace arb {

using nlohmann::json;

std::string to_string(ModelKind k) {
    switch (k) {
        case ModelKind::transformer: return "transformer";
        case ModelKind::dlinear: return "dlinear";
        default: return "naive";
    }
}

ModelKind model_kind_from_string(const std::string& s) {
    if (s == "transformer") return ModelKind::transformer;
    if (s == "dlinear") return ModelKind::dlinear;
    if (s == "naive") return ModelKind::naive;
    throw ConfigError("unknown model kind: " + s);
}

std::string to_string(Transform t) {
    return t == Transform::signed_log ? "signed_log" : "raw";
}

Transform transform_from_string(const std::string& s) {
    if (s == "raw") return Transform::raw;
    if (s == "signed_log") return Transform::signed_log;
    throw ConfigError("unknown transform: " + s);
}

int ForecasterHyper::patch_count() const {
    if (patch_len < 1 || patch_stride < 1 || patch_len > lookback ||
        (lookback - patch_len) % patch_stride != 0)
        throw GeometryMismatchError("patch geometry does not tile the lookback window");
    return (lookback - patch_len) / patch_stride + 1;
}

void ForecasterHyper::validate() const {
    patch_count();
    if (d_model < 1 || n_heads < 1 || d_model % n_heads != 0)
        throw ConfigError("n_heads must divide d_model");
    if (n_layers < 1 || ffn_dim < 1 || horizon < 1 || channels < 1)
        throw ConfigError("bad forecaster hyperparameters");
    if (dropout < 0.0 || dropout >= 1.0) throw ConfigError("dropout must be in [0, 1)");
}

Tensor patchify(const double* series, int len, int patch_len, int stride) {
    if (patch_len < 1 || stride < 1 || patch_len > len || (len - patch_len) % stride != 0)
        throw GeometryMismatchError("patch geometry does not tile the series");
    const int n = (len - patch_len) / stride + 1;
    Tensor out({n, patch_len});
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < patch_len; ++j) out.at(i, j) = series[i * stride + j];
    return out;
}

Tensor patchify(const std::vector<double>& series, int patch_len, int stride) {
    return patchify(series.data(), static_cast<int>(series.size()), patch_len, stride);
}

// --- PatchTransformer -----------------------------------------------------

PatchTransformer::PatchTransformer(const ForecasterHyper& hyper, std::uint64_t init_seed)
    : hyper_(hyper) {
    hyper_.validate();
    const int n = hyper_.patch_count();
    const int d = hyper_.d_model;

    patch_embed_.weight = &params_.add("patch_embed.weight", {hyper_.patch_len, d});
    patch_embed_.bias = &params_.add("patch_embed.bias", {d});
    pos_enc_ = &params_.add("pos_enc", {n, d});

    layers_.resize(static_cast<size_t>(hyper_.n_layers));
    for (int l = 0; l < hyper_.n_layers; ++l) {
        const std::string p = "layer" + std::to_string(l) + ".";
        EncoderLayer& layer = layers_[static_cast<size_t>(l)];
        layer.attn.n_heads = hyper_.n_heads;
        layer.attn.d_model = d;
        // Q keeps its bias (it shifts logits within a row); the K bias cancels
        // in the row-wise softmax, and the V/O/fc2 biases add a uniform row
        // vector that the following batch norm subtracts, so those projections
        // are bias-free.
        layer.attn.wq.weight = &params_.add(p + "attn.wq.weight", {d, d});
        layer.attn.wq.bias = &params_.add(p + "attn.wq.bias", {d});
        layer.attn.wk.weight = &params_.add(p + "attn.wk.weight", {d, d});
        layer.attn.wv.weight = &params_.add(p + "attn.wv.weight", {d, d});
        layer.attn.wo.weight = &params_.add(p + "attn.wo.weight", {d, d});
        layer.norm1.gamma = &params_.add(p + "norm1.gamma", {d});
        layer.norm1.beta = &params_.add(p + "norm1.beta", {d});
        layer.norm1.init(d);
        layer.ffn.fc1.weight = &params_.add(p + "ffn.fc1.weight", {d, hyper_.ffn_dim});
        layer.ffn.fc1.bias = &params_.add(p + "ffn.fc1.bias", {hyper_.ffn_dim});
        layer.ffn.fc2.weight = &params_.add(p + "ffn.fc2.weight", {hyper_.ffn_dim, d});
        layer.norm2.gamma = &params_.add(p + "norm2.gamma", {d});
        layer.norm2.beta = &params_.add(p + "norm2.beta", {d});
        layer.norm2.init(d);
        layer.attn_dropout.rate = hyper_.dropout;
        layer.ffn.dropout.rate = hyper_.dropout;
        layer.ffn_dropout.rate = hyper_.dropout;
    }

    const int flat = hyper_.channels * n * d;
    head_.weight = &params_.add("head.weight", {flat, hyper_.horizon});
    head_.bias = &params_.add("head.bias", {hyper_.horizon});

    // Deterministic init order, independent of parameter-map ordering.
    std::mt19937_64 rng(init_seed);
    xavier_init(patch_embed_.weight->value, hyper_.patch_len, d, rng);
    xavier_init(pos_enc_->value, n, d, rng);
    for (int l = 0; l < hyper_.n_layers; ++l) {
        EncoderLayer& layer = layers_[static_cast<size_t>(l)];
        xavier_init(layer.attn.wq.weight->value, d, d, rng);
        xavier_init(layer.attn.wk.weight->value, d, d, rng);
        xavier_init(layer.attn.wv.weight->value, d, d, rng);
        xavier_init(layer.attn.wo.weight->value, d, d, rng);
        xavier_init(layer.ffn.fc1.weight->value, d, hyper_.ffn_dim, rng);
        xavier_init(layer.ffn.fc2.weight->value, hyper_.ffn_dim, d, rng);
        layer.norm1.gamma->value.fill(1.0);
        layer.norm2.gamma->value.fill(1.0);
    }
    xavier_init(head_.weight->value, flat, hyper_.horizon, rng);
}

Tensor PatchTransformer::forward_impl(const std::vector<const WindowSample*>& batch, bool train,
                                      bool update_running, bool use_dropout,
                                      std::mt19937_64& rng, Tensor* encoder_out) {
    const int b = static_cast<int>(batch.size());
    const int m = hyper_.channels;
    const int n = hyper_.patch_count();
    const int d = hyper_.d_model;
    const int instances = b * m;

    Tensor patches({instances * n, hyper_.patch_len});
    for (int i = 0; i < b; ++i) {
        const WindowSample& s = *batch[static_cast<size_t>(i)];
        if (s.channels != m || s.lookback != hyper_.lookback ||
            s.horizon != hyper_.horizon)
            throw ShapeMismatchError("window sample does not match model hyperparameters");
        for (int c = 0; c < m; ++c) {
            Tensor p = patchify(s.channel(c), hyper_.lookback, hyper_.patch_len,
                                hyper_.patch_stride);
            const int row0 = (i * m + c) * n;
            std::copy(p.data.begin(), p.data.end(),
                      patches.data.begin() + static_cast<size_t>(row0) * hyper_.patch_len);
        }
    }

    Tensor x = train ? patch_embed_.forward(patches) : patch_embed_.eval(patches);
    for (int inst = 0; inst < instances; ++inst)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < d; ++j) x.at(inst * n + i, j) += pos_enc_->value.at(i, j);

    (void)use_dropout;  // rates are set by forward_train; rate 0 draws nothing
    for (auto& layer : layers_)
        x = layer.forward(x, instances, n, train, train && update_running, rng);

    if (encoder_out) *encoder_out = x;

    Tensor flat({b, m * n * d});
    flat.data = x.data;  // rows are sample-major, so this is a pure reshape
    Tensor preds = train ? head_.forward(flat) : head_.eval(flat);
    cached_batch_ = b;
    return preds;
}

Tensor PatchTransformer::forward_train(const std::vector<const WindowSample*>& batch,
                                       bool update_running, bool use_dropout,
                                       std::mt19937_64& rng) {
    if (use_dropout) {
        for (auto& layer : layers_) {
            layer.attn_dropout.rate = hyper_.dropout;
            layer.ffn.dropout.rate = hyper_.dropout;
            layer.ffn_dropout.rate = hyper_.dropout;
        }
    } else {
        for (auto& layer : layers_) {
            layer.attn_dropout.rate = 0.0;
            layer.ffn.dropout.rate = 0.0;
            layer.ffn_dropout.rate = 0.0;
        }
    }
    return forward_impl(batch, true, update_running, use_dropout, rng, nullptr);
}

void PatchTransformer::backward(const Tensor& d_preds) {
    const int b = cached_batch_;
    const int m = hyper_.channels;
    const int n = hyper_.patch_count();
    const int d = hyper_.d_model;

    Tensor d_flat = head_.backward(d_preds);
    Tensor dx({b * m * n, d});
    dx.data = d_flat.data;

    for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) dx = it->backward(dx);

    for (int inst = 0; inst < b * m; ++inst)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < d; ++j) pos_enc_->grad.at(i, j) += dx.at(inst * n + i, j);
    patch_embed_.backward(dx);
}

std::vector<double> PatchTransformer::predict_normalized(const WindowSample& sample) {
    std::mt19937_64 dummy(0);
    std::vector<const WindowSample*> batch{&sample};
    Tensor preds = forward_impl(batch, false, false, false, dummy, nullptr);
    return preds.data;
}

std::vector<std::vector<double>> PatchTransformer::channel_representations(
    const WindowSample& sample) {
    std::mt19937_64 dummy(0);
    std::vector<const WindowSample*> batch{&sample};
    Tensor enc;
    forward_impl(batch, false, false, false, dummy, &enc);
    const int n = hyper_.patch_count();
    const int d = hyper_.d_model;
    std::vector<std::vector<double>> reps;
    for (int c = 0; c < hyper_.channels; ++c) {
        auto first = enc.data.begin() + static_cast<size_t>(c) * n * d;
        reps.emplace_back(first, first + static_cast<size_t>(n) * d);
    }
    return reps;
}

std::vector<ForecastBackend::BnState> PatchTransformer::bn_state() const {
    std::vector<BnState> out;
    for (size_t l = 0; l < layers_.size(); ++l) {
        for (int which = 0; which < 2; ++which) {
            const BatchNorm& bn = which == 0 ? layers_[l].norm1 : layers_[l].norm2;
            BnState s;
            s.name = "layer" + std::to_string(l) + (which == 0 ? ".norm1" : ".norm2");
            s.mean = bn.running_mean.data;
            s.var = bn.running_var.data;
            s.batches_seen = bn.batches_seen;
            out.push_back(std::move(s));
        }
    }
    return out;
}

void PatchTransformer::set_bn_state(const std::vector<BnState>& states) {
    for (const auto& s : states) {
        for (size_t l = 0; l < layers_.size(); ++l) {
            const std::string base = "layer" + std::to_string(l);
            BatchNorm* bn = nullptr;
            if (s.name == base + ".norm1") bn = &layers_[l].norm1;
            if (s.name == base + ".norm2") bn = &layers_[l].norm2;
            if (bn) {
                bn->running_mean.data = s.mean;
                bn->running_var.data = s.var;
                bn->batches_seen = s.batches_seen;
            }
        }
    }
}

// --- DLinear ---------------------------------------------------------------

std::vector<double> moving_average(const std::vector<double>& x, int kernel) {
    if (kernel < 1 || kernel % 2 == 0) throw ConfigError("moving average kernel must be odd");
    const int n = static_cast<int>(x.size());
    const int half = kernel / 2;
    std::vector<double> out(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        double sum = 0.0;
        for (int j = i - half; j <= i + half; ++j)
            sum += x[static_cast<size_t>(std::clamp(j, 0, n - 1))];
        out[static_cast<size_t>(i)] = sum / kernel;
    }
    return out;
}

DLinearModel::DLinearModel(const ForecasterHyper& hyper, std::uint64_t init_seed)
    : hyper_(hyper) {
    trend_.weight = &params_.add("trend.weight", {hyper_.lookback, hyper_.horizon});
    trend_.bias = &params_.add("trend.bias", {hyper_.horizon});
    season_.weight = &params_.add("season.weight", {hyper_.lookback, hyper_.horizon});
    season_.bias = &params_.add("season.bias", {hyper_.horizon});
    std::mt19937_64 rng(init_seed);
    xavier_init(trend_.weight->value, hyper_.lookback, hyper_.horizon, rng);
    xavier_init(season_.weight->value, hyper_.lookback, hyper_.horizon, rng);
}

Tensor DLinearModel::forward_train(const std::vector<const WindowSample*>& batch, bool,
                                   bool, std::mt19937_64&) {
    const int b = static_cast<int>(batch.size());
    const int l = hyper_.lookback;
    cached_trend_ = Tensor({b, l});
    cached_season_ = Tensor({b, l});
    for (int i = 0; i < b; ++i) {
        const WindowSample& s = *batch[static_cast<size_t>(i)];
        if (s.lookback != l || s.horizon != hyper_.horizon)
            throw ShapeMismatchError("window sample does not match model hyperparameters");
        std::vector<double> target_channel(s.channel(0), s.channel(0) + l);
        std::vector<double> trend = moving_average(target_channel, kKernel);
        for (int j = 0; j < l; ++j) {
            cached_trend_.at(i, j) = trend[static_cast<size_t>(j)];
            cached_season_.at(i, j) = target_channel[static_cast<size_t>(j)] -
                                      trend[static_cast<size_t>(j)];
        }
    }
    Tensor yt = trend_.forward(cached_trend_);
    Tensor ys = season_.forward(cached_season_);
    for (size_t i = 0; i < yt.size(); ++i) yt[i] += ys[i];
    return yt;
}

void DLinearModel::backward(const Tensor& d_preds) {
    trend_.backward(d_preds);
    season_.backward(d_preds);
}

std::vector<double> DLinearModel::predict_normalized(const WindowSample& sample) {
    std::mt19937_64 dummy(0);
    std::vector<const WindowSample*> batch{&sample};
    return forward_train(batch, false, false, dummy).data;
}

// --- model wrapper -----------------------------------------------------------

ForecastModel make_forecast_model(ModelKind kind, Transform transform,
                                  const ForecasterHyper& hyper, std::uint64_t seed) {
    ForecastModel m;
    m.kind = kind;
    m.transform = transform;
    m.hyper = hyper;
    m.init_seed = seed;
    switch (kind) {
        case ModelKind::transformer:
            m.backend = std::make_unique<PatchTransformer>(hyper, seed);
            break;
        case ModelKind::dlinear:
            m.backend = std::make_unique<DLinearModel>(hyper, seed);
            break;
        default:
            throw ConfigError("the naive model has no trainable backend");
    }
    return m;
}

HourlyForecast ForecastModel::predict(const WindowSample& sample) {
    if (sample.transform != transform)
        throw ConfigError("window transform does not match model transform");
    std::vector<double> norm = backend->predict_normalized(sample);
    HourlyForecast f;
    f.target_day = sample.target_day;
    f.values.resize(norm.size());
    const auto& stat = sample.norm_stats[0];
    for (size_t i = 0; i < norm.size(); ++i)
        f.values[i] = invert_transform(transform, norm[i] * stat.std + stat.mean);
    return f;
}

void ForecastModel::calibrate(const std::vector<WindowSample>& windows) {
    if (windows.empty()) throw DataError("calibrate: no windows");
    std::vector<const WindowSample*> batch;
    for (const auto& w : windows) batch.push_back(&w);
    std::mt19937_64 rng(0);
    backend->forward_train(batch, true, false, rng);
    backend->params().zero_grads();
}

std::vector<double> normalized_target(const WindowSample& sample) {
    std::vector<double> out(sample.target.size());
    const auto& stat = sample.norm_stats[0];
    for (size_t i = 0; i < out.size(); ++i) {
        double t = apply_transform(sample.transform, sample.target[i]);
        out[i] = stat.std < kNormStdEpsilon ? 0.0 : (t - stat.mean) / stat.std;
    }
    return out;
}

// --- training ---------------------------------------------------------------

namespace {

double validation_mse(ForecastModel& model, const std::vector<WindowSample>& windows) {
    double sum = 0.0;
    size_t count = 0;
    for (const auto& w : windows) {
        std::vector<double> pred = model.backend->predict_normalized(w);
        std::vector<double> target = normalized_target(w);
        for (size_t i = 0; i < pred.size(); ++i) {
            const double d = pred[i] - target[i];
            sum += d * d;
        }
        count += pred.size();
    }
    return count ? sum / static_cast<double>(count) : 0.0;
}

struct ModelSnapshot {
    std::map<std::string, std::vector<double>> values;
    std::vector<ForecastBackend::BnState> bn;
};

ModelSnapshot take_snapshot(const ForecastModel& model) {
    ModelSnapshot s;
    for (const auto& [name, p] : model.backend->params()) s.values[name] = p.value.data;
    s.bn = model.backend->bn_state();
    return s;
}

void restore_snapshot(ForecastModel& model, const ModelSnapshot& s) {
    for (auto& [name, p] : model.backend->params()) p.value.data = s.values.at(name);
    model.backend->set_bn_state(s.bn);
}

}  // namespace

TrainHistory train(ForecastModel& model, const std::vector<WindowSample>& train_windows,
                   const std::vector<WindowSample>& val_windows, const TrainConfig& config) {
    if (train_windows.empty()) throw DataError("train: no training windows");
    TrainHistory history;
    if (config.max_epochs <= 0) return history;

    std::mt19937_64 rng(config.seed);
    OptimHyper oh;
    oh.learning_rate = config.learning_rate;
    OptimState opt = OptimState::init(model.backend->params(), oh);

    std::vector<size_t> order(train_windows.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;

    double best_val = std::numeric_limits<double>::infinity();
    ModelSnapshot best;
    int wait = 0;

    for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_sum = 0.0;
        size_t epoch_terms = 0;
        for (size_t begin = 0; begin < order.size(); begin += static_cast<size_t>(config.batch_size)) {
            const size_t end = std::min(order.size(), begin + static_cast<size_t>(config.batch_size));
            std::vector<const WindowSample*> batch;
            std::vector<std::vector<double>> targets;
            for (size_t i = begin; i < end; ++i) {
                batch.push_back(&train_windows[order[i]]);
                targets.push_back(normalized_target(train_windows[order[i]]));
            }
            model.backend->params().zero_grads();
            Tensor preds = model.backend->forward_train(batch, true, true, rng);
            const int b = preds.rows(), t = preds.cols();
            Tensor d_preds({b, t});
            double loss = 0.0;
            for (int i = 0; i < b; ++i) {
                for (int j = 0; j < t; ++j) {
                    const double diff = preds.at(i, j) - targets[static_cast<size_t>(i)][static_cast<size_t>(j)];
                    loss += diff * diff;
                    d_preds.at(i, j) = 2.0 * diff / static_cast<double>(b * t);
                }
            }
            loss /= static_cast<double>(b * t);
            if (!std::isfinite(loss))
                throw NonFiniteLossError("loss diverged at epoch " + std::to_string(epoch));
            model.backend->backward(d_preds);
            adam_step(model.backend->params(), opt);
            epoch_sum += loss * static_cast<double>(b * t);
            epoch_terms += static_cast<size_t>(b * t);
        }
        history.train_mse.push_back(epoch_sum / static_cast<double>(epoch_terms));

        if (!val_windows.empty()) {
            const double val = validation_mse(model, val_windows);
            history.val_mse.push_back(val);
            if (val < best_val) {
                best_val = val;
                best = take_snapshot(model);
                history.best_epoch = epoch;
                wait = 0;
            } else if (++wait >= config.patience) {
                break;
            }
        }
    }
    if (history.best_epoch >= 0) restore_snapshot(model, best);
    return history;
}

// --- naive + metrics ----------------------------------------------------------

HourlyForecast naive_forecast(const MarketDataset& ds, const std::string& zone, Date target_day) {
    const ZoneData& z = ds.zone(zone);
    if (target_day - 7 < ds.first_day || target_day > ds.last_day)
        throw InsufficientHistoryError("no data 7 days before " + format_date(target_day));
    HourlyForecast f;
    f.target_day = target_day;
    f.values.resize(24);
    for (int h = 0; h < 24; ++h) f.values[static_cast<size_t>(h)] = z.rt_hourly_mean.at(target_day - 7, h);
    return f;
}

AccuracyReport evaluate(const std::vector<HourlyForecast>& forecasts,
                        const PriceSeries& actual_hourly,
                        const std::vector<HourlyForecast>& naive, Transform mse_transform) {
    if (forecasts.size() != naive.size())
        throw DayMismatchError("forecast and naive day sets differ in size");
    AccuracyReport r;
    double abs_sum = 0.0, abs_naive_sum = 0.0, sq_sum = 0.0;
    size_t terms = 0;
    const Date last = actual_hourly.start + (actual_hourly.days() - 1);
    for (size_t d = 0; d < forecasts.size(); ++d) {
        const auto& f = forecasts[d];
        const auto& nv = naive[d];
        if (nv.target_day != f.target_day) throw DayMismatchError("day sets misaligned");
        if (f.target_day < actual_hourly.start || f.target_day > last)
            throw DayMismatchError("no actuals for " + format_date(f.target_day));
        double day_abs = 0.0;
        for (size_t h = 0; h < f.values.size(); ++h) {
            const double x = actual_hourly.at(f.target_day, static_cast<int>(h));
            const double err = x - f.values[h];
            day_abs += std::abs(err);
            abs_naive_sum += std::abs(x - nv.values[h]);
            const double tx = apply_transform(mse_transform, x);
            const double tf = apply_transform(mse_transform, f.values[h]);
            sq_sum += (tx - tf) * (tx - tf);
            ++terms;
        }
        abs_sum += day_abs;
        r.per_day_mae.emplace_back(f.target_day, day_abs / static_cast<double>(f.values.size()));
    }
    if (terms == 0) throw DayMismatchError("no forecast days");
    r.mae = abs_sum / static_cast<double>(terms);
    r.mse = sq_sum / static_cast<double>(terms);
    if (abs_naive_sum == 0.0) throw NaiveErrorZeroError("naive MAE is zero; rMAE undefined");
    r.rmae = abs_sum / abs_naive_sum;
    return r;
}

// --- checkpoints -----------------------------------------------------------------

void save_checkpoint(const ForecastModel& model, const std::string& path) {
    json doc;
    doc["format_version"] = 1;
    doc["kind"] = to_string(model.kind);
    doc["transform"] = to_string(model.transform);
    doc["rng_seed"] = model.init_seed;
    json hyper;
    hyper["lookback"] = model.hyper.lookback;
    hyper["horizon"] = model.hyper.horizon;
    hyper["channels"] = model.hyper.channels;
    hyper["patch_len"] = model.hyper.patch_len;
    hyper["patch_stride"] = model.hyper.patch_stride;
    hyper["d_model"] = model.hyper.d_model;
    hyper["n_heads"] = model.hyper.n_heads;
    hyper["n_layers"] = model.hyper.n_layers;
    hyper["ffn_dim"] = model.hyper.ffn_dim;
    hyper["dropout"] = model.hyper.dropout;
    doc["hyperparameters"] = hyper;

    json params = json::object();
    for (const auto& [name, p] : model.backend->params()) {
        json entry;
        entry["shape"] = p.value.shape;
        entry["values"] = p.value.data;
        params[name] = std::move(entry);
    }
    doc["parameters"] = std::move(params);

    json bn = json::object();
    for (const auto& s : model.backend->bn_state()) {
        json entry;
        entry["mean"] = s.mean;
        entry["var"] = s.var;
        entry["batches_seen"] = s.batches_seen;
        bn[s.name] = std::move(entry);
    }
    doc["batch_norm"] = std::move(bn);

    std::ofstream out(path);
    if (!out.is_open()) throw DataError("cannot write checkpoint: " + path);
    out << doc.dump(1) << '\n';
}

ForecastModel load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in.is_open()) throw DataError("cannot read checkpoint: " + path);
    json doc = json::parse(in);
    if (doc.at("format_version").get<int>() != 1)
        throw DataError("unsupported checkpoint version");

    ForecasterHyper hyper;
    const json& h = doc.at("hyperparameters");
    hyper.lookback = h.at("lookback").get<int>();
    hyper.horizon = h.at("horizon").get<int>();
    hyper.channels = h.at("channels").get<int>();
    hyper.patch_len = h.at("patch_len").get<int>();
    hyper.patch_stride = h.at("patch_stride").get<int>();
    hyper.d_model = h.at("d_model").get<int>();
    hyper.n_heads = h.at("n_heads").get<int>();
    hyper.n_layers = h.at("n_layers").get<int>();
    hyper.ffn_dim = h.at("ffn_dim").get<int>();
    hyper.dropout = h.at("dropout").get<double>();

    ForecastModel model = make_forecast_model(
        model_kind_from_string(doc.at("kind").get<std::string>()),
        transform_from_string(doc.at("transform").get<std::string>()), hyper,
        doc.at("rng_seed").get<std::uint64_t>());

    for (auto& [name, p] : model.backend->params()) {
        const json& entry = doc.at("parameters").at(name);
        auto values = entry.at("values").get<std::vector<double>>();
        if (values.size() != p.value.size())
            throw DataError("checkpoint parameter " + name + " has wrong size");
        p.value.data = std::move(values);
    }

    std::vector<ForecastBackend::BnState> bn;
    for (const auto& [name, entry] : doc.at("batch_norm").items()) {
        ForecastBackend::BnState s;
        s.name = name;
        s.mean = entry.at("mean").get<std::vector<double>>();
        s.var = entry.at("var").get<std::vector<double>>();
        s.batches_seen = entry.at("batches_seen").get<std::int64_t>();
        bn.push_back(std::move(s));
    }
    model.backend->set_bn_state(bn);
    return model;
}

}  // namespace arb
