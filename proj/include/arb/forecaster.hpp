#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "arb/layers.hpp"
#include "arb/market_data.hpp"
#include "arb/optim.hpp"
#include "arb/tensor.hpp"

namespace arb {

enum class ModelKind { transformer, dlinear, naive };

std::string to_string(ModelKind k);
ModelKind model_kind_from_string(const std::string& s);
std::string to_string(Transform t);
Transform transform_from_string(const std::string& s);

struct ForecasterHyper {
    int lookback = 336;  // L
    int horizon = 24;    // T
    int channels = 3;    // M
    int patch_len = 16;
    int patch_stride = 8;
    int d_model = 64;
    int n_heads = 4;
    int n_layers = 2;
    int ffn_dim = 128;
    double dropout = 0.1;

    int patch_count() const;  // (L - patch_len) / stride + 1
    void validate() const;
};

// patch i = series[i*stride .. i*stride+patch_len-1], as an N x patch_len matrix.
Tensor patchify(const std::vector<double>& series, int patch_len, int stride);
Tensor patchify(const double* series, int len, int patch_len, int stride);

struct HourlyForecast {
    Date target_day;
    std::vector<double> values;  // $/MWh, de-normalized and inverse-transformed
};

// Backend contract shared by the trainable models. forward_train returns
// batch_size x horizon predictions in transformed-normalized space.
class ForecastBackend {
public:
    virtual ~ForecastBackend() = default;
    virtual ParamSet& params() = 0;
    virtual const ParamSet& params() const = 0;
    virtual Tensor forward_train(const std::vector<const WindowSample*>& batch,
                                 bool update_running, bool use_dropout, std::mt19937_64& rng) = 0;
    virtual void backward(const Tensor& d_preds) = 0;
    virtual std::vector<double> predict_normalized(const WindowSample& sample) = 0;

    struct BnState {
        std::string name;
        std::vector<double> mean;
        std::vector<double> var;
        std::int64_t batches_seen = 0;
    };
    virtual std::vector<BnState> bn_state() const { return {}; }
    virtual void set_bn_state(const std::vector<BnState>&) {}
};

// Channel-independent patch-transformer encoder: shared patch embedding and
// encoder weights across channels, per-channel attention maps, concatenated
// channel representations feeding one linear head.
class PatchTransformer final : public ForecastBackend {
public:
    PatchTransformer(const ForecasterHyper& hyper, std::uint64_t init_seed);

    ParamSet& params() override { return params_; }
    const ParamSet& params() const override { return params_; }
    Tensor forward_train(const std::vector<const WindowSample*>& batch, bool update_running,
                         bool use_dropout, std::mt19937_64& rng) override;
    void backward(const Tensor& d_preds) override;
    std::vector<double> predict_normalized(const WindowSample& sample) override;

    std::vector<BnState> bn_state() const override;
    void set_bn_state(const std::vector<BnState>& states) override;

    // Per-channel encoder outputs (N*d_model each) for one sample, eval mode.
    std::vector<std::vector<double>> channel_representations(const WindowSample& sample);

private:
    Tensor forward_impl(const std::vector<const WindowSample*>& batch, bool train,
                        bool update_running, bool use_dropout, std::mt19937_64& rng,
                        Tensor* encoder_out);

    ForecasterHyper hyper_;
    ParamSet params_;
    Linear patch_embed_;
    Param* pos_enc_ = nullptr;
    std::vector<EncoderLayer> layers_;
    Linear head_;
    int cached_batch_ = 0;
};

// Trend/remainder decomposition baseline on the target channel: a centered
// moving average splits the input, and each component gets its own L -> T map.
class DLinearModel final : public ForecastBackend {
public:
    static constexpr int kKernel = 25;

    DLinearModel(const ForecasterHyper& hyper, std::uint64_t init_seed);

    ParamSet& params() override { return params_; }
    const ParamSet& params() const override { return params_; }
    Tensor forward_train(const std::vector<const WindowSample*>& batch, bool update_running,
                         bool use_dropout, std::mt19937_64& rng) override;
    void backward(const Tensor& d_preds) override;
    std::vector<double> predict_normalized(const WindowSample& sample) override;

private:
    ForecasterHyper hyper_;
    ParamSet params_;
    Linear trend_, season_;
    Tensor cached_trend_, cached_season_;
};

// Centered moving average with replicate padding at the edges.
std::vector<double> moving_average(const std::vector<double>& x, int kernel);

struct ForecastModel {
    ModelKind kind = ModelKind::transformer;
    Transform transform = Transform::raw;
    ForecasterHyper hyper;
    std::uint64_t init_seed = 0;
    std::unique_ptr<ForecastBackend> backend;

    HourlyForecast predict(const WindowSample& sample);
    // One train-mode pass over the windows to populate batch-norm running
    // statistics without touching parameters.
    void calibrate(const std::vector<WindowSample>& windows);
};

ForecastModel make_forecast_model(ModelKind kind, Transform transform,
                                  const ForecasterHyper& hyper, std::uint64_t seed);

// Target in the model's transformed-normalized space.
std::vector<double> normalized_target(const WindowSample& sample);

struct TrainConfig {
    double learning_rate = 1e-3;
    int batch_size = 32;
    int max_epochs = 100;
    int patience = 10;
    std::uint64_t seed = 0;
};

struct TrainHistory {
    std::vector<double> train_mse;
    std::vector<double> val_mse;  // empty when no validation windows
    int best_epoch = -1;
};

// Minimizes MSE in transformed-normalized space with mini-batch updates and
// early stopping on validation MSE; restores the best-validation parameters.
TrainHistory train(ForecastModel& model, const std::vector<WindowSample>& train_windows,
                   const std::vector<WindowSample>& val_windows, const TrainConfig& config);

HourlyForecast naive_forecast(const MarketDataset& ds, const std::string& zone, Date target_day);

struct AccuracyReport {
    double mse = 0.0;   // in mse_transform space
    double mae = 0.0;   // $/MWh
    double rmae = 0.0;
    std::vector<std::pair<Date, double>> per_day_mae;
};

AccuracyReport evaluate(const std::vector<HourlyForecast>& forecasts,
                        const PriceSeries& actual_hourly,
                        const std::vector<HourlyForecast>& naive,
                        Transform mse_transform = Transform::raw);

// JSON checkpoint with exact decimal round-trip of every parameter.
void save_checkpoint(const ForecastModel& model, const std::string& path);
ForecastModel load_checkpoint(const std::string& path);

}  // namespace arb
