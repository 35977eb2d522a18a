#pragma once

#include <cstdint>
#include <random>

#include "arb/tensor.hpp"

namespace arb {

// softmax(Q K^T / sqrt(d_k)) V with row-wise softmax. Rows of the softmax
// matrix sum to 1; max-subtraction keeps it stable for large logits.
Tensor attention(const Tensor& q, const Tensor& k, const Tensor& v);

struct AttentionGrads {
    Tensor dq, dk, dv;
};
AttentionGrads attention_backward(const Tensor& q, const Tensor& k, const Tensor& v,
                                  const Tensor& upstream);

double gelu(double x);
double gelu_derivative(double x);

// Per-vector zero-mean unit-std normalization with the std guard used across
// the project: std below eps collapses the vector to zeros.
struct InstanceNormResult {
    std::vector<double> values;
    double mean;
    double std;
};
InstanceNormResult instance_norm(const std::vector<double>& x, double eps = 1e-8);

// Fills a weight tensor with uniform(+-sqrt(6/(fan_in+fan_out))) draws.
void xavier_init(Tensor& w, int fan_in, int fan_out, std::mt19937_64& rng);

// --- layers with cached activations -------------------------------------
// Each layer accumulates parameter gradients in place and returns the input
// gradient, so a fixed graph backpropagates by calling backward in reverse.

struct Linear {
    Param* weight = nullptr;  // in x out
    Param* bias = nullptr;    // out; null for bias-free projections
    Tensor cached_input;

    Tensor forward(const Tensor& x);
    Tensor backward(const Tensor& dy);
    Tensor eval(const Tensor& x) const;  // no cache
};

struct BatchNorm {
    Param* gamma = nullptr;
    Param* beta = nullptr;
    Tensor running_mean;
    Tensor running_var;
    std::int64_t batches_seen = 0;
    double momentum = 0.1;
    double eps = 1e-5;

    Tensor cached_xhat;
    std::vector<double> cached_inv_std;
    int cached_rows = 0;

    void init(int features);
    // train=true normalizes with batch statistics; update_running folds them
    // into the running estimates. train=false requires accumulated stats.
    Tensor forward(const Tensor& x, bool train, bool update_running);
    Tensor backward(const Tensor& dy);
};

struct Dropout {
    double rate = 0.0;
    Tensor mask;

    Tensor forward(const Tensor& x, bool train, std::mt19937_64& rng);
    Tensor backward(const Tensor& dy) const;
};

// Multi-head scaled dot-product attention over a batch of equal-length
// instances stacked row-wise (n_instances blocks of seq_len rows).
struct MultiHeadAttention {
    int n_heads = 1;
    int d_model = 0;
    Linear wq, wk, wv, wo;

    Tensor cached_q, cached_k, cached_v;
    int cached_instances = 0, cached_seq = 0;

    Tensor forward(const Tensor& x, int n_instances, int seq_len);
    Tensor backward(const Tensor& dy);
};

struct FeedForward {
    Linear fc1, fc2;
    Dropout dropout;
    Tensor cached_pre_act;

    Tensor forward(const Tensor& x, bool train, std::mt19937_64& rng);
    Tensor backward(const Tensor& dy);
};

struct EncoderLayer {
    MultiHeadAttention attn;
    Dropout attn_dropout;
    BatchNorm norm1;
    FeedForward ffn;
    Dropout ffn_dropout;
    BatchNorm norm2;

    Tensor forward(const Tensor& x, int n_instances, int seq_len, bool train, bool update_running,
                   std::mt19937_64& rng);
    Tensor backward(const Tensor& dy);
};

}  // namespace arb
