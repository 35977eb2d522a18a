#include "arb/layers.hpp"

#include <cmath>

namespace arb {

// --- attention ----------------------------------------------------------

Tensor attention(const Tensor& q, const Tensor& k, const Tensor& v) {
    if (q.cols() != k.cols() || k.rows() != v.rows() || q.shape.size() != 2)
        throw ShapeMismatchError("attention: inconsistent shapes");
    if (q.cols() < 1) throw ShapeMismatchError("attention: d_k must be >= 1");
    const double scale = 1.0 / std::sqrt(static_cast<double>(q.cols()));
    Tensor scores = matmul_nt(q, k);
    for (double& s : scores.data) s *= scale;

    const int n = scores.rows(), m = scores.cols();
    for (int i = 0; i < n; ++i) {
        double* row = &scores.data[static_cast<size_t>(i) * m];
        double mx = row[0];
        for (int j = 1; j < m; ++j) mx = std::max(mx, row[j]);
        double sum = 0.0;
        for (int j = 0; j < m; ++j) {
            row[j] = std::exp(row[j] - mx);
            sum += row[j];
        }
        for (int j = 0; j < m; ++j) row[j] /= sum;
    }
    return matmul(scores, v);
}

AttentionGrads attention_backward(const Tensor& q, const Tensor& k, const Tensor& v,
                                  const Tensor& upstream) {
    if (upstream.rows() != q.rows() || upstream.cols() != v.cols())
        throw ShapeMismatchError("attention_backward: upstream shape mismatch");
    const double scale = 1.0 / std::sqrt(static_cast<double>(q.cols()));

    Tensor weights = matmul_nt(q, k);
    for (double& s : weights.data) s *= scale;
    const int n = weights.rows(), m = weights.cols();
    for (int i = 0; i < n; ++i) {
        double* row = &weights.data[static_cast<size_t>(i) * m];
        double mx = row[0];
        for (int j = 1; j < m; ++j) mx = std::max(mx, row[j]);
        double sum = 0.0;
        for (int j = 0; j < m; ++j) {
            row[j] = std::exp(row[j] - mx);
            sum += row[j];
        }
        for (int j = 0; j < m; ++j) row[j] /= sum;
    }

    AttentionGrads g;
    g.dv = matmul_tn(weights, upstream);

    Tensor d_weights = matmul_nt(upstream, v);
    // softmax backward, row-wise: dS_ij = A_ij (dA_ij - sum_k dA_ik A_ik)
    for (int i = 0; i < n; ++i) {
        double* a = &weights.data[static_cast<size_t>(i) * m];
        double* da = &d_weights.data[static_cast<size_t>(i) * m];
        double dot = 0.0;
        for (int j = 0; j < m; ++j) dot += da[j] * a[j];
        for (int j = 0; j < m; ++j) da[j] = a[j] * (da[j] - dot) * scale;
    }
    g.dq = matmul(d_weights, k);
    g.dk = matmul_tn(d_weights, q);
    return g;
}

// --- scalar activations ---------------------------------------------------

double gelu(double x) {
    return 0.5 * x * (1.0 + std::erf(x / std::sqrt(2.0)));
}

double gelu_derivative(double x) {
    const double phi = std::exp(-0.5 * x * x) / std::sqrt(2.0 * 3.14159265358979323846);
    return 0.5 * (1.0 + std::erf(x / std::sqrt(2.0))) + x * phi;
}

InstanceNormResult instance_norm(const std::vector<double>& x, double eps) {
    InstanceNormResult r;
    r.values.resize(x.size());
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    double var = 0.0;
    for (double v : x) var += (v - mean) * (v - mean);
    double sd = std::sqrt(var / static_cast<double>(x.size()));
    r.mean = mean;
    r.std = sd;
    if (sd < eps) {
        std::fill(r.values.begin(), r.values.end(), 0.0);
    } else {
        for (size_t i = 0; i < x.size(); ++i) r.values[i] = (x[i] - mean) / sd;
    }
    return r;
}

void xavier_init(Tensor& w, int fan_in, int fan_out, std::mt19937_64& rng) {
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (double& v : w.data) v = dist(rng);
}

// --- Linear ---------------------------------------------------------------

Tensor Linear::forward(const Tensor& x) {
    cached_input = x;
    return eval(x);
}

Tensor Linear::eval(const Tensor& x) const {
    Tensor y = matmul(x, weight->value);
    if (bias) {
        const int m = y.cols();
        for (int i = 0; i < y.rows(); ++i)
            for (int j = 0; j < m; ++j) y.at(i, j) += bias->value[static_cast<size_t>(j)];
    }
    return y;
}

Tensor Linear::backward(const Tensor& dy) {
    Tensor dw = matmul_tn(cached_input, dy);
    for (size_t i = 0; i < dw.size(); ++i) weight->grad[i] += dw[i];
    if (bias) {
        const int m = dy.cols();
        for (int i = 0; i < dy.rows(); ++i)
            for (int j = 0; j < m; ++j) bias->grad[static_cast<size_t>(j)] += dy.at(i, j);
    }
    return matmul_nt(dy, weight->value);
}

// --- BatchNorm --------------------------------------------------------------

void BatchNorm::init(int features) {
    running_mean = Tensor({features});
    running_var = Tensor({features});
    batches_seen = 0;
}

Tensor BatchNorm::forward(const Tensor& x, bool train, bool update_running) {
    const int rows = x.rows(), f = x.cols();
    Tensor y({rows, f});
    if (!train) {
        if (batches_seen == 0)
            throw EvalBeforeAnyTrainingError("batch norm evaluated before any training");
        for (int j = 0; j < f; ++j) {
            const double inv = 1.0 / std::sqrt(running_var[static_cast<size_t>(j)] + eps);
            const double g = gamma->value[static_cast<size_t>(j)];
            const double bt = beta->value[static_cast<size_t>(j)];
            const double mu = running_mean[static_cast<size_t>(j)];
            for (int i = 0; i < rows; ++i) y.at(i, j) = g * (x.at(i, j) - mu) * inv + bt;
        }
        return y;
    }

    cached_xhat = Tensor({rows, f});
    cached_inv_std.assign(static_cast<size_t>(f), 0.0);
    cached_rows = rows;
    for (int j = 0; j < f; ++j) {
        double mean = 0.0;
        for (int i = 0; i < rows; ++i) mean += x.at(i, j);
        mean /= rows;
        double var = 0.0;
        for (int i = 0; i < rows; ++i) {
            const double d = x.at(i, j) - mean;
            var += d * d;
        }
        var /= rows;
        const double inv = 1.0 / std::sqrt(var + eps);
        cached_inv_std[static_cast<size_t>(j)] = inv;
        const double g = gamma->value[static_cast<size_t>(j)];
        const double bt = beta->value[static_cast<size_t>(j)];
        for (int i = 0; i < rows; ++i) {
            const double xh = (x.at(i, j) - mean) * inv;
            cached_xhat.at(i, j) = xh;
            y.at(i, j) = g * xh + bt;
        }
        if (update_running) {
            if (batches_seen == 0) {
                running_mean[static_cast<size_t>(j)] = mean;
                running_var[static_cast<size_t>(j)] = var;
            } else {
                running_mean[static_cast<size_t>(j)] =
                    (1.0 - momentum) * running_mean[static_cast<size_t>(j)] + momentum * mean;
                running_var[static_cast<size_t>(j)] =
                    (1.0 - momentum) * running_var[static_cast<size_t>(j)] + momentum * var;
            }
        }
    }
    if (update_running) ++batches_seen;
    return y;
}

Tensor BatchNorm::backward(const Tensor& dy) {
    const int rows = cached_rows, f = dy.cols();
    Tensor dx({rows, f});
    for (int j = 0; j < f; ++j) {
        const double g = gamma->value[static_cast<size_t>(j)];
        const double inv = cached_inv_std[static_cast<size_t>(j)];
        double sum_dy = 0.0, sum_dy_xhat = 0.0;
        for (int i = 0; i < rows; ++i) {
            sum_dy += dy.at(i, j);
            sum_dy_xhat += dy.at(i, j) * cached_xhat.at(i, j);
        }
        gamma->grad[static_cast<size_t>(j)] += sum_dy_xhat;
        beta->grad[static_cast<size_t>(j)] += sum_dy;
        const double scale = g * inv / rows;
        for (int i = 0; i < rows; ++i)
            dx.at(i, j) = scale * (rows * dy.at(i, j) - sum_dy -
                                   cached_xhat.at(i, j) * sum_dy_xhat);
    }
    return dx;
}

// --- Dropout ---------------------------------------------------------------

Tensor Dropout::forward(const Tensor& x, bool train, std::mt19937_64& rng) {
    if (!train || rate <= 0.0) {
        mask = Tensor();
        return x;
    }
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    mask = Tensor(x.shape);
    const double keep = 1.0 / (1.0 - rate);
    Tensor y(x.shape);
    for (size_t i = 0; i < x.size(); ++i) {
        mask[i] = dist(rng) >= rate ? keep : 0.0;
        y[i] = x[i] * mask[i];
    }
    return y;
}

Tensor Dropout::backward(const Tensor& dy) const {
    if (mask.size() == 0) return dy;
    Tensor dx(dy.shape);
    for (size_t i = 0; i < dy.size(); ++i) dx[i] = dy[i] * mask[i];
    return dx;
}

// --- MultiHeadAttention ------------------------------------------------------

namespace {

Tensor head_slice(const Tensor& full, int instance, int seq_len, int head, int d_head) {
    Tensor out({seq_len, d_head});
    for (int i = 0; i < seq_len; ++i)
        for (int j = 0; j < d_head; ++j)
            out.at(i, j) = full.at(instance * seq_len + i, head * d_head + j);
    return out;
}

void head_scatter_add(Tensor& full, const Tensor& part, int instance, int seq_len, int head,
                      int d_head) {
    for (int i = 0; i < seq_len; ++i)
        for (int j = 0; j < d_head; ++j)
            full.at(instance * seq_len + i, head * d_head + j) += part.at(i, j);
}

}  // namespace

Tensor MultiHeadAttention::forward(const Tensor& x, int n_instances, int seq_len) {
    if (x.rows() != n_instances * seq_len)
        throw ShapeMismatchError("attention: rows != instances * seq_len");
    cached_q = wq.forward(x);
    cached_k = wk.forward(x);
    cached_v = wv.forward(x);
    cached_instances = n_instances;
    cached_seq = seq_len;

    const int d_head = d_model / n_heads;
    Tensor concat({x.rows(), d_model});
    for (int inst = 0; inst < n_instances; ++inst) {
        for (int h = 0; h < n_heads; ++h) {
            Tensor q = head_slice(cached_q, inst, seq_len, h, d_head);
            Tensor k = head_slice(cached_k, inst, seq_len, h, d_head);
            Tensor v = head_slice(cached_v, inst, seq_len, h, d_head);
            Tensor o = attention(q, k, v);
            for (int i = 0; i < seq_len; ++i)
                for (int j = 0; j < d_head; ++j)
                    concat.at(inst * seq_len + i, h * d_head + j) = o.at(i, j);
        }
    }
    return wo.forward(concat);
}

Tensor MultiHeadAttention::backward(const Tensor& dy) {
    Tensor d_concat = wo.backward(dy);
    const int d_head = d_model / n_heads;
    Tensor dq_full({dy.rows(), d_model}), dk_full({dy.rows(), d_model}),
        dv_full({dy.rows(), d_model});
    for (int inst = 0; inst < cached_instances; ++inst) {
        for (int h = 0; h < n_heads; ++h) {
            Tensor q = head_slice(cached_q, inst, cached_seq, h, d_head);
            Tensor k = head_slice(cached_k, inst, cached_seq, h, d_head);
            Tensor v = head_slice(cached_v, inst, cached_seq, h, d_head);
            Tensor d_o = head_slice(d_concat, inst, cached_seq, h, d_head);
            AttentionGrads g = attention_backward(q, k, v, d_o);
            head_scatter_add(dq_full, g.dq, inst, cached_seq, h, d_head);
            head_scatter_add(dk_full, g.dk, inst, cached_seq, h, d_head);
            head_scatter_add(dv_full, g.dv, inst, cached_seq, h, d_head);
        }
    }
    Tensor dx = wq.backward(dq_full);
    Tensor dxk = wk.backward(dk_full);
    Tensor dxv = wv.backward(dv_full);
    for (size_t i = 0; i < dx.size(); ++i) dx[i] += dxk[i] + dxv[i];
    return dx;
}

// --- FeedForward --------------------------------------------------------------

Tensor FeedForward::forward(const Tensor& x, bool train, std::mt19937_64& rng) {
    Tensor h = fc1.forward(x);
    cached_pre_act = h;
    for (double& v : h.data) v = gelu(v);
    h = dropout.forward(h, train, rng);
    return fc2.forward(h);
}

Tensor FeedForward::backward(const Tensor& dy) {
    Tensor dh = fc2.backward(dy);
    dh = dropout.backward(dh);
    for (size_t i = 0; i < dh.size(); ++i) dh[i] *= gelu_derivative(cached_pre_act[i]);
    return fc1.backward(dh);
}

// --- EncoderLayer ---------------------------------------------------------------

Tensor EncoderLayer::forward(const Tensor& x, int n_instances, int seq_len, bool train,
                             bool update_running, std::mt19937_64& rng) {
    Tensor a = attn.forward(x, n_instances, seq_len);
    a = attn_dropout.forward(a, train, rng);
    for (size_t i = 0; i < a.size(); ++i) a[i] += x[i];
    Tensor h1 = norm1.forward(a, train, update_running);

    Tensor f = ffn.forward(h1, train, rng);
    f = ffn_dropout.forward(f, train, rng);
    for (size_t i = 0; i < f.size(); ++i) f[i] += h1[i];
    return norm2.forward(f, train, update_running);
}

Tensor EncoderLayer::backward(const Tensor& dy) {
    Tensor d_sum2 = norm2.backward(dy);
    Tensor df = ffn_dropout.backward(d_sum2);
    Tensor dh1 = ffn.backward(df);
    for (size_t i = 0; i < dh1.size(); ++i) dh1[i] += d_sum2[i];

    Tensor d_sum1 = norm1.backward(dh1);
    Tensor da = attn_dropout.backward(d_sum1);
    Tensor dx = attn.backward(da);
    for (size_t i = 0; i < dx.size(); ++i) dx[i] += d_sum1[i];
    return dx;
}

}  // namespace arb
