#include "arb/tensor.hpp"

#include <cmath>
#include <numeric>

namespace arb {

Tensor::Tensor(std::vector<int> s) : shape(std::move(s)) {
    size_t n = 1;
    for (int d : shape) {
        if (d < 0) throw ShapeMismatchError("negative dimension");
        n *= static_cast<size_t>(d);
    }
    data.assign(n, 0.0);
}

bool Tensor::all_finite() const {
    for (double v : data)
        if (!std::isfinite(v)) return false;
    return true;
}

Tensor matmul(const Tensor& x, const Tensor& w) {
    if (x.cols() != w.rows())
        throw ShapeMismatchError("matmul: inner dimensions disagree");
    const int n = x.rows(), k = x.cols(), m = w.cols();
    Tensor y({n, m});
    for (int i = 0; i < n; ++i) {
        const double* xi = &x.data[static_cast<size_t>(i) * k];
        double* yi = &y.data[static_cast<size_t>(i) * m];
        for (int p = 0; p < k; ++p) {
            const double a = xi[p];
            if (a == 0.0) continue;
            const double* wp = &w.data[static_cast<size_t>(p) * m];
            for (int j = 0; j < m; ++j) yi[j] += a * wp[j];
        }
    }
    return y;
}

Tensor matmul_nt(const Tensor& x, const Tensor& w) {
    if (x.cols() != w.cols())
        throw ShapeMismatchError("matmul_nt: inner dimensions disagree");
    const int n = x.rows(), k = x.cols(), m = w.rows();
    Tensor y({n, m});
    for (int i = 0; i < n; ++i) {
        const double* xi = &x.data[static_cast<size_t>(i) * k];
        for (int j = 0; j < m; ++j) {
            const double* wj = &w.data[static_cast<size_t>(j) * k];
            double s = 0.0;
            for (int p = 0; p < k; ++p) s += xi[p] * wj[p];
            y.at(i, j) = s;
        }
    }
    return y;
}

Tensor matmul_tn(const Tensor& x, const Tensor& w) {
    if (x.rows() != w.rows())
        throw ShapeMismatchError("matmul_tn: inner dimensions disagree");
    const int k = x.rows(), n = x.cols(), m = w.cols();
    Tensor y({n, m});
    for (int p = 0; p < k; ++p) {
        const double* xp = &x.data[static_cast<size_t>(p) * n];
        const double* wp = &w.data[static_cast<size_t>(p) * m];
        for (int i = 0; i < n; ++i) {
            const double a = xp[i];
            if (a == 0.0) continue;
            double* yi = &y.data[static_cast<size_t>(i) * m];
            for (int j = 0; j < m; ++j) yi[j] += a * wp[j];
        }
    }
    return y;
}

Param& ParamSet::add(const std::string& name, std::vector<int> shape) {
    if (params_.count(name)) throw ConfigError("duplicate parameter: " + name);
    Param p;
    p.value = Tensor(shape);
    p.grad = Tensor(std::move(shape));
    return params_.emplace(name, std::move(p)).first->second;
}

Param& ParamSet::at(const std::string& name) {
    auto it = params_.find(name);
    if (it == params_.end()) throw ConfigError("unknown parameter: " + name);
    return it->second;
}

const Param& ParamSet::at(const std::string& name) const {
    auto it = params_.find(name);
    if (it == params_.end()) throw ConfigError("unknown parameter: " + name);
    return it->second;
}

void ParamSet::zero_grads() {
    for (auto& [name, p] : params_) p.grad.fill(0.0);
}

size_t ParamSet::total_size() const {
    size_t n = 0;
    for (const auto& [name, p] : params_) n += p.value.size();
    return n;
}

}  // namespace arb
