#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "arb/errors.hpp"

namespace arb {

// Dense row-major 64-bit float buffer. Kept deliberately small: the forecaster
// graph is fixed, so shapes are 1-D or 2-D throughout.
struct Tensor {
    std::vector<int> shape;
    std::vector<double> data;

    Tensor() = default;
    explicit Tensor(std::vector<int> s);

    static Tensor zeros(std::vector<int> s) { return Tensor(std::move(s)); }

    size_t size() const { return data.size(); }
    int rows() const { return shape.empty() ? 0 : shape[0]; }
    int cols() const { return shape.size() < 2 ? 1 : shape[1]; }

    double& at(int i, int j) { return data[static_cast<size_t>(i) * cols() + j]; }
    double at(int i, int j) const { return data[static_cast<size_t>(i) * cols() + j]; }
    double& operator[](size_t i) { return data[i]; }
    double operator[](size_t i) const { return data[i]; }

    void fill(double v) { std::fill(data.begin(), data.end(), v); }
    bool same_shape(const Tensor& o) const { return shape == o.shape; }
    bool all_finite() const;
};

// y = x * w, x: n x k, w: k x m.
Tensor matmul(const Tensor& x, const Tensor& w);
// y = x * w^T, x: n x k, w: m x k.
Tensor matmul_nt(const Tensor& x, const Tensor& w);
// y = x^T * w, x: k x n, w: k x m.
Tensor matmul_tn(const Tensor& x, const Tensor& w);

struct Param {
    Tensor value;
    Tensor grad;
};

// Named parameters with matching gradient buffers. Node-based map keeps
// Param addresses stable, so layers can hold plain pointers.
class ParamSet {
public:
    Param& add(const std::string& name, std::vector<int> shape);
    Param& at(const std::string& name);
    const Param& at(const std::string& name) const;
    bool contains(const std::string& name) const { return params_.count(name) > 0; }

    void zero_grads();
    size_t total_size() const;

    auto begin() { return params_.begin(); }
    auto end() { return params_.end(); }
    auto begin() const { return params_.begin(); }
    auto end() const { return params_.end(); }
    size_t count() const { return params_.size(); }

private:
    std::map<std::string, Param> params_;
};

}  // namespace arb
