#include "arb/optim.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace arb {

OptimState OptimState::init(const ParamSet& params, OptimHyper hyper) {
    OptimState s;
    s.hyper = hyper;
    for (const auto& [name, p] : params) {
        s.m.emplace(name, Tensor(p.value.shape));
        s.v.emplace(name, Tensor(p.value.shape));
    }
    return s;
}

void adam_step(ParamSet& params, OptimState& state) {
    ++state.step;
    const auto& h = state.hyper;
    const double bc1 = 1.0 - std::pow(h.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(h.beta2, static_cast<double>(state.step));
    for (auto& [name, p] : params) {
        Tensor& m = state.m.at(name);
        Tensor& v = state.v.at(name);
        for (size_t i = 0; i < p.value.size(); ++i) {
            const double g = p.grad[i];
            if (!std::isfinite(g))
                throw NonFiniteGradientError("non-finite gradient in " + name);
            m[i] = h.beta1 * m[i] + (1.0 - h.beta1) * g;
            v[i] = h.beta2 * v[i] + (1.0 - h.beta2) * g * g;
            const double m_hat = m[i] / bc1;
            const double v_hat = v[i] / bc2;
            p.value[i] -= h.learning_rate * m_hat / (std::sqrt(v_hat) + h.eps);
        }
    }
}

double grad_check(const std::function<double()>& loss, const std::function<void()>& grads,
                  ParamSet& params, int min_coords, double h, std::uint64_t seed) {
    grads();
    // Snapshot the analytic gradients before the finite-difference probes
    // overwrite them.
    std::vector<std::pair<std::string, std::vector<double>>> analytic;
    size_t total = 0;
    for (auto& [name, p] : params) {
        analytic.emplace_back(name, p.grad.data);
        total += p.value.size();
    }

    std::vector<size_t> coords(total);
    for (size_t i = 0; i < total; ++i) coords[i] = i;
    if (total > static_cast<size_t>(min_coords)) {
        std::mt19937_64 rng(seed);
        std::shuffle(coords.begin(), coords.end(), rng);
        coords.resize(static_cast<size_t>(min_coords));
    }

    double max_err = 0.0;
    for (size_t flat : coords) {
        // Locate the parameter owning this flat coordinate.
        size_t off = flat;
        auto it = params.begin();
        size_t which = 0;
        while (off >= it->second.value.size()) {
            off -= it->second.value.size();
            ++it;
            ++which;
        }
        double& theta = it->second.value[off];
        const double orig = theta;
        theta = orig + h;
        const double f_plus = loss();
        theta = orig - h;
        const double f_minus = loss();
        theta = orig;

        const double numeric = (f_plus - f_minus) / (2.0 * h);
        const double a = analytic[which].second[off];
        const double denom = std::max({std::abs(a), std::abs(numeric), 1e-8});
        max_err = std::max(max_err, std::abs(a - numeric) / denom);
    }
    return max_err;
}

}  // namespace arb
