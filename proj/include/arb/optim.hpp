#pragma once

#include <cstdint>
#include <functional>
#include <map>

#include "arb/tensor.hpp"

namespace arb {

struct OptimHyper {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// Bias-corrected adaptive-moment state, one (m, v) pair per parameter.
struct OptimState {
    OptimHyper hyper;
    std::int64_t step = 0;
    std::map<std::string, Tensor> m;
    std::map<std::string, Tensor> v;

    static OptimState init(const ParamSet& params, OptimHyper hyper = {});
};

void adam_step(ParamSet& params, OptimState& state);

// Compares analytic gradients against central differences on a random
// subsample of parameter coordinates (all of them when fewer than min_coords).
// loss() evaluates the objective at the current parameter values; grads()
// leaves fresh gradients in the ParamSet. Returns the max relative error with
// denominator max(|analytic|, |numeric|, 1e-8).
double grad_check(const std::function<double()>& loss, const std::function<void()>& grads,
                  ParamSet& params, int min_coords, double h, std::uint64_t seed);

}  // namespace arb
