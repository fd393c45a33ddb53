#pragma once

#include <vector>

#include "eyelstm/layers.hpp"

namespace eyelstm {

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// First/second moment estimates, one pair of arrays per parameter array.
struct AdamState {
    std::vector<std::vector<double>> m;
    std::vector<std::vector<double>> v;
    long step = 0;

    void init_like(const std::vector<ParamView>& params) {
        m.clear();
        v.clear();
        for (const ParamView& p : params) {
            m.emplace_back(p.values->size(), 0.0);
            v.emplace_back(p.values->size(), 0.0);
        }
        step = 0;
    }
};

// One bias-corrected Adam update of a single array.
void adam_update_array(std::vector<double>& params, const std::vector<double>& grads,
                       std::vector<double>& m, std::vector<double>& v, long step,
                       const AdamConfig& cfg);

// One update across every parameter array; increments state.step.
void adam_step(std::vector<ParamView>& params, AdamState& state, const AdamConfig& cfg);

}  // namespace eyelstm
