#include "eyelstm/adam.hpp"

#include <cmath>

namespace eyelstm {

void adam_update_array(std::vector<double>& params, const std::vector<double>& grads,
                       std::vector<double>& m, std::vector<double>& v, long step,
                       const AdamConfig& cfg) {
    if (cfg.lr <= 0.0) throw ValidationError("adam: learning rate must be positive");
    if (grads.size() != params.size() || m.size() != params.size() || v.size() != params.size())
        throw DimensionError("adam: parameter/gradient/state size mismatch");
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grads[i];
        m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g;
        v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g * g;
        const double m_hat = m[i] / bc1;
        const double v_hat = v[i] / bc2;
        params[i] -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
    }
}

void adam_step(std::vector<ParamView>& params, AdamState& state, const AdamConfig& cfg) {
    if (state.m.size() != params.size())
        throw DimensionError("adam: state not initialized for this parameter set");
    ++state.step;
    for (std::size_t a = 0; a < params.size(); ++a)
        adam_update_array(*params[a].values, *params[a].grads, state.m[a], state.v[a], state.step,
                          cfg);
}

}  // namespace eyelstm
