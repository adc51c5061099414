#include "evfl/nn/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace evfl::nn {

AdamState AdamState::init(const ModelParameters& params, const AdamConfig& config) {
  AdamState state;
  state.config = config;
  state.first_moment.reserve(params.blocks.size());
  state.second_moment.reserve(params.blocks.size());
  for (const ParamArray& b : params.blocks) {
    state.first_moment.push_back(Matrix::Zero(b.value.rows(), b.value.cols()));
    state.second_moment.push_back(Matrix::Zero(b.value.rows(), b.value.cols()));
  }
  return state;
}

void adam_step(AdamState& state, ModelParameters& params,
               const ModelParameters& grads) {
  if (!params.same_shape(grads)) {
    throw std::invalid_argument("adam_step: gradient shapes do not match parameters");
  }
  if (state.first_moment.size() != params.blocks.size()) {
    throw std::invalid_argument("adam_step: state does not mirror parameters");
  }
  for (std::size_t i = 0; i < params.blocks.size(); ++i) {
    if (!grads.blocks[i].value.allFinite()) {
      throw std::invalid_argument("adam_step: non-finite gradient in block '" +
                                  grads.blocks[i].name + "'");
    }
  }

  state.step += 1;
  const AdamConfig& c = state.config;
  const double bias1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.step));
  const double bias2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.blocks.size(); ++i) {
    Matrix& m = state.first_moment[i];
    Matrix& v = state.second_moment[i];
    const Matrix& g = grads.blocks[i].value;
    if (m.rows() != g.rows() || m.cols() != g.cols()) {
      throw std::invalid_argument("adam_step: state shape mismatch in block '" +
                                  grads.blocks[i].name + "'");
    }
    m = c.beta1 * m + (1.0 - c.beta1) * g;
    v = c.beta2 * v + (1.0 - c.beta2) * g.cwiseProduct(g);
    params.blocks[i].value.array() -=
        c.learning_rate * (m.array() / bias1) /
        ((v.array() / bias2).sqrt() + c.epsilon);
  }
}

}  // namespace evfl::nn
