#include "evfl/nn/dense.hpp"

#include <stdexcept>

namespace evfl::nn {

namespace {

void check_shapes(const DenseLayerParams& p, const Matrix& input) {
  if (p.weight.rows() != p.bias.size()) {
    throw std::invalid_argument("layer '" + p.name + "': bias size " +
                                std::to_string(p.bias.size()) +
                                " does not match weight rows " +
                                std::to_string(p.weight.rows()));
  }
  if (input.cols() != p.weight.cols()) {
    throw std::invalid_argument("layer '" + p.name + "': input width " +
                                std::to_string(input.cols()) +
                                " does not match weight cols " +
                                std::to_string(p.weight.cols()));
  }
}

}  // namespace

Matrix dense_forward(const DenseLayerParams& params, const Matrix& input,
                     DenseCache* cache) {
  check_shapes(params, input);
  Matrix pre = input * params.weight.transpose();
  pre.rowwise() += params.bias.transpose();
  Matrix out;
  switch (params.activation) {
    case Activation::identity:
      out = pre;
      break;
    case Activation::relu:
      out = pre.cwiseMax(0.0);
      break;
  }
  if (cache != nullptr) {
    cache->input = input;
    cache->pre = std::move(pre);
  }
  return out;
}

Matrix dense_backward(const DenseLayerParams& params, const DenseCache& cache,
                      const Matrix& upstream, DenseGrads& grads) {
  check_shapes(params, cache.input);
  if (upstream.rows() != cache.input.rows() ||
      upstream.cols() != params.weight.rows()) {
    throw std::invalid_argument("layer '" + params.name +
                                "': upstream gradient shape does not match cache");
  }
  Matrix d_pre;
  switch (params.activation) {
    case Activation::identity:
      d_pre = upstream;
      break;
    case Activation::relu:
      d_pre = (cache.pre.array() > 0.0).cast<double>() * upstream.array();
      break;
  }
  grads.weight.noalias() = d_pre.transpose() * cache.input;
  grads.bias = d_pre.colwise().sum().transpose();
  return d_pre * params.weight;
}

}  // namespace evfl::nn
