#include "evfl/nn/lstm.hpp"

#include <stdexcept>

namespace evfl::nn {

namespace {

void check_params(const LstmLayerParams& p) {
  const Index h4 = 4 * p.hidden_size;
  if (p.hidden_size < 1 || p.input_size < 1) {
    throw std::invalid_argument("layer '" + p.name + "': sizes must be positive");
  }
  if (p.w_input.rows() != h4 || p.w_input.cols() != p.input_size ||
      p.w_recurrent.rows() != h4 || p.w_recurrent.cols() != p.hidden_size ||
      p.bias.size() != h4) {
    throw std::invalid_argument("layer '" + p.name +
                                "': weight shapes do not match input_size/hidden_size");
  }
}

inline Eigen::ArrayXXd sigmoid(const Eigen::ArrayXXd& x) {
  return 1.0 / (1.0 + (-x).exp());
}

}  // namespace

SeqBatch lstm_forward(const LstmLayerParams& params, const SeqBatch& inputs,
                      LstmCache* cache) {
  check_params(params);
  if (inputs.empty()) {
    throw std::invalid_argument("layer '" + params.name + "': empty sequence");
  }
  const Index steps = static_cast<Index>(inputs.size());
  const Index batch = inputs[0].rows();
  const Index H = params.hidden_size;
  for (const Matrix& x : inputs) {
    if (x.cols() != params.input_size || x.rows() != batch) {
      throw std::invalid_argument("layer '" + params.name +
                                  "': sequence step shape does not match input_size");
    }
  }

  if (cache != nullptr) {
    cache->input_size = params.input_size;
    cache->hidden_size = H;
    cache->steps = steps;
    cache->batch = batch;
    cache->inputs = inputs;
    cache->gates.resize(steps);
    cache->cell.resize(steps);
    cache->cell_tanh.resize(steps);
    cache->hidden.resize(steps);
  }

  SeqBatch hidden(steps);
  Matrix h = Matrix::Zero(batch, H);
  Matrix c = Matrix::Zero(batch, H);
  Matrix acts(batch, 4 * H);
  for (Index t = 0; t < steps; ++t) {
    acts.noalias() = inputs[t] * params.w_input.transpose();
    acts.noalias() += h * params.w_recurrent.transpose();
    acts.rowwise() += params.bias.transpose();

    acts.middleCols(0, H) = sigmoid(acts.middleCols(0, H).array());       // input
    acts.middleCols(H, H) = sigmoid(acts.middleCols(H, H).array());      // forget
    acts.middleCols(2 * H, H) = acts.middleCols(2 * H, H).array().tanh();  // cell
    acts.middleCols(3 * H, H) = sigmoid(acts.middleCols(3 * H, H).array());  // output

    c = acts.middleCols(H, H).cwiseProduct(c) +
        acts.middleCols(0, H).cwiseProduct(acts.middleCols(2 * H, H));
    Matrix c_tanh = c.array().tanh();
    h = acts.middleCols(3 * H, H).cwiseProduct(c_tanh);

    hidden[t] = h;
    if (cache != nullptr) {
      cache->gates[t] = acts;
      cache->cell[t] = c;
      cache->cell_tanh[t] = std::move(c_tanh);
      cache->hidden[t] = h;
    }
  }
  return hidden;
}

SeqBatch lstm_backward(const LstmLayerParams& params, const LstmCache& cache,
                       const SeqBatch& upstream, LstmGrads& grads) {
  check_params(params);
  const Index H = params.hidden_size;
  if (cache.input_size != params.input_size || cache.hidden_size != H ||
      cache.steps < 1 ||
      static_cast<Index>(cache.gates.size()) != cache.steps ||
      static_cast<Index>(cache.inputs.size()) != cache.steps) {
    throw std::invalid_argument("layer '" + params.name +
                                "': cache does not match this layer");
  }
  if (static_cast<Index>(upstream.size()) != cache.steps) {
    throw std::invalid_argument("layer '" + params.name +
                                "': upstream gradient step count does not match cache");
  }
  for (const Matrix& g : upstream) {
    if (g.rows() != cache.batch || g.cols() != H) {
      throw std::invalid_argument("layer '" + params.name +
                                  "': upstream gradient shape does not match cache");
    }
  }

  grads.w_input = Matrix::Zero(4 * H, params.input_size);
  grads.w_recurrent = Matrix::Zero(4 * H, H);
  grads.bias = Vector::Zero(4 * H);

  SeqBatch d_inputs(cache.steps);
  Matrix dh = Matrix::Zero(cache.batch, H);
  Matrix dc = Matrix::Zero(cache.batch, H);
  Matrix d_acts(cache.batch, 4 * H);
  for (Index t = cache.steps - 1; t >= 0; --t) {
    dh += upstream[t];

    const auto gate_i = cache.gates[t].middleCols(0, H).array();
    const auto gate_f = cache.gates[t].middleCols(H, H).array();
    const auto gate_g = cache.gates[t].middleCols(2 * H, H).array();
    const auto gate_o = cache.gates[t].middleCols(3 * H, H).array();
    const auto c_tanh = cache.cell_tanh[t].array();

    dc.array() += dh.array() * gate_o * (1.0 - c_tanh.square());

    d_acts.middleCols(3 * H, H) =
        dh.array() * c_tanh * gate_o * (1.0 - gate_o);          // output gate
    d_acts.middleCols(2 * H, H) =
        dc.array() * gate_i * (1.0 - gate_g.square());          // cell candidate
    d_acts.middleCols(0, H) =
        dc.array() * gate_g * gate_i * (1.0 - gate_i);          // input gate
    if (t > 0) {
      d_acts.middleCols(H, H) =
          dc.array() * cache.cell[t - 1].array() * gate_f * (1.0 - gate_f);
    } else {
      d_acts.middleCols(H, H).setZero();  // c_{-1} is zero
    }

    grads.w_input.noalias() += d_acts.transpose() * cache.inputs[t];
    if (t > 0) {
      grads.w_recurrent.noalias() += d_acts.transpose() * cache.hidden[t - 1];
    }
    grads.bias += d_acts.colwise().sum().transpose();

    d_inputs[t].noalias() = d_acts * params.w_input;
    dh.noalias() = d_acts * params.w_recurrent;
    dc = dc.cwiseProduct(Matrix(gate_f));
  }
  return d_inputs;
}

Matrix lstm_forward_sequence(const LstmLayerParams& params,
                             const Matrix& sequence, bool return_sequence,
                             LstmCache* cache) {
  if (sequence.rows() < 1) {
    throw std::invalid_argument("layer '" + params.name + "': empty sequence");
  }
  SeqBatch steps(sequence.rows());
  for (Index t = 0; t < sequence.rows(); ++t) {
    steps[t] = sequence.row(t);
  }
  SeqBatch hidden = lstm_forward(params, steps, cache);
  if (return_sequence) {
    Matrix out(sequence.rows(), params.hidden_size);
    for (Index t = 0; t < sequence.rows(); ++t) {
      out.row(t) = hidden[t];
    }
    return out;
  }
  return hidden.back();
}

}  // namespace evfl::nn
