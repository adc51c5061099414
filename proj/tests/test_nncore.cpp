#include <doctest.h>

#include <cmath>
#include <cstdint>

#include "evfl/nn/adam.hpp"
#include "evfl/nn/dense.hpp"
#include "evfl/nn/dropout.hpp"
#include "evfl/nn/init.hpp"
#include "evfl/nn/loss.hpp"
#include "evfl/nn/lstm.hpp"
#include "evfl/nn/params.hpp"
#include "evfl/rng.hpp"
#include "gradcheck.hpp"

using namespace evfl;
using namespace evfl::nn;

namespace {

Matrix random_matrix(Index rows, Index cols, Rng& rng, double scale = 1.0) {
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) {
      m(i, j) = scale * rng.normal();
    }
  }
  return m;
}

double sigmoid_scalar(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

TEST_CASE("dense identity weights pass input through") {
  DenseLayerParams p;
  p.weight = Matrix::Identity(3, 3);
  p.bias = Vector::Zero(3);
  p.activation = Activation::identity;
  Matrix input(2, 3);
  input << 1.0, -2.0, 0.5, 4.0, 0.0, -1.5;
  CHECK(dense_forward(p, input) == input);
}

TEST_CASE("dense relu clamps negatives") {
  DenseLayerParams p;
  p.weight = Matrix::Identity(2, 2);
  p.bias = Vector::Zero(2);
  p.activation = Activation::relu;
  Matrix input(1, 2);
  input << -1.0, 2.0;
  Matrix out = dense_forward(p, input);
  CHECK(out(0, 0) == 0.0);
  CHECK(out(0, 1) == 2.0);
}

TEST_CASE("dense shape mismatch names the layer") {
  DenseLayerParams p;
  p.name = "head";
  p.weight = Matrix::Zero(2, 3);
  p.bias = Vector::Zero(2);
  Matrix input(1, 4);
  input.setZero();
  CHECK_THROWS_WITH_AS(dense_forward(p, input),
                       doctest::Contains("head"), std::invalid_argument);
}

TEST_CASE("dense gradients match finite differences") {
  const gradcheck::Options opt;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(derive_seed(seed, "dense-gradcheck"));
    for (Activation act : {Activation::identity, Activation::relu}) {
      DenseLayerParams p = make_dense(4, 3, act, rng, "dense");
      p.bias = 0.1 * random_matrix(3, 1, rng).col(0);
      Matrix input = random_matrix(5, 4, rng);
      Matrix upstream = random_matrix(5, 3, rng);

      DenseCache cache;
      dense_forward(p, input, &cache);
      DenseGrads grads;
      Matrix d_input = dense_backward(p, cache, upstream, grads);

      // Objective J = sum(upstream .* forward(p, input)).
      auto eval = [&]() {
        return (upstream.cwiseProduct(dense_forward(p, input))).sum();
      };
      // Skip coordinates whose pre-activation sits within 1e-6 of a relu kink.
      auto kink_for_output_unit = [&](Index unit) {
        if (act != Activation::relu) return false;
        return cache.pre.col(unit).cwiseAbs().minCoeff() < 1e-6;
      };
      gradcheck::Report report;
      CHECK(gradcheck::check_matrix(
          p.weight, grads.weight, eval, opt, report,
          [&](Index k) { return kink_for_output_unit(k % p.weight.rows()); }));
      CHECK(gradcheck::check_vector(
          p.bias, grads.bias, eval, opt, report,
          [&](Index k) { return kink_for_output_unit(k); }));
      bool any_kink = act == Activation::relu &&
                      cache.pre.cwiseAbs().minCoeff() < 1e-6;
      if (!any_kink) {
        CHECK(gradcheck::check_matrix(input, d_input, eval, opt, report));
      }
      CHECK(report.checked > 0);
    }
  }
}

TEST_CASE("dense zero upstream gives zero gradients") {
  Rng rng(7);
  DenseLayerParams p = make_dense(3, 2, Activation::relu, rng, "dense");
  Matrix input = random_matrix(4, 3, rng);
  DenseCache cache;
  dense_forward(p, input, &cache);
  DenseGrads grads;
  Matrix d_input = dense_backward(p, cache, Matrix::Zero(4, 2), grads);
  CHECK(grads.weight.isZero(0.0));
  CHECK(grads.bias.isZero(0.0));
  CHECK(d_input.isZero(0.0));
}

TEST_CASE("lstm zero network outputs zero hidden states") {
  LstmLayerParams p;
  p.input_size = 2;
  p.hidden_size = 3;
  p.w_input = Matrix::Zero(12, 2);
  p.w_recurrent = Matrix::Zero(12, 3);
  p.bias = Vector::Zero(12);
  Rng rng(1);
  Matrix sequence = random_matrix(5, 2, rng);
  Matrix hidden = lstm_forward_sequence(p, sequence, true);
  CHECK(hidden.rows() == 5);
  CHECK(hidden.cols() == 3);
  CHECK(hidden.isZero(0.0));
}

TEST_CASE("lstm matches hand-evaluated recurrence for T=2") {
  // One unit, one input; every gate weight set by hand.
  const double wi = 0.5, wf = -0.3, wg = 0.8, wo = 0.2;
  const double ui = 0.1, uf = 0.4, ug = -0.2, uo = 0.3;
  const double bi = 0.05, bf = 1.0, bg = -0.1, bo = 0.0;
  LstmLayerParams p;
  p.input_size = 1;
  p.hidden_size = 1;
  p.w_input = Matrix(4, 1);
  p.w_input << wi, wf, wg, wo;
  p.w_recurrent = Matrix(4, 1);
  p.w_recurrent << ui, uf, ug, uo;
  p.bias = Vector(4);
  p.bias << bi, bf, bg, bo;

  const double x1 = 0.7, x2 = -0.4;
  Matrix sequence(2, 1);
  sequence << x1, x2;

  // Scalar evaluation of the gate equations.
  double h = 0.0, c = 0.0;
  double expected_h1 = 0.0, expected_h2 = 0.0;
  for (int t = 0; t < 2; ++t) {
    const double x = t == 0 ? x1 : x2;
    const double gi = sigmoid_scalar(wi * x + ui * h + bi);
    const double gf = sigmoid_scalar(wf * x + uf * h + bf);
    const double gg = std::tanh(wg * x + ug * h + bg);
    const double go = sigmoid_scalar(wo * x + uo * h + bo);
    c = gf * c + gi * gg;
    h = go * std::tanh(c);
    (t == 0 ? expected_h1 : expected_h2) = h;
  }

  Matrix hidden = lstm_forward_sequence(p, sequence, true);
  CHECK(hidden(0, 0) == doctest::Approx(expected_h1).epsilon(1e-12));
  CHECK(hidden(1, 0) == doctest::Approx(expected_h2).epsilon(1e-12));
  Matrix last = lstm_forward_sequence(p, sequence, false);
  CHECK(last(0, 0) == hidden(1, 0));
}

TEST_CASE("lstm forward is deterministic") {
  Rng rng(3);
  LstmLayerParams p = make_lstm(2, 4, rng, "lstm");
  Matrix sequence = random_matrix(6, 2, rng);
  Matrix a = lstm_forward_sequence(p, sequence, true);
  Matrix b = lstm_forward_sequence(p, sequence, true);
  CHECK(a == b);
}

TEST_CASE("lstm gradients match finite differences") {
  const gradcheck::Options opt;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(derive_seed(seed, "lstm-gradcheck"));
    LstmLayerParams p = make_lstm(2, 3, rng, "lstm");
    p.bias = 0.2 * random_matrix(12, 1, rng).col(0);
    const Index steps = 4;
    const Index batch = seed % 2 == 0 ? 1 : 2;
    SeqBatch inputs(steps);
    SeqBatch upstream(steps);
    for (Index t = 0; t < steps; ++t) {
      inputs[t] = random_matrix(batch, 2, rng);
      upstream[t] = random_matrix(batch, 3, rng);
    }

    LstmCache cache;
    lstm_forward(p, inputs, &cache);
    LstmGrads grads;
    SeqBatch d_inputs = lstm_backward(p, cache, upstream, grads);

    auto eval = [&]() {
      SeqBatch hidden = lstm_forward(p, inputs);
      double j = 0.0;
      for (Index t = 0; t < steps; ++t) {
        j += upstream[t].cwiseProduct(hidden[t]).sum();
      }
      return j;
    };
    gradcheck::Report report;
    CHECK(gradcheck::check_matrix(p.w_input, grads.w_input, eval, opt, report));
    CHECK(gradcheck::check_matrix(p.w_recurrent, grads.w_recurrent, eval, opt,
                                  report));
    CHECK(gradcheck::check_vector(p.bias, grads.bias, eval, opt, report));
    for (Index t = 0; t < steps; ++t) {
      CHECK(gradcheck::check_matrix(inputs[t], d_inputs[t], eval, opt, report));
    }
    CHECK(report.checked == 12 * 2 + 12 * 3 + 12 + steps * batch * 2);
  }
}

TEST_CASE("lstm backward is linear in the upstream gradient") {
  Rng rng(11);
  LstmLayerParams p = make_lstm(2, 3, rng, "lstm");
  SeqBatch inputs(3), upstream(3), doubled(3);
  for (int t = 0; t < 3; ++t) {
    inputs[t] = random_matrix(2, 2, rng);
    upstream[t] = random_matrix(2, 3, rng);
    doubled[t] = 2.0 * upstream[t];
  }
  LstmCache cache;
  lstm_forward(p, inputs, &cache);
  LstmGrads g1, g2;
  lstm_backward(p, cache, upstream, g1);
  lstm_backward(p, cache, doubled, g2);
  CHECK(g2.w_input == 2.0 * g1.w_input);
  CHECK(g2.w_recurrent == 2.0 * g1.w_recurrent);
  CHECK(g2.bias == 2.0 * g1.bias);

  SeqBatch zeros(3);
  for (int t = 0; t < 3; ++t) zeros[t] = Matrix::Zero(2, 3);
  LstmGrads gz;
  lstm_backward(p, cache, zeros, gz);
  CHECK(gz.w_input.isZero(0.0));
  CHECK(gz.w_recurrent.isZero(0.0));
  CHECK(gz.bias.isZero(0.0));
}

TEST_CASE("lstm backward rejects mismatched caches") {
  Rng rng(13);
  LstmLayerParams p = make_lstm(2, 3, rng, "lstm");
  SeqBatch inputs = {random_matrix(2, 2, rng), random_matrix(2, 2, rng)};
  LstmCache cache;
  lstm_forward(p, inputs, &cache);

  LstmGrads grads;
  SeqBatch bad_upstream = {Matrix::Zero(2, 3)};  // wrong step count
  CHECK_THROWS_AS(lstm_backward(p, cache, bad_upstream, grads),
                  std::invalid_argument);

  LstmLayerParams other = make_lstm(2, 4, rng, "other");
  SeqBatch upstream = {Matrix::Zero(2, 4), Matrix::Zero(2, 4)};
  CHECK_THROWS_AS(lstm_backward(other, cache, upstream, grads),
                  std::invalid_argument);
}

TEST_CASE("mse loss basics") {
  Matrix pred(1, 2), target(1, 2);
  pred << 1.0, 3.0;
  target << 0.0, 1.0;
  MseResult r = mse_loss(pred, target);
  CHECK(r.loss == doctest::Approx(2.5).epsilon(1e-15));

  MseResult zero = mse_loss(target, target);
  CHECK(zero.loss == 0.0);
  CHECK(zero.grad.isZero(0.0));

  CHECK_THROWS_AS(mse_loss(Matrix(), Matrix()), std::invalid_argument);
  CHECK_THROWS_AS(mse_loss(pred, Matrix::Zero(2, 2)), std::invalid_argument);
}

TEST_CASE("mse gradient matches finite differences") {
  gradcheck::Options opt;
  opt.rel_tol = 0.0;
  opt.abs_tol = 1e-6;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(derive_seed(seed, "mse-gradcheck"));
    Matrix pred = random_matrix(3, 4, rng);
    Matrix target = random_matrix(3, 4, rng);
    Matrix analytic = mse_loss(pred, target).grad;
    auto eval = [&]() { return mse_loss(pred, target).loss; };
    gradcheck::Report report;
    CHECK(gradcheck::check_matrix(pred, analytic, eval, opt, report));
  }
}

TEST_CASE("adam leaves parameters unchanged for zero gradients") {
  ModelParameters params;
  params.blocks.push_back({"w", Matrix::Constant(2, 2, 0.5)});
  ModelParameters grads;
  grads.blocks.push_back({"w", Matrix::Zero(2, 2)});
  AdamState state = AdamState::init(params, {});
  ModelParameters before = params;
  adam_step(state, params, grads);
  CHECK(params.blocks[0].value == before.blocks[0].value);
  CHECK(state.step == 1);
}

TEST_CASE("adam first step moves by about lr times sign of gradient") {
  ModelParameters params;
  params.blocks.push_back({"w", Matrix::Constant(1, 1, 0.0)});
  ModelParameters grads;
  grads.blocks.push_back({"w", Matrix::Constant(1, 1, 1.0)});
  AdamConfig config;  // lr = 1e-3 and default betas
  AdamState state = AdamState::init(params, config);
  adam_step(state, params, grads);
  // Closed form: -lr * g / (|g| + eps) for the bias-corrected first step.
  CHECK(params.blocks[0].value(0, 0) == doctest::Approx(-1e-3).epsilon(1e-6));
  CHECK(std::abs(params.blocks[0].value(0, 0) + 1e-3) < 1e-9);
}

TEST_CASE("adam is deterministic for identical states") {
  Rng rng(21);
  ModelParameters params;
  params.blocks.push_back({"w", random_matrix(3, 3, rng)});
  ModelParameters grads;
  grads.blocks.push_back({"w", random_matrix(3, 3, rng)});

  ModelParameters p1 = params, p2 = params;
  AdamState s1 = AdamState::init(params, {});
  AdamState s2 = AdamState::init(params, {});
  for (int i = 0; i < 5; ++i) {
    adam_step(s1, p1, grads);
    adam_step(s2, p2, grads);
  }
  CHECK(p1.flatten() == p2.flatten());
}

TEST_CASE("adam rejects non-finite gradients") {
  ModelParameters params;
  params.blocks.push_back({"w", Matrix::Zero(1, 2)});
  ModelParameters grads;
  grads.blocks.push_back({"w", Matrix::Zero(1, 2)});
  grads.blocks[0].value(0, 1) = std::numeric_limits<double>::quiet_NaN();
  AdamState state = AdamState::init(params, {});
  CHECK_THROWS_WITH_AS(adam_step(state, params, grads),
                       doctest::Contains("non-finite"), std::invalid_argument);
}

TEST_CASE("dropout rate zero and inference mode are identities") {
  Rng rng(5);
  Matrix input = random_matrix(4, 5, rng);
  DropoutResult r0 = apply_dropout(input, 0.0, rng, true);
  CHECK(r0.output == input);
  CHECK(r0.mask == Matrix::Ones(4, 5));

  DropoutResult ri = apply_dropout(input, 0.7, rng, false);
  CHECK(ri.output == input);
}

TEST_CASE("dropout keeps about 1-rate of elements and scales survivors") {
  Rng rng(42);
  Matrix input = Matrix::Ones(100, 100);
  DropoutResult r = apply_dropout(input, 0.2, rng, true);
  const double kept =
      (r.mask.array() > 0.0).cast<double>().sum() / static_cast<double>(input.size());
  CHECK(kept > 0.78);
  CHECK(kept < 0.82);
  CHECK(r.output == input.cwiseProduct(r.mask));
  // Survivors are scaled by 1/(1-rate).
  CHECK(r.output.maxCoeff() == doctest::Approx(1.25).epsilon(1e-15));
}

TEST_CASE("dropout rejects rate >= 1") {
  Rng rng(1);
  Matrix input = Matrix::Ones(2, 2);
  CHECK_THROWS_AS(apply_dropout(input, 1.0, rng, true), std::invalid_argument);
}

TEST_CASE("model parameters flatten/unflatten round-trips") {
  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    ModelParameters params;
    const int n_blocks = 1 + static_cast<int>(rng.uniform_index(4));
    for (int b = 0; b < n_blocks; ++b) {
      const Index rows = 1 + static_cast<Index>(rng.uniform_index(6));
      const Index cols = 1 + static_cast<Index>(rng.uniform_index(6));
      params.blocks.push_back(
          {"b" + std::to_string(b), random_matrix(rows, cols, rng)});
    }
    const Vector flat = params.flatten();
    CHECK(flat.size() == params.total_scalar_count());
    ModelParameters copy = params;
    copy.set_zero();
    copy.unflatten(flat);
    CHECK(copy.flatten() == flat);
    for (std::size_t b = 0; b < params.blocks.size(); ++b) {
      CHECK(copy.blocks[b].value == params.blocks[b].value);
    }
  }
}

TEST_CASE("model parameters serialize bit-exactly") {
  Rng rng(23);
  ModelParameters params;
  Matrix values = random_matrix(7, 5, rng);
  values(0, 0) = 1e-308;          // subnormal neighborhood
  values(1, 0) = -3.5e208;
  values(2, 0) = 0.1;             // not exactly representable
  params.blocks.push_back({"w", values});
  params.blocks.push_back({"b", random_matrix(4, 1, rng)});

  const std::string text = serialize_parameters(params);
  ModelParameters loaded = deserialize_parameters(text);
  REQUIRE(loaded.blocks.size() == params.blocks.size());
  for (std::size_t b = 0; b < params.blocks.size(); ++b) {
    CHECK(loaded.blocks[b].name == params.blocks[b].name);
    CHECK(loaded.blocks[b].value == params.blocks[b].value);
  }
}

TEST_CASE("model parameters reject mismatched combination") {
  ModelParameters a, b;
  a.blocks.push_back({"w", Matrix::Zero(2, 2)});
  b.blocks.push_back({"w", Matrix::Zero(3, 2)});
  CHECK_THROWS_AS(a.add_scaled(b, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(a.unflatten(Vector::Zero(5)), std::invalid_argument);
}

TEST_CASE("training a 1-unit lstm on a constant target reduces the loss") {
  Rng rng(31);
  LstmLayerParams lstm = make_lstm(1, 1, rng, "lstm");
  Matrix sequence(4, 1);
  sequence << 0.5, 0.5, 0.5, 0.5;
  Matrix target = Matrix::Constant(1, 1, 0.3);

  auto pack = [&]() {
    ModelParameters p;
    p.blocks.push_back({"w_input", lstm.w_input});
    p.blocks.push_back({"w_recurrent", lstm.w_recurrent});
    p.blocks.push_back({"bias", lstm.bias});
    return p;
  };
  ModelParameters params = pack();
  AdamState state = AdamState::init(params, {});

  double first_loss = 0.0, last_loss = 0.0;
  for (int step = 0; step <= 200; ++step) {
    LstmCache cache;
    SeqBatch inputs(4);
    for (int t = 0; t < 4; ++t) inputs[t] = sequence.row(t);
    SeqBatch hidden = lstm_forward(lstm, inputs, &cache);
    MseResult loss = mse_loss(hidden.back(), target);
    if (step == 0) first_loss = loss.loss;
    if (step == 200) {
      last_loss = loss.loss;
      break;
    }
    SeqBatch upstream(4, Matrix::Zero(1, 1));
    upstream[3] = loss.grad;
    LstmGrads grads;
    lstm_backward(lstm, cache, upstream, grads);
    ModelParameters g;
    g.blocks.push_back({"w_input", grads.w_input});
    g.blocks.push_back({"w_recurrent", grads.w_recurrent});
    g.blocks.push_back({"bias", grads.bias});
    adam_step(state, params, g);
    lstm.w_input = params.blocks[0].value;
    lstm.w_recurrent = params.blocks[1].value;
    lstm.bias = params.blocks[2].value;
  }
  CHECK(last_loss < first_loss);
}
