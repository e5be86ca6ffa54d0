// Copyright 2026 The Nanogrid P2P Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <cstring>
#include <fstream>

#include "nanogrid/errors.hpp"
#include "nanogrid/nn/checkpoint.hpp"
#include "nanogrid/nn/layers.hpp"
#include "nanogrid/nn/optim.hpp"

namespace nanogrid::nn {
namespace {

Tensor random_matrix(int rows, int cols, Rng& rng, double scale = 1.0) {
  Tensor m = Tensor::matrix(rows, cols);
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = scale * rng.uniform(-1.0, 1.0);
  return m;
}

// Weighted sum of an output, so every entry gets a distinct upstream gradient.
Var probe(Tape& t, Var y, const Tensor& weights) {
  return sum(t, mul(t, y, t.constant(weights)));
}

// Central differences written out here rather than through grad_check.
double fd_max_rel(const std::function<double()>& f, Tensor& value, const Tensor& analytic) {
  double worst = 0.0;
  for (std::size_t i = 0; i < value.size(); ++i) {
    const double x0 = value[i];
    value[i] = x0 + 1e-5;
    const double up = f();
    value[i] = x0 - 1e-5;
    const double down = f();
    value[i] = x0;
    const double n = (up - down) / 2e-5;
    const double a = analytic[i];
    worst = std::max(worst, std::abs(a - n) / std::max({std::abs(a), std::abs(n), 1e-6}));
  }
  return worst;
}

TEST(Dense, IdentityAndZeroInput) {
  Rng rng(1);
  Dense d("d", 3, 3, Activation::kNone, rng);
  d.w.value.fill(0.0);
  for (int i = 0; i < 3; ++i) d.w.value.at(i, i) = 1.0;
  d.b.value.fill(0.0);
  Tape t(false);
  const Tensor x = Tensor::row({0.5, -2.0, 3.0});
  EXPECT_EQ(t.value(dense_apply(t, t.constant(x), d)).values(), x.values());

  Dense r("r", 2, 3, Activation::kRelu, rng);
  r.b.value = Tensor::row({0.4, -0.3, 0.0});
  Tape t2(false);
  const Tensor y = t2.value(dense_apply(t2, t2.constant(Tensor::row({0.0, 0.0})), r));
  EXPECT_EQ(y.values(), (std::vector<double>{0.4, 0.0, 0.0}));
}

TEST(Dense, ShapeMismatch) {
  Rng rng(1);
  Dense d("d", 3, 2, Activation::kNone, rng);
  Tape t;
  EXPECT_THROW(dense_apply(t, t.constant(Tensor::row({1.0, 2.0})), d), ContractError);
}

TEST(Dense, GradientMatchesFiniteDifferences) {
  for (std::uint64_t seed : {1, 2, 3}) {
    Rng rng(seed);
    Dense d("d", 4, 4, Activation::kNone, rng);
    const Tensor x = random_matrix(4, 4, rng);
    const Tensor w = random_matrix(4, 4, rng);
    d.w.zero_grad();
    d.b.zero_grad();
    {
      Tape t;
      t.backward(probe(t, dense_apply(t, t.constant(x), d), w));
    }
    auto f = [&] {
      Tape t(false);
      return t.value(probe(t, dense_apply(t, t.constant(x), d), w))[0];
    };
    EXPECT_LT(fd_max_rel(f, d.w.value, d.w.grad), 1e-6) << seed;
    EXPECT_LT(fd_max_rel(f, d.b.value, d.b.grad), 1e-6) << seed;
  }
}

TEST(Lstm, ZeroParamsGiveZeroState) {
  Rng rng(2);
  LstmCell cell("l", 3, 4, rng);
  cell.w.value.fill(0.0);
  cell.b.value.fill(0.0);
  Tape t(false);
  const LstmVars v = cell.bind(t);
  const LstmState s =
      lstm_step(t, t.constant(Tensor::row({1.0, -1.0, 2.0})), lstm_zero_state(t, 1, 4), v);
  for (double h : t.value(s.h).values()) EXPECT_EQ(h, 0.0);
  for (double c : t.value(s.c).values()) EXPECT_EQ(c, 0.0);
}

TEST(Lstm, SaturatedForgetGateKeepsMemory) {
  Rng rng(3);
  const int H = 3;
  LstmCell cell("l", 2, H, rng);
  cell.w.value.fill(0.0);
  for (int j = 0; j < H; ++j) {
    cell.b.value[j] = -60.0;      // input gate
    cell.b.value[H + j] = 60.0;   // forget gate
  }
  Tape t(false);
  const Tensor c_prev = Tensor::row({0.7, -1.2, 3.0});
  LstmState prev{t.constant(Tensor::matrix(1, H)), t.constant(c_prev)};
  const LstmState s = lstm_step(t, t.constant(Tensor::row({5.0, -5.0})), prev, cell.bind(t));
  for (int j = 0; j < H; ++j) EXPECT_NEAR(t.value(s.c)[j], c_prev[j], 1e-15);
}

TEST(Lstm, GatesBoundCellState) {
  // |c_t| <= |c_prev| + 1 because every gate lies in (0, 1) and |g| < 1.
  Rng rng(4);
  LstmCell cell("l", 3, 5, rng);
  Tape t(false);
  const LstmVars v = cell.bind(t);
  LstmState s = lstm_zero_state(t, 2, 5);
  for (int step = 1; step <= 50; ++step) {
    s = lstm_step(t, t.constant(random_matrix(2, 3, rng, 10.0)), s, v);
    for (double c : t.value(s.c).values()) EXPECT_LE(std::abs(c), step);
    for (double h : t.value(s.h).values()) EXPECT_LT(std::abs(h), 1.0);
  }
}

TEST(Lstm, ShapeMismatch) {
  Rng rng(1);
  LstmCell cell("l", 3, 2, rng);
  Tape t;
  EXPECT_THROW(lstm_step(t, t.constant(Tensor::row({1.0})), lstm_zero_state(t, 1, 2),
                         cell.bind(t)),
               ContractError);
  EXPECT_THROW(lstm_step(t, t.constant(Tensor::row({1.0, 2.0, 3.0})),
                         lstm_zero_state(t, 1, 3), cell.bind(t)),
               ContractError);
}

TEST(Lstm, FiveStepBpttGradient) {
  for (std::uint64_t seed : {1, 2, 3}) {
    Rng rng(seed);
    LstmCell cell("l", 3, 4, rng);
    std::vector<Tensor> xs;
    for (int i = 0; i < 5; ++i) xs.push_back(random_matrix(2, 3, rng));
    const Tensor w = random_matrix(2, 4, rng);
    auto loss = [&](Tape& t) {
      std::vector<Var> in;
      for (const Tensor& x : xs) in.push_back(t.constant(x));
      const auto hs = lstm_unroll(t, in, cell.bind(t), lstm_zero_state(t, 2, 4));
      Var total = probe(t, hs[0], w);
      for (std::size_t i = 1; i < hs.size(); ++i) total = add(t, total, probe(t, hs[i], w));
      return total;
    };
    EXPECT_LT(grad_check(loss, cell.parameters()).max_rel_error, 1e-5) << seed;
  }
}

TEST(BiLstm, ShapeAndErrors) {
  Rng rng(5);
  LstmCell f("f", 2, 3, rng), b("b", 2, 3, rng);
  Tape t(false);
  std::vector<Var> xs;
  for (int i = 0; i < 4; ++i) xs.push_back(t.constant(random_matrix(1, 2, rng)));
  const auto out = bilstm_apply(t, xs, f.bind(t), b.bind(t));
  ASSERT_EQ(out.size(), 4u);
  for (Var v : out) EXPECT_EQ(t.value(v).shape(), (std::vector<int>{1, 6}));
  EXPECT_THROW(bilstm_apply(t, {}, f.bind(t), b.bind(t)), ContractError);
}

TEST(BiLstm, PalindromeWithTiedDirectionsIsHalfSwapSymmetric) {
  Rng rng(6);
  const int H = 3;
  LstmCell cell("c", 2, H, rng);
  const std::vector<Tensor> seq = {random_matrix(1, 2, rng), random_matrix(1, 2, rng),
                                   random_matrix(1, 2, rng)};
  const std::vector<Tensor> pal = {seq[0], seq[1], seq[2], seq[1], seq[0]};
  Tape t(false);
  std::vector<Var> xs;
  for (const Tensor& x : pal) xs.push_back(t.constant(x));
  const auto out = bilstm_apply(t, xs, cell.bind(t), cell.bind(t));
  const int T = static_cast<int>(out.size());
  for (int i = 0; i < T; ++i) {
    const Tensor& a = t.value(out[i]);
    const Tensor& r = t.value(out[T - 1 - i]);
    for (int j = 0; j < H; ++j) {
      EXPECT_DOUBLE_EQ(a[j], r[H + j]);
      EXPECT_DOUBLE_EQ(a[H + j], r[j]);
    }
  }
}

TEST(BiLstm, SingleStepIsTwoCellSteps) {
  Rng rng(7);
  LstmCell f("f", 2, 3, rng), b("b", 2, 3, rng);
  Tape t(false);
  const Var x = t.constant(random_matrix(1, 2, rng));
  const auto out = bilstm_apply(t, {x}, f.bind(t), b.bind(t));
  const LstmState hf = lstm_step(t, x, lstm_zero_state(t, 1, 3), f.bind(t));
  const LstmState hb = lstm_step(t, x, lstm_zero_state(t, 1, 3), b.bind(t));
  const Tensor& y = t.value(out[0]);
  for (int j = 0; j < 3; ++j) {
    EXPECT_EQ(y[j], t.value(hf.h)[j]);
    EXPECT_EQ(y[3 + j], t.value(hb.h)[j]);
  }
}

TEST(BiLstm, Gradient) {
  for (std::uint64_t seed : {1, 2, 3}) {
    Rng rng(seed);
    LstmCell f("f", 2, 3, rng), b("b", 2, 3, rng);
    std::vector<Tensor> xs;
    for (int i = 0; i < 4; ++i) xs.push_back(random_matrix(2, 2, rng));
    const Tensor w = random_matrix(2, 6, rng);
    auto loss = [&](Tape& t) {
      std::vector<Var> in;
      for (const Tensor& x : xs) in.push_back(t.constant(x));
      const auto ys = bilstm_apply(t, in, f.bind(t), b.bind(t));
      Var total = probe(t, ys[0], w);
      for (std::size_t i = 1; i < ys.size(); ++i) total = add(t, total, probe(t, ys[i], w));
      return total;
    };
    std::vector<Parameter*> ps = f.parameters();
    for (Parameter* p : b.parameters()) ps.push_back(p);
    EXPECT_LT(grad_check(loss, ps).max_rel_error, 1e-4) << seed;
  }
}

TEST(Gcn, NormalizedAdjacency) {
  const Tensor none = normalized_adjacency(Tensor::matrix(3, 3));
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) EXPECT_DOUBLE_EQ(none.at(i, j), i == j ? 1.0 : 0.0);
  }
  // Regular graphs: a complete graph and a 6-cycle are doubly stochastic.
  Tensor ring = Tensor::matrix(6, 6);
  for (int i = 0; i < 6; ++i) {
    ring.at(i, (i + 1) % 6) = 1.0;
    ring.at((i + 1) % 6, i) = 1.0;
  }
  for (const Tensor& a : {fully_connected_adjacency(5), ring}) {
    const Tensor op = normalized_adjacency(a);
    for (int i = 0; i < op.rows(); ++i) {
      double row = 0.0, col = 0.0;
      for (int j = 0; j < op.cols(); ++j) {
        EXPECT_GE(op.at(i, j), 0.0);
        row += op.at(i, j);
        col += op.at(j, i);
      }
      EXPECT_NEAR(row, 1.0, 1e-12);
      EXPECT_NEAR(col, 1.0, 1e-12);
    }
  }
  // Irregular graph: still non-negative and symmetric.
  Tensor star = Tensor::matrix(4, 4);
  for (int i = 1; i < 4; ++i) star.at(0, i) = star.at(i, 0) = 1.0;
  const Tensor op = normalized_adjacency(star);
  EXPECT_DOUBLE_EQ(op.at(0, 1), 1.0 / std::sqrt(8.0));
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      EXPECT_GE(op.at(i, j), 0.0);
      EXPECT_DOUBLE_EQ(op.at(i, j), op.at(j, i));
    }
  }
  EXPECT_THROW(normalized_adjacency(Tensor::matrix(2, 3)), ContractError);
}

TEST(Gcn, NoEdgesIsSharedDense) {
  Rng rng(8);
  GraphConv g("g", 3, 2, Activation::kRelu, rng);
  const Tensor x = random_matrix(4, 3, rng);
  Tape t(false);
  const Tensor y = t.value(gcn_apply(t, t.constant(x), Tensor::matrix(4, 4), g));
  for (int n = 0; n < 4; ++n) {
    for (int o = 0; o < 2; ++o) {
      double z = 0.0;
      for (int f = 0; f < 3; ++f) z += x.at(n, f) * g.w.value.at(f, o);
      EXPECT_NEAR(y.at(n, o), std::max(z, 0.0), 1e-15);
    }
  }
}

TEST(Gcn, SingleNode) {
  Rng rng(9);
  GraphConv g("g", 3, 2, Activation::kTanh, rng);
  const Tensor x = random_matrix(1, 3, rng);
  Tape t(false);
  const Tensor y = t.value(gcn_apply(t, t.constant(x), Tensor::matrix(1, 1, 1.0), g));
  for (int o = 0; o < 2; ++o) {
    double z = 0.0;
    for (int f = 0; f < 3; ++f) z += x[f] * g.w.value.at(f, o);
    EXPECT_NEAR(y[o], std::tanh(z), 1e-15);
  }
}

TEST(Gcn, ShapeMismatch) {
  Rng rng(9);
  GraphConv g("g", 3, 2, Activation::kNone, rng);
  Tape t;
  EXPECT_THROW(gcn_apply(t, t.constant(Tensor::matrix(3, 3)), Tensor::matrix(4, 4), g),
               ContractError);
  EXPECT_THROW(gcn_apply(t, t.constant(Tensor::matrix(4, 2)), Tensor::matrix(4, 4), g),
               ContractError);
}

TEST(Gcn, GradientWrtWeights) {
  for (std::uint64_t seed : {1, 2, 3}) {
    Rng rng(seed);
    GraphConv g("g", 3, 2, Activation::kNone, rng);
    Tensor a = Tensor::matrix(4, 4);
    a.at(0, 1) = a.at(1, 0) = a.at(1, 2) = a.at(2, 1) = a.at(2, 3) = a.at(3, 2) = 1.0;
    const Tensor x = random_matrix(4, 3, rng);
    const Tensor w = random_matrix(4, 2, rng);
    g.w.zero_grad();
    {
      Tape t;
      t.backward(probe(t, gcn_apply(t, t.constant(x), a, g), w));
    }
    auto f = [&] {
      Tape t(false);
      return t.value(probe(t, gcn_apply(t, t.constant(x), a, g), w))[0];
    };
    EXPECT_LT(fd_max_rel(f, g.w.value, g.w.grad), 1e-6) << seed;
  }
}

TEST(Tape, SingleUse) {
  Parameter p("p", Tensor::scalar(2.0));
  Tape t;
  const Var l = square(t, t.param(p));
  t.backward(l);
  EXPECT_DOUBLE_EQ(p.grad[0], 4.0);
  EXPECT_THROW(t.backward(l), ContractError);
  Tape inference(false);
  EXPECT_THROW(inference.backward(inference.constant(Tensor::scalar(1.0))), ContractError);
}

TEST(GradCheck, QuadraticAndConstant) {
  Parameter x("x", Tensor::scalar(3.0));
  {
    Tape t;
    t.backward(mul(t, t.param(x), t.param(x)));
  }
  EXPECT_DOUBLE_EQ(x.grad[0], 6.0);
  x.zero_grad();
  const GradCheckResult q =
      grad_check([&](Tape& t) { return mul(t, t.param(x), t.param(x)); }, {&x});
  EXPECT_LT(q.max_rel_error * 6.0, 1e-7);
  EXPECT_EQ(x.grad[0], 0.0);  // accumulators restored

  Parameter c("c", Tensor::row({1.0, 2.0}));
  const GradCheckResult k = grad_check(
      [&](Tape& t) {
        t.param(c);
        return t.constant(Tensor::scalar(5.0));
      },
      {&c});
  EXPECT_EQ(k.max_rel_error, 0.0);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  AdamConfig cfg;
  cfg.lr = 0.01;
  for (double g : {3.0, -0.2, 1e-3}) {
    Tensor p = Tensor::row({1.0, -1.0, 0.5});
    const Tensor before = p;
    Tensor m = Tensor::row({0, 0, 0}), v = Tensor::row({0, 0, 0});
    adam_step(p, Tensor::row({g, g, g}), m, v, 1, cfg);
    for (std::size_t i = 0; i < p.size(); ++i) {
      EXPECT_NEAR(std::abs(p[i] - before[i]), cfg.lr, 1e-6);
      EXPECT_LT((p[i] - before[i]) * g, 0.0);
    }
  }
}

TEST(Adam, ZeroGradientAndPurity) {
  AdamConfig cfg;
  Tensor p = Tensor::row({1.0, 2.0});
  Tensor m = Tensor::row({0, 0}), v = Tensor::row({0, 0});
  adam_step(p, Tensor::row({0, 0}), m, v, 1, cfg);
  EXPECT_EQ(p.values(), (std::vector<double>{1.0, 2.0}));

  Tensor p1 = Tensor::row({0.3}), m1 = Tensor::row({0.1}), v1 = Tensor::row({0.2});
  Tensor p2 = p1, m2 = m1, v2 = v1;
  adam_step(p1, Tensor::row({0.7}), m1, v1, 4, cfg);
  adam_step(p2, Tensor::row({0.7}), m2, v2, 4, cfg);
  EXPECT_EQ(p1[0], p2[0]);
  EXPECT_EQ(m1[0], m2[0]);
  EXPECT_EQ(v1[0], v2[0]);
}

TEST(Adam, ClipRescalesJointNorm) {
  Parameter a("a", Tensor::row({0.0})), b("b", Tensor::row({0.0}));
  a.grad[0] = 30.0;
  b.grad[0] = 40.0;
  AdamConfig cfg;
  cfg.clip_norm = 5.0;
  Adam opt({&a, &b}, cfg);
  opt.step();
  EXPECT_EQ(opt.steps(), 1);
  EXPECT_EQ(a.grad[0], 0.0);
  EXPECT_NEAR(a.value[0], -cfg.lr, 1e-6);
  EXPECT_NEAR(b.value[0], -cfg.lr, 1e-6);
}

class CheckpointTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() / "ng_ckpt_test";
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  std::filesystem::path dir_;
};

TEST_F(CheckpointTest, BitExactRoundTrip) {
  Rng rng(10);
  Dense d("net.fc0", 5, 3, Activation::kRelu, rng);
  LstmCell l("net.lstm", 3, 2, rng);
  d.b.value[1] = 1.0 / 3.0;
  d.w.value[0] = -0.0;
  l.b.value[0] = 5e-324;
  const std::vector<const Parameter*> src = {&d.w, &d.b, &l.w, &l.b};
  save_checkpoint(path("a.ngck"), src);
  EXPECT_TRUE(std::filesystem::exists(path("a.ngck.json")));

  const auto back = read_checkpoint(path("a.ngck"));
  ASSERT_EQ(back.size(), src.size());
  for (std::size_t i = 0; i < src.size(); ++i) {
    EXPECT_EQ(back[i].first, src[i]->name);
    EXPECT_EQ(back[i].second.shape(), src[i]->value.shape());
    EXPECT_EQ(std::memcmp(back[i].second.data(), src[i]->value.data(),
                          src[i]->value.size() * sizeof(double)),
              0);
  }

  Rng other(99);
  Dense d2("net.fc0", 5, 3, Activation::kRelu, other);
  LstmCell l2("net.lstm", 3, 2, other);
  load_checkpoint(path("a.ngck"), {&d2.w, &d2.b, &l2.w, &l2.b});
  EXPECT_EQ(std::memcmp(d2.w.value.data(), d.w.value.data(), 15 * sizeof(double)), 0);
  EXPECT_EQ(l2.b.value[0], 5e-324);
}

TEST_F(CheckpointTest, Errors) {
  Rng rng(11);
  Dense d("fc", 2, 2, Activation::kNone, rng);
  save_checkpoint(path("b.ngck"), {&d.w, &d.b});

  Dense wrong("fc", 3, 2, Activation::kNone, rng);
  EXPECT_THROW(load_checkpoint(path("b.ngck"), {&wrong.w, &wrong.b}), ContractError);
  Dense renamed("other", 2, 2, Activation::kNone, rng);
  EXPECT_THROW(load_checkpoint(path("b.ngck"), {&renamed.w, &renamed.b}), ContractError);
  EXPECT_THROW(load_checkpoint(path("b.ngck"), {&d.w}), ContractError);

  EXPECT_THROW(load_checkpoint(path("missing.ngck"), {&d.w, &d.b}), ConfigError);
  {
    std::ofstream out(path("b.ngck"), std::ios::binary | std::ios::trunc);
    out << "NGCK\x01";
  }
  EXPECT_THROW(load_checkpoint(path("b.ngck"), {&d.w, &d.b}), ConfigError);
}

}  // namespace
}  // namespace nanogrid::nn
