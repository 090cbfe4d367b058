// Copyright 2026 The mdplan Authors
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

#include <doctest.h>

#include <cmath>

#include "../common/grad_graphs.hpp"
#include "tensor/optimizer.hpp"
#include "tensor/tensor.hpp"

using namespace mdplan::tensor;

TEST_CASE("softmax of equal logits is uniform") {
  for (std::size_t n : {1u, 3u, 7u}) {
    const Tensor s = softmax_rows(Tensor::from_data({1, n}, std::vector<double>(n, 0.37)));
    for (double v : s.data()) CHECK(v == doctest::Approx(1.0 / n).epsilon(1e-15));
  }
}

TEST_CASE("cross entropy of two zero logits is ln 2") {
  const std::int32_t target[] = {0};
  CHECK(cross_entropy_with_logits(Tensor::from_data({1, 2}, {0.0, 0.0}), target).item() ==
        doctest::Approx(std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("identity matmul and transpose") {
  const Tensor a = Tensor::from_data({2, 3}, {1, 2, 3, 4, 5, 6});
  const Tensor eye = Tensor::from_data({2, 2}, {1, 0, 0, 1});
  const Tensor out = matmul(eye, a);
  CHECK(std::vector<double>(out.data().begin(), out.data().end()) == std::vector<double>{1, 2, 3, 4, 5, 6});
  const Tensor t = transpose(a);
  CHECK(t.shape() == Shape{3, 2});
  CHECK(t.at(2, 1) == 6.0);
}

TEST_CASE("shape mismatches are engine errors") {
  const Tensor a = Tensor::zeros({2, 3});
  CHECK_THROWS_AS(matmul(a, a), EngineError);
  CHECK_THROWS_AS(add(a, Tensor::zeros({3, 2})), EngineError);
  CHECK_THROWS_AS(backward(a), EngineError);
}

TEST_CASE("gradient of a plain sum is all ones") {
  Tensor p = Tensor::from_data({2, 2}, {0.3, -1.0, 2.0, 5.0}, true);
  backward(sum(p));
  REQUIRE(p.has_grad());
  for (double g : p.grad()) CHECK(g == 1.0);
}

TEST_CASE("stop_gradient passes values and blocks gradients") {
  Tensor p = Tensor::from_data({3}, {0.5, -2.0, 1.5}, true);
  const Tensor s = stop_gradient(p);
  CHECK(std::equal(s.data().begin(), s.data().end(), p.data().begin()));
  const Tensor loss = sum(mul(s, s));
  CHECK_FALSE(loss.requires_grad());
  CHECK_FALSE(p.has_grad());

  // a*x + b*stop_gradient(x): only the first term reaches x.
  const double a = 1.75, b = -3.0;
  backward(sum(add(scale(p, a), scale(stop_gradient(p), b))));
  for (double g : p.grad()) CHECK(g == a);
}

TEST_CASE("no-grad mode records nothing") {
  Tensor p = Tensor::from_data({2}, {1.0, 2.0}, true);
  {
    NoGradGuard guard;
    CHECK_FALSE(grad_enabled());
    CHECK_FALSE(sum(p).requires_grad());
  }
  CHECK(grad_enabled());
}

TEST_CASE("three-layer perceptron matches central differences") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 0.5);
  auto rnd = [&](std::size_t r, std::size_t c) {
    std::vector<double> v(r * c);
    for (double& x : v) x = n(rng);
    return Tensor::from_data({r, c}, v, true);
  };
  mdplan::testing::RandomGraph g;
  g.leaves = {rnd(3, 4), rnd(4, 6), rnd(6, 5), rnd(5, 2)};
  const auto leaves = g.leaves;
  const std::int32_t targets[] = {0, 1, 1};
  g.loss = [leaves, targets] {
    Tensor h = gelu(matmul(leaves[0], leaves[1]));
    h = gelu(matmul(h, leaves[2]));
    return cross_entropy_with_logits(matmul(h, leaves[3]), targets);
  };
  CHECK(mdplan::testing::grad_check(g) <= 1e-4);
}

TEST_CASE("random graphs agree with finite differences") {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    auto g = mdplan::testing::make_random_graph(seed);
    const double err = mdplan::testing::grad_check(g);
    INFO("seed " << seed << ": " << g.ops);
    CHECK(err <= 1e-4);
    worst = std::max(worst, err);
  }
  MESSAGE("worst relative error " << worst);
}

TEST_CASE("sgd step with unit gradient") {
  ParameterSet ps;
  Tensor w = ps.add("w", Tensor::scalar(1.0, true), ParamLabel::kShared);
  backward(scale(w, 1.0));
  OptimizerHyper h;
  h.kind = OptimizerHyper::Kind::kSgd;
  optimizer_step(ps, {ParamLabel::kShared}, 0.1, h);
  CHECK(ps.get("w").value.item() == doctest::Approx(0.9).epsilon(1e-15));
  CHECK_FALSE(ps.get("w").value.has_grad());
}

TEST_CASE("first AdamW step matches a hand calculation") {
  ParameterSet ps;
  Tensor w = ps.add("w", Tensor::from_data({1, 1}, {2.0}, true), ParamLabel::kShared);
  backward(scale(sum(w), 0.5));  // gradient 0.5
  OptimizerHyper h;
  h.weight_decay = 0.01;
  optimizer_step(ps, {ParamLabel::kShared}, 0.1, h);
  // m = 0.1 * 0.5, v = 0.001 * 0.25; bias corrections give mhat = 0.5 and
  // vhat = 0.25, so the Adam step is lr * 0.5 / (0.5 + eps).
  const double expected = (2.0 - 0.1 * 0.01 * 2.0) - 0.1 * 0.5 / (0.5 + 1e-8);
  CHECK(ps.get("w").value.item() == doctest::Approx(expected).epsilon(1e-14));
  CHECK(ps.get("w").step == 1);
  CHECK(ps.get("w").m[0] == doctest::Approx(0.05).epsilon(1e-15));
  CHECK(ps.get("w").v[0] == doctest::Approx(0.00025).epsilon(1e-12));
}

TEST_CASE("inactive labels stay bit-identical") {
  ParameterSet ps;
  Tensor a = ps.add("a", Tensor::from_data({2}, {0.1, 0.2}, true), ParamLabel::kShared);
  Tensor b = ps.add("b", Tensor::from_data({2}, {0.3, 0.4}, true), ParamLabel::kGenerationExpert);
  Tensor c = ps.add("c", Tensor::from_data({2}, {0.5, 0.6}, true), ParamLabel::kRefinementExpert);
  backward(sum(add(add(mul(a, a), mul(b, b)), mul(c, c))));
  optimizer_step(ps, {ParamLabel::kRefinementExpert}, 0.5, OptimizerHyper{});
  CHECK(ps.get("a").value.data()[0] == 0.1);
  CHECK(ps.get("a").value.data()[1] == 0.2);
  CHECK(ps.get("b").value.data()[0] == 0.3);
  CHECK(ps.get("b").value.data()[1] == 0.4);
  CHECK(ps.get("c").value.data()[0] != 0.5);
  CHECK(ps.get("a").m.empty());
}

TEST_CASE("an active parameter without a gradient is an error") {
  ParameterSet ps;
  ps.add("a", Tensor::from_data({1}, {1.0}, true), ParamLabel::kShared);
  CHECK_THROWS_AS(optimizer_step(ps, {ParamLabel::kShared}, 0.1, OptimizerHyper{}), EngineError);
}

TEST_CASE("gradient clipping bounds the global norm") {
  ParameterSet ps;
  Tensor w = ps.add("w", Tensor::from_data({2}, {0.0, 0.0}, true), ParamLabel::kShared);
  backward(sum(mul(w, Tensor::from_data({2}, {30.0, 40.0}))));  // norm 50
  OptimizerHyper h;
  h.kind = OptimizerHyper::Kind::kSgd;
  h.max_grad_norm = 5.0;
  optimizer_step(ps, {ParamLabel::kShared}, 1.0, h);
  CHECK(ps.get("w").value.data()[0] == doctest::Approx(-3.0).epsilon(1e-12));
  CHECK(ps.get("w").value.data()[1] == doctest::Approx(-4.0).epsilon(1e-12));
}

TEST_CASE("partition covers every parameter once") {
  ParameterSet ps;
  ps.add("x", Tensor::scalar(0.0), ParamLabel::kShared);
  ps.add("y", Tensor::scalar(0.0), ParamLabel::kGenerationExpert);
  const auto part = ps.partition();
  CHECK(part.size() == ps.size());
  CHECK(part.at("y") == ParamLabel::kGenerationExpert);
  CHECK_THROWS(ps.add("x", Tensor::scalar(1.0), ParamLabel::kShared));
  CHECK(parse_label(label_name(ParamLabel::kRefinementExpert)) == ParamLabel::kRefinementExpert);
}
