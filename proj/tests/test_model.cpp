#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>

#include "oodlab/data.hpp"
#include "oodlab/losses.hpp"
#include "oodlab/model.hpp"
#include "oodlab/rng.hpp"

using oodlab::Mat;
using namespace oodlab::model;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

bool bitwise_equal(const ModelParams& a, const ModelParams& b) {
  if (a.weights.size() != b.weights.size()) return false;
  for (std::size_t i = 0; i < a.weights.size(); ++i) {
    if (a.weights[i] != b.weights[i]) return false;
    if (a.biases[i] != b.biases[i]) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("init is deterministic, bounded, and bias-free") {
  const Architecture arch{8, {16, 4}, 3};
  const ModelParams p = init(arch, 42);
  const ModelParams q = init(arch, 42);
  CHECK(bitwise_equal(p, q));
  CHECK_FALSE(bitwise_equal(p, init(arch, 43)));

  const int dims[] = {8, 16, 4, 3};
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    const double bound = std::sqrt(6.0 / (dims[l] + dims[l + 1]));
    CHECK(p.weights[l].cwiseAbs().maxCoeff() <= bound);
    CHECK(p.biases[l].cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("init draws are centered") {
  const ModelParams p = init(Architecture{100, {}, 100}, 9);
  CHECK(std::abs(p.weights[0].mean()) < 0.01);
}

TEST_CASE("init rejects degenerate architectures") {
  CHECK_THROWS(init(Architecture{0, {}, 2}, 1));
  CHECK_THROWS(init(Architecture{4, {}, 1}, 1));
  CHECK_THROWS(init(Architecture{4, {0}, 2}, 1));
}

TEST_CASE("zero-hidden model reproduces the affine map") {
  ModelParams p;
  p.arch = Architecture{2, {}, 2};
  Mat w(2, 2);
  w << 1, 0, 0, 1;
  Mat b(1, 2);
  b << 0.5, -0.25;
  p.weights = {w};
  p.biases = {b};

  Mat x(3, 2);
  x << 1, 2, -3, 4, 0, 0;
  const ForwardOut out = forward(p, x);
  CHECK(out.features.value() == x);  // features are the input itself
  for (Eigen::Index i = 0; i < 3; ++i) {
    CHECK(out.logits.value()(i, 0) == x(i, 0) + 0.5);
    CHECK(out.logits.value()(i, 1) == x(i, 1) - 0.25);
  }
}

TEST_CASE("probs rows sum to one and share argmax with logits") {
  const Architecture arch{5, {8}, 4};
  const ModelParams p = init(arch, 3);
  auto gen = oodlab::rng::SplitMix64(17);
  Mat x(6, 5);
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i / 5, i % 5) = gen.normal();

  const ForwardOut out = forward(p, x);
  const Mat& probs = out.probs.value();
  const Mat& logits = out.logits.value();
  for (Eigen::Index i = 0; i < probs.rows(); ++i) {
    CHECK(std::abs(probs.row(i).sum() - 1.0) < 1e-12);
    Eigen::Index pa = 0, la = 0;
    probs.row(i).maxCoeff(&pa);
    logits.row(i).maxCoeff(&la);
    CHECK(pa == la);
  }
}

TEST_CASE("forward is deterministic bit-for-bit") {
  const ModelParams p = init(Architecture{4, {6}, 3}, 5);
  auto gen = oodlab::rng::SplitMix64(23);
  Mat x(4, 4);
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i / 4, i % 4) = gen.normal();
  const ForwardOut a = forward(p, x);
  const ForwardOut b = forward(p, x);
  CHECK(a.features.value() == b.features.value());
  CHECK(a.logits.value() == b.logits.value());
  CHECK(a.probs.value() == b.probs.value());
}

TEST_CASE("cosine schedule endpoints and midpoint") {
  CHECK(cosine_lr(0, 10, 0.1, 0.001) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(cosine_lr(10, 10, 0.1, 0.001) == doctest::Approx(0.001).epsilon(1e-15));
  CHECK(cosine_lr(5, 10, 0.1, 0.0) == doctest::Approx(0.05).epsilon(1e-12));
}

TEST_CASE("sgd hand cases") {
  ModelParams p;
  p.arch = Architecture{1, {}, 2};
  p.weights = {Mat::Constant(1, 2, 1.0)};
  p.biases = {Mat::Zero(1, 2)};

  SUBCASE("lr = 0 leaves parameters unchanged") {
    oodlab::nn::Tape tape;
    const ParamTensors leaves = as_leaves(tape, p);
    tape.backward(oodlab::nn::sum(leaves.weights[0]));
    const ModelParams before = p;
    sgd_step(p, leaves, 0.0);
    CHECK(bitwise_equal(p, before));
  }

  SUBCASE("w = 1, g = 2, lr = 0.1 gives 0.8") {
    oodlab::nn::Tape tape;
    const ParamTensors leaves = as_leaves(tape, p);
    tape.backward(oodlab::nn::sum(oodlab::nn::mul(leaves.weights[0], 2.0)));
    sgd_step(p, leaves, 0.1);
    CHECK(p.weights[0](0, 0) == doctest::Approx(0.8).epsilon(1e-15));
  }

  SUBCASE("gradients must be populated first") {
    oodlab::nn::Tape tape;
    const ParamTensors leaves = as_leaves(tape, p);
    CHECK_THROWS(sgd_step(p, leaves, 0.1));
  }
}

TEST_CASE("cross-entropy on separable blobs: loss falls every step, accuracy hits 1") {
  const auto blobs = oodlab::data::gen_blobs(2, 4, 25, 8.0, 0.5, 11);
  ModelParams p = init(Architecture{4, {}, 2}, 1);

  double prev = 1e300;
  for (int step = 0; step < 100; ++step) {
    oodlab::nn::Tape tape;
    const ParamTensors leaves = as_leaves(tape, p);
    const ForwardOut out = forward(leaves, oodlab::nn::Tensor(blobs.inputs));
    const auto loss = oodlab::losses::cross_entropy(out.probs, blobs.labels);
    const double value = loss.value()(0, 0);
    CHECK(value < prev);
    prev = value;
    tape.backward(loss);
    sgd_step(p, leaves, 0.1);
  }

  const ForwardOut out = forward(p, blobs.inputs);
  int correct = 0;
  for (Eigen::Index i = 0; i < blobs.size(); ++i) {
    Eigen::Index arg = 0;
    out.logits.value().row(i).maxCoeff(&arg);
    correct += static_cast<int>(arg) == blobs.labels[static_cast<std::size_t>(i)];
  }
  CHECK(correct == blobs.size());
}

TEST_CASE("weights round-trip bit-exactly through the text format") {
  const Architecture arch{3, {5}, 4};
  ModelParams p = init(arch, 77);
  p.weights[0](0, 0) = 1.0 / 3.0;  // not representable in short decimal
  p.biases[1](0, 2) = -1e-17;

  const std::string path = temp_path("oodlab-roundtrip.weights");
  save_weights(p, path);
  const ModelParams q = load_weights(path);
  CHECK(q.arch.input_dim == 3);
  CHECK(q.arch.hidden_dims == std::vector<int>{5});
  CHECK(q.arch.num_classes == 4);
  CHECK(bitwise_equal(p, q));
  std::filesystem::remove(path);
}

TEST_CASE("weight loading rejects malformed files") {
  const std::string path = temp_path("oodlab-badweights.txt");

  SUBCASE("wrong header") {
    std::FILE* f = std::fopen(path.c_str(), "w");
    std::fputs("NOT-WEIGHTS v9\n", f);
    std::fclose(f);
    CHECK_THROWS(load_weights(path));
  }
  SUBCASE("truncated payload") {
    std::FILE* f = std::fopen(path.c_str(), "w");
    std::fputs("OODLAB-WEIGHTS v1\nlayer 0 W 2 2\n1.0 2.0\n", f);
    std::fclose(f);
    CHECK_THROWS(load_weights(path));
  }
  std::filesystem::remove(path);
}
