#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "oodlab/tensor.hpp"

namespace oodlab::model {

struct Architecture {
  int input_dim = 0;
  std::vector<int> hidden_dims;
  int num_classes = 0;
};

// Per-layer weight matrices (in x out) and 1 x out row biases. Immutable
// after training; safe for concurrent read during scoring.
struct ModelParams {
  Architecture arch;
  std::vector<Mat> weights;
  std::vector<Mat> biases;

  std::size_t layer_count() const { return weights.size(); }
  const Mat& last_weight() const { return weights.back(); }
  const Mat& last_bias() const { return biases.back(); }
};

// Glorot-uniform weights, zero biases, deterministic in the seed.
ModelParams init(const Architecture& arch, std::uint64_t seed);

// Parameters lifted into tensors: tape leaves for training, constants for
// inference.
struct ParamTensors {
  std::vector<nn::Tensor> weights;
  std::vector<nn::Tensor> biases;
};
ParamTensors as_leaves(nn::Tape& tape, const ModelParams& params);
ParamTensors as_constants(const ModelParams& params);

// features: post-activation penultimate layer (the input itself for a
// zero-hidden-layer model); probs == softmax(logits) row-wise.
struct ForwardOut {
  nn::Tensor features;
  nn::Tensor logits;
  nn::Tensor probs;
};

ForwardOut forward(const ParamTensors& params, const nn::Tensor& x);
ForwardOut forward(const ModelParams& params, const Mat& x);

// lr_min + 0.5 (lr0 - lr_min) (1 + cos(pi * epoch / total)).
double cosine_lr(int epoch, int total_epochs, double lr0, double lr_min);

struct SgdConfig {
  double momentum = 0.0;
  double weight_decay = 0.0;
};

// Velocity buffers, allocated lazily when momentum > 0.
struct SgdState {
  std::vector<Mat> vel_w;
  std::vector<Mat> vel_b;
};

// p <- p - lr * v with v = momentum * v + (g + weight_decay * p); plain
// p <- p - lr * g under the all-zero default config. Gradients are read
// from the leaves, so backward() must have run.
void sgd_step(ModelParams& params, const ParamTensors& leaves, double lr,
              const SgdConfig& cfg = {}, SgdState* state = nullptr);

// Text container, round-trips bit-exactly under float64 parse.
void save_weights(const ModelParams& params, const std::string& path);
ModelParams load_weights(const std::string& path);

}  // namespace oodlab::model
