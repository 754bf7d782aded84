#pragma once

#include <vector>

#include "oodlab/model.hpp"
#include "oodlab/tensor.hpp"

namespace oodlab::losses {

struct LSConfig {
  double alpha = 0.1;  // mass moved off the true class, in [0, 1]
};

enum class AlsStrategy {
  OnlyCorrect,  // penalty restricted to currently correct predictions
  RampAll,      // penalty on all rows, weight ramped over ramp_epochs
};

struct ALSConfig {
  double lambda = 5.0;
  AlsStrategy strategy = AlsStrategy::OnlyCorrect;
  int ramp_epochs = 0;  // RampAll only; 0 means full weight from epoch 0
};

// Mean over rows of -log p[target].
nn::Tensor cross_entropy(const nn::Tensor& probs, const std::vector<int>& targets);

// (1 - alpha) at true_index, alpha / (N - 1) elsewhere.
Vec smooth_targets(int num_classes, double alpha, int true_index);

// Mean over rows of -sum_i ty_i log p_i with ty from smooth_targets.
nn::Tensor ls_loss(const nn::Tensor& probs, const std::vector<int>& targets,
                   const LSConfig& cfg);

// Standard deviation of the non-maximal entries of a probability row;
// argmax ties break toward the lowest index. Plain evaluation, no tape.
double nmpc_penalty(const Vec& prob_row);

// Cross-entropy plus lambda_eff times the mean non-max-probability
// standard deviation over eligible rows (zero when no row is eligible).
nn::Tensor als_loss(const model::ForwardOut& fwd, const std::vector<int>& targets,
                    const ALSConfig& cfg, int epoch);

// min(e / T_e, 1) * lambda; lambda when T_e == 0.
double lambda_schedule(int epoch, int ramp_epochs, double lambda);

// Effective penalty weight for a config at an epoch (OnlyCorrect is flat).
double effective_lambda(const ALSConfig& cfg, int epoch);

}  // namespace oodlab::losses
