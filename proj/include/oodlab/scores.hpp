#pragma once

#include <Eigen/Dense>

#include "oodlab/tensor.hpp"

namespace oodlab::scores {

// All scores share one sign convention: higher = more likely known. The
// entropy- and GEN-style uncertainty measures are negated accordingly.

double msp(const Vec& probs);         // max_i p_i
double neg_entropy(const Vec& probs); // sum_i p_i log p_i, with 0 log 0 := 0
double gen(const Vec& probs, double gamma = 0.1);  // -sum_i p_i^g (1-p_i)^g
double max_logit(const Vec& logits);
double energy(const Vec& logits);     // logsumexp, max-shifted

// Penultimate activations are clipped at an empirical quantile of the
// training activations before logits are recomputed and energy-scored.
struct ReactCalib {
  double clip_threshold = 0.0;
};
ReactCalib react_fit(const Mat& train_features, double percentile = 0.9);
double react_score(const Vec& features, const Mat& last_weight,
                   const Mat& last_bias, const ReactCalib& calib);

// L1 norm of the last-layer weight gradient of the cross-entropy between
// uniform targets and the softmax output; closed form |p - u|_1 * |f|_1.
double grad_norm_score(const Vec& features, const Vec& probs);

// Energy penalized by a virtual logit: alpha_v times the feature residual
// outside the top-r principal subspace of the training features.
struct VimCalib {
  Vec feature_mean;
  Mat principal_basis;  // h x r, orthonormal columns
  double alpha_v = 0.0;
};
VimCalib vim_fit(const Mat& train_features, const Mat& train_logits, int subspace_dim);
double vim_score(const Vec& features, const Vec& logits, const VimCalib& calib);

struct Threshold {
  double tau = 0.0;
};

enum class Decision { Known, Unknown };

// Known iff score > tau (strict; a score exactly at the threshold is
// rejected as unknown).
Decision decide(double score, Threshold tau);

}  // namespace oodlab::scores
