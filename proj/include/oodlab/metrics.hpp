#pragma once

#include <utility>
#include <vector>

namespace oodlab::metrics {

// Fraction of exact matches; labels must be known-class indices.
double accuracy(const std::vector<int>& preds, const std::vector<int>& labels);

// Probability that a random known sample outranks a random unknown sample,
// ties counted 0.5 (Mann-Whitney form).
double auroc(const std::vector<double>& known_scores,
             const std::vector<double>& unknown_scores);

// Fraction of unknown samples at or above the largest threshold that keeps
// at least ceil(tpr_target * |known|) known samples.
double fpr_at_tpr(const std::vector<double>& known_scores,
                  const std::vector<double>& unknown_scores,
                  double tpr_target = 0.95);

// Area under the correct-classification-rate vs false-positive-rate curve
// swept over all distinct scores from +inf downward (strict > counting),
// trapezoidal over FPR with horizontal extension to FPR = 0 and FPR = 1.
double oscr(const std::vector<std::pair<double, bool>>& known_score_correct,
            const std::vector<double>& unknown_scores);

}  // namespace oodlab::metrics
