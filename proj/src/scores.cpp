#include "oodlab/scores.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace oodlab::scores {

double msp(const Vec& probs) { return probs.maxCoeff(); }

double neg_entropy(const Vec& probs) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    const double p = probs(i);
    if (p > 0.0) s += p * std::log(p);
  }
  return s;
}

double gen(const Vec& probs, double gamma) {
  if (gamma <= 0.0 || gamma >= 1.0) {
    throw std::invalid_argument("gen: gamma must be in (0, 1)");
  }
  double s = 0.0;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    const double p = probs(i);
    s += std::pow(p, gamma) * std::pow(1.0 - p, gamma);
  }
  return -s;
}

double max_logit(const Vec& logits) { return logits.maxCoeff(); }

double energy(const Vec& logits) {
  const double m = logits.maxCoeff();
  double s = 0.0;
  for (Eigen::Index i = 0; i < logits.size(); ++i) {
    s += std::exp(logits(i) - m);
  }
  return m + std::log(s);
}

ReactCalib react_fit(const Mat& train_features, double percentile) {
  if (train_features.size() == 0) {
    throw std::invalid_argument("react_fit: empty training features");
  }
  if (percentile < 0.0 || percentile > 1.0) {
    throw std::invalid_argument("react_fit: percentile in [0, 1]");
  }
  std::vector<double> vals(train_features.data(),
                           train_features.data() + train_features.size());
  std::sort(vals.begin(), vals.end());
  // Linear interpolation between order statistics.
  const double pos = percentile * static_cast<double>(vals.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, vals.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return ReactCalib{vals[lo] + frac * (vals[hi] - vals[lo])};
}

double react_score(const Vec& features, const Mat& last_weight,
                   const Mat& last_bias, const ReactCalib& calib) {
  if (features.size() != last_weight.rows() || last_bias.cols() != last_weight.cols()) {
    throw std::invalid_argument("react_score: shape mismatch");
  }
  const Vec clipped = features.cwiseMin(calib.clip_threshold);
  const Vec logits = (clipped.transpose() * last_weight + last_bias.row(0)).transpose();
  return energy(logits);
}

double grad_norm_score(const Vec& features, const Vec& probs) {
  const double n = static_cast<double>(probs.size());
  const double p_dist = (probs.array() - 1.0 / n).abs().sum();
  return p_dist * features.array().abs().sum();
}

VimCalib vim_fit(const Mat& train_features, const Mat& train_logits, int subspace_dim) {
  const Eigen::Index n = train_features.rows();
  const Eigen::Index h = train_features.cols();
  if (subspace_dim < 1 || subspace_dim >= h) {
    throw std::invalid_argument("vim_fit: need 1 <= r < feature dim");
  }
  if (n < 2 || train_logits.rows() != n) {
    throw std::invalid_argument("vim_fit: need >= 2 samples with matching logits");
  }

  VimCalib calib;
  calib.feature_mean = train_features.colwise().mean().transpose();
  Mat centered = train_features.rowwise() - calib.feature_mean.transpose();
  const Mat cov = (centered.transpose() * centered) / static_cast<double>(n - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("vim_fit: covariance eigendecomposition failed");
  }
  // Eigenvalues ascend; the top-r principal directions are the last columns.
  calib.principal_basis = solver.eigenvectors().rightCols(subspace_dim);

  double residual_sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vec f = centered.row(i).transpose();
    residual_sum += (f - calib.principal_basis *
                             (calib.principal_basis.transpose() * f)).norm();
  }
  const double mean_residual = residual_sum / static_cast<double>(n);
  if (mean_residual < 1e-12) {
    throw std::runtime_error(
        "vim_fit: training features lie in the principal subspace "
        "(zero mean residual)");
  }
  double logit_sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    logit_sum += train_logits.row(i).maxCoeff();
  }
  const double mean_max_logit = logit_sum / static_cast<double>(n);
  if (mean_max_logit <= 0.0) {
    throw std::runtime_error("vim_fit: non-positive mean max logit");
  }
  calib.alpha_v = mean_max_logit / mean_residual;
  return calib;
}

double vim_score(const Vec& features, const Vec& logits, const VimCalib& calib) {
  if (features.size() != calib.feature_mean.size()) {
    throw std::invalid_argument("vim_score: feature dim mismatch");
  }
  const Vec f = features - calib.feature_mean;
  const double residual =
      (f - calib.principal_basis * (calib.principal_basis.transpose() * f)).norm();
  return energy(logits) - calib.alpha_v * residual;
}

Decision decide(double score, Threshold tau) {
  return score > tau.tau ? Decision::Known : Decision::Unknown;
}

}  // namespace oodlab::scores
