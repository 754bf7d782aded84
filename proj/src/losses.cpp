#include "oodlab/losses.hpp"

#include <cmath>
#include <stdexcept>

namespace oodlab::losses {

namespace {

// Guard inside the penalty's sqrt so its gradient stays finite at zero
// variance; distorts the penalty by < 1e-12.
constexpr double kVarGuard = 1e-24;

int argmax_row(const Mat& m, Eigen::Index row) {
  int k = 0;
  for (Eigen::Index j = 1; j < m.cols(); ++j) {
    if (m(row, j) > m(row, k)) k = static_cast<int>(j);
  }
  return k;
}

void check_targets(const nn::Tensor& probs, const std::vector<int>& targets) {
  if (static_cast<Eigen::Index>(targets.size()) != probs.rows()) {
    throw std::invalid_argument("loss: one target per probability row required");
  }
  for (int t : targets) {
    if (t < 0 || t >= probs.cols()) {
      throw std::invalid_argument("loss: target index out of range");
    }
  }
}

}  // namespace

nn::Tensor cross_entropy(const nn::Tensor& probs, const std::vector<int>& targets) {
  check_targets(probs, targets);
  return nn::mul(nn::mean(nn::log(nn::gather(probs, targets))), -1.0);
}

Vec smooth_targets(int num_classes, double alpha, int true_index) {
  if (num_classes < 2) throw std::invalid_argument("smooth_targets: need N >= 2");
  if (alpha < 0.0 || alpha > 1.0) throw std::invalid_argument("smooth_targets: alpha in [0,1]");
  if (true_index < 0 || true_index >= num_classes) {
    throw std::invalid_argument("smooth_targets: true_index out of range");
  }
  Vec y = Vec::Constant(num_classes, alpha / (num_classes - 1));
  y(true_index) = 1.0 - alpha;
  return y;
}

nn::Tensor ls_loss(const nn::Tensor& probs, const std::vector<int>& targets,
                   const LSConfig& cfg) {
  check_targets(probs, targets);
  const Eigen::Index n = probs.rows(), c = probs.cols();
  Mat soft(n, c);
  for (Eigen::Index i = 0; i < n; ++i) {
    soft.row(i) = smooth_targets(static_cast<int>(c), cfg.alpha,
                                 targets[static_cast<std::size_t>(i)])
                      .transpose();
  }
  // -(1/n) sum_ij ty_ij log p_ij
  nn::Tensor weighted = nn::mul(nn::Tensor(soft), nn::log(probs));
  return nn::mul(nn::sum(weighted), -1.0 / static_cast<double>(n));
}

double nmpc_penalty(const Vec& prob_row) {
  const Eigen::Index n = prob_row.size();
  if (n < 2) throw std::invalid_argument("nmpc_penalty: need N >= 2");
  Eigen::Index k = 0;
  for (Eigen::Index j = 1; j < n; ++j) {
    if (prob_row(j) > prob_row(k)) k = j;
  }
  double mean = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (j != k) mean += prob_row(j);
  }
  mean /= static_cast<double>(n - 1);
  double var = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (j != k) {
      const double d = prob_row(j) - mean;
      var += d * d;
    }
  }
  var /= static_cast<double>(n - 1);
  return std::sqrt(var);
}

double lambda_schedule(int epoch, int ramp_epochs, double lambda) {
  if (epoch < 0) throw std::invalid_argument("lambda_schedule: epoch must be >= 0");
  if (ramp_epochs <= 0) return lambda;
  const double frac = static_cast<double>(epoch) / static_cast<double>(ramp_epochs);
  return (frac < 1.0 ? frac : 1.0) * lambda;
}

double effective_lambda(const ALSConfig& cfg, int epoch) {
  return cfg.strategy == AlsStrategy::RampAll
             ? lambda_schedule(epoch, cfg.ramp_epochs, cfg.lambda)
             : cfg.lambda;
}

nn::Tensor als_loss(const model::ForwardOut& fwd, const std::vector<int>& targets,
                    const ALSConfig& cfg, int epoch) {
  const nn::Tensor& probs = fwd.probs;
  check_targets(probs, targets);
  nn::Tensor ce = cross_entropy(probs, targets);

  const double lambda_eff = effective_lambda(cfg, epoch);
  if (lambda_eff == 0.0) return ce;  // bit-identical to the plain CE path

  const Eigen::Index n = probs.rows(), c = probs.cols();
  if (c < 2) throw std::invalid_argument("als_loss: need N >= 2 classes");

  // Eligibility and the non-max mask come from the current forward pass
  // and are constants of the graph (argmax is piecewise constant).
  Mat nonmax = Mat::Ones(n, c);
  Mat eligible = Mat::Zero(n, 1);
  int n_eligible = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const int k = argmax_row(probs.value(), i);
    nonmax(i, k) = 0.0;
    const bool ok = cfg.strategy == AlsStrategy::RampAll ||
                    k == targets[static_cast<std::size_t>(i)];
    if (ok) {
      eligible(i, 0) = 1.0;
      ++n_eligible;
    }
  }
  if (n_eligible == 0) return ce;

  const double inv_nm1 = 1.0 / static_cast<double>(c - 1);
  nn::Tensor ones_col(Mat::Ones(c, 1));
  nn::Tensor ones_row(Mat::Ones(1, c));

  // Per-row std of the non-max entries, all rows at once.
  nn::Tensor masked = nn::mul(probs, nn::Tensor(nonmax));
  nn::Tensor row_mean = nn::mul(nn::matmul(masked, ones_col), inv_nm1);   // n x 1
  nn::Tensor mean_full = nn::matmul(row_mean, ones_row);                  // n x c
  nn::Tensor dev = nn::mul(nn::sub(probs, mean_full), nn::Tensor(nonmax));
  nn::Tensor var = nn::mul(nn::matmul(nn::mul(dev, dev), ones_col), inv_nm1);
  nn::Tensor std_row = nn::sqrt(nn::add(var, nn::Tensor(Mat::Constant(n, 1, kVarGuard))));

  nn::Tensor penalty_sum = nn::sum(nn::mul(std_row, nn::Tensor(eligible)));
  nn::Tensor penalty_mean = nn::mul(penalty_sum, 1.0 / static_cast<double>(n_eligible));
  return nn::add(ce, nn::mul(penalty_mean, lambda_eff));
}

}  // namespace oodlab::losses
