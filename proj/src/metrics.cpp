#include "oodlab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace oodlab::metrics {

namespace {

void check_nonempty(std::size_t known, std::size_t unknown, const char* op) {
  if (known == 0 || unknown == 0) {
    throw std::invalid_argument(std::string(op) + ": both score sets must be nonempty");
  }
}

}  // namespace

double accuracy(const std::vector<int>& preds, const std::vector<int>& labels) {
  if (preds.size() != labels.size()) {
    throw std::invalid_argument("accuracy: length mismatch");
  }
  if (preds.empty()) {
    throw std::invalid_argument("accuracy: empty input");
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (preds[i] == labels[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(preds.size());
}

double auroc(const std::vector<double>& known_scores,
             const std::vector<double>& unknown_scores) {
  check_nonempty(known_scores.size(), unknown_scores.size(), "auroc");
  std::vector<double> u = unknown_scores;
  std::sort(u.begin(), u.end());
  // Wins plus half-ties per known sample; halves sum exactly in float64.
  double total = 0.0;
  for (double s : known_scores) {
    const auto lo = std::lower_bound(u.begin(), u.end(), s);
    const auto hi = std::upper_bound(lo, u.end(), s);
    const double wins = static_cast<double>(lo - u.begin());
    const double ties = static_cast<double>(hi - lo);
    total += wins + 0.5 * ties;
  }
  return total / (static_cast<double>(known_scores.size()) *
                  static_cast<double>(unknown_scores.size()));
}

double fpr_at_tpr(const std::vector<double>& known_scores,
                  const std::vector<double>& unknown_scores, double tpr_target) {
  check_nonempty(known_scores.size(), unknown_scores.size(), "fpr_at_tpr");
  const auto n_known = static_cast<double>(known_scores.size());
  const auto needed = static_cast<std::size_t>(std::ceil(tpr_target * n_known));
  if (needed == 0) return 0.0;

  // Largest tau with |{known : score >= tau}| >= needed is the needed-th
  // largest known score.
  std::vector<double> k = known_scores;
  std::sort(k.begin(), k.end(), std::greater<>());
  const double tau = k[needed - 1];

  std::size_t fp = 0;
  for (double s : unknown_scores) {
    if (s >= tau) ++fp;
  }
  return static_cast<double>(fp) / static_cast<double>(unknown_scores.size());
}

double oscr(const std::vector<std::pair<double, bool>>& known_score_correct,
            const std::vector<double>& unknown_scores) {
  check_nonempty(known_score_correct.size(), unknown_scores.size(), "oscr");

  std::vector<std::pair<double, bool>> k = known_score_correct;
  std::sort(k.begin(), k.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<double> u = unknown_scores;
  std::sort(u.begin(), u.end(), std::greater<>());

  std::vector<double> taus;
  taus.reserve(k.size() + u.size());
  for (const auto& [s, c] : k) taus.push_back(s);
  taus.insert(taus.end(), u.begin(), u.end());
  std::sort(taus.begin(), taus.end(), std::greater<>());
  taus.erase(std::unique(taus.begin(), taus.end()), taus.end());

  const double nk = static_cast<double>(k.size());
  const double nu = static_cast<double>(u.size());

  // Sweep thresholds downward, counting strictly-above samples with two
  // pointers; CCR and FPR are both nondecreasing along the sweep.
  double area = 0.0;
  double prev_fpr = 0.0, prev_ccr = 0.0;  // tau = +inf
  std::size_t ki = 0, ui = 0;
  std::size_t correct_above = 0;
  for (double tau : taus) {
    while (ki < k.size() && k[ki].first > tau) {
      if (k[ki].second) ++correct_above;
      ++ki;
    }
    while (ui < u.size() && u[ui] > tau) ++ui;
    const double fpr = static_cast<double>(ui) / nu;
    const double ccr = static_cast<double>(correct_above) / nk;
    area += (fpr - prev_fpr) * 0.5 * (ccr + prev_ccr);
    prev_fpr = fpr;
    prev_ccr = ccr;
  }
  // Horizontal extension to FPR = 1.
  area += (1.0 - prev_fpr) * prev_ccr;
  return area;
}

}  // namespace oodlab::metrics
