#pragma once

// Brute-force reference implementations the tests compare against. Each is
// written for obviousness, not speed: triple loops, all-pairs counting, and
// exhaustive threshold sweeps.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "oodlab/tensor.hpp"

namespace oracle {

using oodlab::Mat;

// Central finite differences of a scalar function at x.
inline Mat fd_gradient(const std::function<double(const Mat&)>& f, Mat x,
                       double h = 1e-5) {
  Mat g(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      const double keep = x(i, j);
      x(i, j) = keep + h;
      const double up = f(x);
      x(i, j) = keep - h;
      const double down = f(x);
      x(i, j) = keep;
      g(i, j) = (up - down) / (2.0 * h);
    }
  }
  return g;
}

// max_ij |a - b| / (1 + |b|); the +1 keeps near-zero entries comparable.
inline double rel_error(const Mat& a, const Mat& b) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      const double d = std::abs(a(i, j) - b(i, j)) / (1.0 + std::abs(b(i, j)));
      worst = std::max(worst, d);
    }
  }
  return worst;
}

inline Mat matmul(const Mat& a, const Mat& b) {
  Mat c = Mat::Zero(a.rows(), b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      for (Eigen::Index k = 0; k < a.cols(); ++k) {
        c(i, j) += a(i, k) * b(k, j);
      }
    }
  }
  return c;
}

// Linear interpolation between order statistics at p in [0, 1].
inline double quantile(std::vector<double> v, double p) {
  if (v.empty()) throw std::invalid_argument("quantile: empty input");
  std::sort(v.begin(), v.end());
  const double pos = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= v.size()) return v.back();
  const double frac = pos - static_cast<double>(lo);
  return v[lo] + frac * (v[lo + 1] - v[lo]);
}

// All-pairs Mann-Whitney count, ties worth half a win.
inline double auroc(const std::vector<double>& known,
                    const std::vector<double>& unknown) {
  double wins = 0.0;
  for (double k : known) {
    for (double u : unknown) {
      if (k > u) {
        wins += 1.0;
      } else if (k == u) {
        wins += 0.5;
      }
    }
  }
  return wins / (static_cast<double>(known.size()) * static_cast<double>(unknown.size()));
}

// Exhaustive sweep: the largest candidate threshold (rule: score >= tau is
// accepted) that still accepts at least ceil(target * |known|) knowns; the
// false positive rate is read off at that threshold.
inline double fpr_at_tpr(const std::vector<double>& known,
                         const std::vector<double>& unknown, double target) {
  const auto needed = static_cast<std::size_t>(
      std::ceil(target * static_cast<double>(known.size())));
  std::vector<double> candidates = known;
  candidates.insert(candidates.end(), unknown.begin(), unknown.end());
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()),
                   candidates.end());

  double best_tau = -std::numeric_limits<double>::infinity();
  bool found = false;
  for (double tau : candidates) {
    std::size_t accepted = 0;
    for (double k : known) accepted += k >= tau ? 1 : 0;
    if (accepted >= needed && (!found || tau > best_tau)) {
      best_tau = tau;
      found = true;
    }
  }
  std::size_t fp = 0;
  for (double u : unknown) fp += u >= best_tau ? 1 : 0;
  return static_cast<double>(fp) / static_cast<double>(unknown.size());
}

// CCR-vs-FPR curve by recounting at every distinct threshold (rule: strict
// score > tau), trapezoid over FPR, flat extension out to FPR = 1.
inline double oscr(const std::vector<std::pair<double, bool>>& known,
                   const std::vector<double>& unknown) {
  std::vector<double> taus;
  for (const auto& [s, c] : known) taus.push_back(s);
  taus.insert(taus.end(), unknown.begin(), unknown.end());
  std::sort(taus.begin(), taus.end(), std::greater<>());
  taus.erase(std::unique(taus.begin(), taus.end()), taus.end());

  const double nk = static_cast<double>(known.size());
  const double nu = static_cast<double>(unknown.size());
  double area = 0.0;
  double prev_fpr = 0.0;
  double prev_ccr = 0.0;
  for (double tau : taus) {
    double correct = 0.0;
    for (const auto& [s, c] : known) correct += (c && s > tau) ? 1.0 : 0.0;
    double fp = 0.0;
    for (double u : unknown) fp += u > tau ? 1.0 : 0.0;
    const double ccr = correct / nk;
    const double fpr = fp / nu;
    area += (fpr - prev_fpr) * 0.5 * (ccr + prev_ccr);
    prev_fpr = fpr;
    prev_ccr = ccr;
  }
  area += (1.0 - prev_fpr) * prev_ccr;
  return area;
}

}  // namespace oracle
