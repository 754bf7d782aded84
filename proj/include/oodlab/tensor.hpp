#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace oodlab {

// Row-major to match the on-disk and in-memory layout used everywhere.
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vec = Eigen::VectorXd;

namespace nn {

class Tape;

// Dense float64 value, optionally tracked on a gradient tape. A tensor
// without a tape is a plain immutable value and may be shared freely;
// tracked tensors must not outlive their tape.
class Tensor {
 public:
  Tensor() = default;
  Tensor(Mat value) : value_(std::move(value)) {}  // constant (untracked)

  const Mat& value() const { return value_; }
  Eigen::Index rows() const { return value_.rows(); }
  Eigen::Index cols() const { return value_.cols(); }

  bool tracked() const { return tape_ != nullptr; }
  Tape* tape() const { return tape_; }
  int node() const { return node_; }

  // d(root)/d(this), valid once backward() has run on the tape.
  const Mat& grad() const;

 private:
  friend class Tape;
  Tensor(Mat value, Tape* tape, int node)
      : value_(std::move(value)), tape_(tape), node_(node) {}

  Mat value_;
  Tape* tape_ = nullptr;
  int node_ = -1;
};

// Records operations in execution order (parents always precede children)
// and replays them once in reverse to propagate gradients. Single-use:
// one backward() per recording.
class Tape {
 public:
  using PullFn = std::function<void(Tape&, const Mat&)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Registers a differentiable leaf (e.g. a model parameter).
  Tensor leaf(Mat value);

  // Runs reverse-mode accumulation from a scalar root. Errors if the root
  // is not a tracked 1x1 tensor or if this tape was already consumed.
  void backward(const Tensor& root);

  bool consumed() const { return consumed_; }
  std::size_t size() const { return nodes_.size(); }

  // Internal API used by the op free functions.
  Tensor emit(Mat value, PullFn pull);
  void accumulate(int node, const Mat& delta);
  const Mat& grad(int node) const;

 private:
  struct Node {
    PullFn pull;  // pushes this node's grad into its parents
    Mat grad;
    Eigen::Index rows = 0;
    Eigen::Index cols = 0;
    bool has_grad = false;
  };

  mutable std::vector<Node> nodes_;
  bool consumed_ = false;
};

// ---------------------------------------------------------------------------
// Op set (fixed): matmul, add (+row-bias broadcast), sub, mul (elementwise
// and by scalar), relu, log (clamped), exp, sqrt, sum, mean, rowmax,
// softmax, gather. Each op records itself when any input is tracked.
// ---------------------------------------------------------------------------

Tensor matmul(const Tensor& a, const Tensor& b);

// Same-shape add, or b as a 1xC row bias broadcast over the rows of a.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, double s);

Tensor relu(const Tensor& x);

// log(max(x, 1e-12)); the clamp keeps -log p finite for vanishing
// probabilities without affecting desk-scale optima.
Tensor log(const Tensor& x);
inline constexpr double kLogClamp = 1e-12;

Tensor exp(const Tensor& x);
Tensor sqrt(const Tensor& x);

Tensor sum(const Tensor& x);   // all elements -> 1x1
Tensor mean(const Tensor& x);  // all elements -> 1x1

// Per-row max -> nx1. Gradient routes to the first (lowest-index) max.
Tensor rowmax(const Tensor& x);

// Row-wise softmax with per-row max subtraction. Non-finite input is a
// numeric error.
Tensor softmax(const Tensor& logits);

// out(i, 0) = x(i, cols[i])
Tensor gather(const Tensor& x, const std::vector<int>& cols);

}  // namespace nn
}  // namespace oodlab
