#include "oodlab/tensor.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace oodlab::nn {

namespace {

Tape* tape_of(const Tensor& a, const Tensor& b) {
  if (a.tracked() && b.tracked() && a.tape() != b.tape()) {
    throw std::logic_error("tensor: operands recorded on different tapes");
  }
  return a.tracked() ? a.tape() : b.tape();
}

void check_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument(std::string(op) + ": shape mismatch (" +
                                std::to_string(a.rows()) + "x" +
                                std::to_string(a.cols()) + " vs " +
                                std::to_string(b.rows()) + "x" +
                                std::to_string(b.cols()) + ")");
  }
}

}  // namespace

const Mat& Tensor::grad() const {
  if (!tracked()) {
    throw std::logic_error("tensor: grad() on an untracked tensor");
  }
  return tape_->grad(node_);
}

Tensor Tape::leaf(Mat value) {
  return emit(std::move(value), PullFn{});
}

Tensor Tape::emit(Mat value, PullFn pull) {
  if (consumed_) {
    throw std::logic_error("tape: recording after backward()");
  }
  Node n;
  n.pull = std::move(pull);
  n.rows = value.rows();
  n.cols = value.cols();
  nodes_.push_back(std::move(n));
  return Tensor(std::move(value), this, static_cast<int>(nodes_.size()) - 1);
}

void Tape::accumulate(int node, const Mat& delta) {
  Node& n = nodes_[static_cast<std::size_t>(node)];
  if (!n.has_grad) {
    n.grad = delta;
    n.has_grad = true;
  } else {
    n.grad += delta;
  }
}

const Mat& Tape::grad(int node) const {
  if (!consumed_) {
    throw std::logic_error("tape: grad requested before backward()");
  }
  Node& n = nodes_[static_cast<std::size_t>(node)];
  if (!n.has_grad) {
    // Node unreachable from the root: its gradient is identically zero.
    n.grad = Mat::Zero(n.rows, n.cols);
    n.has_grad = true;
  }
  return n.grad;
}

void Tape::backward(const Tensor& root) {
  if (consumed_) {
    throw std::logic_error("tape: backward() called twice");
  }
  if (!root.tracked() || root.tape() != this) {
    throw std::logic_error("tape: backward root is not recorded on this tape");
  }
  if (root.rows() != 1 || root.cols() != 1) {
    throw std::logic_error("tape: backward root must be a 1x1 scalar");
  }
  consumed_ = true;
  accumulate(root.node(), Mat::Ones(1, 1));
  for (int i = root.node(); i >= 0; --i) {
    Node& n = nodes_[static_cast<std::size_t>(i)];
    if (n.has_grad && n.pull) {
      n.pull(*this, n.grad);
    }
  }
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.cols() != b.rows()) {
    throw std::invalid_argument(
        "matmul: inner dimensions disagree (" + std::to_string(a.cols()) +
        " vs " + std::to_string(b.rows()) + ")");
  }
  Mat out = a.value() * b.value();
  Tape* tape = tape_of(a, b);
  if (!tape) return Tensor(std::move(out));

  const int ia = a.tracked() ? a.node() : -1;
  const int ib = b.tracked() ? b.node() : -1;
  const Mat av = a.value();
  const Mat bv = b.value();
  return tape->emit(std::move(out), [ia, ib, av, bv](Tape& t, const Mat& g) {
    if (ia >= 0) t.accumulate(ia, g * bv.transpose());
    if (ib >= 0) t.accumulate(ib, av.transpose() * g);
  });
}

Tensor add(const Tensor& a, const Tensor& b) {
  const bool row_bias = b.rows() == 1 && a.rows() > 1 && a.cols() == b.cols();
  if (!row_bias) check_same_shape(a, b, "add");

  Mat out = row_bias ? Mat(a.value().rowwise() + b.value().row(0))
                     : Mat(a.value() + b.value());
  Tape* tape = tape_of(a, b);
  if (!tape) return Tensor(std::move(out));

  const int ia = a.tracked() ? a.node() : -1;
  const int ib = b.tracked() ? b.node() : -1;
  return tape->emit(std::move(out), [ia, ib, row_bias](Tape& t, const Mat& g) {
    if (ia >= 0) t.accumulate(ia, g);
    if (ib >= 0) t.accumulate(ib, row_bias ? Mat(g.colwise().sum()) : g);
  });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "sub");
  Mat out = a.value() - b.value();
  Tape* tape = tape_of(a, b);
  if (!tape) return Tensor(std::move(out));

  const int ia = a.tracked() ? a.node() : -1;
  const int ib = b.tracked() ? b.node() : -1;
  return tape->emit(std::move(out), [ia, ib](Tape& t, const Mat& g) {
    if (ia >= 0) t.accumulate(ia, g);
    if (ib >= 0) t.accumulate(ib, Mat(-g));
  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "mul");
  Mat out = a.value().cwiseProduct(b.value());
  Tape* tape = tape_of(a, b);
  if (!tape) return Tensor(std::move(out));

  const int ia = a.tracked() ? a.node() : -1;
  const int ib = b.tracked() ? b.node() : -1;
  const Mat av = a.value();
  const Mat bv = b.value();
  return tape->emit(std::move(out), [ia, ib, av, bv](Tape& t, const Mat& g) {
    if (ia >= 0) t.accumulate(ia, g.cwiseProduct(bv));
    if (ib >= 0) t.accumulate(ib, g.cwiseProduct(av));
  });
}

Tensor mul(const Tensor& a, double s) {
  Mat out = a.value() * s;
  if (!a.tracked()) return Tensor(std::move(out));
  const int ia = a.node();
  return a.tape()->emit(std::move(out), [ia, s](Tape& t, const Mat& g) {
    t.accumulate(ia, Mat(g * s));
  });
}

Tensor relu(const Tensor& x) {
  Mat out = x.value().cwiseMax(0.0);
  if (!x.tracked()) return Tensor(std::move(out));
  const int ix = x.node();
  const Mat mask = (x.value().array() > 0.0).cast<double>().matrix();
  return x.tape()->emit(std::move(out), [ix, mask](Tape& t, const Mat& g) {
    t.accumulate(ix, g.cwiseProduct(mask));
  });
}

Tensor log(const Tensor& x) {
  const Mat clamped = x.value().cwiseMax(kLogClamp);
  Mat out = clamped.array().log().matrix();
  if (!x.tracked()) return Tensor(std::move(out));
  const int ix = x.node();
  return x.tape()->emit(std::move(out), [ix, clamped](Tape& t, const Mat& g) {
    t.accumulate(ix, g.cwiseQuotient(clamped));
  });
}

Tensor exp(const Tensor& x) {
  Mat out = x.value().array().exp().matrix();
  if (!x.tracked()) return Tensor(std::move(out));
  const int ix = x.node();
  const Mat ov = out;
  return x.tape()->emit(std::move(out), [ix, ov](Tape& t, const Mat& g) {
    t.accumulate(ix, g.cwiseProduct(ov));
  });
}

Tensor sqrt(const Tensor& x) {
  Mat out = x.value().array().sqrt().matrix();
  if (!x.tracked()) return Tensor(std::move(out));
  const int ix = x.node();
  const Mat ov = out;
  return x.tape()->emit(std::move(out), [ix, ov](Tape& t, const Mat& g) {
    t.accumulate(ix, Mat(0.5 * g.cwiseQuotient(ov)));
  });
}

Tensor sum(const Tensor& x) {
  Mat out(1, 1);
  out(0, 0) = x.value().sum();
  if (!x.tracked()) return Tensor(std::move(out));
  const int ix = x.node();
  const Eigen::Index r = x.rows(), c = x.cols();
  return x.tape()->emit(std::move(out), [ix, r, c](Tape& t, const Mat& g) {
    t.accumulate(ix, Mat(Mat::Constant(r, c, g(0, 0))));
  });
}

Tensor mean(const Tensor& x) {
  Mat out(1, 1);
  out(0, 0) = x.value().mean();
  if (!x.tracked()) return Tensor(std::move(out));
  const int ix = x.node();
  const Eigen::Index r = x.rows(), c = x.cols();
  const double inv = 1.0 / static_cast<double>(r * c);
  return x.tape()->emit(std::move(out), [ix, r, c, inv](Tape& t, const Mat& g) {
    t.accumulate(ix, Mat(Mat::Constant(r, c, g(0, 0) * inv)));
  });
}

Tensor rowmax(const Tensor& x) {
  const Eigen::Index n = x.rows(), c = x.cols();
  Mat out(n, 1);
  std::vector<int> argmax(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    int k = 0;
    for (Eigen::Index j = 1; j < c; ++j) {
      if (x.value()(i, j) > x.value()(i, k)) k = static_cast<int>(j);
    }
    argmax[static_cast<std::size_t>(i)] = k;
    out(i, 0) = x.value()(i, k);
  }
  if (!x.tracked()) return Tensor(std::move(out));
  const int ix = x.node();
  return x.tape()->emit(std::move(out),
                        [ix, argmax, n, c](Tape& t, const Mat& g) {
    Mat d = Mat::Zero(n, c);
    for (Eigen::Index i = 0; i < n; ++i) {
      d(i, argmax[static_cast<std::size_t>(i)]) = g(i, 0);
    }
    t.accumulate(ix, d);
  });
}

Tensor softmax(const Tensor& logits) {
  if (!logits.value().allFinite()) {
    throw std::domain_error("softmax: non-finite input");
  }
  const Eigen::Index n = logits.rows(), c = logits.cols();
  Mat out(n, c);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double m = logits.value().row(i).maxCoeff();
    Eigen::RowVectorXd e = (logits.value().row(i).array() - m).exp();
    out.row(i) = e / e.sum();
  }
  if (!logits.tracked()) return Tensor(std::move(out));
  const int ix = logits.node();
  const Mat p = out;
  return logits.tape()->emit(std::move(out), [ix, p](Tape& t, const Mat& g) {
    Mat d(p.rows(), p.cols());
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
      const double dot = g.row(i).dot(p.row(i));
      d.row(i) = (p.row(i).array() * (g.row(i).array() - dot)).matrix();
    }
    t.accumulate(ix, d);
  });
}

Tensor gather(const Tensor& x, const std::vector<int>& cols) {
  const Eigen::Index n = x.rows(), c = x.cols();
  if (static_cast<Eigen::Index>(cols.size()) != n) {
    throw std::invalid_argument("gather: one column index per row required");
  }
  Mat out(n, 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int j = cols[static_cast<std::size_t>(i)];
    if (j < 0 || j >= c) {
      throw std::invalid_argument("gather: column index out of range");
    }
    out(i, 0) = x.value()(i, j);
  }
  if (!x.tracked()) return Tensor(std::move(out));
  const int ix = x.node();
  const std::vector<int> idx = cols;
  return x.tape()->emit(std::move(out), [ix, idx, n, c](Tape& t, const Mat& g) {
    Mat d = Mat::Zero(n, c);
    for (Eigen::Index i = 0; i < n; ++i) {
      d(i, idx[static_cast<std::size_t>(i)]) = g(i, 0);
    }
    t.accumulate(ix, d);
  });
}

}  // namespace oodlab::nn
