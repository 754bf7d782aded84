#include "oodlab/model.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "oodlab/rng.hpp"

namespace oodlab::model {

namespace {

std::vector<std::pair<int, int>> layer_dims(const Architecture& arch) {
  if (arch.input_dim < 1 || arch.num_classes < 2) {
    throw std::invalid_argument("architecture: need input_dim >= 1 and num_classes >= 2");
  }
  for (int h : arch.hidden_dims) {
    if (h < 1) throw std::invalid_argument("architecture: hidden dims must be >= 1");
  }
  std::vector<std::pair<int, int>> dims;
  int in = arch.input_dim;
  for (int h : arch.hidden_dims) {
    dims.emplace_back(in, h);
    in = h;
  }
  dims.emplace_back(in, arch.num_classes);
  return dims;
}

}  // namespace

ModelParams init(const Architecture& arch, std::uint64_t seed) {
  ModelParams p;
  p.arch = arch;
  auto gen = rng::make(seed, rng::Stream::Init);
  for (auto [fan_in, fan_out] : layer_dims(arch)) {
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    Mat w(fan_in, fan_out);
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      for (Eigen::Index j = 0; j < w.cols(); ++j) {
        w(i, j) = gen.uniform(-bound, bound);
      }
    }
    p.weights.push_back(std::move(w));
    p.biases.push_back(Mat::Zero(1, fan_out));
  }
  return p;
}

ParamTensors as_leaves(nn::Tape& tape, const ModelParams& params) {
  ParamTensors t;
  for (std::size_t i = 0; i < params.layer_count(); ++i) {
    t.weights.push_back(tape.leaf(params.weights[i]));
    t.biases.push_back(tape.leaf(params.biases[i]));
  }
  return t;
}

ParamTensors as_constants(const ModelParams& params) {
  ParamTensors t;
  for (std::size_t i = 0; i < params.layer_count(); ++i) {
    t.weights.emplace_back(params.weights[i]);
    t.biases.emplace_back(params.biases[i]);
  }
  return t;
}

ForwardOut forward(const ParamTensors& params, const nn::Tensor& x) {
  if (params.weights.empty()) {
    throw std::invalid_argument("forward: empty parameter set");
  }
  if (x.cols() != params.weights.front().rows()) {
    throw std::invalid_argument("forward: input dim mismatch");
  }
  nn::Tensor h = x;
  const std::size_t n_layers = params.weights.size();
  for (std::size_t i = 0; i + 1 < n_layers; ++i) {
    h = nn::relu(nn::add(nn::matmul(h, params.weights[i]), params.biases[i]));
  }
  ForwardOut out;
  out.features = h;
  out.logits = nn::add(nn::matmul(h, params.weights.back()), params.biases.back());
  out.probs = nn::softmax(out.logits);
  return out;
}

ForwardOut forward(const ModelParams& params, const Mat& x) {
  return forward(as_constants(params), nn::Tensor(x));
}

double cosine_lr(int epoch, int total_epochs, double lr0, double lr_min) {
  if (total_epochs <= 0) return lr0;
  const double t = static_cast<double>(epoch) / static_cast<double>(total_epochs);
  return lr_min + 0.5 * (lr0 - lr_min) * (1.0 + std::cos(3.14159265358979323846 * t));
}

void sgd_step(ModelParams& params, const ParamTensors& leaves, double lr,
              const SgdConfig& cfg, SgdState* state) {
  const std::size_t n = params.layer_count();
  if (leaves.weights.size() != n || leaves.biases.size() != n) {
    throw std::logic_error("sgd_step: leaf/parameter count mismatch");
  }
  const bool use_momentum = cfg.momentum != 0.0;
  if (use_momentum && state == nullptr) {
    throw std::logic_error("sgd_step: momentum requires an SgdState");
  }
  if (use_momentum && state->vel_w.empty()) {
    for (std::size_t i = 0; i < n; ++i) {
      state->vel_w.push_back(Mat::Zero(params.weights[i].rows(), params.weights[i].cols()));
      state->vel_b.push_back(Mat::Zero(params.biases[i].rows(), params.biases[i].cols()));
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    // grad() throws if backward() has not populated the leaves.
    Mat gw = leaves.weights[i].grad();
    Mat gb = leaves.biases[i].grad();
    if (cfg.weight_decay != 0.0) {
      gw += cfg.weight_decay * params.weights[i];
      gb += cfg.weight_decay * params.biases[i];
    }
    if (use_momentum) {
      state->vel_w[i] = cfg.momentum * state->vel_w[i] + gw;
      state->vel_b[i] = cfg.momentum * state->vel_b[i] + gb;
      params.weights[i] -= lr * state->vel_w[i];
      params.biases[i] -= lr * state->vel_b[i];
    } else {
      params.weights[i] -= lr * gw;
      params.biases[i] -= lr * gb;
    }
  }
}

void save_weights(const ModelParams& params, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_weights: cannot open " + path);
  out << "OODLAB-WEIGHTS v1\n";
  char buf[40];
  for (std::size_t i = 0; i < params.layer_count(); ++i) {
    const Mat& w = params.weights[i];
    out << "layer " << i << " W " << w.rows() << " " << w.cols() << "\n";
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) {
        std::snprintf(buf, sizeof(buf), "%.17g", w(r, c));
        out << buf << (c + 1 == w.cols() ? "" : " ");
      }
      out << "\n";
    }
    const Mat& b = params.biases[i];
    out << "layer " << i << " b " << b.cols() << "\n";
    for (Eigen::Index c = 0; c < b.cols(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", b(0, c));
      out << buf << (c + 1 == b.cols() ? "" : " ");
    }
    out << "\n";
  }
  if (!out) throw std::runtime_error("save_weights: write failed for " + path);
}

ModelParams load_weights(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_weights: cannot open " + path);
  std::string header;
  std::getline(in, header);
  if (header != "OODLAB-WEIGHTS v1") {
    throw std::runtime_error("load_weights: bad header in " + path);
  }
  ModelParams p;
  std::string tok;
  while (in >> tok) {
    if (tok != "layer") throw std::runtime_error("load_weights: expected 'layer'");
    std::size_t idx;
    std::string kind;
    in >> idx >> kind;
    if (kind == "W") {
      Eigen::Index rows, cols;
      in >> rows >> cols;
      Mat w(rows, cols);
      for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
          if (!(in >> w(r, c))) throw std::runtime_error("load_weights: truncated W block");
        }
      }
      if (idx != p.weights.size()) throw std::runtime_error("load_weights: layer index out of order");
      p.weights.push_back(std::move(w));
    } else if (kind == "b") {
      Eigen::Index cols;
      in >> cols;
      Mat b(1, cols);
      for (Eigen::Index c = 0; c < cols; ++c) {
        if (!(in >> b(0, c))) throw std::runtime_error("load_weights: truncated b block");
      }
      if (idx != p.biases.size()) throw std::runtime_error("load_weights: layer index out of order");
      p.biases.push_back(std::move(b));
    } else {
      throw std::runtime_error("load_weights: expected W or b, got " + kind);
    }
  }
  if (p.weights.size() != p.biases.size() || p.weights.empty()) {
    throw std::runtime_error("load_weights: incomplete layer set");
  }
  p.arch.input_dim = static_cast<int>(p.weights.front().rows());
  for (std::size_t i = 0; i + 1 < p.weights.size(); ++i) {
    p.arch.hidden_dims.push_back(static_cast<int>(p.weights[i].cols()));
  }
  p.arch.num_classes = static_cast<int>(p.weights.back().cols());
  return p;
}

}  // namespace oodlab::model
