#include "oodlab/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "oodlab/rng.hpp"

namespace oodlab::data {

namespace {

constexpr double kMinPairwiseAngleDeg = 15.0;

// Unit directions with pairwise angle > 15 degrees, rejection-sampled.
std::vector<Vec> sample_directions(int count, int dim, rng::SplitMix64& gen) {
  const double cos_limit = std::cos(kMinPairwiseAngleDeg * 3.14159265358979323846 / 180.0);
  std::vector<Vec> dirs;
  dirs.reserve(static_cast<std::size_t>(count));
  int attempts = 0;
  while (static_cast<int>(dirs.size()) < count) {
    if (++attempts > 100000) {
      throw std::runtime_error("gen_blobs: cannot place class means with the "
                               "required pairwise separation");
    }
    Vec d(dim);
    for (Eigen::Index i = 0; i < dim; ++i) d(i) = gen.normal();
    const double norm = d.norm();
    if (norm < 1e-12) continue;
    d /= norm;
    bool ok = true;
    for (const Vec& prev : dirs) {
      if (prev.dot(d) > cos_limit) {
        ok = false;
        break;
      }
    }
    if (ok) dirs.push_back(std::move(d));
  }
  return dirs;
}

std::uint32_t read_be32(std::ifstream& in, std::size_t offset, const char* what) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (in.gcount() != 4) {
    throw IdxError(std::string("idx: truncated ") + what, offset);
  }
  return (static_cast<std::uint32_t>(b[0]) << 24) |
         (static_cast<std::uint32_t>(b[1]) << 16) |
         (static_cast<std::uint32_t>(b[2]) << 8) |
         static_cast<std::uint32_t>(b[3]);
}

void write_be32(std::ofstream& out, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v >> 24),
                              static_cast<unsigned char>(v >> 16),
                              static_cast<unsigned char>(v >> 8),
                              static_cast<unsigned char>(v)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

Dataset filter_classes(const Dataset& src, const std::vector<int>& classes,
                       bool remap, int out_class_count) {
  std::vector<int> remap_table(static_cast<std::size_t>(src.class_count), -1);
  for (std::size_t i = 0; i < classes.size(); ++i) {
    remap_table[static_cast<std::size_t>(classes[i])] = static_cast<int>(i);
  }
  std::vector<Eigen::Index> rows;
  for (Eigen::Index i = 0; i < src.size(); ++i) {
    if (remap_table[static_cast<std::size_t>(src.labels[static_cast<std::size_t>(i)])] >= 0) {
      rows.push_back(i);
    }
  }
  Dataset out;
  out.class_count = out_class_count;
  out.inputs.resize(static_cast<Eigen::Index>(rows.size()), src.inputs.cols());
  out.labels.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.inputs.row(static_cast<Eigen::Index>(i)) = src.inputs.row(rows[i]);
    const int lbl = src.labels[static_cast<std::size_t>(rows[i])];
    out.labels.push_back(remap ? remap_table[static_cast<std::size_t>(lbl)]
                               : kUnknownLabel);
  }
  return out;
}

}  // namespace

Dataset gen_blobs(int num_classes, int dim, int per_class, double separation,
                  double noise, std::uint64_t seed) {
  if (num_classes < 2 || dim < 2) {
    throw std::invalid_argument("gen_blobs: need K >= 2 and d >= 2");
  }
  if (per_class < 1) {
    throw std::invalid_argument("gen_blobs: need at least one sample per class");
  }
  auto mean_gen = rng::make(seed, rng::Stream::DataMeans);
  const std::vector<Vec> dirs = sample_directions(num_classes, dim, mean_gen);

  auto sample_gen = rng::make(seed, rng::Stream::DataSamples);
  Dataset out;
  out.class_count = num_classes;
  out.inputs.resize(static_cast<Eigen::Index>(num_classes) * per_class, dim);
  out.labels.reserve(static_cast<std::size_t>(num_classes) * per_class);
  Eigen::Index row = 0;
  for (int k = 0; k < num_classes; ++k) {
    const Vec mean = separation * dirs[static_cast<std::size_t>(k)];
    for (int s = 0; s < per_class; ++s, ++row) {
      for (Eigen::Index j = 0; j < dim; ++j) {
        out.inputs(row, j) = mean(j) + noise * sample_gen.normal();
      }
      out.labels.push_back(k);
    }
  }
  return out;
}

Dataset load_idx(const std::string& images_path, const std::string& labels_path) {
  std::ifstream img(images_path, std::ios::binary);
  if (!img) throw std::runtime_error("load_idx: cannot open " + images_path);
  std::ifstream lbl(labels_path, std::ios::binary);
  if (!lbl) throw std::runtime_error("load_idx: cannot open " + labels_path);

  const std::uint32_t img_magic = read_be32(img, 0, "image magic");
  if (img_magic != 0x00000803u) {
    throw IdxError("idx: bad image magic", 0);
  }
  const std::uint32_t n = read_be32(img, 4, "image count");
  const std::uint32_t rows = read_be32(img, 8, "row count");
  const std::uint32_t cols = read_be32(img, 12, "column count");

  const std::uint32_t lbl_magic = read_be32(lbl, 0, "label magic");
  if (lbl_magic != 0x00000801u) {
    throw IdxError("idx: bad label magic", 0);
  }
  const std::uint32_t n_lbl = read_be32(lbl, 4, "label count");
  if (n_lbl != n) {
    throw IdxError("idx: image/label count mismatch", 4);
  }

  const std::size_t pixels = static_cast<std::size_t>(rows) * cols;
  Dataset out;
  out.inputs.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(pixels));
  out.labels.reserve(n);

  std::vector<unsigned char> buf(pixels);
  for (std::uint32_t i = 0; i < n; ++i) {
    img.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(pixels));
    if (img.gcount() != static_cast<std::streamsize>(pixels)) {
      throw IdxError("idx: truncated pixel payload",
                     16 + static_cast<std::size_t>(i) * pixels +
                         static_cast<std::size_t>(img.gcount()));
    }
    for (std::size_t j = 0; j < pixels; ++j) {
      out.inputs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          static_cast<double>(buf[j]) / 255.0;
    }
  }
  int max_label = -1;
  for (std::uint32_t i = 0; i < n; ++i) {
    unsigned char b;
    lbl.read(reinterpret_cast<char*>(&b), 1);
    if (lbl.gcount() != 1) {
      throw IdxError("idx: truncated label payload", 8 + i);
    }
    out.labels.push_back(static_cast<int>(b));
    max_label = std::max(max_label, static_cast<int>(b));
  }
  out.class_count = max_label + 1;
  return out;
}

SplitSpec make_split(int num_classes, int n_known, std::uint64_t seed) {
  if (n_known < 1 || n_known >= num_classes) {
    throw std::invalid_argument("make_split: need 1 <= n_known < K");
  }
  std::vector<int> order(static_cast<std::size_t>(num_classes));
  std::iota(order.begin(), order.end(), 0);
  auto gen = rng::make(seed, rng::Stream::Split);
  gen.shuffle(order);
  SplitSpec spec;
  spec.seed = seed;
  spec.known_classes.assign(order.begin(), order.begin() + n_known);
  spec.unknown_classes.assign(order.begin() + n_known, order.end());
  return spec;
}

SplitDatasets apply_split(const Dataset& train, const Dataset& test,
                          const SplitSpec& spec) {
  for (int c : spec.known_classes) {
    if (c < 0 || c >= train.class_count) {
      throw std::invalid_argument("apply_split: split class outside dataset classes");
    }
  }
  const int n_known = static_cast<int>(spec.known_classes.size());
  SplitDatasets out;
  out.train_known = filter_classes(train, spec.known_classes, true, n_known);
  out.test_known = filter_classes(test, spec.known_classes, true, n_known);
  out.test_unknown = filter_classes(test, spec.unknown_classes, false, n_known);
  return out;
}

void write_idx_fixtures(const std::string& dir) {
  std::filesystem::create_directories(dir);
  const auto path = [&dir](const char* name) {
    return (std::filesystem::path(dir) / name).string();
  };

  // Two 2x2 images with pixels [0,255,128,0] and [1,2,3,4]; labels 7 and 2.
  {
    std::ofstream out(path("fixture-images-idx3-ubyte"), std::ios::binary);
    write_be32(out, 0x00000803u);
    write_be32(out, 2);
    write_be32(out, 2);
    write_be32(out, 2);
    const unsigned char px[8] = {0, 255, 128, 0, 1, 2, 3, 4};
    out.write(reinterpret_cast<const char*>(px), sizeof(px));
  }
  {
    std::ofstream out(path("fixture-labels-idx1-ubyte"), std::ios::binary);
    write_be32(out, 0x00000801u);
    write_be32(out, 2);
    const unsigned char lb[2] = {7, 2};
    out.write(reinterpret_cast<const char*>(lb), sizeof(lb));
  }
  // Same payload as the image fixture but with magic 0x00000802.
  {
    std::ofstream out(path("fixture-badmagic-idx3-ubyte"), std::ios::binary);
    write_be32(out, 0x00000802u);
    write_be32(out, 2);
    write_be32(out, 2);
    write_be32(out, 2);
    const unsigned char px[8] = {0, 255, 128, 0, 1, 2, 3, 4};
    out.write(reinterpret_cast<const char*>(px), sizeof(px));
  }
}

}  // namespace oodlab::data
