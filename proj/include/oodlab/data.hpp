#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "oodlab/tensor.hpp"

namespace oodlab::data {

// Label value standing in for "not one of the known classes".
inline constexpr int kUnknownLabel = -1;

struct Dataset {
  Mat inputs;               // n x d
  std::vector<int> labels;  // class indices < class_count
  int class_count = 0;

  Eigen::Index size() const { return inputs.rows(); }
};

// Seeded partition of class labels into a known set and the super-unknown
// remainder.
struct SplitSpec {
  std::vector<int> known_classes;
  std::vector<int> unknown_classes;
  std::uint64_t seed = 0;
};

// Known labels remapped to 0..N-1; unknown labels replaced by kUnknownLabel.
// Unknown-class training samples are dropped: they are unavailable by
// construction of the task.
struct SplitDatasets {
  Dataset train_known;
  Dataset test_known;
  Dataset test_unknown;
};

// Gaussian blobs: class means placed deterministically from the seed on a
// sphere of radius `separation` (directions rejection-sampled for pairwise
// angle > 15 degrees), samples = mean + isotropic Gaussian(noise).
Dataset gen_blobs(int num_classes, int dim, int per_class, double separation,
                  double noise, std::uint64_t seed);

// IDX parse failure, carrying the byte offset of the offending field.
struct IdxError : std::runtime_error {
  IdxError(const std::string& msg, std::size_t at)
      : std::runtime_error(msg + " (offset " + std::to_string(at) + ")"),
        offset(at) {}
  std::size_t offset;
};

// Big-endian IDX pair: images magic 0x00000803, labels magic 0x00000801.
// Pixels land in [0,1] (/255), flattened row-major to d = rows * cols.
Dataset load_idx(const std::string& images_path, const std::string& labels_path);

// Seeded shuffle of 0..K-1; the first n_known classes are known.
SplitSpec make_split(int num_classes, int n_known, std::uint64_t seed);

SplitDatasets apply_split(const Dataset& train, const Dataset& test,
                          const SplitSpec& spec);

// Writes the hand-built IDX fixtures used by the format tests:
// fixture-images-idx3-ubyte / fixture-labels-idx1-ubyte (a valid 2-image,
// 2x2 pair) and fixture-badmagic-idx3-ubyte (corrupt magic).
void write_idx_fixtures(const std::string& dir);

}  // namespace oodlab::data
