#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "oodlab/data.hpp"
#include "oodlab/losses.hpp"
#include "oodlab/model.hpp"

namespace oodlab::harness {

// Malformed or inconsistent config file; the CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BlobsSpec {
  int classes = 10;
  int dim = 16;
  int train_per_class = 100;
  int test_per_class = 50;
  double separation = 10.0;
  double noise = 1.0;
  std::uint64_t seed = 1;
};

// Pre-decompressed IDX files, train and test pairs.
struct IdxSpec {
  std::string train_images;
  std::string train_labels;
  std::string test_images;
  std::string test_labels;
};

enum class LossKind { Ce, Ls, Als };

struct ExperimentConfig {
  std::string name = "experiment";
  std::variant<BlobsSpec, IdxSpec> dataset = BlobsSpec{};

  std::vector<int> hidden = {32, 32};
  std::uint64_t init_seed = 1;
  std::uint64_t shuffle_seed = 1;

  LossKind loss = LossKind::Ce;
  double alpha = 0.1;  // ls
  losses::ALSConfig als;

  int epochs = 40;
  int batch_size = 32;
  double lr = 0.1;
  double lr_min = 0.001;
  double momentum = 0.0;
  double weight_decay = 0.0;

  int n_known = 6;
  std::vector<std::uint64_t> split_seeds = {0, 1, 2, 3, 4};
  std::vector<std::string> score_fns = {"msp",    "neg_entropy", "gen",
                                        "max_logit", "energy",   "react",
                                        "grad_norm", "vim"};

  double react_percentile = 0.9;
  int vim_dim = 0;  // 0 picks half the feature width at fit time

  std::string out_dir = "out";
};

// Flat `key = value` lines, `#` comments, comma-separated lists. Unknown
// keys and unparsable values raise ConfigError.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// OODLAB_OUT overrides the configured output directory when set.
std::string resolve_out_dir(const ExperimentConfig& cfg);

struct RunRecord {
  std::vector<double> epoch_loss;    // mean batch loss per completed epoch
  std::vector<double> epoch_lambda;  // penalty weight in force that epoch
  bool diverged = false;
  std::string weights_path;  // empty until run_experiment persists them
};

struct TrainResult {
  model::ModelParams params;
  RunRecord record;
};

// Mini-batch SGD with a per-epoch seeded shuffle and cosine-annealed lr.
// Aborts with the divergence flag as soon as a batch loss is non-finite.
TrainResult train(const ExperimentConfig& cfg, const data::SplitDatasets& split);

// One CSV row: metrics of a single score function on one split. The
// OOD metrics are absent when the split has no unknown test samples.
struct MetricRow {
  std::string score_fn;
  double accuracy = 0.0;
  std::optional<double> auroc;
  std::optional<double> fpr95;
  std::optional<double> oscr;
};

struct EvalReport {
  std::vector<MetricRow> rows;
};

// Scores every test sample under each named score function and computes
// accuracy, AUROC, FPR@TPR95, and OSCR. Calibration-dependent scores
// (react, vim) fit on train_known features only, before any test data
// is touched.
EvalReport evaluate(const model::ModelParams& params,
                    const data::SplitDatasets& split,
                    const std::vector<std::string>& score_fns,
                    double react_percentile = 0.9, int vim_dim = 0);

struct SplitResult {
  std::uint64_t seed = 0;
  RunRecord record;
  EvalReport report;  // empty when the split diverged
};

struct AggregateReport {
  std::vector<SplitResult> splits;
  bool any_diverged = false;
  std::string csv_path;
};

// Trains and evaluates every split seed, writes per-split weights and the
// experiment CSV (per-split rows plus mean/std summary rows over the
// splits that completed).
AggregateReport run_experiment(const ExperimentConfig& cfg);

// Re-scores saved weights on the split built from the first seed in the
// config, writing `<name>-eval.csv`. No training.
AggregateReport run_eval(const std::string& weights_path,
                         const ExperimentConfig& cfg);

}  // namespace oodlab::harness
