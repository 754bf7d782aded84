#include "oodlab/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "oodlab/metrics.hpp"
#include "oodlab/rng.hpp"
#include "oodlab/scores.hpp"

namespace oodlab::harness {

namespace {

const std::set<std::string> kScoreNames = {
    "msp",    "neg_entropy", "gen",       "max_logit",
    "energy", "react",       "grad_norm", "vim"};

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& value, const std::string& key) {
  std::vector<std::string> out;
  if (trim(value).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = value.find(',', start);
    const std::string item =
        trim(comma == std::string::npos ? value.substr(start)
                                        : value.substr(start, comma - start));
    if (item.empty()) {
      throw ConfigError("config: empty list item in '" + key + "'");
    }
    out.push_back(item);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

long long parse_ll(const std::string& value, const std::string& key) {
  long long v = 0;
  const char* first = value.data();
  const char* last = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw ConfigError("config: '" + key + "' expects an integer, got '" + value + "'");
  }
  return v;
}

int parse_int(const std::string& value, const std::string& key) {
  return static_cast<int>(parse_ll(value, key));
}

std::uint64_t parse_u64(const std::string& value, const std::string& key) {
  std::uint64_t v = 0;
  const char* first = value.data();
  const char* last = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw ConfigError("config: '" + key + "' expects a non-negative integer, got '" +
                      value + "'");
  }
  return v;
}

double parse_double(const std::string& value, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: '" + key + "' expects a number, got '" + value + "'");
  }
}

void validate(const ExperimentConfig& cfg) {
  const auto fail = [](const std::string& msg) { throw ConfigError("config: " + msg); };
  if (cfg.name.empty() || cfg.name.find('/') != std::string::npos) {
    fail("'name' must be a nonempty filename stem");
  }
  for (int h : cfg.hidden) {
    if (h < 1) fail("'hidden' widths must be positive");
  }
  if (cfg.alpha < 0.0 || cfg.alpha > 1.0) fail("'alpha' must lie in [0, 1]");
  if (cfg.als.lambda < 0.0) fail("'lambda' must be non-negative");
  if (cfg.als.ramp_epochs < 0) fail("'ramp_epochs' must be non-negative");
  if (cfg.epochs < 0) fail("'epochs' must be non-negative");
  if (cfg.batch_size < 1) fail("'batch_size' must be positive");
  if (cfg.lr <= 0.0) fail("'lr' must be positive");
  if (cfg.lr_min < 0.0 || cfg.lr_min > cfg.lr) fail("'lr_min' must lie in [0, lr]");
  if (cfg.momentum < 0.0 || cfg.momentum >= 1.0) fail("'momentum' must lie in [0, 1)");
  if (cfg.weight_decay < 0.0) fail("'weight_decay' must be non-negative");
  if (cfg.n_known < 1) fail("'n_known' must be positive");
  if (cfg.split_seeds.empty()) fail("'split_seeds' must list at least one seed");
  if (cfg.score_fns.empty()) fail("'scores' must list at least one score function");
  for (const auto& fn : cfg.score_fns) {
    if (!kScoreNames.count(fn)) fail("unknown score function '" + fn + "'");
  }
  if (cfg.react_percentile < 0.0 || cfg.react_percentile > 1.0) {
    fail("'react_percentile' must lie in [0, 1]");
  }
  if (cfg.vim_dim < 0) fail("'vim_dim' must be non-negative");
  if (const auto* b = std::get_if<BlobsSpec>(&cfg.dataset)) {
    if (b->classes < 2) fail("'blobs_classes' must be at least 2");
    if (b->dim < 2) fail("'blobs_dim' must be at least 2");
    if (b->train_per_class < 1) fail("'blobs_train_per_class' must be positive");
    if (b->test_per_class < 1) fail("'blobs_test_per_class' must be positive");
    if (b->separation <= 0.0) fail("'blobs_separation' must be positive");
    if (b->noise < 0.0) fail("'blobs_noise' must be non-negative");
    if (cfg.n_known >= b->classes) fail("'n_known' must be below 'blobs_classes'");
  } else {
    const auto& i = std::get<IdxSpec>(cfg.dataset);
    if (i.train_images.empty() || i.train_labels.empty() || i.test_images.empty() ||
        i.test_labels.empty()) {
      fail("idx datasets need all four 'idx_*' paths");
    }
  }
}

std::pair<data::Dataset, data::Dataset> build_datasets(const ExperimentConfig& cfg) {
  if (const auto* b = std::get_if<BlobsSpec>(&cfg.dataset)) {
    // One generation covers train and test so the data itself is identical
    // across split seeds; rows are class-contiguous, so each class's block
    // splits cleanly into a train prefix and a test suffix.
    const int per = b->train_per_class + b->test_per_class;
    const data::Dataset all =
        data::gen_blobs(b->classes, b->dim, per, b->separation, b->noise, b->seed);
    data::Dataset train, test;
    train.class_count = test.class_count = b->classes;
    train.inputs.resize(static_cast<Eigen::Index>(b->classes) * b->train_per_class,
                        b->dim);
    test.inputs.resize(static_cast<Eigen::Index>(b->classes) * b->test_per_class,
                       b->dim);
    train.labels.reserve(static_cast<std::size_t>(train.inputs.rows()));
    test.labels.reserve(static_cast<std::size_t>(test.inputs.rows()));
    Eigen::Index tr = 0;
    Eigen::Index te = 0;
    for (int k = 0; k < b->classes; ++k) {
      const Eigen::Index base = static_cast<Eigen::Index>(k) * per;
      for (int s = 0; s < b->train_per_class; ++s, ++tr) {
        train.inputs.row(tr) = all.inputs.row(base + s);
        train.labels.push_back(k);
      }
      for (int s = 0; s < b->test_per_class; ++s, ++te) {
        test.inputs.row(te) = all.inputs.row(base + b->train_per_class + s);
        test.labels.push_back(k);
      }
    }
    return {std::move(train), std::move(test)};
  }
  const auto& i = std::get<IdxSpec>(cfg.dataset);
  data::Dataset train = data::load_idx(i.train_images, i.train_labels);
  data::Dataset test = data::load_idx(i.test_images, i.test_labels);
  const int classes = std::max(train.class_count, test.class_count);
  train.class_count = classes;
  test.class_count = classes;
  return {std::move(train), std::move(test)};
}

int argmax_row(const Mat& m, Eigen::Index row) {
  int best = 0;
  for (Eigen::Index j = 1; j < m.cols(); ++j) {
    if (m(row, j) > m(row, best)) best = static_cast<int>(j);
  }
  return best;
}

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string fmt_opt(const std::optional<double>& v) {
  return v ? fmt6(*v) : std::string();
}

struct Summary {
  double mean = 0.0;
  double stddev = 0.0;
  bool present = false;
};

Summary summarize(const std::vector<double>& values) {
  Summary s;
  if (values.empty()) return s;
  s.present = true;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) /
           static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : values) sq += (v - s.mean) * (v - s.mean);
  s.stddev = std::sqrt(sq / static_cast<double>(values.size()));
  return s;
}

void write_csv(const std::string& path, const ExperimentConfig& cfg,
               const AggregateReport& agg) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "split_seed,score_fn,accuracy,auroc,fpr95,oscr\n";
  for (const auto& split : agg.splits) {
    if (split.record.diverged) continue;
    for (const auto& row : split.report.rows) {
      out << split.seed << ',' << row.score_fn << ',' << fmt6(row.accuracy) << ','
          << fmt_opt(row.auroc) << ',' << fmt_opt(row.fpr95) << ','
          << fmt_opt(row.oscr) << '\n';
    }
  }
  // Summary rows aggregate over completed splits, per score function.
  bool any_complete = false;
  for (const auto& split : agg.splits) any_complete |= !split.record.diverged;
  if (!any_complete) return;

  for (const auto& fn : cfg.score_fns) {
    std::vector<double> acc, auc, fpr, osc;
    for (const auto& split : agg.splits) {
      if (split.record.diverged) continue;
      for (const auto& row : split.report.rows) {
        if (row.score_fn != fn) continue;
        acc.push_back(row.accuracy);
        if (row.auroc) auc.push_back(*row.auroc);
        if (row.fpr95) fpr.push_back(*row.fpr95);
        if (row.oscr) osc.push_back(*row.oscr);
        break;
      }
    }
    const Summary sa = summarize(acc);
    const Summary su = summarize(auc);
    const Summary sf = summarize(fpr);
    const Summary so = summarize(osc);
    const auto cell = [](const Summary& s, bool mean_row) {
      return s.present ? fmt6(mean_row ? s.mean : s.stddev) : std::string();
    };
    out << "mean," << fn << ',' << cell(sa, true) << ',' << cell(su, true) << ','
        << cell(sf, true) << ',' << cell(so, true) << '\n';
    out << "std," << fn << ',' << cell(sa, false) << ',' << cell(su, false) << ','
        << cell(sf, false) << ',' << cell(so, false) << '\n';
  }
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  BlobsSpec blobs;
  IdxSpec idx;
  std::string dataset_kind = "blobs";

  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("config line " + std::to_string(lineno) + ": missing key");
    }

    if (key == "name") {
      cfg.name = value;
    } else if (key == "dataset") {
      if (value != "blobs" && value != "idx") {
        throw ConfigError("config: 'dataset' must be 'blobs' or 'idx'");
      }
      dataset_kind = value;
    } else if (key == "blobs_classes") {
      blobs.classes = parse_int(value, key);
    } else if (key == "blobs_dim") {
      blobs.dim = parse_int(value, key);
    } else if (key == "blobs_train_per_class") {
      blobs.train_per_class = parse_int(value, key);
    } else if (key == "blobs_test_per_class") {
      blobs.test_per_class = parse_int(value, key);
    } else if (key == "blobs_separation") {
      blobs.separation = parse_double(value, key);
    } else if (key == "blobs_noise") {
      blobs.noise = parse_double(value, key);
    } else if (key == "blobs_seed") {
      blobs.seed = parse_u64(value, key);
    } else if (key == "idx_train_images") {
      idx.train_images = value;
    } else if (key == "idx_train_labels") {
      idx.train_labels = value;
    } else if (key == "idx_test_images") {
      idx.test_images = value;
    } else if (key == "idx_test_labels") {
      idx.test_labels = value;
    } else if (key == "hidden") {
      cfg.hidden.clear();
      for (const auto& item : split_list(value, key)) {
        cfg.hidden.push_back(parse_int(item, key));
      }
    } else if (key == "init_seed") {
      cfg.init_seed = parse_u64(value, key);
    } else if (key == "shuffle_seed") {
      cfg.shuffle_seed = parse_u64(value, key);
    } else if (key == "loss") {
      if (value == "ce") {
        cfg.loss = LossKind::Ce;
      } else if (value == "ls") {
        cfg.loss = LossKind::Ls;
      } else if (value == "als") {
        cfg.loss = LossKind::Als;
      } else {
        throw ConfigError("config: 'loss' must be one of ce, ls, als");
      }
    } else if (key == "alpha") {
      cfg.alpha = parse_double(value, key);
    } else if (key == "lambda") {
      cfg.als.lambda = parse_double(value, key);
    } else if (key == "strategy") {
      if (value == "only_corr") {
        cfg.als.strategy = losses::AlsStrategy::OnlyCorrect;
      } else if (value == "ramp_all") {
        cfg.als.strategy = losses::AlsStrategy::RampAll;
      } else {
        throw ConfigError("config: 'strategy' must be only_corr or ramp_all");
      }
    } else if (key == "ramp_epochs") {
      cfg.als.ramp_epochs = parse_int(value, key);
    } else if (key == "epochs") {
      cfg.epochs = parse_int(value, key);
    } else if (key == "batch_size") {
      cfg.batch_size = parse_int(value, key);
    } else if (key == "lr") {
      cfg.lr = parse_double(value, key);
    } else if (key == "lr_min") {
      cfg.lr_min = parse_double(value, key);
    } else if (key == "momentum") {
      cfg.momentum = parse_double(value, key);
    } else if (key == "weight_decay") {
      cfg.weight_decay = parse_double(value, key);
    } else if (key == "n_known") {
      cfg.n_known = parse_int(value, key);
    } else if (key == "split_seeds") {
      cfg.split_seeds.clear();
      for (const auto& item : split_list(value, key)) {
        cfg.split_seeds.push_back(parse_u64(item, key));
      }
    } else if (key == "scores") {
      cfg.score_fns = split_list(value, key);
    } else if (key == "react_percentile") {
      cfg.react_percentile = parse_double(value, key);
    } else if (key == "vim_dim") {
      cfg.vim_dim = parse_int(value, key);
    } else if (key == "out_dir") {
      cfg.out_dir = value;
    } else {
      throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" +
                        key + "'");
    }
  }

  if (dataset_kind == "blobs") {
    cfg.dataset = blobs;
  } else {
    cfg.dataset = idx;
  }
  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string resolve_out_dir(const ExperimentConfig& cfg) {
  if (const char* env = std::getenv("OODLAB_OUT"); env != nullptr && *env != '\0') {
    return env;
  }
  return cfg.out_dir;
}

TrainResult train(const ExperimentConfig& cfg, const data::SplitDatasets& split) {
  const data::Dataset& tr = split.train_known;
  if (tr.size() == 0) throw std::invalid_argument("train: empty training split");

  model::Architecture arch;
  arch.input_dim = static_cast<int>(tr.inputs.cols());
  arch.hidden_dims = cfg.hidden;
  arch.num_classes = tr.class_count;

  TrainResult out;
  out.params = model::init(arch, cfg.init_seed);

  auto shuffle_gen = rng::make(cfg.shuffle_seed, rng::Stream::Shuffle);
  const model::SgdConfig sgd_cfg{cfg.momentum, cfg.weight_decay};
  model::SgdState sgd_state;

  const Eigen::Index n = tr.size();
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double lr_e = model::cosine_lr(epoch, cfg.epochs, cfg.lr, cfg.lr_min);
    const double lam =
        cfg.loss == LossKind::Als ? losses::effective_lambda(cfg.als, epoch) : 0.0;
    shuffle_gen.shuffle(order);

    double loss_sum = 0.0;
    int batches = 0;
    for (Eigen::Index start = 0; start < n; start += cfg.batch_size) {
      const Eigen::Index bs = std::min<Eigen::Index>(cfg.batch_size, n - start);
      Mat xb(bs, tr.inputs.cols());
      std::vector<int> yb(static_cast<std::size_t>(bs));
      for (Eigen::Index i = 0; i < bs; ++i) {
        const int src = order[static_cast<std::size_t>(start + i)];
        xb.row(i) = tr.inputs.row(src);
        yb[static_cast<std::size_t>(i)] = tr.labels[static_cast<std::size_t>(src)];
      }

      nn::Tape tape;
      const model::ParamTensors leaves = model::as_leaves(tape, out.params);
      double value = 0.0;
      try {
        const model::ForwardOut fwd = model::forward(leaves, nn::Tensor(xb));
        nn::Tensor loss = [&] {
          switch (cfg.loss) {
            case LossKind::Ce:
              return losses::cross_entropy(fwd.probs, yb);
            case LossKind::Ls:
              return losses::ls_loss(fwd.probs, yb, losses::LSConfig{cfg.alpha});
            case LossKind::Als:
              return losses::als_loss(fwd, yb, cfg.als, epoch);
          }
          throw std::logic_error("train: unhandled loss kind");
        }();
        value = loss.value()(0, 0);
        if (std::isfinite(value)) {
          tape.backward(loss);
          model::sgd_step(out.params, leaves, lr_e, sgd_cfg, &sgd_state);
        }
      } catch (const std::domain_error&) {
        // Exploding weights surface as a non-finite softmax input one step
        // before the loss itself would; same failure, same flag.
        value = std::numeric_limits<double>::quiet_NaN();
      }
      if (!std::isfinite(value)) {
        out.record.diverged = true;
        out.record.epoch_lambda.push_back(lam);
        return out;
      }
      loss_sum += value;
      ++batches;
    }
    out.record.epoch_loss.push_back(loss_sum / batches);
    out.record.epoch_lambda.push_back(lam);
  }
  return out;
}

EvalReport evaluate(const model::ModelParams& params,
                    const data::SplitDatasets& split,
                    const std::vector<std::string>& score_fns,
                    double react_percentile, int vim_dim) {
  if (split.test_known.size() == 0) {
    throw std::invalid_argument("evaluate: empty known test split");
  }

  bool need_react = false;
  bool need_vim = false;
  for (const auto& fn : score_fns) {
    need_react |= fn == "react";
    need_vim |= fn == "vim";
  }

  // Calibration sees training data only; test passes come after.
  scores::ReactCalib react_calib;
  scores::VimCalib vim_calib;
  if (need_react || need_vim) {
    const model::ForwardOut train_fwd = model::forward(params, split.train_known.inputs);
    const Mat& train_features = train_fwd.features.value();
    const Mat& train_logits = train_fwd.logits.value();
    if (need_react) react_calib = scores::react_fit(train_features, react_percentile);
    if (need_vim) {
      const int r = vim_dim > 0
                        ? vim_dim
                        : std::max<int>(1, static_cast<int>(train_features.cols()) / 2);
      vim_calib = scores::vim_fit(train_features, train_logits, r);
    }
  }

  const model::ForwardOut known_fwd = model::forward(params, split.test_known.inputs);
  const Mat& known_features = known_fwd.features.value();
  const Mat& known_logits = known_fwd.logits.value();
  const Mat& known_probs = known_fwd.probs.value();

  const Eigen::Index n_known = split.test_known.size();
  std::vector<int> preds(static_cast<std::size_t>(n_known));
  for (Eigen::Index i = 0; i < n_known; ++i) {
    preds[static_cast<std::size_t>(i)] = argmax_row(known_logits, i);
  }
  const double acc = metrics::accuracy(preds, split.test_known.labels);

  const bool have_unknown = split.test_unknown.size() > 0;
  Mat unk_features, unk_logits, unk_probs;
  if (have_unknown) {
    const model::ForwardOut unk_fwd = model::forward(params, split.test_unknown.inputs);
    unk_features = unk_fwd.features.value();
    unk_logits = unk_fwd.logits.value();
    unk_probs = unk_fwd.probs.value();
  }

  const auto score_row = [&](const std::string& fn, const Mat& features,
                             const Mat& logits, const Mat& probs,
                             Eigen::Index i) -> double {
    if (fn == "msp") return scores::msp(probs.row(i).transpose());
    if (fn == "neg_entropy") return scores::neg_entropy(probs.row(i).transpose());
    if (fn == "gen") return scores::gen(probs.row(i).transpose());
    if (fn == "max_logit") return scores::max_logit(logits.row(i).transpose());
    if (fn == "energy") return scores::energy(logits.row(i).transpose());
    if (fn == "react") {
      return scores::react_score(features.row(i).transpose(), params.last_weight(),
                                 params.last_bias(), react_calib);
    }
    if (fn == "grad_norm") {
      return scores::grad_norm_score(features.row(i).transpose(),
                                     probs.row(i).transpose());
    }
    if (fn == "vim") {
      return scores::vim_score(features.row(i).transpose(), logits.row(i).transpose(),
                               vim_calib);
    }
    throw std::invalid_argument("evaluate: unknown score function '" + fn + "'");
  };

  EvalReport report;
  for (const auto& fn : score_fns) {
    MetricRow row;
    row.score_fn = fn;
    row.accuracy = acc;

    std::vector<std::pair<double, bool>> known_pairs;
    std::vector<double> known_scores;
    known_pairs.reserve(static_cast<std::size_t>(n_known));
    known_scores.reserve(static_cast<std::size_t>(n_known));
    for (Eigen::Index i = 0; i < n_known; ++i) {
      const double s = score_row(fn, known_features, known_logits, known_probs, i);
      const bool correct = preds[static_cast<std::size_t>(i)] ==
                           split.test_known.labels[static_cast<std::size_t>(i)];
      known_pairs.emplace_back(s, correct);
      known_scores.push_back(s);
    }
    if (have_unknown) {
      std::vector<double> unknown_scores;
      unknown_scores.reserve(static_cast<std::size_t>(split.test_unknown.size()));
      for (Eigen::Index i = 0; i < split.test_unknown.size(); ++i) {
        unknown_scores.push_back(score_row(fn, unk_features, unk_logits, unk_probs, i));
      }
      row.auroc = metrics::auroc(known_scores, unknown_scores);
      row.fpr95 = metrics::fpr_at_tpr(known_scores, unknown_scores);
      row.oscr = metrics::oscr(known_pairs, unknown_scores);
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

AggregateReport run_experiment(const ExperimentConfig& cfg) {
  const auto [train_ds, test_ds] = build_datasets(cfg);
  if (cfg.n_known >= train_ds.class_count) {
    throw ConfigError("config: 'n_known' must be below the dataset class count");
  }
  const std::string out_dir = resolve_out_dir(cfg);
  std::filesystem::create_directories(out_dir);

  AggregateReport agg;
  for (const std::uint64_t seed : cfg.split_seeds) {
    const data::SplitSpec spec = data::make_split(train_ds.class_count, cfg.n_known, seed);
    const data::SplitDatasets split = data::apply_split(train_ds, test_ds, spec);

    TrainResult result = train(cfg, split);
    SplitResult sr;
    sr.seed = seed;
    sr.record = std::move(result.record);
    if (sr.record.diverged) {
      agg.any_diverged = true;
    } else {
      const std::string wpath = out_dir + "/" + cfg.name + "-split" +
                                std::to_string(seed) + ".weights";
      model::save_weights(result.params, wpath);
      sr.record.weights_path = wpath;
      sr.report = evaluate(result.params, split, cfg.score_fns, cfg.react_percentile,
                           cfg.vim_dim);
    }
    agg.splits.push_back(std::move(sr));
  }

  agg.csv_path = out_dir + "/" + cfg.name + ".csv";
  write_csv(agg.csv_path, cfg, agg);
  return agg;
}

AggregateReport run_eval(const std::string& weights_path, const ExperimentConfig& cfg) {
  const model::ModelParams params = model::load_weights(weights_path);
  const auto [train_ds, test_ds] = build_datasets(cfg);
  if (cfg.n_known >= train_ds.class_count) {
    throw ConfigError("config: 'n_known' must be below the dataset class count");
  }
  if (params.arch.input_dim != static_cast<int>(train_ds.inputs.cols()) ||
      params.arch.num_classes != cfg.n_known) {
    throw ConfigError("config: saved weights do not match the configured dataset");
  }

  const std::uint64_t seed = cfg.split_seeds.front();
  const data::SplitSpec spec = data::make_split(train_ds.class_count, cfg.n_known, seed);
  const data::SplitDatasets split = data::apply_split(train_ds, test_ds, spec);

  AggregateReport agg;
  SplitResult sr;
  sr.seed = seed;
  sr.report = evaluate(params, split, cfg.score_fns, cfg.react_percentile, cfg.vim_dim);
  agg.splits.push_back(std::move(sr));

  const std::string out_dir = resolve_out_dir(cfg);
  std::filesystem::create_directories(out_dir);
  agg.csv_path = out_dir + "/" + cfg.name + "-eval.csv";
  write_csv(agg.csv_path, cfg, agg);
  return agg;
}

}  // namespace oodlab::harness
