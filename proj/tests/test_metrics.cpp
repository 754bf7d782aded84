#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <utility>
#include <vector>

#include "oodlab/metrics.hpp"
#include "oodlab/rng.hpp"

#include "oracles.hpp"

using namespace oodlab::metrics;

namespace {

// Integer-grid scores make cross-partition ties common on purpose.
std::vector<double> tie_heavy_scores(std::size_t n, oodlab::rng::SplitMix64& gen) {
  std::vector<double> out(n);
  for (auto& v : out) v = static_cast<double>(gen.below(10)) / 2.0;
  return out;
}

}  // namespace

TEST_CASE("accuracy hand values") {
  CHECK(accuracy({1, 2, 3}, {1, 2, 3}) == 1.0);
  CHECK(accuracy({0, 1}, {0, 0}) == 0.5);
  CHECK(accuracy({0, 1, 2}, {2, 1, 0}) == doctest::Approx(1.0 / 3).epsilon(1e-15));
  CHECK(accuracy({1, 0}, {0, 0}) == accuracy({0, 1}, {0, 0}));  // order-free
  CHECK_THROWS(accuracy({}, {}));
  CHECK_THROWS(accuracy({1}, {1, 2}));
}

TEST_CASE("auroc hand values") {
  CHECK(auroc({3, 2}, {1, 0}) == 1.0);
  CHECK(auroc({1}, {1}) == 0.5);
  CHECK(auroc({0, 2}, {1, 3}) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK_THROWS(auroc({}, {1.0}));
  CHECK_THROWS(auroc({1.0}, {}));
}

TEST_CASE("auroc is tie-symmetric") {
  auto gen = oodlab::rng::SplitMix64(71);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = tie_heavy_scores(30 + gen.below(40), gen);
    const auto b = tie_heavy_scores(30 + gen.below(40), gen);
    CHECK(auroc(a, b) + auroc(b, a) == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("auroc matches the all-pairs oracle on tie-heavy inputs") {
  auto gen = oodlab::rng::SplitMix64(73);
  for (int trial = 0; trial < 30; ++trial) {
    const auto known = tie_heavy_scores(1 + gen.below(200), gen);
    const auto unknown = tie_heavy_scores(1 + gen.below(200), gen);
    CHECK(std::abs(auroc(known, unknown) - oracle::auroc(known, unknown)) < 1e-12);
  }
}

TEST_CASE("fpr at tpr hand values") {
  const std::vector<double> known = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  const std::vector<double> unknown = {0.5, 1.5, 0.2, 5};
  CHECK(fpr_at_tpr(known, unknown) == doctest::Approx(0.5).epsilon(1e-15));

  CHECK(fpr_at_tpr({5, 6, 7}, {1, 2}) == 0.0);  // unknowns all below

  // Equal multisets: every unknown clears the chosen threshold.
  CHECK(fpr_at_tpr({1, 2, 3}, {1, 2, 3}) == 1.0);
  CHECK_THROWS(fpr_at_tpr({}, {1.0}));
}

TEST_CASE("fpr at tpr matches the exhaustive sweep oracle") {
  auto gen = oodlab::rng::SplitMix64(79);
  for (int trial = 0; trial < 30; ++trial) {
    const auto known = tie_heavy_scores(1 + gen.below(200), gen);
    const auto unknown = tie_heavy_scores(1 + gen.below(200), gen);
    for (double target : {0.5, 0.9, 0.95, 1.0}) {
      CHECK(fpr_at_tpr(known, unknown, target) ==
            oracle::fpr_at_tpr(known, unknown, target));
    }
  }
}

TEST_CASE("oscr hand values") {
  // Every known sample correct and above every unknown.
  CHECK(oscr({{5, true}, {4, true}}, {1, 2}) == doctest::Approx(1.0).epsilon(1e-15));

  CHECK(oscr({{3, true}, {1, false}}, {2}) == doctest::Approx(0.5).epsilon(1e-15));

  CHECK(oscr({{5, false}, {4, false}}, {1, 2}) == 0.0);
  CHECK_THROWS(oscr({}, {1.0}));
  CHECK_THROWS(oscr({{1.0, true}}, {}));
}

TEST_CASE("oscr matches the naive sweep oracle on tie-heavy inputs") {
  auto gen = oodlab::rng::SplitMix64(83);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<std::pair<double, bool>> known;
    for (double s : tie_heavy_scores(1 + gen.below(150), gen)) {
      known.emplace_back(s, gen.uniform() < 0.8);
    }
    const auto unknown = tie_heavy_scores(1 + gen.below(150), gen);
    CHECK(std::abs(oscr(known, unknown) - oracle::oscr(known, unknown)) < 1e-12);
  }
}

TEST_CASE("oscr equals auroc for all-correct tie-free scores, never exceeds it") {
  auto gen = oodlab::rng::SplitMix64(89);

  SUBCASE("tie-free equality") {
    std::vector<double> ks, us;
    std::vector<std::pair<double, bool>> known;
    for (int i = 0; i < 40; ++i) {
      ks.push_back(gen.normal());
      known.emplace_back(ks.back(), true);
      us.push_back(gen.normal());
    }
    CHECK(std::abs(oscr(known, us) - auroc(ks, us)) < 1e-12);
  }

  SUBCASE("ties keep oscr at or below auroc") {
    for (int trial = 0; trial < 10; ++trial) {
      const auto ks = tie_heavy_scores(50, gen);
      const auto us = tie_heavy_scores(50, gen);
      std::vector<std::pair<double, bool>> known;
      for (double s : ks) known.emplace_back(s, true);
      CHECK(oscr(known, us) <= auroc(ks, us) + 1e-12);
    }
  }
}

TEST_CASE("metrics are rank statistics: monotone transforms change nothing") {
  auto gen = oodlab::rng::SplitMix64(97);
  const auto ks = tie_heavy_scores(60, gen);
  const auto us = tie_heavy_scores(60, gen);
  std::vector<std::pair<double, bool>> known;
  for (double s : ks) known.emplace_back(s, gen.uniform() < 0.7);

  const auto transform = [](double x) { return x * x * x + 2.0 * x + 1.0; };
  std::vector<double> kt, ut;
  std::vector<std::pair<double, bool>> known_t;
  for (double s : ks) kt.push_back(transform(s));
  for (double s : us) ut.push_back(transform(s));
  for (const auto& [s, c] : known) known_t.emplace_back(transform(s), c);

  CHECK(auroc(ks, us) == auroc(kt, ut));
  CHECK(fpr_at_tpr(ks, us) == fpr_at_tpr(kt, ut));
  CHECK(oscr(known, us) == oscr(known_t, ut));
}
