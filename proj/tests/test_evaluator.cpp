#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

#include "smellnet/evaluator.hpp"
#include "smellnet/random.hpp"

using namespace smellnet;

namespace {

PredictionSet random_set(Rng& rng, std::size_t n, int levels) {
  PredictionSet p;
  for (std::size_t i = 0; i < n; ++i) {
    const bool label = rng.bernoulli(0.4);
    const double raw = rng.uniform01() + (label ? 0.25 : 0.0);
    p.scores.push_back(levels > 0 ? std::floor(raw * levels) / levels : raw);
    p.labels.push_back(label);
  }
  if (p.positives() == 0) p.labels[0] = true;
  if (p.negatives() == 0) p.labels[0] = false;
  return p;
}

double brute_auc(const PredictionSet& p) {
  double wins = 0;
  double pairs = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!p.labels[i]) continue;
    for (std::size_t j = 0; j < p.size(); ++j) {
      if (p.labels[j]) continue;
      pairs += 1;
      if (p.scores[i] > p.scores[j]) wins += 1;
      if (p.scores[i] == p.scores[j]) wins += 0.5;
    }
  }
  return wins / pairs;
}

double brute_ap(const PredictionSet& p) {
  std::set<double, std::greater<>> thresholds(p.scores.begin(), p.scores.end());
  const double positives = static_cast<double>(p.positives());
  double ap = 0;
  double prev_recall = 0;
  for (double t : thresholds) {
    double tp = 0, predicted = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p.scores[i] >= t) {
        predicted += 1;
        if (p.labels[i]) tp += 1;
      }
    }
    const double recall = tp / positives;
    ap += (recall - prev_recall) * (tp / predicted);
    prev_recall = recall;
  }
  return ap;
}

double student_t_density(double x, double nu) {
  const double c = std::exp(std::lgamma((nu + 1) / 2) - std::lgamma(nu / 2)) /
                   std::sqrt(nu * std::numbers::pi);
  return c * std::pow(1 + x * x / nu, -(nu + 1) / 2);
}

double integrated_two_sided_p(double t, double nu) {
  const int steps = 200000;
  const double a = 0;
  const double b = std::abs(t);
  const double h = (b - a) / steps;
  double sum = student_t_density(a, nu) + student_t_density(b, nu);
  for (int i = 1; i < steps; ++i) sum += student_t_density(a + i * h, nu) * (i % 2 ? 4 : 2);
  return 1 - 2 * (sum * h / 3);
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / n;
    my += y[i] / n;
  }
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace

TEST(Metrics, ConfusionAtThreshold) {
  const PredictionSet p{{0.9, 0.5, 0.49, 0.1, 0.7}, {true, false, true, false, true}};
  const Confusion c = confusion(p);
  EXPECT_EQ(c.tp, 2u);
  EXPECT_EQ(c.fp, 1u);
  EXPECT_EQ(c.fn, 1u);
  EXPECT_EQ(c.tn, 1u);
  const auto prf = precision_recall_f1(c);
  EXPECT_DOUBLE_EQ(prf.precision, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(prf.recall, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(prf.f1, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(accuracy(c), 0.6);
}

TEST(Metrics, ZeroDivisionsAreZero) {
  const auto prf = precision_recall_f1(Confusion{0, 0, 5, 3});
  EXPECT_EQ(prf.precision, 0.0);
  EXPECT_EQ(prf.recall, 0.0);
  EXPECT_EQ(prf.f1, 0.0);
  EXPECT_EQ(f1_from(0, 0), 0.0);
}

TEST(Metrics, AucMatchesPairCounting) {
  Rng rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = random_set(rng, 5 + rng.uniform_index(60), trial % 3 == 0 ? 4 : 0);
    EXPECT_NEAR(roc_auc(p), brute_auc(p), 1e-12) << trial;
  }
}

TEST(Metrics, AveragePrecisionMatchesThresholdSweep) {
  Rng rng(22);
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = random_set(rng, 5 + rng.uniform_index(60), trial % 3 == 0 ? 5 : 0);
    EXPECT_NEAR(average_precision(p), brute_ap(p), 1e-12) << trial;
  }
}

TEST(Metrics, RankingMetricsIgnoreMonotoneTransforms) {
  Rng rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    auto p = random_set(rng, 40, trial % 2 ? 6 : 0);
    auto q = p;
    for (auto& s : q.scores) s = 3.0 * std::exp(s) - 1.0;
    EXPECT_NEAR(roc_auc(p), roc_auc(q), 1e-12);
    EXPECT_NEAR(average_precision(p), average_precision(q), 1e-12);
  }
}

TEST(Metrics, MetricBoundsAndIdentity) {
  Rng rng(24);
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = random_set(rng, 30, 0);
    const auto m = evaluate(p);
    for (double v : {m.accuracy, m.auc, m.precision, m.recall, m.f1, m.avg_precision}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
    EXPECT_TRUE(m.f1_identity_holds());
    EXPECT_EQ(m.counts.total(), p.size());
  }
}

TEST(Metrics, PerfectAndReversedRankings) {
  const PredictionSet perfect{{0.9, 0.8, 0.2, 0.1}, {true, true, false, false}};
  EXPECT_DOUBLE_EQ(roc_auc(perfect), 1.0);
  EXPECT_DOUBLE_EQ(average_precision(perfect), 1.0);
  const PredictionSet reversed{{0.1, 0.2, 0.8, 0.9}, {true, true, false, false}};
  EXPECT_DOUBLE_EQ(roc_auc(reversed), 0.0);
  const PredictionSet flat{{0.5, 0.5, 0.5, 0.5}, {true, false, false, false}};
  EXPECT_DOUBLE_EQ(roc_auc(flat), 0.5);
  EXPECT_DOUBLE_EQ(average_precision(flat), 0.25);
}

TEST(Metrics, InvalidInputs) {
  EXPECT_THROW(evaluate(PredictionSet{}), EmptyPredictions);
  EXPECT_THROW(roc_auc(PredictionSet{{0.3, 0.4}, {true, true}}), UndefinedAUC);
  EXPECT_THROW(evaluate(PredictionSet{{0.3}, {true, false}}), std::invalid_argument);
  EXPECT_THROW(evaluate(PredictionSet{{std::numeric_limits<double>::quiet_NaN()}, {true}}),
               std::invalid_argument);
  const auto m = evaluate(PredictionSet{{0.3, 0.8}, {false, false}});
  EXPECT_TRUE(std::isnan(m.auc));
  EXPECT_TRUE(std::isnan(m.avg_precision));
  EXPECT_DOUBLE_EQ(m.accuracy, 0.5);
}

TEST(Baselines, AllPositive) {
  std::vector<bool> labels(51926 + 1489, false);
  std::fill(labels.begin(), labels.begin() + 1489, true);
  const auto m = evaluate(baseline_all_positive(labels));
  EXPECT_NEAR(m.precision, 1489.0 / 53415.0, 1e-12);
  EXPECT_DOUBLE_EQ(m.recall, 1.0);
  EXPECT_EQ(format_number(m.precision, 2), "0.03");
  EXPECT_EQ(format_number(m.f1, 2), "0.05");
}

TEST(Baselines, FrequencyRecallTracksGuessRate) {
  std::vector<bool> labels(10000, false);
  for (std::size_t i = 0; i < labels.size(); i += 4) labels[i] = true;
  double recall = 0;
  double precision = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto p = baseline_frequency(0.5, labels, seed);
    for (double s : p.scores) EXPECT_TRUE(s == 0.0 || s == 1.0);
    const auto prf = precision_recall_f1(confusion(p));
    recall += prf.recall / 10;
    precision += prf.precision / 10;
  }
  EXPECT_NEAR(recall, 0.5, 0.02);
  EXPECT_NEAR(precision, 0.25, 0.02);
  const auto expected = expected_frequency_baseline(0.5, 2500, 7500);
  EXPECT_DOUBLE_EQ(expected.precision, 0.25);
  EXPECT_DOUBLE_EQ(expected.recall, 0.5);
  EXPECT_DOUBLE_EQ(expected.f1, f1_from(0.25, 0.5));
  EXPECT_EQ(baseline_frequency(0.5, labels, 3).scores, baseline_frequency(0.5, labels, 3).scores);
}

TEST(Spearman, AverageRanks) {
  EXPECT_EQ(average_ranks({10, 20, 20, 5}), (std::vector<double>{2, 3.5, 3.5, 1}));
}

TEST(Spearman, RhoIsPearsonOnRanks) {
  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> x, y;
    const std::size_t n = 3 + rng.uniform_index(20);
    for (std::size_t i = 0; i < n; ++i) {
      x.push_back(std::floor(rng.uniform01() * 6));
      y.push_back(x.back() + rng.uniform01() * 4);
    }
    if (std::set<double>(x.begin(), x.end()).size() < 2) continue;
    const auto r = spearman(x, y);
    EXPECT_NEAR(r.rho, pearson(average_ranks(x), average_ranks(y)), 1e-12);
    EXPECT_EQ(r.n, n);
  }
}

TEST(Spearman, PValueMatchesIntegratedDensity) {
  for (double t : {0.3, 1.0, 2.1, 2.8, 4.5}) {
    for (double nu : {1.0, 3.0, 7.0, 20.0}) {
      EXPECT_NEAR(student_t_two_sided_p(t, nu), integrated_two_sided_p(t, nu), 1e-8)
          << t << " " << nu;
      EXPECT_DOUBLE_EQ(student_t_two_sided_p(-t, nu), student_t_two_sided_p(t, nu));
    }
  }
  EXPECT_DOUBLE_EQ(student_t_two_sided_p(0, 5), 1.0);
}

TEST(Spearman, EdgeCases) {
  EXPECT_THROW(spearman({1, 2}, {1, 2}), NeedAtLeast3Points);
  EXPECT_THROW(spearman({1, 2, 3}, {1, 2}), std::invalid_argument);
  const auto perfect = spearman({1, 2, 3, 4}, {10, 20, 30, 40});
  EXPECT_DOUBLE_EQ(perfect.rho, 1.0);
  EXPECT_DOUBLE_EQ(perfect.p_value, 0.0);
  EXPECT_DOUBLE_EQ(spearman({1, 2, 3, 4}, {4, 3, 2, 1}).rho, -1.0);
}

TEST(Tables, RelativeDifferences) {
  EXPECT_DOUBLE_EQ(ratio_difference(0.5, 1.0), 50.0);
  EXPECT_DOUBLE_EQ(f1_relative_difference(0.8, 0.6), 25.0);
  EXPECT_THROW(find_counts(reference_counts_direct(), "xyz", 1), std::out_of_range);
  for (const auto& c : reference_counts_direct()) {
    EXPECT_GT(c.eval_positive, 0u) << c.smell;
    EXPECT_GT(c.eval_negative, c.eval_positive) << c.smell;
  }
}

TEST(Tables, Formatting) {
  EXPECT_EQ(format_number(0.123456), "0.1235");
  EXPECT_EQ(format_number(std::nan(""), 2), "nan");
  const std::string table = format_table({{"a", "bbb"}, {"cc", "d"}});
  EXPECT_EQ(table, "a   bbb\n-------\ncc    d\n");
}
