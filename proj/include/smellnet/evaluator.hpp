#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace smellnet {

class EmptyPredictions : public std::invalid_argument {
 public:
  EmptyPredictions() : std::invalid_argument("EmptyPredictions: no samples to score") {}
};

class UndefinedMetric : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// AUC needs at least one sample of each class.
class UndefinedAUC : public UndefinedMetric {
 public:
  UndefinedAUC() : UndefinedMetric("UndefinedAUC: both classes must be present") {}
};

class NeedAtLeast3Points : public std::invalid_argument {
 public:
  NeedAtLeast3Points() : std::invalid_argument("NeedAtLeast3Points: spearman needs n >= 3") {}
};

struct PredictionSet {
  std::vector<double> scores;
  std::vector<bool> labels;

  std::size_t size() const { return scores.size(); }
  std::size_t positives() const;
  std::size_t negatives() const { return size() - positives(); }
  /// Throws on size mismatch, non-finite scores or an empty set.
  void validate() const;
};

struct Confusion {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  std::size_t total() const { return tp + fp + tn + fn; }
};

inline constexpr double kDecisionThreshold = 0.5;

/// score >= threshold predicts positive.
Confusion confusion(const PredictionSet& preds, double threshold = kDecisionThreshold);

struct PrecisionRecallF1 {
  double precision = 0, recall = 0, f1 = 0;
};

/// 0/0 is taken as 0 for every ratio.
PrecisionRecallF1 precision_recall_f1(const Confusion& c);
double accuracy(const Confusion& c);
double f1_from(double precision, double recall);

/// Mann-Whitney statistic with average ranks for ties.
double roc_auc(const PredictionSet& preds);

/// Step-wise area under the precision-recall curve, sweeping thresholds in
/// descending score order with tied scores handled as one step.
double average_precision(const PredictionSet& preds);

struct MetricsReport {
  double accuracy = 0, auc = 0, precision = 0, recall = 0, f1 = 0, avg_precision = 0;
  double threshold = kDecisionThreshold;
  Confusion counts;

  bool f1_identity_holds(double tol = 1e-12) const;
};

/// auc and avg_precision are NaN when undefined for the label mix.
MetricsReport evaluate(const PredictionSet& preds, double threshold = kDecisionThreshold);

/// Independent positive guesses with probability `train_pos_fraction`. Scores
/// are 1 or 0.
PredictionSet baseline_frequency(double train_pos_fraction, const std::vector<bool>& eval_labels,
                                 std::uint64_t seed);
PredictionSet baseline_all_positive(const std::vector<bool>& eval_labels);

/// Expected precision/recall/F1 of the frequency baseline: precision equals
/// the evaluation prevalence and recall equals the guess rate.
PrecisionRecallF1 expected_frequency_baseline(double train_pos_fraction, std::size_t positives,
                                              std::size_t negatives);

std::vector<double> average_ranks(const std::vector<double>& v);

/// Two-sided p-value of a Student-t statistic.
double student_t_two_sided_p(double t, double degrees_of_freedom);

struct SpearmanResult {
  double rho = 0, p_value = 1, t = 0;
  std::size_t n = 0;
};

SpearmanResult spearman(const std::vector<double>& x, const std::vector<double>& y);

/// (second - first) / second * 100.
double ratio_difference(double ratio_first, double ratio_second);

/// (rnn - cnn) / rnn * 100.
double f1_relative_difference(double f1_rnn, double f1_cnn);

/// Published per-smell sample counts. `train` is the per-class count of the
/// balanced training set.
struct SampleCounts {
  std::string smell;
  int dim = 1;
  std::size_t train = 0;
  std::size_t eval_positive = 0;
  std::size_t eval_negative = 0;

  double eval_ratio() const {
    return static_cast<double>(eval_positive) / static_cast<double>(eval_negative);
  }
  double prevalence() const {
    return static_cast<double>(eval_positive) /
           static_cast<double>(eval_positive + eval_negative);
  }
};

/// C# direct-learning counts.
const std::vector<SampleCounts>& reference_counts_direct();
/// C# training with Java evaluation.
const std::vector<SampleCounts>& reference_counts_transfer();
const SampleCounts& find_counts(const std::vector<SampleCounts>& table, const std::string& smell,
                                int dim);

/// Fixed-width text table; the first row is the header.
std::string format_table(const std::vector<std::vector<std::string>>& rows);

/// Decimal text with `digits` places; "nan" for NaN.
std::string format_number(double v, int digits = 4);

}  // namespace smellnet
