#include "smellnet/evaluator.hpp"

#include <algorithm>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "smellnet/random.hpp"

namespace smellnet {

namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

std::size_t PredictionSet::positives() const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), true));
}

void PredictionSet::validate() const {
  if (scores.empty()) throw EmptyPredictions();
  if (scores.size() != labels.size()) {
    throw std::invalid_argument("prediction set: score/label count mismatch");
  }
  for (double s : scores) {
    if (!std::isfinite(s)) throw std::invalid_argument("prediction set: non-finite score");
  }
}

Confusion confusion(const PredictionSet& preds, double threshold) {
  preds.validate();
  Confusion c;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const bool predicted = preds.scores[i] >= threshold;
    if (predicted && preds.labels[i]) ++c.tp;
    else if (predicted) ++c.fp;
    else if (preds.labels[i]) ++c.fn;
    else ++c.tn;
  }
  return c;
}

double f1_from(double precision, double recall) {
  const double denom = precision + recall;
  return denom == 0.0 ? 0.0 : 2.0 * precision * recall / denom;
}

PrecisionRecallF1 precision_recall_f1(const Confusion& c) {
  PrecisionRecallF1 r;
  r.precision = ratio(c.tp, c.tp + c.fp);
  r.recall = ratio(c.tp, c.tp + c.fn);
  r.f1 = f1_from(r.precision, r.recall);
  return r;
}

double accuracy(const Confusion& c) { return ratio(c.tp + c.tn, c.total()); }

std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

double roc_auc(const PredictionSet& preds) {
  preds.validate();
  const double P = static_cast<double>(preds.positives());
  const double N = static_cast<double>(preds.negatives());
  if (P == 0 || N == 0) throw UndefinedAUC();
  const auto ranks = average_ranks(preds.scores);
  double rank_sum = 0;
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    if (preds.labels[i]) rank_sum += ranks[i];
  }
  return (rank_sum - P * (P + 1) / 2.0) / (P * N);
}

double average_precision(const PredictionSet& preds) {
  preds.validate();
  const std::size_t P = preds.positives();
  if (P == 0) throw UndefinedMetric("average precision needs at least one positive");
  std::vector<std::size_t> order(preds.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return preds.scores[a] > preds.scores[b]; });
  double ap = 0, prev_recall = 0;
  std::size_t tp = 0, seen = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && preds.scores[order[j]] == preds.scores[order[i]]) {
      if (preds.labels[order[j]]) ++tp;
      ++seen;
      ++j;
    }
    const double recall = ratio(tp, P);
    ap += (recall - prev_recall) * ratio(tp, seen);
    prev_recall = recall;
    i = j;
  }
  return ap;
}

bool MetricsReport::f1_identity_holds(double tol) const {
  return std::fabs(f1 - f1_from(precision, recall)) <= tol;
}

MetricsReport evaluate(const PredictionSet& preds, double threshold) {
  MetricsReport m;
  m.threshold = threshold;
  m.counts = confusion(preds, threshold);
  const auto prf = precision_recall_f1(m.counts);
  m.precision = prf.precision;
  m.recall = prf.recall;
  m.f1 = prf.f1;
  m.accuracy = accuracy(m.counts);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  try {
    m.auc = roc_auc(preds);
  } catch (const UndefinedMetric&) {
    m.auc = nan;
  }
  try {
    m.avg_precision = average_precision(preds);
  } catch (const UndefinedMetric&) {
    m.avg_precision = nan;
  }
  return m;
}

PredictionSet baseline_frequency(double train_pos_fraction, const std::vector<bool>& eval_labels,
                                 std::uint64_t seed) {
  if (!(train_pos_fraction >= 0.0 && train_pos_fraction <= 1.0)) {
    throw std::invalid_argument("positive fraction must lie in [0, 1]");
  }
  Rng rng(seed);
  PredictionSet p;
  p.labels = eval_labels;
  p.scores.reserve(eval_labels.size());
  for (std::size_t i = 0; i < eval_labels.size(); ++i) {
    p.scores.push_back(rng.bernoulli(train_pos_fraction) ? 1.0 : 0.0);
  }
  return p;
}

PredictionSet baseline_all_positive(const std::vector<bool>& eval_labels) {
  return PredictionSet{std::vector<double>(eval_labels.size(), 1.0), eval_labels};
}

PrecisionRecallF1 expected_frequency_baseline(double train_pos_fraction, std::size_t positives,
                                              std::size_t negatives) {
  PrecisionRecallF1 r;
  r.precision = train_pos_fraction > 0 ? ratio(positives, positives + negatives) : 0.0;
  r.recall = train_pos_fraction;
  r.f1 = f1_from(r.precision, r.recall);
  return r;
}

double student_t_two_sided_p(double t, double df) {
  if (!(df > 0)) throw std::invalid_argument("degrees of freedom must be positive");
  if (std::isinf(t)) return 0.0;
  return boost::math::ibeta(df / 2.0, 0.5, df / (df + t * t));
}

SpearmanResult spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("spearman: vectors differ in length");
  if (x.size() < 3) throw NeedAtLeast3Points();
  const auto rx = average_ranks(x), ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0 || syy == 0) throw UndefinedMetric("spearman: a constant vector has no ranking");
  SpearmanResult r;
  r.n = x.size();
  r.rho = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  const double df = n - 2;
  r.t = std::fabs(r.rho) == 1.0 ? std::copysign(std::numeric_limits<double>::infinity(), r.rho)
                                : r.rho * std::sqrt(df / (1 - r.rho * r.rho));
  r.p_value = student_t_two_sided_p(r.t, df);
  return r;
}

double ratio_difference(double ratio_first, double ratio_second) {
  if (ratio_second == 0) throw std::invalid_argument("ratio difference: zero divisor");
  return (ratio_second - ratio_first) / ratio_second * 100.0;
}

double f1_relative_difference(double f1_rnn, double f1_cnn) {
  if (f1_rnn == 0) throw std::invalid_argument("relative difference: zero reference F1");
  return (f1_rnn - f1_cnn) / f1_rnn * 100.0;
}

const std::vector<SampleCounts>& reference_counts_direct() {
  static const std::vector<SampleCounts> table = {
      {"cm", 1, 3472, 1489, 51926},  {"ecb", 1, 1200, 515, 52900}, {"mn", 1, 5000, 5901, 47514},
      {"ma", 1, 290, 125, 22727},    {"cm", 2, 2641, 1132, 45204}, {"ecb", 2, 982, 422, 45915},
      {"mn", 2, 5000, 5002, 41334},  {"ma", 2, 284, 122, 17362},
  };
  return table;
}

const std::vector<SampleCounts>& reference_counts_transfer() {
  static const std::vector<SampleCounts> table = {
      {"cm", 1, 3472, 2163, 48633},  {"ecb", 1, 1200, 597, 50199}, {"mn", 1, 5000, 42037, 50905},
      {"ma", 1, 290, 25, 13110},     {"cm", 2, 2641, 2001, 30215}, {"ecb", 2, 982, 538, 31678},
      {"mn", 2, 5000, 7778, 24438},  {"ma", 2, 284, 23, 11812},
  };
  return table;
}

const SampleCounts& find_counts(const std::vector<SampleCounts>& table, const std::string& smell,
                                int dim) {
  for (const auto& c : table) {
    if (c.smell == smell && c.dim == dim) return c;
  }
  throw std::out_of_range("no reference counts for " + smell + " " + std::to_string(dim) + "D");
}

std::string format_number(double v, int digits) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string format_table(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& row : rows) {
    if (row.size() > width.size()) width.resize(row.size(), 0);
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  }
  std::string out;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::string line;
    for (std::size_t i = 0; i < rows[r].size(); ++i) {
      if (i) line += "  ";
      const std::string& cell = rows[r][i];
      // Left-align the first column, right-align the numbers.
      if (i == 0) line += cell + std::string(width[i] - cell.size(), ' ');
      else line += std::string(width[i] - cell.size(), ' ') + cell;
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
    if (r == 0) {
      std::size_t total = 0;
      for (std::size_t w : width) total += w;
      out += std::string(total + 2 * (width.size() - 1), '-') + "\n";
    }
  }
  return out;
}

}  // namespace smellnet
