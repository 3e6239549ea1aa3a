#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "smellnet/dataset.hpp"
#include "smellnet/evaluator.hpp"
#include "smellnet/nn/model.hpp"

namespace smellnet {

enum class ModelKind { cnn1d, cnn2d, rnn };

std::string to_string(ModelKind kind);
ModelKind parse_model_kind(const std::string& text);
/// 2 for cnn2d, 1 otherwise.
int input_dim(ModelKind kind);

struct HyperConfig {
  ModelKind kind = ModelKind::cnn1d;
  int config_id = 1;
  int layers = 1;
  // cnn
  int filters = 0;
  int kernel = 0;
  int pool = 0;
  // rnn
  int embedding_dim = 0;
  int units = 0;

  std::string describe() const;
};

/// CNN ids nest layers, filters, kernel, pool window (innermost); RNN ids
/// nest layers, embedding size, units.
std::vector<HyperConfig> enumerate_grid(ModelKind kind);
HyperConfig grid_config(ModelKind kind, int config_id);

/// [32, 64, 128, 256] indexed by min(floor(n / 512), 3).
std::size_t dynamic_batch_size(std::size_t train_count);

struct TrainSchedule {
  int max_epochs = 50;
  int patience = 5;
  double validation_fraction = 0.2;

  static TrainSchedule for_model(ModelKind kind);
  void validate() const;
};

class InfeasibleConfig : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyTrainingSet : public std::invalid_argument {
 public:
  EmptyTrainingSet() : std::invalid_argument("EmptyTrainingSet: nothing to train on") {}
};

class NonFiniteLoss : public std::runtime_error {
 public:
  explicit NonFiniteLoss(int epoch)
      : std::runtime_error("NonFiniteLoss: loss diverged in epoch " + std::to_string(epoch)) {}
};

class AllConfigsFailed : public std::runtime_error {
 public:
  AllConfigsFailed() : std::runtime_error("AllConfigsFailed: no configuration produced a result") {}
};

/// Per-sample input shape the model sees for a block.
nn::Shape model_input_shape(ModelKind kind, const TensorBlock& block);

/// CNN inputs are ids / 2000 with a trailing channel axis; RNN inputs are the
/// raw ids of the flattened sample.
nn::Tensor model_input(ModelKind kind, const TensorBlock& block);
std::vector<double> model_targets(const TensorBlock& block);

/// Walks the conv/pool shape algebra; the reason is set when some extent
/// drops below 1.
std::optional<std::string> infeasibility(const HyperConfig& config, const nn::Shape& input);

nn::Sequential build_cnn(const HyperConfig& config, const nn::Shape& input, std::uint64_t seed);
nn::Sequential build_rnn(const HyperConfig& config, const nn::Shape& input, std::uint64_t seed);
nn::Sequential build_model(const HyperConfig& config, const nn::Shape& input, std::uint64_t seed);

struct TrainHistory {
  std::vector<double> train_loss;
  std::vector<double> val_loss;
  int stopped_epoch = 0;
  int best_epoch = 0;
  double seconds = 0;
};

/// One training epoch plus the hooks early stopping needs. The trainer's
/// stopping logic only talks to this interface.
class EpochRunner {
 public:
  virtual ~EpochRunner() = default;
  virtual double train_epoch(int epoch) = 0;
  virtual double validation_loss() = 0;
  virtual void save_best() = 0;
  virtual void restore_best() = 0;
};

/// Stops after `patience` consecutive epochs without a strictly lower
/// validation loss and restores the best epoch's weights. Without early
/// stopping it runs exactly max_epochs and keeps the final weights.
TrainHistory run_epochs(EpochRunner& runner, int max_epochs, int patience, bool early_stopping);

struct TrainData {
  nn::Tensor x;
  std::vector<double> y;
  std::size_t size() const { return y.size(); }
};

/// Stratified hold-out: floor(fraction * n_class) of each class, at least one
/// when the class has two or more samples.
std::pair<TrainData, TrainData> carve_validation(const TrainData& data, double fraction, Rng& rng);

class ModelRunner : public EpochRunner {
 public:
  /// An empty validation set makes validation_loss() NaN.
  ModelRunner(nn::Sequential& model, TrainData train, TrainData validation, std::size_t batch_size,
              std::uint64_t seed, std::filesystem::path checkpoint = {});
  double train_epoch(int epoch) override;
  double validation_loss() override;
  void save_best() override;
  void restore_best() override;

  std::size_t batch_size() const { return batch_; }

 private:
  nn::Sequential& model_;
  TrainData train_, validation_;
  std::size_t batch_;
  Rng rng_;
  nn::Adam optimizer_;
  std::vector<nn::Tensor> best_;
  std::filesystem::path checkpoint_;
};

struct TrainOutcome {
  nn::Sequential model;
  TrainHistory history;
};

/// Builds a fresh model from `seed`, holds out validation from `train` and
/// trains with early stopping.
TrainOutcome train_with_early_stopping(const HyperConfig& config, const TensorBlock& train,
                                       const TrainSchedule& schedule, std::uint64_t seed,
                                       const std::filesystem::path& checkpoint = {});

/// Fresh model trained on all of `train` for exactly `epochs` epochs.
TrainOutcome train_fixed_epochs(const HyperConfig& config, const TensorBlock& train, int epochs,
                                std::uint64_t seed);

MetricsReport evaluate_model(nn::Sequential& model, ModelKind kind, const TensorBlock& eval);

enum class RunStatus { ok, infeasible, failed, retrained };
std::string to_string(RunStatus s);
RunStatus parse_run_status(const std::string& s);

struct RunResult {
  HyperConfig config;
  std::string smell;
  int dim = 1;
  MetricsReport metrics;
  int epochs = 0;
  double train_seconds = 0;
  RunStatus status = RunStatus::ok;
};

inline constexpr const char* kResultsHeader =
    "model,smell,dim,config_id,L,F,K,MPW,ED,units,auc,accuracy,precision,recall,f1,avg_precision,"
    "epochs,train_seconds,status";

std::string results_row(const RunResult& r);
RunResult parse_results_row(const std::string& line);
std::vector<RunResult> read_results(const std::filesystem::path& csv);
/// Rewrites the file with rows sorted by config_id.
void write_results(const std::filesystem::path& csv, std::vector<RunResult> rows);

struct GridOptions {
  std::string smell;
  std::uint64_t master_seed = 0;
  TrainSchedule schedule;
  std::filesystem::path results_csv;
  std::filesystem::path checkpoint_dir;  // empty: no checkpoint files
  bool record_timing = true;
  std::vector<int> config_ids;  // empty: the whole grid
  std::function<void(const RunResult&)> on_result;
};

/// Seed for one configuration; independent of run order.
std::uint64_t config_seed(std::uint64_t master_seed, int config_id);

/// Trains and evaluates one configuration. Infeasible and diverging
/// configurations come back with their status set instead of throwing.
RunResult run_config(const HyperConfig& config, const TensorBlock& train, const TensorBlock& eval,
                     const GridOptions& options);

/// Runs every configuration not already present in `results_csv`, appending
/// as it goes, and finally rewrites the file ordered by config_id.
std::vector<RunResult> run_grid(ModelKind kind, const TensorBlock& train, const TensorBlock& eval,
                                const GridOptions& options);

/// Highest F1 among ok rows; ties go to the lower config_id.
const RunResult& select_best(const std::vector<RunResult>& results);

/// Retrains the best configuration on the full training set for its
/// recorded epoch count and evaluates it.
RunResult select_best_and_retrain(const std::vector<RunResult>& results, const TensorBlock& train,
                                  const TensorBlock& eval, const GridOptions& options);

}  // namespace smellnet
