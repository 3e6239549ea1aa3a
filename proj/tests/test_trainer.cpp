#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <limits>
#include <set>

#include "smellnet/trainer.hpp"

using namespace smellnet;
namespace fs = std::filesystem;

namespace {

class ScriptedRunner : public EpochRunner {
 public:
  explicit ScriptedRunner(std::vector<double> val) : val_(std::move(val)) {}
  double train_epoch(int epoch) override {
    epoch_ = epoch;
    return 1.0 / epoch;
  }
  double validation_loss() override { return val_[static_cast<std::size_t>(epoch_ - 1)]; }
  void save_best() override { saved_.push_back(epoch_); }
  void restore_best() override { restored_ = saved_.empty() ? 0 : saved_.back(); }

  std::vector<int> saved_;
  int restored_ = -1;

 private:
  std::vector<double> val_;
  int epoch_ = 0;
};

TensorBlock toy_block(std::size_t n, std::uint64_t seed, std::size_t length = 12) {
  Rng rng(seed);
  std::vector<Sample> samples;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<TokenId> ids;
    for (std::size_t j = 0; j < length; ++j) ids.push_back(static_cast<TokenId>(1000 + rng.uniform_index(5)));
    const bool positive = i % 2 == 0;
    if (positive) ids[rng.uniform_index(length)] = 300;
    samples.push_back(make_sample_1d("s" + std::to_string(i), TokenSequence1D{ids}, positive));
  }
  return pad_and_pack(samples, 1);
}

GridOptions quick_options(const std::string& smell, const fs::path& csv) {
  GridOptions o;
  o.smell = smell;
  o.master_seed = 17;
  o.schedule.max_epochs = 2;
  o.schedule.patience = 1;
  o.results_csv = csv;
  o.record_timing = false;
  return o;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("smellnet_tr_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST(EarlyStopping, StopsAfterPatienceAndRestoresBest) {
  ScriptedRunner r({1.0, 0.8, 0.9, 0.85, 0.95, 0.7});
  const auto h = run_epochs(r, 50, 3, true);
  EXPECT_EQ(h.stopped_epoch, 5);
  EXPECT_EQ(h.best_epoch, 2);
  EXPECT_EQ(r.saved_, (std::vector<int>{1, 2}));
  EXPECT_EQ(r.restored_, 2);
  EXPECT_EQ(h.val_loss.size(), 5u);
}

TEST(EarlyStopping, EqualLossIsNotImprovement) {
  ScriptedRunner r({0.5, 0.5, 0.5});
  const auto h = run_epochs(r, 3, 2, true);
  EXPECT_EQ(h.stopped_epoch, 3);
  EXPECT_EQ(h.best_epoch, 1);
}

TEST(EarlyStopping, RunsToMaxWhenAlwaysImproving) {
  ScriptedRunner r({5, 4, 3, 2, 1});
  const auto h = run_epochs(r, 5, 1, true);
  EXPECT_EQ(h.stopped_epoch, 5);
  EXPECT_EQ(h.best_epoch, 5);
}

TEST(EarlyStopping, FixedEpochsKeepFinalWeights) {
  ScriptedRunner r({1, 2, 3, 4});
  const auto h = run_epochs(r, 4, 0, false);
  EXPECT_EQ(h.stopped_epoch, 4);
  EXPECT_TRUE(r.saved_.empty());
  EXPECT_EQ(r.restored_, -1);
}

TEST(EarlyStopping, NonFiniteValidationLossThrows) {
  ScriptedRunner r({1.0, std::numeric_limits<double>::infinity()});
  EXPECT_THROW(run_epochs(r, 5, 2, true), NonFiniteLoss);
}

TEST(Schedule, DefaultsAndValidation) {
  EXPECT_EQ(TrainSchedule::for_model(ModelKind::cnn1d).patience, 5);
  EXPECT_EQ(TrainSchedule::for_model(ModelKind::cnn2d).patience, 5);
  EXPECT_EQ(TrainSchedule::for_model(ModelKind::rnn).patience, 2);
  EXPECT_EQ(TrainSchedule::for_model(ModelKind::rnn).max_epochs, 50);
  TrainSchedule s;
  s.max_epochs = 2;
  s.patience = 1;
  EXPECT_NO_THROW(s.validate());
  s.patience = 2;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s.patience = 0;
  EXPECT_THROW(s.validate(), std::invalid_argument);
}

TEST(Grid, CardinalityAndEndpoints) {
  const auto cnn = enumerate_grid(ModelKind::cnn1d);
  ASSERT_EQ(cnn.size(), 144u);
  EXPECT_EQ(enumerate_grid(ModelKind::cnn2d).size(), 144u);
  const auto& first = cnn.front();
  EXPECT_EQ(std::tie(first.layers, first.filters, first.kernel, first.pool), std::make_tuple(1, 8, 5, 2));
  const auto& last = cnn.back();
  EXPECT_EQ(std::tie(last.layers, last.filters, last.kernel, last.pool), std::make_tuple(3, 64, 11, 5));
  const auto rnn = enumerate_grid(ModelKind::rnn);
  ASSERT_EQ(rnn.size(), 18u);
  EXPECT_EQ(std::tie(rnn[0].layers, rnn[0].embedding_dim, rnn[0].units), std::make_tuple(1, 16, 32));
  EXPECT_EQ(std::tie(rnn[17].layers, rnn[17].embedding_dim, rnn[17].units), std::make_tuple(3, 32, 128));
  std::set<std::tuple<int, int, int, int>> distinct;
  for (std::size_t i = 0; i < cnn.size(); ++i) {
    EXPECT_EQ(cnn[i].config_id, static_cast<int>(i) + 1);
    distinct.insert({cnn[i].layers, cnn[i].filters, cnn[i].kernel, cnn[i].pool});
  }
  EXPECT_EQ(distinct.size(), 144u);
  EXPECT_EQ(grid_config(ModelKind::rnn, 5).units, rnn[4].units);
  EXPECT_THROW(grid_config(ModelKind::rnn, 19), std::out_of_range);
  EXPECT_THROW(grid_config(ModelKind::cnn1d, 0), std::out_of_range);
}

TEST(Grid, DynamicBatchSize) {
  EXPECT_EQ(dynamic_batch_size(1), 32u);
  EXPECT_EQ(dynamic_batch_size(500), 32u);
  EXPECT_EQ(dynamic_batch_size(511), 32u);
  EXPECT_EQ(dynamic_batch_size(512), 64u);
  EXPECT_EQ(dynamic_batch_size(1024), 128u);
  EXPECT_EQ(dynamic_batch_size(1536), 256u);
  EXPECT_EQ(dynamic_batch_size(2000), 256u);
  EXPECT_EQ(dynamic_batch_size(10000), 256u);
}

TEST(Grid, FeasibilityFollowsShapeAlgebra) {
  auto cnn = [](int layers, int kernel, int pool) {
    HyperConfig c;
    c.kind = ModelKind::cnn1d;
    c.layers = layers;
    c.filters = 8;
    c.kernel = kernel;
    c.pool = pool;
    return c;
  };
  const nn::Shape input{20, 1};
  EXPECT_FALSE(infeasibility(cnn(1, 5, 2), input));
  EXPECT_FALSE(infeasibility(cnn(2, 5, 2), input));
  EXPECT_TRUE(infeasibility(cnn(3, 5, 2), input));
  EXPECT_FALSE(infeasibility(cnn(1, 11, 5), input));
  EXPECT_TRUE(infeasibility(cnn(2, 11, 5), input));
  EXPECT_TRUE(infeasibility(cnn(1, 5, 2), nn::Shape{4, 1}));
  HyperConfig two_d = cnn(1, 5, 2);
  two_d.kind = ModelKind::cnn2d;
  EXPECT_TRUE(infeasibility(two_d, nn::Shape{3, 40, 1}));
  EXPECT_FALSE(infeasibility(two_d, nn::Shape{6, 40, 1}));
  EXPECT_THROW(build_cnn(cnn(3, 5, 2), input, 1), InfeasibleConfig);
}

TEST(Grid, ConfigSeedsAreIndependentOfOrder) {
  EXPECT_EQ(config_seed(4, 7), config_seed(4, 7));
  EXPECT_NE(config_seed(4, 7), config_seed(4, 8));
  EXPECT_NE(config_seed(4, 7), config_seed(5, 7));
}

TEST(Training, ValidationCarveIsStratified) {
  TrainData d;
  d.x = nn::Tensor({10, 1});
  for (int i = 0; i < 10; ++i) d.y.push_back(i < 3 ? 1.0 : 0.0);
  Rng rng(2);
  auto [fit, val] = carve_validation(d, 0.2, rng);
  std::size_t val_pos = 0;
  for (double y : val.y) val_pos += y > 0.5;
  EXPECT_EQ(val_pos, 1u);
  EXPECT_EQ(val.size(), 2u);
  EXPECT_EQ(fit.size(), 8u);
}

TEST(Training, InfeasibleConfigIsReportedNotThrown) {
  const fs::path dir = scratch("infeasible");
  const auto block = toy_block(40, 1, 6);
  const auto r = run_config(grid_config(ModelKind::cnn1d, 144), block, block,
                            quick_options("mn", dir / "grid.csv"));
  EXPECT_EQ(r.status, RunStatus::infeasible);
  EXPECT_EQ(r.epochs, 0);
}

TEST(Training, ResultsCsvRoundTrip) {
  const fs::path dir = scratch("csv");
  RunResult a;
  a.config = grid_config(ModelKind::cnn1d, 3);
  a.smell = "ecb";
  a.metrics.f1 = 0.625;
  a.metrics.auc = std::nan("");
  a.epochs = 7;
  RunResult b;
  b.config = grid_config(ModelKind::cnn1d, 1);
  b.smell = "ecb";
  b.status = RunStatus::infeasible;
  write_results(dir / "r.csv", {a, b});
  std::ifstream in(dir / "r.csv");
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, kResultsHeader);
  const auto back = read_results(dir / "r.csv");
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].config.config_id, 1);
  EXPECT_EQ(back[0].status, RunStatus::infeasible);
  EXPECT_EQ(back[1].config.kernel, a.config.kernel);
  EXPECT_DOUBLE_EQ(back[1].metrics.f1, 0.625);
  EXPECT_TRUE(std::isnan(back[1].metrics.auc));
  EXPECT_EQ(results_row(back[1]), results_row(a));
}

TEST(Training, SelectBestPrefersLowerIdOnTies) {
  std::vector<RunResult> rows(3);
  for (int i = 0; i < 3; ++i) rows[static_cast<std::size_t>(i)].config = grid_config(ModelKind::rnn, i + 1);
  rows[0].metrics.f1 = 0.5;
  rows[1].metrics.f1 = 0.7;
  rows[2].metrics.f1 = 0.7;
  EXPECT_EQ(select_best(rows).config.config_id, 2);
  rows[1].status = RunStatus::failed;
  EXPECT_EQ(select_best(rows).config.config_id, 3);
  for (auto& r : rows) r.status = RunStatus::infeasible;
  EXPECT_THROW(select_best(rows), AllConfigsFailed);
}

TEST(Training, GridResumesWithoutRepeatingRuns) {
  const fs::path dir = scratch("resume");
  const auto train = toy_block(60, 3);
  const auto eval = toy_block(30, 4);
  auto options = quick_options("mn", dir / "grid.csv");
  int runs = 0;
  options.on_result = [&](const RunResult&) { ++runs; };
  options.config_ids = {1, 2};
  run_grid(ModelKind::rnn, train, eval, options);
  EXPECT_EQ(runs, 2);
  options.config_ids = {1, 2, 3};
  const auto rows = run_grid(ModelKind::rnn, train, eval, options);
  EXPECT_EQ(runs, 3);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(read_results(dir / "grid.csv").size(), 3u);
  for (const auto& r : rows) {
    EXPECT_EQ(r.status, RunStatus::ok);
    EXPECT_LE(r.epochs, 2);
    EXPECT_EQ(r.train_seconds, 0.0);
  }
}

TEST(Training, SameSeedSameResults) {
  const auto train = toy_block(60, 5);
  const auto eval = toy_block(30, 6);
  const auto options = quick_options("mn", {});
  const auto a = run_config(grid_config(ModelKind::cnn1d, 1), train, eval, options);
  const auto b = run_config(grid_config(ModelKind::cnn1d, 1), train, eval, options);
  EXPECT_EQ(results_row(a), results_row(b));
}

TEST(Training, EmptyTrainingSetIsRejected) {
  TensorBlock empty;
  empty.cols = 4;
  EXPECT_THROW(train_fixed_epochs(grid_config(ModelKind::rnn, 1), empty, 1, 1), EmptyTrainingSet);
}
