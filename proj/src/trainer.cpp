#include "smellnet/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace smellnet {

namespace {

constexpr int kCnnLayers[] = {1, 2, 3};
constexpr int kCnnFilters[] = {8, 16, 32, 64};
constexpr int kCnnKernels[] = {5, 7, 11};
constexpr int kCnnPools[] = {2, 3, 4, 5};
constexpr int kRnnLayers[] = {1, 2, 3};
constexpr int kRnnEmbedding[] = {16, 32};
constexpr int kRnnUnits[] = {32, 64, 128};

constexpr double kCnnInputScale = 2000.0;
constexpr std::size_t kCnnDenseUnits = 32;
constexpr double kCnnDropout = 0.1;
constexpr double kRnnDropout = 0.2;
constexpr double kLstmDropout = 0.1;

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s) {
  if (s.empty() || s == "nan") return std::numeric_limits<double>::quiet_NaN();
  return std::stod(s);
}

int parse_int(const std::string& s) { return s.empty() ? 0 : std::stoi(s); }

std::string int_or_blank(int v) { return v ? std::to_string(v) : ""; }

}  // namespace

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::cnn1d: return "cnn1d";
    case ModelKind::cnn2d: return "cnn2d";
    case ModelKind::rnn: return "rnn";
  }
  return "?";
}

ModelKind parse_model_kind(const std::string& text) {
  if (text == "cnn1d") return ModelKind::cnn1d;
  if (text == "cnn2d") return ModelKind::cnn2d;
  if (text == "rnn") return ModelKind::rnn;
  throw std::invalid_argument("unknown model kind: " + text);
}

int input_dim(ModelKind kind) { return kind == ModelKind::cnn2d ? 2 : 1; }

std::string HyperConfig::describe() const {
  std::string s = to_string(kind) + " #" + std::to_string(config_id) + " L=" + std::to_string(layers);
  if (kind == ModelKind::rnn) {
    s += " ED=" + std::to_string(embedding_dim) + " units=" + std::to_string(units);
  } else {
    s += " F=" + std::to_string(filters) + " K=" + std::to_string(kernel) +
         " MPW=" + std::to_string(pool);
  }
  return s;
}

std::vector<HyperConfig> enumerate_grid(ModelKind kind) {
  std::vector<HyperConfig> grid;
  int id = 1;
  if (kind == ModelKind::rnn) {
    for (int l : kRnnLayers)
      for (int ed : kRnnEmbedding)
        for (int u : kRnnUnits) {
          HyperConfig c;
          c.kind = kind;
          c.config_id = id++;
          c.layers = l;
          c.embedding_dim = ed;
          c.units = u;
          grid.push_back(c);
        }
    return grid;
  }
  for (int l : kCnnLayers)
    for (int f : kCnnFilters)
      for (int k : kCnnKernels)
        for (int p : kCnnPools) {
          HyperConfig c;
          c.kind = kind;
          c.config_id = id++;
          c.layers = l;
          c.filters = f;
          c.kernel = k;
          c.pool = p;
          grid.push_back(c);
        }
  return grid;
}

HyperConfig grid_config(ModelKind kind, int config_id) {
  const auto grid = enumerate_grid(kind);
  if (config_id < 1 || config_id > static_cast<int>(grid.size())) {
    throw std::out_of_range("config id " + std::to_string(config_id) + " outside the " +
                            to_string(kind) + " grid (1.." + std::to_string(grid.size()) + ")");
  }
  return grid[static_cast<std::size_t>(config_id - 1)];
}

std::size_t dynamic_batch_size(std::size_t train_count) {
  static constexpr std::size_t sizes[] = {32, 64, 128, 256};
  return sizes[std::min<std::size_t>(train_count / 512, 3)];
}

TrainSchedule TrainSchedule::for_model(ModelKind kind) {
  TrainSchedule s;
  s.patience = kind == ModelKind::rnn ? 2 : 5;
  return s;
}

void TrainSchedule::validate() const {
  if (max_epochs < 1) throw std::invalid_argument("max_epochs must be at least 1");
  if (patience < 1 || patience >= max_epochs) {
    throw std::invalid_argument("patience must lie in [1, max_epochs)");
  }
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) {
    throw std::invalid_argument("validation fraction must lie in (0, 1)");
  }
}

nn::Shape model_input_shape(ModelKind kind, const TensorBlock& block) {
  switch (kind) {
    case ModelKind::cnn1d:
      if (block.dim != 1) throw std::invalid_argument("cnn1d needs a 1D dataset");
      return {block.cols, 1};
    case ModelKind::cnn2d:
      if (block.dim != 2) throw std::invalid_argument("cnn2d needs a 2D dataset");
      return {block.rows, block.cols, 1};
    case ModelKind::rnn:
      return {block.rows * block.cols};
  }
  return {};
}

nn::Tensor model_input(ModelKind kind, const TensorBlock& block) {
  nn::Shape shape = model_input_shape(kind, block);
  shape.insert(shape.begin(), block.count());
  nn::Tensor x(shape);
  const double scale = kind == ModelKind::rnn ? 1.0 : kCnnInputScale;
  for (std::size_t i = 0; i < block.data.size(); ++i) {
    x.data[i] = static_cast<double>(block.data[i]) / scale;
  }
  return x;
}

std::vector<double> model_targets(const TensorBlock& block) {
  return std::vector<double>(block.labels.begin(), block.labels.end());
}

std::optional<std::string> infeasibility(const HyperConfig& config, const nn::Shape& input) {
  if (config.kind == ModelKind::rnn) {
    if (input.empty() || input[0] == 0) return "empty input sequence";
    return std::nullopt;
  }
  std::vector<std::size_t> extent(input.begin(), input.end() - 1);
  if (extent.empty()) return "input has no spatial axis";
  const auto k = static_cast<std::size_t>(config.kernel);
  const auto w = static_cast<std::size_t>(config.pool);
  for (int block = 1; block <= config.layers; ++block) {
    for (auto& e : extent) {
      if (e < k) {
        return "block " + std::to_string(block) + ": extent " + std::to_string(e) +
               " shorter than kernel " + std::to_string(k);
      }
      e = e - k + 1;
      if (e / w < 1) {
        return "block " + std::to_string(block) + ": extent " + std::to_string(e) +
               " shorter than pool window " + std::to_string(w);
      }
      e /= w;
    }
  }
  return std::nullopt;
}

nn::Sequential build_cnn(const HyperConfig& config, const nn::Shape& input, std::uint64_t seed) {
  if (auto reason = infeasibility(config, input)) {
    throw InfeasibleConfig(config.describe() + ": " + *reason);
  }
  const bool two_d = config.kind == ModelKind::cnn2d;
  const auto F = static_cast<std::size_t>(config.filters);
  const auto K = static_cast<std::size_t>(config.kernel);
  const auto W = static_cast<std::size_t>(config.pool);
  nn::Sequential m;
  for (int l = 0; l < config.layers; ++l) {
    if (two_d) {
      m.add(std::make_unique<nn::Conv2D>(F, K));
      m.add(std::make_unique<nn::BatchNorm>());
      m.add(std::make_unique<nn::MaxPool2D>(W));
    } else {
      m.add(std::make_unique<nn::Conv1D>(F, K));
      m.add(std::make_unique<nn::BatchNorm>());
      m.add(std::make_unique<nn::MaxPool1D>(W));
    }
  }
  m.add(std::make_unique<nn::Dropout>(kCnnDropout));
  m.add(std::make_unique<nn::Flatten>());
  m.add(std::make_unique<nn::Dense>(kCnnDenseUnits));
  m.add(std::make_unique<nn::ActivationLayer>(nn::Activation::relu));
  m.add(std::make_unique<nn::Dense>(1));
  m.add(std::make_unique<nn::ActivationLayer>(nn::Activation::sigmoid));
  m.build(input, seed);
  return m;
}

nn::Sequential build_rnn(const HyperConfig& config, const nn::Shape& input, std::uint64_t seed) {
  nn::Sequential m;
  m.add(std::make_unique<nn::Embedding>(static_cast<std::size_t>(Vocabulary::kSize),
                                        static_cast<std::size_t>(config.embedding_dim), true));
  for (int l = 0; l < config.layers; ++l) {
    m.add(std::make_unique<nn::LSTM>(static_cast<std::size_t>(config.units), l + 1 < config.layers,
                                     kLstmDropout, kLstmDropout));
  }
  m.add(std::make_unique<nn::Dropout>(kRnnDropout));
  m.add(std::make_unique<nn::Dense>(1));
  m.add(std::make_unique<nn::ActivationLayer>(nn::Activation::sigmoid));
  m.build(input, seed);
  return m;
}

nn::Sequential build_model(const HyperConfig& config, const nn::Shape& input, std::uint64_t seed) {
  return config.kind == ModelKind::rnn ? build_rnn(config, input, seed)
                                       : build_cnn(config, input, seed);
}

TrainHistory run_epochs(EpochRunner& runner, int max_epochs, int patience, bool early_stopping) {
  TrainHistory h;
  double best = std::numeric_limits<double>::infinity();
  int wait = 0;
  for (int epoch = 1; epoch <= max_epochs; ++epoch) {
    h.train_loss.push_back(runner.train_epoch(epoch));
    h.stopped_epoch = epoch;
    if (!early_stopping) {
      h.val_loss.push_back(runner.validation_loss());
      h.best_epoch = epoch;
      continue;
    }
    const double val = runner.validation_loss();
    if (!std::isfinite(val)) throw NonFiniteLoss(epoch);
    h.val_loss.push_back(val);
    if (val < best) {
      best = val;
      h.best_epoch = epoch;
      wait = 0;
      runner.save_best();
    } else if (++wait >= patience) {
      break;
    }
  }
  if (early_stopping && h.best_epoch > 0) runner.restore_best();
  return h;
}

std::pair<TrainData, TrainData> carve_validation(const TrainData& data, double fraction, Rng& rng) {
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < data.size(); ++i) (data.y[i] > 0.5 ? pos : neg).push_back(i);
  std::vector<std::size_t> train_rows, val_rows;
  for (auto* members : {&pos, &neg}) {
    rng.shuffle(*members);
    std::size_t n_val = train_share(members->size(), fraction);
    if (n_val == 0 && members->size() >= 2) n_val = 1;
    for (std::size_t i = 0; i < members->size(); ++i) {
      ((i < n_val) ? val_rows : train_rows).push_back((*members)[i]);
    }
  }
  std::sort(train_rows.begin(), train_rows.end());
  std::sort(val_rows.begin(), val_rows.end());
  auto take = [&](const std::vector<std::size_t>& rows) {
    TrainData d;
    d.x = nn::gather_rows(data.x, rows);
    for (std::size_t r : rows) d.y.push_back(data.y[r]);
    return d;
  };
  return {take(train_rows), take(val_rows)};
}

ModelRunner::ModelRunner(nn::Sequential& model, TrainData train, TrainData validation,
                         std::size_t batch_size, std::uint64_t seed,
                         std::filesystem::path checkpoint)
    : model_(model),
      train_(std::move(train)),
      validation_(std::move(validation)),
      batch_(batch_size),
      rng_(seed),
      checkpoint_(std::move(checkpoint)) {
  if (train_.size() == 0) throw EmptyTrainingSet();
}

double ModelRunner::train_epoch(int epoch) {
  std::vector<std::size_t> order(train_.size());
  std::iota(order.begin(), order.end(), 0);
  rng_.shuffle(order);
  double total = 0;
  for (std::size_t begin = 0; begin < order.size(); begin += batch_) {
    const std::vector<std::size_t> rows(order.begin() + static_cast<std::ptrdiff_t>(begin),
                                        order.begin() + static_cast<std::ptrdiff_t>(
                                                            std::min(order.size(), begin + batch_)));
    const nn::Tensor x = nn::gather_rows(train_.x, rows);
    std::vector<double> y;
    for (std::size_t r : rows) y.push_back(train_.y[r]);
    model_.zero_grad();
    const nn::Tensor p = model_.forward(x, nn::Mode::train, &rng_);
    const double loss = nn::bce_loss(p.data, y);
    if (!std::isfinite(loss)) throw NonFiniteLoss(epoch);
    model_.backward(nn::Tensor(p.shape, nn::bce_grad(p.data, y)));
    optimizer_.step(model_.params());
    total += loss * static_cast<double>(rows.size());
  }
  return total / static_cast<double>(train_.size());
}

double ModelRunner::validation_loss() {
  if (validation_.size() == 0) return std::numeric_limits<double>::quiet_NaN();
  return nn::bce_loss(model_.predict(validation_.x), validation_.y);
}

void ModelRunner::save_best() {
  best_ = model_.snapshot();
  if (!checkpoint_.empty()) nn::save_weights(model_, checkpoint_);
}

void ModelRunner::restore_best() {
  if (!best_.empty()) model_.restore(best_);
}

namespace {

TrainData to_train_data(ModelKind kind, const TensorBlock& block) {
  return TrainData{model_input(kind, block), model_targets(block)};
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

TrainOutcome train_with_early_stopping(const HyperConfig& config, const TensorBlock& train,
                                       const TrainSchedule& schedule, std::uint64_t seed,
                                       const std::filesystem::path& checkpoint) {
  schedule.validate();
  if (train.count() == 0) throw EmptyTrainingSet();
  const auto start = std::chrono::steady_clock::now();
  TrainOutcome out{build_model(config, model_input_shape(config.kind, train), derive_seed(seed, 1)),
                   {}};
  Rng split_rng(derive_seed(seed, 2));
  auto [fit, val] = carve_validation(to_train_data(config.kind, train), schedule.validation_fraction,
                                     split_rng);
  ModelRunner runner(out.model, std::move(fit), std::move(val), dynamic_batch_size(train.count()),
                     derive_seed(seed, 3), checkpoint);
  out.history = run_epochs(runner, schedule.max_epochs, schedule.patience, true);
  out.history.seconds = seconds_since(start);
  return out;
}

TrainOutcome train_fixed_epochs(const HyperConfig& config, const TensorBlock& train, int epochs,
                                std::uint64_t seed) {
  if (train.count() == 0) throw EmptyTrainingSet();
  if (epochs < 1) throw std::invalid_argument("epoch count must be at least 1");
  const auto start = std::chrono::steady_clock::now();
  TrainOutcome out{build_model(config, model_input_shape(config.kind, train), derive_seed(seed, 1)),
                   {}};
  ModelRunner runner(out.model, to_train_data(config.kind, train), TrainData{},
                     dynamic_batch_size(train.count()), derive_seed(seed, 3));
  out.history = run_epochs(runner, epochs, 0, false);
  out.history.seconds = seconds_since(start);
  return out;
}

MetricsReport evaluate_model(nn::Sequential& model, ModelKind kind, const TensorBlock& eval) {
  PredictionSet preds;
  preds.scores = model.predict(model_input(kind, eval));
  preds.labels.assign(eval.labels.begin(), eval.labels.end());
  return evaluate(preds);
}

std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::ok: return "ok";
    case RunStatus::infeasible: return "infeasible";
    case RunStatus::failed: return "failed";
    case RunStatus::retrained: return "retrained";
  }
  return "?";
}

RunStatus parse_run_status(const std::string& s) {
  if (s == "ok") return RunStatus::ok;
  if (s == "infeasible") return RunStatus::infeasible;
  if (s == "failed") return RunStatus::failed;
  if (s == "retrained") return RunStatus::retrained;
  throw std::invalid_argument("unknown run status: " + s);
}

std::string results_row(const RunResult& r) {
  const auto& c = r.config;
  const auto& m = r.metrics;
  std::ostringstream os;
  os << to_string(c.kind) << ',' << r.smell << ',' << r.dim << ',' << c.config_id << ','
     << c.layers << ',' << int_or_blank(c.filters) << ',' << int_or_blank(c.kernel) << ','
     << int_or_blank(c.pool) << ',' << int_or_blank(c.embedding_dim) << ','
     << int_or_blank(c.units) << ',' << format_number(m.auc, 6) << ','
     << format_number(m.accuracy, 6) << ',' << format_number(m.precision, 6) << ','
     << format_number(m.recall, 6) << ',' << format_number(m.f1, 6) << ','
     << format_number(m.avg_precision, 6) << ',' << r.epochs << ','
     << format_number(r.train_seconds, 3) << ',' << to_string(r.status);
  return os.str();
}

RunResult parse_results_row(const std::string& line) {
  const auto f = split_csv(line);
  if (f.size() != 19) throw std::invalid_argument("results row needs 19 fields: " + line);
  RunResult r;
  r.config.kind = parse_model_kind(f[0]);
  r.smell = f[1];
  r.dim = parse_int(f[2]);
  r.config.config_id = parse_int(f[3]);
  r.config.layers = parse_int(f[4]);
  r.config.filters = parse_int(f[5]);
  r.config.kernel = parse_int(f[6]);
  r.config.pool = parse_int(f[7]);
  r.config.embedding_dim = parse_int(f[8]);
  r.config.units = parse_int(f[9]);
  r.metrics.auc = parse_double(f[10]);
  r.metrics.accuracy = parse_double(f[11]);
  r.metrics.precision = parse_double(f[12]);
  r.metrics.recall = parse_double(f[13]);
  r.metrics.f1 = parse_double(f[14]);
  r.metrics.avg_precision = parse_double(f[15]);
  r.epochs = parse_int(f[16]);
  r.train_seconds = parse_double(f[17]);
  r.status = parse_run_status(f[18]);
  return r;
}

std::vector<RunResult> read_results(const std::filesystem::path& csv) {
  std::vector<RunResult> rows;
  std::ifstream in(csv);
  if (!in) return rows;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (!line.empty()) rows.push_back(parse_results_row(line));
  }
  return rows;
}

void write_results(const std::filesystem::path& csv, std::vector<RunResult> rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const RunResult& a, const RunResult& b) {
    return a.config.config_id < b.config.config_id;
  });
  if (csv.has_parent_path()) std::filesystem::create_directories(csv.parent_path());
  std::ofstream out(csv, std::ios::trunc);
  out << kResultsHeader << '\n';
  for (const auto& r : rows) out << results_row(r) << '\n';
}

std::uint64_t config_seed(std::uint64_t master_seed, int config_id) {
  return derive_seed(master_seed, static_cast<std::uint64_t>(config_id));
}

RunResult run_config(const HyperConfig& config, const TensorBlock& train, const TensorBlock& eval,
                     const GridOptions& options) {
  RunResult r;
  r.config = config;
  r.smell = options.smell;
  r.dim = train.dim;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  r.metrics.auc = r.metrics.accuracy = r.metrics.precision = r.metrics.recall = r.metrics.f1 =
      r.metrics.avg_precision = nan;
  if (infeasibility(config, model_input_shape(config.kind, train))) {
    r.status = RunStatus::infeasible;
    return r;
  }
  std::filesystem::path ckpt;
  if (!options.checkpoint_dir.empty()) {
    ckpt = options.checkpoint_dir / (to_string(config.kind) + "_" + options.smell + "_" +
                                     std::to_string(config.config_id) + ".wt");
  }
  try {
    auto outcome = train_with_early_stopping(config, train, options.schedule,
                                             config_seed(options.master_seed, config.config_id), ckpt);
    const TensorBlock& target =
        eval.rows == train.rows && eval.cols == train.cols ? eval : conform(eval, train.rows, train.cols);
    r.metrics = evaluate_model(outcome.model, config.kind, target);
    r.epochs = outcome.history.stopped_epoch;
    r.train_seconds = options.record_timing ? outcome.history.seconds : 0.0;
    r.status = RunStatus::ok;
  } catch (const NonFiniteLoss&) {
    r.status = RunStatus::failed;
  }
  return r;
}

std::vector<RunResult> run_grid(ModelKind kind, const TensorBlock& train, const TensorBlock& eval,
                                const GridOptions& options) {
  std::vector<RunResult> rows =
      options.results_csv.empty() ? std::vector<RunResult>{} : read_results(options.results_csv);
  std::set<int> done;
  for (const auto& r : rows) done.insert(r.config.config_id);
  const std::set<int> wanted(options.config_ids.begin(), options.config_ids.end());

  if (!options.results_csv.empty() && !std::filesystem::exists(options.results_csv)) {
    write_results(options.results_csv, {});
  }
  for (const auto& config : enumerate_grid(kind)) {
    if (!wanted.empty() && !wanted.count(config.config_id)) continue;
    if (done.count(config.config_id)) continue;
    RunResult r = run_config(config, train, eval, options);
    if (!options.results_csv.empty()) {
      std::ofstream out(options.results_csv, std::ios::app);
      out << results_row(r) << '\n';
    }
    if (options.on_result) options.on_result(r);
    rows.push_back(std::move(r));
  }
  if (!options.results_csv.empty()) write_results(options.results_csv, rows);
  std::stable_sort(rows.begin(), rows.end(), [](const RunResult& a, const RunResult& b) {
    return a.config.config_id < b.config.config_id;
  });
  return rows;
}

const RunResult& select_best(const std::vector<RunResult>& results) {
  const RunResult* best = nullptr;
  for (const auto& r : results) {
    if (r.status != RunStatus::ok || std::isnan(r.metrics.f1)) continue;
    if (!best || r.metrics.f1 > best->metrics.f1 ||
        (r.metrics.f1 == best->metrics.f1 && r.config.config_id < best->config.config_id)) {
      best = &r;
    }
  }
  if (!best) throw AllConfigsFailed();
  return *best;
}

RunResult select_best_and_retrain(const std::vector<RunResult>& results, const TensorBlock& train,
                                  const TensorBlock& eval, const GridOptions& options) {
  const RunResult& best = select_best(results);
  HyperConfig config = grid_config(best.config.kind, best.config.config_id);
  const std::uint64_t seed = derive_seed(config_seed(options.master_seed, config.config_id),
                                         0x726574726169ULL);
  auto outcome = train_fixed_epochs(config, train, best.epochs, seed);
  const TensorBlock& target =
      eval.rows == train.rows && eval.cols == train.cols ? eval : conform(eval, train.rows, train.cols);
  RunResult r;
  r.config = config;
  r.smell = options.smell;
  r.dim = train.dim;
  r.metrics = evaluate_model(outcome.model, config.kind, target);
  r.epochs = outcome.history.stopped_epoch;
  r.train_seconds = options.record_timing ? outcome.history.seconds : 0.0;
  r.status = RunStatus::retrained;
  return r;
}

}  // namespace smellnet
