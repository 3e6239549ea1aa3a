#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "smellnet/dataset.hpp"
#include "smellnet/smell_labeler.hpp"
#include "smellnet/synth.hpp"
#include "smellnet/trainer.hpp"

namespace smellnet {

/// Bad user input: unknown keys, malformed values, missing paths or datasets.
class InvalidConfig : public std::invalid_argument {
 public:
  explicit InvalidConfig(const std::string& what) : std::invalid_argument("InvalidConfig: " + what) {}
};

using Settings = std::map<std::string, std::string>;

/// Flat key=value file; '#' starts a comment, blank lines are ignored.
Settings read_settings(const std::filesystem::path& file);
Settings parse_settings(std::istream& in, const std::string& origin);

struct RunConfig {
  std::map<Language, std::filesystem::path> corpus;
  std::filesystem::path out = "out";
  Language lang = Language::csharp;
  std::vector<Smell> smells = {Smell::complex_method, Smell::empty_catch_block, Smell::magic_number,
                               Smell::multifaceted_abstraction};
  std::vector<int> dims = {1, 2};
  std::vector<ModelKind> models = {ModelKind::cnn1d, ModelKind::cnn2d, ModelKind::rnn};
  std::optional<std::uint64_t> seed;
  Thresholds thresholds;
  CurationConfig curation;
  std::optional<int> max_epochs;
  std::optional<int> patience;
  std::optional<int> config_id;
  bool grid = false;
  bool record_timing = true;
  bool dump_tokens = false;
  SyntheticSpec synth;

  /// Unknown keys and unparsable values throw InvalidConfig.
  static RunConfig from_settings(const Settings& settings);

  std::uint64_t master_seed() const;
  const std::filesystem::path& corpus_for(Language lang) const;
  TrainSchedule schedule_for(ModelKind kind) const;
  std::filesystem::path dataset_dir(Language lang, Smell smell, int dim) const;
  std::filesystem::path transfer_dir(Language from, Language to, Smell smell, int dim) const;
};

Language other_language(Language lang);

/// One sample per fragment of the smell's granularity, labeled by its verdict.
std::vector<Sample> build_samples(const LabeledCorpus& corpus, Smell smell, int dim);

/// Curation seed of one (language, smell, dim) dataset.
std::uint64_t dataset_seed(std::uint64_t master, Language lang, Smell smell, int dim);

CuratedDataset curate_for(const LabeledCorpus& corpus, Smell smell, int dim,
                          const CurationConfig& base, std::uint64_t master);

/// Highest F1 among ok and retrained rows; NaN when there is none.
double best_f1(const std::vector<RunResult>& rows);

void cmd_scan(const RunConfig& config, std::ostream& log);
void cmd_build(const RunConfig& config, std::ostream& log);
void cmd_train(const RunConfig& config, std::ostream& log);
void cmd_grid(const RunConfig& config, std::ostream& log);
void cmd_transfer(const RunConfig& config, std::ostream& log);
void cmd_baseline(const RunConfig& config, std::ostream& log);
void cmd_report(const RunConfig& config, std::ostream& log, bool reference_counts);
void cmd_synth(const RunConfig& config, std::ostream& log);

}  // namespace smellnet
