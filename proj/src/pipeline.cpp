#include "smellnet/pipeline.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "smellnet/token_encoder.hpp"

namespace smellnet {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string item; std::getline(in, item, ',');) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T, typename Parse>
T parse_value(const std::string& key, const std::string& value, Parse parse) {
  try {
    std::size_t used = 0;
    T v = parse(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw InvalidConfig("bad value for " + key + ": '" + value + "'");
  }
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  if (!v.empty() && v[0] == '-') throw InvalidConfig("bad value for " + key + ": '" + v + "'");
  return parse_value<std::uint64_t>(key, v, [](const std::string& s, std::size_t* n) {
    return static_cast<std::uint64_t>(std::stoull(s, n));
  });
}

std::size_t to_size(const std::string& key, const std::string& v) {
  return static_cast<std::size_t>(to_u64(key, v));
}

int to_int(const std::string& key, const std::string& v) {
  return parse_value<int>(key, v, [](const std::string& s, std::size_t* n) { return std::stoi(s, n); });
}

double to_double(const std::string& key, const std::string& v) {
  return parse_value<double>(key, v,
                             [](const std::string& s, std::size_t* n) { return std::stod(s, n); });
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw InvalidConfig("bad value for " + key + ": '" + v + "'");
}

Language to_language(const std::string& key, const std::string& v) {
  if (v == "csharp") return Language::csharp;
  if (v == "java") return Language::java;
  throw InvalidConfig("bad value for " + key + ": '" + v + "' (csharp or java)");
}

Smell to_smell(const std::string& key, const std::string& v) {
  for (Smell s : {Smell::complex_method, Smell::empty_catch_block, Smell::magic_number,
                  Smell::multifaceted_abstraction}) {
    if (short_name(s) == v) return s;
  }
  throw InvalidConfig("bad value for " + key + ": '" + v + "' (cm, ecb, mn or ma)");
}

ModelKind to_model(const std::string& key, const std::string& v) {
  try {
    return parse_model_kind(v);
  } catch (const std::invalid_argument&) {
    throw InvalidConfig("bad value for " + key + ": '" + v + "' (cnn1d, cnn2d or rnn)");
  }
}

int to_dim(const std::string& key, const std::string& v) {
  const int d = to_int(key, v);
  if (d != 1 && d != 2) throw InvalidConfig("bad value for " + key + ": '" + v + "' (1 or 2)");
  return d;
}

std::string lang_name(Language lang) { return std::string(to_string(lang)); }
std::string smell_name(Smell smell) { return std::string(short_name(smell)); }
std::string dim_name(int dim) { return std::to_string(dim) + "d"; }

CuratedDataset load_existing(const fs::path& dir) {
  if (!fs::exists(dir / "manifest.txt")) {
    throw InvalidConfig("no dataset at " + dir.string() + "; run build first");
  }
  return load_dataset(dir);
}

std::string vocabulary_hash_of(const fs::path& dir) {
  const auto m = read_manifest(dir / "manifest.txt");
  const auto it = m.find("vocabulary_hash");
  return it == m.end() ? "" : it->second;
}

/// (smell, model, dim) triples the config selects, in a fixed order.
struct Job {
  Smell smell;
  ModelKind model;
  int dim;
};

std::vector<Job> training_jobs(const RunConfig& config) {
  std::vector<Job> jobs;
  for (Smell s : config.smells) {
    for (ModelKind m : config.models) {
      const int dim = input_dim(m);
      if (std::find(config.dims.begin(), config.dims.end(), dim) == config.dims.end()) continue;
      jobs.push_back({s, m, dim});
    }
  }
  if (jobs.empty()) throw InvalidConfig("no model matches the selected dims");
  return jobs;
}

GridOptions grid_options(const RunConfig& config, Smell smell, ModelKind model) {
  GridOptions o;
  o.smell = smell_name(smell);
  o.master_seed = config.master_seed();
  o.schedule = config.schedule_for(model);
  o.record_timing = config.record_timing;
  return o;
}

/// Replaces the row with the same config id, or appends it.
void upsert_result(const fs::path& csv, const RunResult& row) {
  auto rows = read_results(csv);
  std::erase_if(rows, [&](const RunResult& r) { return r.config.config_id == row.config.config_id; });
  rows.push_back(row);
  write_results(csv, rows);
}

std::string summary(const RunResult& r) {
  return r.config.describe() + " " + to_string(r.status) + " f1=" + format_number(r.metrics.f1, 4) +
         " auc=" + format_number(r.metrics.auc, 4) + " epochs=" + std::to_string(r.epochs);
}

std::vector<RunResult> results_if_present(const fs::path& csv) {
  return fs::exists(csv) ? read_results(csv) : std::vector<RunResult>{};
}

/// Best F1 for a model in a results directory: grid results first, then the
/// single-configuration runs.
double model_f1(const fs::path& dir, ModelKind model) {
  const std::string m = to_string(model);
  for (const char* prefix : {"best_", "grid_", "train_", "results_"}) {
    const double f1 = best_f1(results_if_present(dir / (prefix + m + ".csv")));
    if (!std::isnan(f1)) return f1;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

SampleCounts counts_of(const fs::path& dir, Smell smell, int dim) {
  const auto m = read_manifest(dir / "manifest.txt");
  auto get = [&](const std::string& key) -> std::size_t {
    const auto it = m.find(key);
    if (it == m.end()) throw InvalidConfig("manifest " + dir.string() + " lacks " + key);
    return to_size(key, it->second);
  };
  return SampleCounts{smell_name(smell), dim, get("positive.train_balanced"), get("eval.positive"),
                      get("eval.negative")};
}

void write_text(const fs::path& file, const std::string& text) {
  fs::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out << text;
}

}  // namespace

Settings parse_settings(std::istream& in, const std::string& origin) {
  Settings s;
  std::string line;
  for (int n = 1; std::getline(in, line); ++n) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InvalidConfig(origin + ":" + std::to_string(n) + ": expected key=value");
    }
    s[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return s;
}

Settings read_settings(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw InvalidConfig("cannot read config file " + file.string());
  return parse_settings(in, file.string());
}

RunConfig RunConfig::from_settings(const Settings& settings) {
  RunConfig c;
  for (const auto& [key, value] : settings) {
    if (key == "corpus.csharp") c.corpus[Language::csharp] = value;
    else if (key == "corpus.java") c.corpus[Language::java] = value;
    else if (key == "out") c.out = value;
    else if (key == "lang") c.lang = to_language(key, value);
    else if (key == "seed") c.seed = to_u64(key, value);
    else if (key == "smell" || key == "smells") {
      c.smells.clear();
      for (const auto& v : split_list(value)) c.smells.push_back(to_smell(key, v));
    } else if (key == "dim" || key == "dims") {
      c.dims.clear();
      for (const auto& v : split_list(value)) c.dims.push_back(to_dim(key, v));
    } else if (key == "model" || key == "models") {
      c.models.clear();
      for (const auto& v : split_list(value)) c.models.push_back(to_model(key, v));
    } else if (key == "cc_limit") c.thresholds.cc_limit = to_int(key, value);
    else if (key == "lcom_limit") c.thresholds.lcom_limit = to_double(key, value);
    else if (key == "min_methods") c.thresholds.min_methods = to_int(key, value);
    else if (key == "min_fields") c.thresholds.min_fields = to_int(key, value);
    else if (key == "allowed_literals") {
      const auto items = split_list(value);
      c.thresholds.allowed_literals = {items.begin(), items.end()};
    } else if (key == "split_fraction") c.curation.split_fraction = to_double(key, value);
    else if (key == "max_train_per_class") c.curation.max_train_per_class = to_size(key, value);
    else if (key == "chunk_bytes") c.curation.chunk_bytes = to_size(key, value);
    else if (key == "max_epochs") c.max_epochs = to_int(key, value);
    else if (key == "patience") c.patience = to_int(key, value);
    else if (key == "config_id") c.config_id = to_int(key, value);
    else if (key == "grid") c.grid = to_bool(key, value);
    else if (key == "record_timing") c.record_timing = to_bool(key, value);
    else if (key == "dump_tokens") c.dump_tokens = to_bool(key, value);
    else if (key == "synth.methods") c.synth.methods = to_size(key, value);
    else if (key == "synth.methods_per_class") c.synth.methods_per_class = to_size(key, value);
    else if (key == "synth.min_statements") c.synth.min_statements = to_size(key, value);
    else if (key == "synth.max_statements") c.synth.max_statements = to_size(key, value);
    else if (key == "synth.cm") c.synth.complex_method = to_size(key, value);
    else if (key == "synth.ecb") c.synth.empty_catch = to_size(key, value);
    else if (key == "synth.mn") c.synth.magic_number = to_size(key, value);
    else if (key == "synth.ma") c.synth.multifaceted = to_size(key, value);
    else throw InvalidConfig("unknown key '" + key + "'");
  }
  if (c.smells.empty()) throw InvalidConfig("no smell selected");
  if (c.dims.empty()) throw InvalidConfig("no dimension selected");
  if (c.models.empty()) throw InvalidConfig("no model selected");
  try {
    c.thresholds.validate();
    c.synth.validate();
  } catch (const InvalidConfig&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw InvalidConfig(e.what());
  }
  if (!(c.curation.split_fraction > 0 && c.curation.split_fraction < 1)) {
    throw InvalidConfig("split_fraction must lie in (0, 1)");
  }
  if (c.curation.max_train_per_class == 0) throw InvalidConfig("max_train_per_class must be positive");
  if (c.curation.chunk_bytes == 0) throw InvalidConfig("chunk_bytes must be positive");
  return c;
}

std::uint64_t RunConfig::master_seed() const {
  if (!seed) throw InvalidConfig("a seed is required (--seed or seed=)");
  return *seed;
}

const fs::path& RunConfig::corpus_for(Language l) const {
  const auto it = corpus.find(l);
  if (it == corpus.end()) throw InvalidConfig("no corpus." + lang_name(l) + " configured");
  if (!fs::is_directory(it->second)) {
    throw InvalidConfig("corpus directory " + it->second.string() + " does not exist");
  }
  return it->second;
}

TrainSchedule RunConfig::schedule_for(ModelKind kind) const {
  TrainSchedule s = TrainSchedule::for_model(kind);
  if (max_epochs) s.max_epochs = *max_epochs;
  if (patience) s.patience = *patience;
  if (max_epochs && !patience && s.patience >= s.max_epochs) s.patience = std::max(1, s.max_epochs - 1);
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw InvalidConfig(e.what());
  }
  return s;
}

fs::path RunConfig::dataset_dir(Language l, Smell smell, int dim) const {
  return out / lang_name(l) / smell_name(smell) / dim_name(dim);
}

fs::path RunConfig::transfer_dir(Language from, Language to, Smell smell, int dim) const {
  return out / "transfer" / (lang_name(from) + "_to_" + lang_name(to)) / smell_name(smell) /
         dim_name(dim);
}

Language other_language(Language lang) {
  return lang == Language::csharp ? Language::java : Language::csharp;
}

std::vector<Sample> build_samples(const LabeledCorpus& corpus, Smell smell, int dim) {
  std::map<std::string, bool> label;
  for (const auto& v : corpus.verdicts) {
    if (v.smell == smell) label[v.fragment_id] = v.positive;
  }
  const Vocabulary& vocab = Vocabulary::standard();
  const bool classes = granularity_of(smell) == FragmentKind::code_class;
  std::vector<Sample> samples;
  for (const auto& unit : corpus.scan.units) {
    for (const auto& f : classes ? unit.classes : unit.methods) {
      const auto it = label.find(f.id());
      if (it == label.end()) throw std::logic_error("fragment without a verdict: " + f.id());
      samples.push_back(dim == 1 ? make_sample_1d(f.id(), encode_linear(f, vocab), it->second)
                                 : make_sample_2d(f.id(), encode_grid(f, vocab), it->second));
    }
  }
  return samples;
}

std::uint64_t dataset_seed(std::uint64_t master, Language lang, Smell smell, int dim) {
  const std::uint64_t tag = 0x100u * (static_cast<std::uint64_t>(lang) + 1) +
                            0x10u * static_cast<std::uint64_t>(smell) + static_cast<std::uint64_t>(dim);
  return derive_seed(master, tag);
}

CuratedDataset curate_for(const LabeledCorpus& corpus, Smell smell, int dim,
                          const CurationConfig& base, std::uint64_t master) {
  CurationConfig cfg = base;
  cfg.seed = dataset_seed(master, corpus.scan.language, smell, dim);
  CuratedDataset ds = curate(build_samples(corpus, smell, dim), dim, cfg);
  ds.smell = smell_name(smell);
  return ds;
}

double best_f1(const std::vector<RunResult>& rows) {
  double best = std::numeric_limits<double>::quiet_NaN();
  for (const auto& r : rows) {
    if (r.status != RunStatus::ok && r.status != RunStatus::retrained) continue;
    if (std::isnan(r.metrics.f1)) continue;
    if (std::isnan(best) || r.metrics.f1 > best) best = r.metrics.f1;
  }
  return best;
}

void cmd_scan(const RunConfig& config, std::ostream& log) {
  const auto corpus = label_corpus(config.corpus_for(config.lang), config.lang, config.thresholds);
  const fs::path dir = config.out / lang_name(config.lang);
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "verdicts.csv", std::ios::binary);
    write_verdicts(out, corpus.verdicts);
  }
  std::ostringstream report;
  corpus.report.print(report);
  write_text(dir / "corpus_report.txt", report.str());
  for (const auto& s : corpus.scan.skipped) log << s.diagnostic() << "\n";
  log << report.str();
}

void cmd_build(const RunConfig& config, std::ostream& log) {
  const std::uint64_t master = config.master_seed();
  const auto corpus = label_corpus(config.corpus_for(config.lang), config.lang, config.thresholds);
  for (const auto& s : corpus.scan.skipped) log << s.diagnostic() << "\n";

  if (config.dump_tokens) {
    const Vocabulary& vocab = Vocabulary::standard();
    for (int dim : config.dims) {
      for (FragmentKind kind : {FragmentKind::method, FragmentKind::code_class}) {
        std::ostringstream dump;
        for (const auto& unit : corpus.scan.units) {
          for (const auto& f : kind == FragmentKind::method ? unit.methods : unit.classes) {
            if (dim == 1) {
              dump << dump_ids(encode_linear(f, vocab).ids) << "\n";
            } else {
              dump << dump_ids(make_sample_2d(f.id(), encode_grid(f, vocab), false).flattened())
                   << "\n";
            }
          }
        }
        write_text(config.out / lang_name(config.lang) /
                       ("tokens_" + std::string(to_string(kind)) + "_" + dim_name(dim) + ".txt"),
                   dump.str());
      }
    }
  }

  std::vector<std::vector<std::string>> table = {{"smell", "dim", "class", "initial", "dedup",
                                                  "filter", "train", "eval", "capped", "balanced"}};
  for (Smell smell : config.smells) {
    for (int dim : config.dims) {
      const CuratedDataset ds = curate_for(corpus, smell, dim, config.curation, master);
      save_dataset(ds, config.dataset_dir(config.lang, smell, dim),
                   {{"language", lang_name(config.lang)},
                    {"seed", std::to_string(dataset_seed(master, config.lang, smell, dim))}},
                   config.curation.chunk_bytes);
      for (const auto& [name, c] : {std::pair{"positive", ds.counts.positive},
                                    std::pair{"negative", ds.counts.negative}}) {
        table.push_back({smell_name(smell), std::to_string(dim), name, std::to_string(c.initial),
                         std::to_string(c.after_dedup), std::to_string(c.after_filter),
                         std::to_string(c.train_split), std::to_string(c.eval_split),
                         std::to_string(c.train_capped), std::to_string(c.train_balanced)});
      }
    }
  }
  log << format_table(table);
}

void cmd_train(const RunConfig& config, std::ostream& log) {
  if (config.grid) return cmd_grid(config, log);
  for (const Job& job : training_jobs(config)) {
    const fs::path dir = config.dataset_dir(config.lang, job.smell, job.dim);
    const CuratedDataset ds = load_existing(dir);
    const HyperConfig hc = grid_config(job.model, config.config_id.value_or(1));
    GridOptions o = grid_options(config, job.smell, job.model);
    o.checkpoint_dir = dir / "checkpoints";
    fs::create_directories(o.checkpoint_dir);
    const RunResult r = run_config(hc, ds.train, ds.eval, o);
    upsert_result(dir / ("train_" + to_string(job.model) + ".csv"), r);
    log << smell_name(job.smell) << " " << summary(r) << "\n";
  }
}

void cmd_grid(const RunConfig& config, std::ostream& log) {
  for (const Job& job : training_jobs(config)) {
    const fs::path dir = config.dataset_dir(config.lang, job.smell, job.dim);
    const CuratedDataset ds = load_existing(dir);
    GridOptions o = grid_options(config, job.smell, job.model);
    o.results_csv = dir / ("grid_" + to_string(job.model) + ".csv");
    o.checkpoint_dir = dir / "checkpoints";
    fs::create_directories(o.checkpoint_dir);
    o.on_result = [&](const RunResult& r) { log << smell_name(job.smell) << " " << summary(r) << "\n"; };
    const auto rows = run_grid(job.model, ds.train, ds.eval, o);
    try {
      const RunResult best = select_best_and_retrain(rows, ds.train, ds.eval, o);
      write_results(dir / ("best_" + to_string(job.model) + ".csv"), {best});
      log << smell_name(job.smell) << " best " << summary(best) << "\n";
    } catch (const AllConfigsFailed& e) {
      log << smell_name(job.smell) << " " << to_string(job.model) << ": " << e.what() << "\n";
    }
  }
}

void cmd_transfer(const RunConfig& config, std::ostream& log) {
  for (Language from : {config.lang, other_language(config.lang)}) {
    const Language to = other_language(from);
    for (const Job& job : training_jobs(config)) {
      const fs::path src = config.dataset_dir(from, job.smell, job.dim);
      const fs::path dst = config.dataset_dir(to, job.smell, job.dim);
      const CuratedDataset train = load_existing(src);
      const CuratedDataset eval = load_existing(dst);
      if (vocabulary_hash_of(src) != vocabulary_hash_of(dst)) {
        throw InvalidConfig("datasets " + src.string() + " and " + dst.string() +
                            " use different vocabularies");
      }
      const fs::path dir = config.transfer_dir(from, to, job.smell, job.dim);
      fs::create_directories(dir);
      GridOptions o = grid_options(config, job.smell, job.model);
      const std::string tag = lang_name(from) + "->" + lang_name(to) + " " + smell_name(job.smell) + " ";
      if (config.grid) {
        o.results_csv = dir / ("grid_" + to_string(job.model) + ".csv");
        o.on_result = [&](const RunResult& r) { log << tag << summary(r) << "\n"; };
        run_grid(job.model, train.train, eval.eval, o);
        continue;
      }
      int id = config.config_id.value_or(1);
      if (!config.config_id) {
        const auto direct = results_if_present(src / ("grid_" + to_string(job.model) + ".csv"));
        try {
          id = select_best(direct).config.config_id;
        } catch (const AllConfigsFailed&) {
        }
      }
      const RunResult r = run_config(grid_config(job.model, id), train.train, eval.eval, o);
      upsert_result(dir / ("results_" + to_string(job.model) + ".csv"), r);
      log << tag << summary(r) << "\n";
    }
  }
}

void cmd_baseline(const RunConfig& config, std::ostream& log) {
  const std::uint64_t master = config.master_seed();
  std::ostringstream csv;
  csv << "smell,dim,baseline,precision,recall,f1,eval_positive,eval_negative\n";
  std::vector<std::vector<std::string>> table = {
      {"smell", "dim", "baseline", "precision", "recall", "f1"}};
  for (Smell smell : config.smells) {
    for (int dim : config.dims) {
      const CuratedDataset ds = load_existing(config.dataset_dir(config.lang, smell, dim));
      const std::vector<bool> labels(ds.eval.labels.begin(), ds.eval.labels.end());
      const double fraction = ds.train.count() == 0
                                  ? 0.0
                                  : static_cast<double>(ds.train.positives()) /
                                        static_cast<double>(ds.train.count());
      const std::uint64_t seed = derive_seed(dataset_seed(master, config.lang, smell, dim), 0xba5e);
      const std::pair<std::string, MetricsReport> rows[] = {
          {"all_positive", evaluate(baseline_all_positive(labels))},
          {"frequency", evaluate(baseline_frequency(fraction, labels, seed))},
      };
      for (const auto& [name, m] : rows) {
        csv << smell_name(smell) << ',' << dim << ',' << name << ',' << format_number(m.precision, 6)
            << ',' << format_number(m.recall, 6) << ',' << format_number(m.f1, 6) << ','
            << ds.eval.positives() << ',' << ds.eval.count() - ds.eval.positives() << '\n';
        table.push_back({smell_name(smell), std::to_string(dim), name, format_number(m.precision, 2),
                         format_number(m.recall, 2), format_number(m.f1, 2)});
      }
    }
  }
  write_text(config.out / lang_name(config.lang) / "baselines.csv", csv.str());
  log << format_table(table);
}

void cmd_report(const RunConfig& config, std::ostream& log, bool reference_counts) {
  const Language from = config.lang, to = other_language(from);
  std::ostringstream text, csv;

  std::vector<std::vector<std::string>> ratios = {
      {"smell", "dim", "direct_pos", "direct_neg", "direct_ratio", "transfer_pos", "transfer_neg",
       "transfer_ratio", "ratio_difference"}};
  std::map<std::pair<Smell, int>, double> ratio_diff;
  for (Smell smell : config.smells) {
    for (int dim : config.dims) {
      SampleCounts direct, transfer;
      if (reference_counts) {
        direct = find_counts(reference_counts_direct(), smell_name(smell), dim);
        transfer = find_counts(reference_counts_transfer(), smell_name(smell), dim);
      } else {
        const fs::path a = config.dataset_dir(from, smell, dim), b = config.dataset_dir(to, smell, dim);
        if (!fs::exists(a / "manifest.txt") || !fs::exists(b / "manifest.txt")) continue;
        direct = counts_of(a, smell, dim);
        transfer = counts_of(b, smell, dim);
      }
      double diff = std::numeric_limits<double>::quiet_NaN();
      if (transfer.eval_ratio() != 0) diff = ratio_difference(direct.eval_ratio(), transfer.eval_ratio());
      ratio_diff[{smell, dim}] = diff;
      ratios.push_back({smell_name(smell), std::to_string(dim), std::to_string(direct.eval_positive),
                        std::to_string(direct.eval_negative), format_number(direct.eval_ratio(), 4),
                        std::to_string(transfer.eval_positive), std::to_string(transfer.eval_negative),
                        format_number(transfer.eval_ratio(), 4), format_number(diff, 2)});
    }
  }
  text << "Evaluation sample ratios (" << (reference_counts ? "reference counts" : lang_name(from) +
                                                                                      " -> " + lang_name(to))
       << ")\n"
       << format_table(ratios) << "\n";

  std::vector<std::vector<std::string>> perf = {
      {"smell", "dim", "model", "direct_f1", "transfer_f1", "f1_difference", "ratio_difference"}};
  csv << "smell,dim,model,direct_f1,transfer_f1,f1_difference,ratio_difference\n";
  std::vector<double> direct_f1s, transfer_f1s, f1_diffs, ratio_diffs;
  for (Smell smell : config.smells) {
    for (ModelKind model : config.models) {
      const int dim = input_dim(model);
      if (std::find(config.dims.begin(), config.dims.end(), dim) == config.dims.end()) continue;
      const double d = model_f1(config.dataset_dir(from, smell, dim), model);
      const double t = model_f1(config.transfer_dir(from, to, smell, dim), model);
      if (std::isnan(d) && std::isnan(t)) continue;
      double f1_diff = std::numeric_limits<double>::quiet_NaN();
      if (!std::isnan(d) && !std::isnan(t) && d != 0) f1_diff = f1_relative_difference(d, t);
      const auto rd = ratio_diff.find({smell, dim});
      const double r = rd == ratio_diff.end() ? std::numeric_limits<double>::quiet_NaN() : rd->second;
      perf.push_back({smell_name(smell), std::to_string(dim), to_string(model), format_number(d, 4),
                      format_number(t, 4), format_number(f1_diff, 2), format_number(r, 2)});
      csv << smell_name(smell) << ',' << dim << ',' << to_string(model) << ',' << format_number(d, 6)
          << ',' << format_number(t, 6) << ',' << format_number(f1_diff, 6) << ','
          << format_number(r, 6) << '\n';
      if (!std::isnan(d) && !std::isnan(t)) {
        direct_f1s.push_back(d);
        transfer_f1s.push_back(t);
      }
      if (smell != Smell::multifaceted_abstraction && !std::isnan(f1_diff) && !std::isnan(r)) {
        f1_diffs.push_back(f1_diff);
        ratio_diffs.push_back(r);
      }
    }
  }
  text << "Direct vs transfer F1\n" << format_table(perf) << "\n";

  auto correlation = [&](const std::string& title, const std::vector<double>& x,
                         const std::vector<double>& y) {
    text << title << ": ";
    try {
      const SpearmanResult s = spearman(x, y);
      text << "rho=" << format_number(s.rho, 4) << " p=" << format_number(s.p_value, 4)
           << " n=" << s.n << "\n";
    } catch (const std::exception& e) {
      text << "undefined (" << e.what() << ", n=" << x.size() << ")\n";
    }
  };
  correlation("Spearman direct vs transfer F1", direct_f1s, transfer_f1s);
  correlation("Spearman F1 difference vs ratio difference", f1_diffs, ratio_diffs);

  write_text(config.out / "report.txt", text.str());
  write_text(config.out / "report.csv", csv.str());
  log << text.str();
}

void cmd_synth(const RunConfig& config, std::ostream& log) {
  SyntheticSpec spec = config.synth;
  spec.language = config.lang;
  spec.seed = derive_seed(config.master_seed(), static_cast<std::uint64_t>(config.lang) + 1);
  const fs::path root = config.out / "corpus" / lang_name(config.lang);
  fs::remove_all(root);
  const SyntheticManifest manifest = generate_corpus(spec, root);
  std::ostringstream m;
  manifest.write(m);
  write_text(config.out / "corpus" / (lang_name(config.lang) + ".manifest.csv"), m.str());
  log << "wrote " << manifest.count_classes() << " classes and " << manifest.count_methods()
      << " methods under " << root.string() << "\n";
}

}  // namespace smellnet
