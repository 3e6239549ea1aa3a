#include <CLI11.hpp>

#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "smellnet/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitInvalid = 2;

struct Flags {
  std::string config_file;
  std::map<std::string, std::string> values;
  bool grid = false;
  bool dump_tokens = false;
  bool no_timing = false;
  bool reference_counts = false;
};

void add_value(CLI::App& app, Flags& flags, const std::string& name, const std::string& key,
               const std::string& help) {
  app.add_option_function<std::string>(
      name, [&flags, key](const std::string& v) { flags.values[key] = v; }, help);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Code smell datasets, detectors and transfer experiments"};
  app.require_subcommand(1);
  app.fallthrough();

  Flags flags;
  app.add_option("--config", flags.config_file, "key=value config file; flags override it")
      ->check(CLI::ExistingFile);
  add_value(app, flags, "--seed", "seed", "master seed (required by every stochastic step)");
  add_value(app, flags, "--out", "out", "output root");
  add_value(app, flags, "--lang", "lang", "csharp or java");
  add_value(app, flags, "--smell", "smells", "cm, ecb, mn or ma (comma list allowed)");
  add_value(app, flags, "--dim", "dims", "1 or 2 (comma list allowed)");
  add_value(app, flags, "--model", "models", "cnn1d, cnn2d or rnn (comma list allowed)");
  add_value(app, flags, "--config-id", "config_id", "grid configuration id");
  add_value(app, flags, "--max-epochs", "max_epochs", "override the epoch limit");
  add_value(app, flags, "--patience", "patience", "override the early-stopping patience");
  app.add_flag("--grid", flags.grid, "run the whole hyperparameter grid");
  app.add_flag("--dump-tokens", flags.dump_tokens, "write token id dumps during build");
  app.add_flag("--no-timing", flags.no_timing, "write 0 for train_seconds so reruns compare equal");

  using Command = std::function<void(const smellnet::RunConfig&, std::ostream&)>;
  std::map<CLI::App*, Command> commands;
  auto command = [&](const char* name, const char* help, Command run) {
    CLI::App* sub = app.add_subcommand(name, help);
    commands[sub] = std::move(run);
    return sub;
  };
  command("scan", "label a corpus and write verdicts", smellnet::cmd_scan);
  command("build", "encode and curate datasets", smellnet::cmd_build);
  command("train", "train one configuration per selected model", smellnet::cmd_train);
  command("grid", "run the hyperparameter grid", smellnet::cmd_grid);
  command("transfer", "train on one language and evaluate on the other", smellnet::cmd_transfer);
  command("baseline", "random baselines on the evaluation sets", smellnet::cmd_baseline);
  CLI::App* report = command("report", "direct vs transfer comparison tables",
                             [&](const smellnet::RunConfig& c, std::ostream& log) {
                               smellnet::cmd_report(c, log, flags.reference_counts);
                             });
  report->add_flag("--reference-counts", flags.reference_counts,
                   "use the published sample counts instead of the built datasets");
  CLI::App* synth = command("synth", "generate a labeled synthetic corpus", smellnet::cmd_synth);
  add_value(*synth, flags, "--methods", "synth.methods", "methods in regular classes");
  add_value(*synth, flags, "--methods-per-class", "synth.methods_per_class", "methods per class");
  add_value(*synth, flags, "--cm", "synth.cm", "complex methods to inject");
  add_value(*synth, flags, "--ecb", "synth.ecb", "empty catch blocks to inject");
  add_value(*synth, flags, "--mn", "synth.mn", "magic-number methods to inject");
  add_value(*synth, flags, "--ma", "synth.ma", "multifaceted classes to add");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    smellnet::Settings settings;
    if (!flags.config_file.empty()) settings = smellnet::read_settings(flags.config_file);
    for (const auto& [key, value] : flags.values) settings[key] = value;
    if (flags.grid) settings["grid"] = "true";
    if (flags.dump_tokens) settings["dump_tokens"] = "true";
    if (flags.no_timing) settings["record_timing"] = "false";
    const auto config = smellnet::RunConfig::from_settings(settings);
    for (const auto& [sub, run] : commands) {
      if (sub->parsed()) run(config, std::cout);
    }
  } catch (const smellnet::EmptyCorpusError& e) {
    std::cerr << "EmptyCorpus: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::out_of_range& e) {
    std::cerr << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitOk;
}
