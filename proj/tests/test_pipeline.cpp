#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "smellnet/pipeline.hpp"

using namespace smellnet;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("smellnet_pl_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run_cli(const std::string& args, const fs::path& log) {
  const std::string command =
      std::string(SMELLNET_CLI) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& file) {
  std::ifstream in(file);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST(Settings, ParsesKeyValueLines) {
  std::istringstream in("# header\nseed = 4\n\nout=/tmp/x   # trailing\nsmells=mn, ecb\n");
  const auto s = parse_settings(in, "cfg");
  EXPECT_EQ(s.size(), 3u);
  EXPECT_EQ(s.at("seed"), "4");
  EXPECT_EQ(s.at("out"), "/tmp/x");
  const auto c = RunConfig::from_settings(s);
  EXPECT_EQ(c.master_seed(), 4u);
  EXPECT_EQ(c.smells, (std::vector<Smell>{Smell::magic_number, Smell::empty_catch_block}));
}

TEST(Settings, MalformedLinesNameTheirOrigin) {
  std::istringstream in("seed=1\nnot a pair\n");
  try {
    parse_settings(in, "run.cfg");
    FAIL();
  } catch (const InvalidConfig& e) {
    EXPECT_NE(std::string(e.what()).find("run.cfg:2"), std::string::npos);
  }
}

TEST(Settings, RejectsUnknownKeysAndBadValues) {
  EXPECT_THROW(RunConfig::from_settings({{"sed", "1"}}), InvalidConfig);
  EXPECT_THROW(RunConfig::from_settings({{"seed", "abc"}}), InvalidConfig);
  EXPECT_THROW(RunConfig::from_settings({{"dims", "3"}}), InvalidConfig);
  EXPECT_THROW(RunConfig::from_settings({{"models", "svm"}}), InvalidConfig);
  EXPECT_THROW(RunConfig::from_settings({{"split_fraction", "1.5"}}), InvalidConfig);
  EXPECT_THROW(RunConfig::from_settings({{"lang", "go"}}), InvalidConfig);
}

TEST(Settings, SeedIsRequired) {
  const auto c = RunConfig::from_settings({});
  EXPECT_THROW(c.master_seed(), InvalidConfig);
}

TEST(Settings, ScheduleOverrides) {
  auto c = RunConfig::from_settings({{"max_epochs", "3"}});
  EXPECT_EQ(c.schedule_for(ModelKind::cnn1d).max_epochs, 3);
  EXPECT_EQ(c.schedule_for(ModelKind::cnn1d).patience, 2);
  EXPECT_EQ(c.schedule_for(ModelKind::rnn).patience, 2);
  c = RunConfig::from_settings({{"max_epochs", "3"}, {"patience", "3"}});
  EXPECT_THROW(c.schedule_for(ModelKind::rnn), InvalidConfig);
}

TEST(Settings, OutputLayout) {
  const auto c = RunConfig::from_settings({{"out", "/r"}});
  EXPECT_EQ(c.dataset_dir(Language::java, Smell::magic_number, 2), fs::path("/r/java/mn/2d"));
  EXPECT_EQ(c.transfer_dir(Language::csharp, Language::java, Smell::empty_catch_block, 1),
            fs::path("/r/transfer/csharp_to_java/ecb/1d"));
  EXPECT_NE(dataset_seed(1, Language::java, Smell::magic_number, 1),
            dataset_seed(1, Language::csharp, Smell::magic_number, 1));
  EXPECT_EQ(other_language(Language::java), Language::csharp);
}

TEST(Settings, MissingCorpusIsInvalid) {
  const auto c = RunConfig::from_settings({{"corpus.java", "/definitely/not/here"}});
  EXPECT_THROW(c.corpus_for(Language::java), InvalidConfig);
  EXPECT_THROW(c.corpus_for(Language::csharp), InvalidConfig);
}

TEST(Cli, ExitCodes) {
  const fs::path dir = scratch("exit");
  fs::create_directories(dir / "empty");
  const fs::path log = dir / "log.txt";
  EXPECT_EQ(run_cli("--help", log), 0);
  EXPECT_EQ(run_cli("", log), 2);
  EXPECT_EQ(run_cli("frobnicate", log), 2);
  EXPECT_EQ(run_cli("scan --seed 1 --lang java --out " + dir.string(), log), 2);
  EXPECT_NE(slurp(log).find("InvalidConfig"), std::string::npos);

  std::ofstream(dir / "run.cfg") << "corpus.java = " << (dir / "empty").string() << "\nseed = 1\n";
  EXPECT_EQ(run_cli("--config " + (dir / "run.cfg").string() + " --lang java --out " +
                        dir.string() + " scan",
                    log),
            2);
  EXPECT_NE(slurp(log).find("EmptyCorpus"), std::string::npos);
  EXPECT_EQ(run_cli("--config " + (dir / "run.cfg").string() + " --seed nope scan", log), 2);
}

TEST(Cli, SynthScanBuildTrain) {
  const fs::path dir = scratch("flow");
  const fs::path log = dir / "log.txt";
  const std::string common = "--seed 5 --lang java --out " + dir.string();
  ASSERT_EQ(run_cli(common + " synth --methods 160 --cm 10 --ecb 20 --mn 40 --ma 3", log), 0)
      << slurp(log);
  ASSERT_TRUE(fs::exists(dir / "corpus" / "java.manifest.csv"));
  std::ofstream(dir / "run.cfg") << "corpus.java = " << (dir / "corpus" / "java").string() << "\n";
  const std::string configured = "--config " + (dir / "run.cfg").string() + " " + common;
  ASSERT_EQ(run_cli(configured + " scan", log), 0) << slurp(log);
  EXPECT_TRUE(fs::exists(dir / "java" / "verdicts.csv"));
  ASSERT_EQ(run_cli(configured + " --smell mn --dim 1 build", log), 0) << slurp(log);
  EXPECT_TRUE(fs::exists(dir / "java" / "mn" / "1d" / "manifest.txt"));
  ASSERT_EQ(run_cli(configured + " --smell mn --dim 1 --model rnn --max-epochs 2 --patience 1 "
                                 "--no-timing train",
                    log),
            0)
      << slurp(log);
  const auto rows = read_results(dir / "java" / "mn" / "1d" / "train_rnn.csv");
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].status, RunStatus::ok);
  EXPECT_EQ(rows[0].train_seconds, 0.0);
  ASSERT_EQ(run_cli(configured + " --smell mn --dim 1 baseline", log), 0) << slurp(log);
  EXPECT_TRUE(fs::exists(dir / "java" / "baselines.csv"));
}
