#include <gtest/gtest.h>

#include <filesystem>
#include <map>
#include <sstream>

#include "smellnet/smell_labeler.hpp"
#include "smellnet/synth.hpp"

using namespace smellnet;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("smellnet_synth_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

using Key = std::pair<std::string, std::string>;

std::map<Key, std::map<Smell, bool>> verdict_table(const LabeledCorpus& corpus) {
  std::map<Key, std::map<Smell, bool>> table;
  for (const auto& v : corpus.verdicts) table[{v.path, v.name}][v.smell] = v.positive;
  return table;
}

void expect_labels_match(Language lang, std::uint64_t seed) {
  SyntheticSpec spec;
  spec.language = lang;
  spec.methods = 120;
  spec.complex_method = 15;
  spec.empty_catch = 20;
  spec.magic_number = 30;
  spec.multifaceted = 3;
  spec.seed = seed;
  const fs::path root = fresh_dir(std::string(to_string(lang)) + std::to_string(seed));
  const auto manifest = generate_corpus(spec, root);
  ASSERT_GE(manifest.count_methods(), 120u + 3 * 8);

  const auto corpus = label_corpus(root, lang, Thresholds{});
  EXPECT_TRUE(corpus.scan.skipped.empty());
  EXPECT_EQ(corpus.report.method_fragments, manifest.count_methods());
  EXPECT_EQ(corpus.report.class_fragments, manifest.count_classes());
  EXPECT_EQ(corpus.report.positive_count(Smell::complex_method), 15u);
  EXPECT_EQ(corpus.report.positive_count(Smell::empty_catch_block), 20u);
  EXPECT_EQ(corpus.report.positive_count(Smell::magic_number), 30u);
  EXPECT_EQ(corpus.report.positive_count(Smell::multifaceted_abstraction), 3u);

  const auto table = verdict_table(corpus);
  for (const auto& e : manifest.entries) {
    const auto it = table.find({e.path, e.name});
    ASSERT_NE(it, table.end()) << e.path << " " << e.name;
    const auto& v = it->second;
    if (e.kind == FragmentKind::method) {
      EXPECT_EQ(v.at(Smell::complex_method), e.complex_method) << e.path << " " << e.name;
      EXPECT_EQ(v.at(Smell::empty_catch_block), e.empty_catch) << e.path << " " << e.name;
      EXPECT_EQ(v.at(Smell::magic_number), e.magic_number) << e.path << " " << e.name;
    } else {
      EXPECT_EQ(v.at(Smell::multifaceted_abstraction), e.multifaceted) << e.path << " " << e.name;
    }
  }
}

}  // namespace

TEST(Synth, LabelerAgreesWithManifestCSharp) { expect_labels_match(Language::csharp, 11); }

TEST(Synth, LabelerAgreesWithManifestJava) { expect_labels_match(Language::java, 12); }

TEST(Synth, SameSeedSameFiles) {
  SyntheticSpec spec;
  spec.methods = 30;
  spec.magic_number = 5;
  spec.seed = 4;
  const fs::path a = fresh_dir("same_a"), b = fresh_dir("same_b");
  std::ostringstream ma, mb;
  generate_corpus(spec, a).write(ma);
  generate_corpus(spec, b).write(mb);
  EXPECT_EQ(ma.str(), mb.str());
  for (const auto& entry : fs::recursive_directory_iterator(a)) {
    if (!entry.is_regular_file()) continue;
    const fs::path twin = b / fs::relative(entry.path(), a);
    ASSERT_TRUE(fs::exists(twin));
    EXPECT_EQ(fs::file_size(entry.path()), fs::file_size(twin));
  }
}

TEST(Synth, ManifestRoundTrips) {
  SyntheticSpec spec;
  spec.methods = 20;
  spec.empty_catch = 4;
  spec.multifaceted = 1;
  const auto m = generate_corpus(spec, fresh_dir("roundtrip"));
  std::stringstream ss;
  m.write(ss);
  const auto back = SyntheticManifest::read(ss);
  ASSERT_EQ(back.entries.size(), m.entries.size());
  for (std::size_t i = 0; i < m.entries.size(); ++i) {
    EXPECT_EQ(back.entries[i].name, m.entries[i].name);
    EXPECT_EQ(back.entries[i].kind, m.entries[i].kind);
    EXPECT_EQ(back.entries[i].empty_catch, m.entries[i].empty_catch);
    EXPECT_EQ(back.entries[i].multifaceted, m.entries[i].multifaceted);
  }
}

TEST(Synth, RejectsImpossibleInjection) {
  SyntheticSpec spec;
  spec.methods = 5;
  spec.magic_number = 6;
  EXPECT_THROW(spec.validate(), std::invalid_argument);
  spec.magic_number = 0;
  spec.min_statements = 5;
  spec.max_statements = 2;
  EXPECT_THROW(spec.validate(), std::invalid_argument);
}
