#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "smellnet/code_model.hpp"

namespace smellnet {

/// Recipe for a labeled synthetic corpus. Injection counts are exact: that
/// many distinct methods (or classes) carry the smell, and no other fragment
/// does.
struct SyntheticSpec {
  Language language = Language::csharp;
  std::size_t methods = 400;
  std::size_t methods_per_class = 8;
  std::size_t min_statements = 3;
  std::size_t max_statements = 9;
  std::size_t complex_method = 0;
  std::size_t empty_catch = 0;
  std::size_t magic_number = 0;
  std::size_t multifaceted = 0;  // extra low-cohesion classes with 8 to 12 methods each
  std::uint64_t seed = 0;

  void validate() const;
};

struct ManifestEntry {
  std::string path;  // relative to the corpus root, '/' separated
  FragmentKind kind = FragmentKind::method;
  std::string container;
  std::string name;
  bool complex_method = false;
  bool empty_catch = false;
  bool magic_number = false;
  bool multifaceted = false;
};

struct SyntheticManifest {
  std::vector<ManifestEntry> entries;

  std::size_t count_methods() const;
  std::size_t count_classes() const;

  /// path,kind,container,name,cm,ecb,mn,ma
  void write(std::ostream& os) const;
  static SyntheticManifest read(std::istream& is);
};

/// Writes source files under `root` and returns the ground truth. `root` is
/// created if needed; existing files with the same names are overwritten.
SyntheticManifest generate_corpus(const SyntheticSpec& spec, const std::filesystem::path& root);

}  // namespace smellnet
