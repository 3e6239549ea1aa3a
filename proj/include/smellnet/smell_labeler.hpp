#pragma once

#include <filesystem>
#include <iosfwd>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "smellnet/code_model.hpp"

namespace smellnet {

enum class Smell { complex_method, empty_catch_block, magic_number, multifaceted_abstraction };

inline constexpr Smell kAllSmells[] = {Smell::complex_method, Smell::empty_catch_block,
                                       Smell::magic_number, Smell::multifaceted_abstraction};

/// "cm", "ecb", "mn", "ma"
std::string_view short_name(Smell smell);
Smell parse_smell(std::string_view text);
/// MA is judged on code classes, the rest on methods.
FragmentKind granularity_of(Smell smell);

struct Thresholds {
  int cc_limit = 8;
  std::set<std::string> allowed_literals{"0", "1", "-1"};
  double lcom_limit = 0.8;
  int min_methods = 7;
  int min_fields = 7;

  /// Throws std::invalid_argument when a limit is out of range.
  void validate() const;
};

struct MethodMetrics {
  int cc = 1;
  int magic_literal_count = 0;
  int empty_catch_count = 0;
};

struct ClassMetrics {
  int methods = 0;
  int fields = 0;
  int field_access_sum = 0;
  double lcom = 0.0;
};

struct SmellVerdict {
  std::string fragment_id;
  std::string path;
  FragmentKind kind = FragmentKind::method;
  std::string name;
  int start_line = 0;
  int end_line = 0;
  Smell smell = Smell::complex_method;
  bool positive = false;
  std::string evidence;

  /// path,kind,name,start,end,smell,positive,evidence
  std::string csv_line() const;
};

int cyclomatic_complexity(const CodeFragment& method);

/// Tokens of the method body: from the opening brace through the closing one.
std::vector<LexToken> method_body(const CodeFragment& method);

/// Numeric literals (after unary-minus folding) that are neither allowed nor
/// excused by a constant-declaration or enum context.
std::vector<std::string> magic_literals(const CodeFragment& method, const Thresholds& t);
int count_empty_catch_blocks(const CodeFragment& method);

MethodMetrics method_metrics(const CodeFragment& method, const Thresholds& t);

/// Cohesion of the class' own methods over its own fields. Nested types are
/// opaque: their members count toward neither side.
ClassMetrics class_metrics(const CodeFragment& code_class);
double lcom(const CodeFragment& code_class);
/// The formula alone: 1 - sum/(m*f) clamped to [0,1]; 0 when m <= 1 or f == 0.
double lcom_from_counts(int methods, int fields, int field_access_sum);

SmellVerdict detect_complex_method(const CodeFragment& method, const Thresholds& t);
SmellVerdict detect_magic_number(const CodeFragment& method, const Thresholds& t);
SmellVerdict detect_empty_catch_block(const CodeFragment& method, const Thresholds& t);
SmellVerdict detect_multifaceted_abstraction(const CodeFragment& code_class,
                                             const Thresholds& t);
SmellVerdict detect(Smell smell, const CodeFragment& fragment, const Thresholds& t);

class EmptyCorpusError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CorpusReport {
  Language language = Language::java;
  std::size_t files_scanned = 0;
  std::size_t files_skipped = 0;
  std::size_t method_fragments = 0;
  std::size_t class_fragments = 0;
  std::size_t positives[4] = {0, 0, 0, 0};  // indexed by Smell
  std::vector<SkippedFile> skipped;

  std::size_t positive_count(Smell s) const { return positives[static_cast<int>(s)]; }
  void print(std::ostream& os) const;
};

struct LabeledCorpus {
  CorpusScan scan;
  std::vector<SmellVerdict> verdicts;  // merged in (path, start_line) order
  CorpusReport report;
};

/// Verdicts for every fragment of an already scanned corpus.
LabeledCorpus label_scan(CorpusScan scan, const Thresholds& t);

/// Throws EmptyCorpusError when no file of `lang` exists under `root`.
LabeledCorpus label_corpus(const std::filesystem::path& root, Language lang,
                           const Thresholds& t);

void write_verdicts(std::ostream& os, const std::vector<SmellVerdict>& verdicts);

}  // namespace smellnet
