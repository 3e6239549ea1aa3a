#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace smellnet {

enum class Language { csharp, java };

std::string_view to_string(Language lang);
Language parse_language(std::string_view text);

/// Language is decided by extension only: .cs -> csharp, .java -> java.
std::optional<Language> language_from_path(const std::filesystem::path& path);

struct SourceUnit {
  std::string path;  // corpus-relative, '/' separated
  Language language = Language::java;
  std::string text;
};

enum class TokenCategory {
  keyword,
  identifier,
  numeric_literal,
  string_literal,
  char_literal,
  op,
  punctuation,
};

std::string_view to_string(TokenCategory category);

struct LexToken {
  TokenCategory category = TokenCategory::punctuation;
  std::string lexeme;
  int line = 0;
  int column = 0;

  bool is(TokenCategory c, std::string_view text) const {
    return category == c && lexeme == text;
  }
  bool is_punct(std::string_view text) const {
    return category == TokenCategory::punctuation && lexeme == text;
  }
  bool is_op(std::string_view text) const {
    return category == TokenCategory::op && lexeme == text;
  }
  bool is_keyword(std::string_view text) const {
    return category == TokenCategory::keyword && lexeme == text;
  }
};

/// Raised for input the lexer or the extractor refuses. The file is skipped;
/// callers record a diagnostic and continue with the rest of the corpus.
class SourceError : public std::runtime_error {
 public:
  enum class Kind { invalid_utf8, unterminated_literal, unbalanced_braces };

  SourceError(Kind kind, int line, int column, const std::string& detail);

  Kind kind() const { return kind_; }
  int line() const { return line_; }
  int column() const { return column_; }
  std::string_view reason() const;

 private:
  Kind kind_;
  int line_;
  int column_;
};

bool is_valid_utf8(std::string_view text);

/// Reads a file and attaches its language. Throws SourceError(invalid_utf8).
SourceUnit load_source_unit(const std::filesystem::path& root,
                            const std::filesystem::path& file);

bool is_keyword(Language lang, std::string_view word);
const std::vector<std::string>& keywords(Language lang);

std::vector<LexToken> lex(const SourceUnit& unit);
std::vector<LexToken> lex(std::string_view text, Language lang);

enum class FragmentKind { method, code_class };

std::string_view to_string(FragmentKind kind);

struct CodeFragment {
  FragmentKind kind = FragmentKind::method;
  std::string name;
  std::string container;  // dot-joined namespace/type path
  std::vector<LexToken> tokens;
  int start_line = 0;
  int end_line = 0;
  std::string source_unit;

  int start_column() const { return tokens.empty() ? 0 : tokens.front().column; }
  /// Stable identity: "<path>:<line>:<column>".
  std::string id() const;
};

/// Ordering used everywhere fragments are merged: (path, start_line, column).
bool fragment_order(const CodeFragment& a, const CodeFragment& b);

std::vector<CodeFragment> extract_fragments(const SourceUnit& unit,
                                            FragmentKind granularity);
std::vector<CodeFragment> extract_fragments(const SourceUnit& unit,
                                            const std::vector<LexToken>& tokens,
                                            FragmentKind granularity);

struct SkippedFile {
  std::string path;
  std::string reason;
  int line = 0;
  int column = 0;

  /// "SKIP <path> <reason> <line>:<col>"
  std::string diagnostic() const;
};

struct UnitFragments {
  std::string path;
  std::vector<CodeFragment> methods;
  std::vector<CodeFragment> classes;
};

struct CorpusScan {
  Language language = Language::java;
  std::size_t files_seen = 0;
  std::vector<UnitFragments> units;  // lexicographic path order
  std::vector<SkippedFile> skipped;
};

/// Collects every file of `lang` under `root` (recursively, sorted).
std::vector<std::filesystem::path> list_corpus_files(const std::filesystem::path& root,
                                                     Language lang);

/// Lexes and splits every file of the corpus. Failing files are recorded in
/// `skipped` and never abort the scan.
CorpusScan scan_corpus(const std::filesystem::path& root, Language lang);

}  // namespace smellnet
