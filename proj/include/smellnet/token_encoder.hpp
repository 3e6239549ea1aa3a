#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "smellnet/code_model.hpp"

namespace smellnet {

using TokenId = std::int32_t;

/// Category of an encoded id. Ids that no table entry uses decode to
/// `unassigned`, which keeps category_of total over the vocabulary.
enum class EncodedCategory {
  padding,
  keyword,
  identifier,
  numeric_literal,
  string_literal,
  char_literal,
  op,
  punctuation,
  unassigned,
};

std::string_view to_string(EncodedCategory category);
EncodedCategory encoded_category(TokenCategory category);

/// Closed token vocabulary shared by both languages.
///
///   0            padding
///   1..199       keywords (union of C# and Java; shared spellings share an id)
///   200..269     operators        (269 = any operator not in the table)
///   270..299     punctuation      (299 = any stray character)
///   300, 301     generic numeric literal
///   302          string literal
///   303          char literal
///   310/311/312  numeric literals 0, 1 and unary -1
///   1000..1999   identifiers, numbered per fragment by first occurrence
class Vocabulary {
 public:
  static constexpr TokenId kSize = 2000;
  static constexpr TokenId kPadding = 0;
  static constexpr TokenId kKeywordFirst = 1;
  static constexpr TokenId kKeywordLast = 199;
  static constexpr TokenId kOperatorFirst = 200;
  static constexpr TokenId kOperatorOther = 269;
  static constexpr TokenId kPunctuationFirst = 270;
  static constexpr TokenId kPunctuationOther = 299;
  static constexpr TokenId kNumericGeneric = 300;
  static constexpr TokenId kString = 302;
  static constexpr TokenId kChar = 303;
  static constexpr TokenId kNumericZero = 310;
  static constexpr TokenId kNumericOne = 311;
  static constexpr TokenId kNumericMinusOne = 312;
  static constexpr TokenId kIdentifierBase = 1000;
  static constexpr TokenId kIdentifierCap = 1999;
  static constexpr const char* kVersion = "smellnet-vocab-1";

  /// The canonical table; immutable once built.
  static const Vocabulary& standard();

  TokenId keyword_id(const std::string& keyword) const;
  TokenId operator_id(const std::string& op) const;
  TokenId punctuation_id(const std::string& punct) const;
  EncodedCategory category_of(TokenId id) const;

  const std::map<std::string, TokenId>& keyword_table() const { return keywords_; }
  const std::map<std::string, TokenId>& operator_table() const { return operators_; }
  const std::map<std::string, TokenId>& punctuation_table() const { return punctuation_; }

  /// FNV-1a over the serialized tables; equal hashes mean identical encodings.
  std::uint64_t hash() const;

 private:
  Vocabulary();

  std::map<std::string, TokenId> keywords_;
  std::map<std::string, TokenId> operators_;
  std::map<std::string, TokenId> punctuation_;
};

struct TokenSequence1D {
  std::vector<TokenId> ids;  // unpadded
  std::size_t length() const { return ids.size(); }
};

struct TokenGrid2D {
  std::vector<std::vector<TokenId>> rows;  // one per non-empty source line, padded
  std::size_t height() const { return rows.size(); }
  std::size_t width() const { return rows.empty() ? 0 : rows.front().size(); }
};

struct EncodeStats {
  std::size_t distinct_identifiers = 0;
  bool clamped = false;  // more than 1000 distinct identifiers
};

TokenSequence1D encode_linear(const CodeFragment& fragment, const Vocabulary& vocab,
                              EncodeStats* stats = nullptr);
TokenGrid2D encode_grid(const CodeFragment& fragment, const Vocabulary& vocab,
                        EncodeStats* stats = nullptr);

/// Writes "id id id ..." for one fragment, no trailing newline.
std::string dump_ids(const std::vector<TokenId>& ids);

}  // namespace smellnet
