#include "smellnet/token_encoder.hpp"

#include <set>
#include <stdexcept>
#include <unordered_map>

namespace smellnet {

namespace {

const std::vector<std::string> kOperatorSpellings = {
    ">>>=", "<<=", ">>=", ">>>", "?\?=", "...", "->", "=>", "==", "!=", "<=",
    ">=",   "&&",  "||",  "++",  "--",  "+=",  "-=", "*=", "/=", "%=", "&=",
    "|=",   "^=",  "<<",  ">>",  "??",  "?.",  "::", "+",  "-",  "*",  "/",
    "%",    "=",   "<",   ">",   "!",   "~",   "?",  ":",  "&",  "|",  "^",
    "#",
};

const std::vector<std::string> kPunctuationSpellings = {"{", "}", "(", ")", "[",
                                                        "]", ";", ",", ".", "@"};

bool is_value_like(const LexToken& t) {
  switch (t.category) {
    case TokenCategory::identifier:
    case TokenCategory::numeric_literal:
    case TokenCategory::string_literal:
    case TokenCategory::char_literal:
      return true;
    case TokenCategory::punctuation:
      return t.lexeme == ")" || t.lexeme == "]";
    default:
      return false;
  }
}

struct Encoded {
  TokenId id;
  int line;
};

std::vector<Encoded> encode_tokens(const CodeFragment& fragment, const Vocabulary& vocab,
                                   EncodeStats* stats) {
  std::vector<Encoded> out;
  out.reserve(fragment.tokens.size());
  std::unordered_map<std::string, TokenId> identifiers;
  bool clamped = false;
  const auto& tokens = fragment.tokens;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const LexToken& t = tokens[i];
    TokenId id = 0;
    switch (t.category) {
      case TokenCategory::keyword:
        id = vocab.keyword_id(t.lexeme);
        break;
      case TokenCategory::identifier: {
        auto it = identifiers.find(t.lexeme);
        if (it == identifiers.end()) {
          TokenId next = Vocabulary::kIdentifierBase + static_cast<TokenId>(identifiers.size());
          if (next > Vocabulary::kIdentifierCap) {
            next = Vocabulary::kIdentifierCap;
            clamped = true;
          }
          it = identifiers.emplace(t.lexeme, next).first;
        }
        id = it->second;
        break;
      }
      case TokenCategory::numeric_literal:
        id = t.lexeme == "0"   ? Vocabulary::kNumericZero
             : t.lexeme == "1" ? Vocabulary::kNumericOne
                               : Vocabulary::kNumericGeneric;
        break;
      case TokenCategory::string_literal:
        id = Vocabulary::kString;
        break;
      case TokenCategory::char_literal:
        id = Vocabulary::kChar;
        break;
      case TokenCategory::op:
        if (t.lexeme == "-" && i + 1 < tokens.size() &&
            tokens[i + 1].category == TokenCategory::numeric_literal &&
            tokens[i + 1].lexeme == "1" && (i == 0 || !is_value_like(tokens[i - 1]))) {
          out.push_back({Vocabulary::kNumericMinusOne, t.line});
          ++i;
          continue;
        }
        id = vocab.operator_id(t.lexeme);
        break;
      case TokenCategory::punctuation:
        id = vocab.punctuation_id(t.lexeme);
        break;
    }
    out.push_back({id, t.line});
  }
  if (stats) {
    stats->distinct_identifiers = identifiers.size();
    stats->clamped = clamped;
  }
  return out;
}

}  // namespace

std::string_view to_string(EncodedCategory category) {
  switch (category) {
    case EncodedCategory::padding: return "padding";
    case EncodedCategory::keyword: return "keyword";
    case EncodedCategory::identifier: return "identifier";
    case EncodedCategory::numeric_literal: return "numeric_literal";
    case EncodedCategory::string_literal: return "string_literal";
    case EncodedCategory::char_literal: return "char_literal";
    case EncodedCategory::op: return "operator";
    case EncodedCategory::punctuation: return "punctuation";
    case EncodedCategory::unassigned: return "unassigned";
  }
  return "?";
}

EncodedCategory encoded_category(TokenCategory category) {
  switch (category) {
    case TokenCategory::keyword: return EncodedCategory::keyword;
    case TokenCategory::identifier: return EncodedCategory::identifier;
    case TokenCategory::numeric_literal: return EncodedCategory::numeric_literal;
    case TokenCategory::string_literal: return EncodedCategory::string_literal;
    case TokenCategory::char_literal: return EncodedCategory::char_literal;
    case TokenCategory::op: return EncodedCategory::op;
    case TokenCategory::punctuation: return EncodedCategory::punctuation;
  }
  return EncodedCategory::unassigned;
}

Vocabulary::Vocabulary() {
  std::set<std::string> all_keywords(keywords(Language::java).begin(),
                                     keywords(Language::java).end());
  all_keywords.insert(keywords(Language::csharp).begin(), keywords(Language::csharp).end());
  TokenId next = kKeywordFirst;
  for (const auto& kw : all_keywords) {
    if (next > kKeywordLast) throw std::logic_error("keyword table overflow");
    keywords_[kw] = next++;
  }
  std::set<std::string> ops(kOperatorSpellings.begin(), kOperatorSpellings.end());
  next = kOperatorFirst;
  for (const auto& op : ops) operators_[op] = next++;
  if (next > kOperatorOther) throw std::logic_error("operator table overflow");
  next = kPunctuationFirst;
  for (const auto& p : kPunctuationSpellings) punctuation_[p] = next++;
}

const Vocabulary& Vocabulary::standard() {
  static const Vocabulary vocab;
  return vocab;
}

TokenId Vocabulary::keyword_id(const std::string& keyword) const {
  auto it = keywords_.find(keyword);
  if (it == keywords_.end()) throw std::out_of_range("not a keyword: " + keyword);
  return it->second;
}

TokenId Vocabulary::operator_id(const std::string& op) const {
  auto it = operators_.find(op);
  return it == operators_.end() ? kOperatorOther : it->second;
}

TokenId Vocabulary::punctuation_id(const std::string& punct) const {
  auto it = punctuation_.find(punct);
  return it == punctuation_.end() ? kPunctuationOther : it->second;
}

EncodedCategory Vocabulary::category_of(TokenId id) const {
  if (id < 0 || id >= kSize) throw std::out_of_range("token id out of range: " + std::to_string(id));
  if (id == kPadding) return EncodedCategory::padding;
  if (id <= kKeywordLast) return EncodedCategory::keyword;
  if (id < kPunctuationFirst) return EncodedCategory::op;
  if (id <= kPunctuationOther) return EncodedCategory::punctuation;
  if (id == kNumericGeneric || id == kNumericGeneric + 1) return EncodedCategory::numeric_literal;
  if (id == kString) return EncodedCategory::string_literal;
  if (id == kChar) return EncodedCategory::char_literal;
  if (id >= kNumericZero && id <= kNumericMinusOne) return EncodedCategory::numeric_literal;
  if (id >= kIdentifierBase) return EncodedCategory::identifier;
  return EncodedCategory::unassigned;
}

std::uint64_t Vocabulary::hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ULL;
    }
  };
  mix(kVersion);
  for (const auto* table : {&keywords_, &operators_, &punctuation_}) {
    for (const auto& [text, id] : *table) {
      mix(text);
      mix("=");
      mix(std::to_string(id));
      mix(";");
    }
  }
  return h;
}

TokenSequence1D encode_linear(const CodeFragment& fragment, const Vocabulary& vocab,
                              EncodeStats* stats) {
  TokenSequence1D seq;
  for (const auto& e : encode_tokens(fragment, vocab, stats)) seq.ids.push_back(e.id);
  return seq;
}

TokenGrid2D encode_grid(const CodeFragment& fragment, const Vocabulary& vocab,
                        EncodeStats* stats) {
  TokenGrid2D grid;
  int current_line = -1;
  std::size_t width = 0;
  for (const auto& e : encode_tokens(fragment, vocab, stats)) {
    if (e.line != current_line) {
      grid.rows.emplace_back();
      current_line = e.line;
    }
    grid.rows.back().push_back(e.id);
    width = std::max(width, grid.rows.back().size());
  }
  for (auto& row : grid.rows) row.resize(width, Vocabulary::kPadding);
  return grid;
}

std::string dump_ids(const std::vector<TokenId>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(ids[i]);
  }
  return out;
}

}  // namespace smellnet
