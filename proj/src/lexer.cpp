#include "smellnet/code_model.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace smellnet {

namespace {

const std::vector<std::string> kJavaKeywords = {
    "abstract", "assert",     "boolean",   "break",      "byte",      "case",
    "catch",    "char",       "class",     "const",      "continue",  "default",
    "do",       "double",     "else",      "enum",       "extends",   "false",
    "final",    "finally",    "float",     "for",        "goto",      "if",
    "implements", "import",   "instanceof", "int",       "interface", "long",
    "native",   "new",        "null",      "package",    "private",   "protected",
    "public",   "return",     "short",     "static",     "strictfp",  "super",
    "switch",   "synchronized", "this",    "throw",      "throws",    "transient",
    "true",     "try",        "void",      "volatile",   "while",
};

const std::vector<std::string> kCsharpKeywords = {
    "abstract", "as",        "base",      "bool",      "break",     "byte",
    "case",     "catch",     "char",      "checked",   "class",     "const",
    "continue", "decimal",   "default",   "delegate",  "do",        "double",
    "else",     "enum",      "event",     "explicit",  "extern",    "false",
    "finally",  "fixed",     "float",     "for",       "foreach",   "goto",
    "if",       "implicit",  "in",        "int",       "interface", "internal",
    "is",       "lock",      "long",      "namespace", "new",       "null",
    "object",   "operator",  "out",       "override",  "params",    "private",
    "protected", "public",   "readonly",  "ref",       "return",    "sbyte",
    "sealed",   "short",     "sizeof",    "stackalloc", "static",   "string",
    "struct",   "switch",    "this",      "throw",     "true",      "try",
    "typeof",   "uint",      "ulong",     "unchecked", "unsafe",    "ushort",
    "using",    "virtual",   "void",      "volatile",  "while",
};

// Longest operators first so a greedy scan picks the maximal munch.
const std::array<std::string_view, 45> kOperators = {
    ">>>=", "<<=", ">>=", ">>>", "?\?=", "...", "->", "=>", "==", "!=", "<=",
    ">=",   "&&",  "||",  "++",  "--",  "+=",  "-=", "*=", "/=", "%=", "&=",
    "|=",   "^=",  "<<",  ">>",  "??",  "?.",  "::", "+",  "-",  "*",  "/",
    "%",    "=",   "<",   ">",   "!",   "~",   "?",  ":",  "&",  "|",  "^",
    "#",
};

constexpr std::string_view kPunctuation = "{}()[];,.@";

bool is_ident_start(unsigned char c) {
  return std::isalpha(c) || c == '_' || c == '$' || c >= 0x80;
}

bool is_ident_part(unsigned char c) {
  return std::isalnum(c) || c == '_' || c == '$' || c >= 0x80;
}

class Lexer {
 public:
  Lexer(std::string_view text, Language lang) : text_(text), lang_(lang) {}

  std::vector<LexToken> run() {
    std::vector<LexToken> out;
    while (true) {
      skip_trivia();
      if (eof()) break;
      out.push_back(next_token());
    }
    return out;
  }

 private:
  bool eof() const { return pos_ >= text_.size(); }
  char peek(std::size_t k = 0) const {
    return pos_ + k < text_.size() ? text_[pos_ + k] : '\0';
  }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else if ((static_cast<unsigned char>(text_[pos_]) & 0xC0) != 0x80) {
      ++col_;  // count code points, not continuation bytes
    }
    ++pos_;
  }

  bool at_line_start() const {
    for (std::size_t i = pos_; i > 0; --i) {
      char c = text_[i - 1];
      if (c == '\n') return true;
      if (c != ' ' && c != '\t' && c != '\r') return false;
    }
    return true;
  }

  void skip_trivia() {
    while (!eof()) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v') {
        advance();
      } else if (c == '/' && peek(1) == '/') {
        while (!eof() && peek() != '\n') advance();
      } else if (c == '/' && peek(1) == '*') {
        int line = line_, col = col_;
        advance();
        advance();
        while (!eof() && !(peek() == '*' && peek(1) == '/')) advance();
        if (eof()) {
          throw SourceError(SourceError::Kind::unterminated_literal, line, col,
                            "unterminated block comment");
        }
        advance();
        advance();
      } else if (c == '#' && lang_ == Language::csharp && at_line_start()) {
        while (!eof() && peek() != '\n') advance();
      } else if (pos_ == 0 && c == '\xEF' && peek(1) == '\xBB' && peek(2) == '\xBF') {
        pos_ += 3;  // byte order mark
      } else {
        break;
      }
    }
  }

  LexToken make(TokenCategory cat, std::size_t begin, int line, int col) const {
    return LexToken{cat, std::string(text_.substr(begin, pos_ - begin)), line, col};
  }

  LexToken next_token() {
    const std::size_t begin = pos_;
    const int line = line_, col = col_;
    const char c = peek();

    // C# verbatim / interpolated string prefixes: @"..", $"..", $@"..", @$"..
    if (lang_ == Language::csharp && (c == '@' || c == '$')) {
      std::size_t k = 0;
      bool verbatim = false;
      while (k < 2 && (peek(k) == '@' || peek(k) == '$')) {
        verbatim = verbatim || peek(k) == '@';
        ++k;
      }
      if (peek(k) == '"') {
        for (std::size_t i = 0; i < k; ++i) advance();
        if (verbatim) {
          lex_verbatim_string(line, col);
        } else {
          lex_quoted('"', line, col);
        }
        return make(TokenCategory::string_literal, begin, line, col);
      }
      if (c == '@' && is_ident_start(static_cast<unsigned char>(peek(1)))) {
        advance();
        while (!eof() && is_ident_part(static_cast<unsigned char>(peek()))) advance();
        return make(TokenCategory::identifier, begin, line, col);
      }
    }

    if (c == '"') {
      if (lang_ == Language::java && peek(1) == '"' && peek(2) == '"') {
        lex_text_block(line, col);
      } else {
        lex_quoted('"', line, col);
      }
      return make(TokenCategory::string_literal, begin, line, col);
    }
    if (c == '\'') {
      lex_quoted('\'', line, col);
      return make(TokenCategory::char_literal, begin, line, col);
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
      lex_number();
      return make(TokenCategory::numeric_literal, begin, line, col);
    }
    if (is_ident_start(static_cast<unsigned char>(c))) {
      while (!eof() && is_ident_part(static_cast<unsigned char>(peek()))) advance();
      LexToken tok = make(TokenCategory::identifier, begin, line, col);
      if (is_keyword(lang_, tok.lexeme)) tok.category = TokenCategory::keyword;
      return tok;
    }
    if (kPunctuation.find(c) != std::string_view::npos) {
      advance();
      return make(TokenCategory::punctuation, begin, line, col);
    }
    for (std::string_view op : kOperators) {
      if (text_.substr(pos_, op.size()) == op) {
        for (std::size_t i = 0; i < op.size(); ++i) advance();
        return make(TokenCategory::op, begin, line, col);
      }
    }
    // Stray characters (backslash, backtick, ...) become single-char punctuation.
    advance();
    while (!eof() && (static_cast<unsigned char>(peek()) & 0xC0) == 0x80) advance();
    return make(TokenCategory::punctuation, begin, line, col);
  }

  void lex_quoted(char quote, int line, int col) {
    advance();  // opening quote
    while (true) {
      if (eof() || peek() == '\n') {
        throw SourceError(SourceError::Kind::unterminated_literal, line, col,
                          quote == '"' ? "unterminated string literal"
                                       : "unterminated char literal");
      }
      char c = peek();
      if (c == '\\') {
        advance();
        if (eof()) continue;
        advance();
        continue;
      }
      advance();
      if (c == quote) return;
    }
  }

  void lex_verbatim_string(int line, int col) {
    advance();  // opening quote
    while (true) {
      if (eof()) {
        throw SourceError(SourceError::Kind::unterminated_literal, line, col,
                          "unterminated verbatim string");
      }
      if (peek() == '"') {
        advance();
        if (peek() == '"') {
          advance();  // doubled quote
          continue;
        }
        return;
      }
      advance();
    }
  }

  void lex_text_block(int line, int col) {
    for (int i = 0; i < 3; ++i) advance();
    while (true) {
      if (eof()) {
        throw SourceError(SourceError::Kind::unterminated_literal, line, col,
                          "unterminated text block");
      }
      if (peek() == '\\') {
        advance();
        if (!eof()) advance();
        continue;
      }
      if (peek() == '"' && peek(1) == '"' && peek(2) == '"') {
        for (int i = 0; i < 3; ++i) advance();
        return;
      }
      advance();
    }
  }

  void lex_number() {
    const bool hex = peek() == '0' && (peek(1) == 'x' || peek(1) == 'X');
    const bool bin = peek() == '0' && (peek(1) == 'b' || peek(1) == 'B');
    if (hex || bin) {
      advance();
      advance();
    }
    while (!eof()) {
      char c = peek();
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
        advance();
        if (!hex && (c == 'e' || c == 'E') && (peek() == '+' || peek() == '-') &&
            std::isdigit(static_cast<unsigned char>(peek(1)))) {
          advance();
        }
      } else if (c == '.' && !hex && std::isdigit(static_cast<unsigned char>(peek(1)))) {
        advance();
      } else {
        break;
      }
    }
  }

  std::string_view text_;
  Language lang_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

}  // namespace

std::string_view to_string(Language lang) {
  return lang == Language::csharp ? "csharp" : "java";
}

Language parse_language(std::string_view text) {
  if (text == "csharp" || text == "cs" || text == "c#") return Language::csharp;
  if (text == "java") return Language::java;
  throw std::invalid_argument("unknown language: " + std::string(text));
}

std::optional<Language> language_from_path(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".cs") return Language::csharp;
  if (ext == ".java") return Language::java;
  return std::nullopt;
}

std::string_view to_string(TokenCategory category) {
  switch (category) {
    case TokenCategory::keyword: return "keyword";
    case TokenCategory::identifier: return "identifier";
    case TokenCategory::numeric_literal: return "numeric_literal";
    case TokenCategory::string_literal: return "string_literal";
    case TokenCategory::char_literal: return "char_literal";
    case TokenCategory::op: return "operator";
    case TokenCategory::punctuation: return "punctuation";
  }
  return "?";
}

SourceError::SourceError(Kind kind, int line, int column, const std::string& detail)
    : std::runtime_error(detail), kind_(kind), line_(line), column_(column) {}

std::string_view SourceError::reason() const {
  switch (kind_) {
    case Kind::invalid_utf8: return "InvalidUtf8";
    case Kind::unterminated_literal: return "UnterminatedLiteral";
    case Kind::unbalanced_braces: return "UnbalancedBraces";
  }
  return "Unknown";
}

bool is_valid_utf8(std::string_view text) {
  std::size_t i = 0;
  while (i < text.size()) {
    const auto c = static_cast<unsigned char>(text[i]);
    std::size_t len = 0;
    std::uint32_t cp = 0;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + len > text.size()) return false;
    for (std::size_t k = 1; k < len; ++k) {
      const auto cc = static_cast<unsigned char>(text[i + k]);
      if ((cc & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    // overlong forms, surrogates, out of range
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) ||
        cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      return false;
    }
    i += len;
  }
  return true;
}

SourceUnit load_source_unit(const std::filesystem::path& root,
                            const std::filesystem::path& file) {
  auto lang = language_from_path(file);
  if (!lang) throw std::invalid_argument("not a C# or Java file: " + file.string());
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  SourceUnit unit;
  unit.path = std::filesystem::relative(file, root).generic_string();
  unit.language = *lang;
  unit.text = buf.str();
  if (!is_valid_utf8(unit.text)) {
    throw SourceError(SourceError::Kind::invalid_utf8, 0, 0, "file is not valid UTF-8");
  }
  return unit;
}

const std::vector<std::string>& keywords(Language lang) {
  return lang == Language::csharp ? kCsharpKeywords : kJavaKeywords;
}

bool is_keyword(Language lang, std::string_view word) {
  static const std::unordered_set<std::string_view> java(kJavaKeywords.begin(),
                                                         kJavaKeywords.end());
  static const std::unordered_set<std::string_view> csharp(kCsharpKeywords.begin(),
                                                           kCsharpKeywords.end());
  return lang == Language::csharp ? csharp.contains(word) : java.contains(word);
}

std::vector<LexToken> lex(std::string_view text, Language lang) {
  return Lexer(text, lang).run();
}

std::vector<LexToken> lex(const SourceUnit& unit) { return lex(unit.text, unit.language); }

}  // namespace smellnet
