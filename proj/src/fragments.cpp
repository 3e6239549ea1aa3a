#include "smellnet/code_model.hpp"

#include <algorithm>

namespace smellnet {

namespace {

enum class ScopeKind { namespace_body, type_body, method_body, other };

struct Scope {
  ScopeKind kind = ScopeKind::other;
  std::string name;
  bool is_enum = false;
  std::size_t header_start = 0;
  bool top_level_type = false;
};

bool is_open(const LexToken& t) {
  return t.category == TokenCategory::punctuation &&
         (t.lexeme == "{" || t.lexeme == "(" || t.lexeme == "[");
}

bool is_close(const LexToken& t) {
  return t.category == TokenCategory::punctuation &&
         (t.lexeme == "}" || t.lexeme == ")" || t.lexeme == "]");
}

char matching_open(const std::string& close) {
  return close == "}" ? '{' : close == ")" ? '(' : '[';
}

void check_balance(const std::vector<LexToken>& tokens) {
  std::vector<std::size_t> stack;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto& t = tokens[i];
    if (is_open(t)) {
      stack.push_back(i);
    } else if (is_close(t)) {
      if (stack.empty() || tokens[stack.back()].lexeme[0] != matching_open(t.lexeme)) {
        throw SourceError(SourceError::Kind::unbalanced_braces, t.line, t.column,
                          "unexpected '" + t.lexeme + "'");
      }
      stack.pop_back();
    }
  }
  if (!stack.empty()) {
    const auto& t = tokens[stack.back()];
    throw SourceError(SourceError::Kind::unbalanced_braces, t.line, t.column,
                      "unclosed '" + t.lexeme + "'");
  }
}

bool is_type_keyword(const LexToken& t) {
  return t.category == TokenCategory::keyword &&
         (t.lexeme == "class" || t.lexeme == "struct" || t.lexeme == "interface" ||
          t.lexeme == "enum");
}

/// Index just past the group opened at `open` (which must be '(' or '[').
std::size_t skip_group(const std::vector<LexToken>& tokens, std::size_t open,
                       std::size_t end) {
  int depth = 0;
  for (std::size_t i = open; i < end; ++i) {
    if (is_open(tokens[i])) ++depth;
    if (is_close(tokens[i]) && --depth == 0) return i + 1;
  }
  return end;
}

struct TypeHeader {
  std::string name;
  bool is_enum = false;
};

std::optional<TypeHeader> find_type_header(const std::vector<LexToken>& tokens,
                                           std::size_t begin, std::size_t end) {
  for (std::size_t i = begin; i < end;) {
    const auto& t = tokens[i];
    if (t.is_punct("(") || t.is_punct("[")) {
      i = skip_group(tokens, i, end);
      continue;
    }
    if (is_type_keyword(t) && i + 1 < end &&
        tokens[i + 1].category == TokenCategory::identifier) {
      return TypeHeader{tokens[i + 1].lexeme, t.lexeme == "enum"};
    }
    ++i;
  }
  return std::nullopt;
}

std::optional<std::string> find_namespace_header(const std::vector<LexToken>& tokens,
                                                 std::size_t begin, std::size_t end) {
  for (std::size_t i = begin; i < end; ++i) {
    if (tokens[i].is_keyword("namespace") || tokens[i].is_keyword("package")) {
      std::string name;
      for (std::size_t k = i + 1; k < end; ++k) {
        const auto& t = tokens[k];
        if (t.category == TokenCategory::identifier || t.is_punct(".")) {
          name += t.lexeme;
        } else {
          break;
        }
      }
      return name;
    }
  }
  return std::nullopt;
}

/// Locates the method name in a member header: an identifier (optionally with
/// generic arguments) directly followed by a parameter list. Annotations and
/// attribute groups are skipped; an initializer ('=' or '=>') before the name
/// means the brace belongs to an expression, not a method body.
std::optional<std::pair<std::string, std::size_t>> find_method_name(
    const std::vector<LexToken>& tokens, std::size_t begin, std::size_t end) {
  for (std::size_t i = begin; i < end;) {
    const auto& t = tokens[i];
    if (t.is_op("=") || t.is_op("=>")) return std::nullopt;
    if (t.is_punct("@")) {
      ++i;
      while (i < end && (tokens[i].category == TokenCategory::identifier ||
                         tokens[i].is_punct(".") || tokens[i].is_keyword("interface"))) {
        ++i;
      }
      if (i < end && tokens[i].is_punct("(")) i = skip_group(tokens, i, end);
      continue;
    }
    if (t.is_punct("[")) {
      i = skip_group(tokens, i, end);
      continue;
    }
    if (t.is_keyword("operator")) {
      std::string name = "operator";
      std::size_t k = i + 1;
      while (k < end && !tokens[k].is_punct("(")) name += tokens[k++].lexeme;
      if (k < end) return std::make_pair(name, i);
      return std::nullopt;
    }
    if (t.is_punct("(")) {
      if (i > begin && tokens[i - 1].category == TokenCategory::identifier) {
        return std::make_pair(tokens[i - 1].lexeme, i - 1);
      }
      if (i > begin && tokens[i - 1].is_op(">")) {
        // Generic method: walk back to the matching '<'.
        int depth = 0;
        for (std::size_t k = i; k-- > begin;) {
          if (tokens[k].is_op(">")) ++depth;
          if (tokens[k].is_op(">>")) depth += 2;
          if (tokens[k].is_op("<") && --depth == 0) {
            if (k > begin && tokens[k - 1].category == TokenCategory::identifier) {
              return std::make_pair(tokens[k - 1].lexeme, k - 1);
            }
            break;
          }
        }
      }
      i = skip_group(tokens, i, end);
      continue;
    }
    ++i;
  }
  return std::nullopt;
}

std::string join_path(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) {
    if (p.empty()) continue;
    if (!out.empty()) out += '.';
    out += p;
  }
  return out;
}

struct Split {
  std::vector<CodeFragment> methods;
  std::vector<CodeFragment> classes;
};

Split split_unit(const SourceUnit& unit, const std::vector<LexToken>& tokens) {
  check_balance(tokens);
  Split out;
  std::vector<Scope> scopes;
  std::string file_namespace;
  std::size_t segment_start = 0;
  int paren_depth = 0;
  std::vector<int> saved_paren_depth;

  auto container_path = [&](bool include_types) {
    std::vector<std::string> parts{file_namespace};
    for (const auto& s : scopes) {
      if (s.kind == ScopeKind::namespace_body ||
          (include_types && s.kind == ScopeKind::type_body)) {
        parts.push_back(s.name);
      }
    }
    return join_path(parts);
  };

  auto emit = [&](FragmentKind kind, const Scope& scope, std::size_t close,
                  const std::string& container) {
    CodeFragment f;
    f.kind = kind;
    f.name = scope.name;
    f.container = container;
    f.tokens.assign(tokens.begin() + static_cast<std::ptrdiff_t>(scope.header_start),
                    tokens.begin() + static_cast<std::ptrdiff_t>(close) + 1);
    f.start_line = f.tokens.front().line;
    f.end_line = f.tokens.back().line;
    f.source_unit = unit.path;
    (kind == FragmentKind::method ? out.methods : out.classes).push_back(std::move(f));
  };

  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto& t = tokens[i];
    if (t.is_punct("(") || t.is_punct("[")) {
      ++paren_depth;
    } else if (t.is_punct(")") || t.is_punct("]")) {
      --paren_depth;
    } else if (t.is_punct(";")) {
      if (paren_depth == 0) {
        if (scopes.empty() || scopes.back().kind == ScopeKind::namespace_body) {
          if (auto ns = find_namespace_header(tokens, segment_start, i)) {
            file_namespace = join_path({file_namespace, *ns});
          }
        }
        segment_start = i + 1;
      }
    } else if (t.is_punct("{")) {
      const ScopeKind parent = scopes.empty() ? ScopeKind::namespace_body : scopes.back().kind;
      std::size_t header = segment_start;
      if (parent == ScopeKind::type_body && scopes.back().is_enum) {
        while (header < i && tokens[header].is_punct(",")) ++header;
      }
      Scope scope;
      scope.header_start = header;
      if (parent == ScopeKind::namespace_body || parent == ScopeKind::type_body) {
        if (auto type = find_type_header(tokens, header, i)) {
          scope.kind = ScopeKind::type_body;
          scope.name = type->name;
          scope.is_enum = type->is_enum;
          scope.top_level_type = parent == ScopeKind::namespace_body;
        } else if (parent == ScopeKind::namespace_body) {
          if (auto ns = find_namespace_header(tokens, header, i)) {
            scope.kind = ScopeKind::namespace_body;
            scope.name = *ns;
          }
        } else if (auto method = find_method_name(tokens, header, i)) {
          const Scope& owner = scopes.back();
          const bool enum_constant =
              owner.is_enum && method->second == header && method->first != owner.name;
          if (!enum_constant) {
            scope.kind = ScopeKind::method_body;
            scope.name = method->first;
          }
        }
      }
      scopes.push_back(std::move(scope));
      segment_start = i + 1;
      saved_paren_depth.push_back(paren_depth);
      paren_depth = 0;
    } else if (t.is_punct("}")) {
      Scope scope = std::move(scopes.back());
      scopes.pop_back();
      if (scope.kind == ScopeKind::method_body) {
        emit(FragmentKind::method, scope, i, container_path(true));
      } else if (scope.kind == ScopeKind::type_body && scope.top_level_type) {
        emit(FragmentKind::code_class, scope, i, container_path(false));
      }
      segment_start = i + 1;
      paren_depth = saved_paren_depth.back();
      saved_paren_depth.pop_back();
    }
  }

  auto by_position = [](const CodeFragment& a, const CodeFragment& b) {
    return fragment_order(a, b);
  };
  std::sort(out.methods.begin(), out.methods.end(), by_position);
  std::sort(out.classes.begin(), out.classes.end(), by_position);
  return out;
}

}  // namespace

std::string_view to_string(FragmentKind kind) {
  return kind == FragmentKind::method ? "method" : "class";
}

std::string CodeFragment::id() const {
  return source_unit + ":" + std::to_string(start_line) + ":" + std::to_string(start_column());
}

bool fragment_order(const CodeFragment& a, const CodeFragment& b) {
  if (a.source_unit != b.source_unit) return a.source_unit < b.source_unit;
  if (a.start_line != b.start_line) return a.start_line < b.start_line;
  return a.start_column() < b.start_column();
}

std::vector<CodeFragment> extract_fragments(const SourceUnit& unit,
                                            const std::vector<LexToken>& tokens,
                                            FragmentKind granularity) {
  Split split = split_unit(unit, tokens);
  return granularity == FragmentKind::method ? std::move(split.methods)
                                             : std::move(split.classes);
}

std::vector<CodeFragment> extract_fragments(const SourceUnit& unit,
                                            FragmentKind granularity) {
  return extract_fragments(unit, lex(unit), granularity);
}

std::string SkippedFile::diagnostic() const {
  return "SKIP " + path + " " + reason + " " + std::to_string(line) + ":" +
         std::to_string(column);
}

std::vector<std::filesystem::path> list_corpus_files(const std::filesystem::path& root,
                                                     Language lang) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    if (language_from_path(entry.path()) == lang) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end(), [&](const auto& a, const auto& b) {
    return std::filesystem::relative(a, root).generic_string() <
           std::filesystem::relative(b, root).generic_string();
  });
  return files;
}

CorpusScan scan_corpus(const std::filesystem::path& root, Language lang) {
  CorpusScan scan;
  scan.language = lang;
  for (const auto& file : list_corpus_files(root, lang)) {
    ++scan.files_seen;
    const std::string rel = std::filesystem::relative(file, root).generic_string();
    try {
      SourceUnit unit = load_source_unit(root, file);
      Split split = split_unit(unit, lex(unit));
      scan.units.push_back({unit.path, std::move(split.methods), std::move(split.classes)});
    } catch (const SourceError& e) {
      scan.skipped.push_back({rel, std::string(e.reason()), e.line(), e.column()});
    }
  }
  return scan;
}

}  // namespace smellnet
