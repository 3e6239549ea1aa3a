#include "smellnet/smell_labeler.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <unordered_set>

namespace smellnet {

namespace {

bool opens(const LexToken& t) {
  return t.is_punct("(") || t.is_punct("[") || t.is_punct("{");
}

bool closes(const LexToken& t) {
  return t.is_punct(")") || t.is_punct("]") || t.is_punct("}");
}

std::size_t skip_group(const std::vector<LexToken>& tokens, std::size_t open) {
  int depth = 0;
  for (std::size_t i = open; i < tokens.size(); ++i) {
    if (opens(tokens[i])) ++depth;
    if (closes(tokens[i]) && --depth == 0) return i + 1;
  }
  return tokens.size();
}

/// Index of the '{' matching the final '}' of the token list.
std::size_t final_block_open(const std::vector<LexToken>& tokens) {
  int depth = 0;
  for (std::size_t i = tokens.size(); i-- > 0;) {
    if (tokens[i].is_punct("}")) ++depth;
    if (tokens[i].is_punct("{") && --depth == 0) return i;
  }
  return 0;
}

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

bool is_wildcard(const std::vector<LexToken>& tokens, std::size_t i) {
  if (i == 0 || i + 1 >= tokens.size()) return false;
  const auto& prev = tokens[i - 1];
  const auto& next = tokens[i + 1];
  const bool after_open = prev.is_op("<") || prev.is_punct(",");
  const bool before_close = next.is_op(">") || next.is_op(">>") || next.is_op(">>>") ||
                            next.is_punct(",") || next.is_keyword("extends") ||
                            next.is_keyword("super");
  return after_open && before_close;
}

/// A '?' is a conditional operator when a ':' follows at the same nesting
/// level before the enclosing expression ends.
bool is_conditional(const std::vector<LexToken>& tokens, std::size_t q) {
  if (is_wildcard(tokens, q)) return false;
  int depth = 0;
  int pending = 0;
  for (std::size_t k = q + 1; k < tokens.size(); ++k) {
    const auto& t = tokens[k];
    if (opens(t)) {
      ++depth;
    } else if (closes(t)) {
      if (depth == 0) return false;
      --depth;
    } else if (depth == 0) {
      if (t.is_op("?") && !is_wildcard(tokens, k)) {
        ++pending;
      } else if (t.is_op(":")) {
        if (pending == 0) return true;
        --pending;
      } else if (t.is_punct(";") || t.is_punct(",")) {
        return false;
      }
    }
  }
  return false;
}

std::string format_fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

SmellVerdict make_verdict(const CodeFragment& f, Smell smell, bool positive,
                          std::string evidence) {
  SmellVerdict v;
  v.fragment_id = f.id();
  v.path = f.source_unit;
  v.kind = f.kind;
  v.name = f.name;
  v.start_line = f.start_line;
  v.end_line = f.end_line;
  v.smell = smell;
  v.positive = positive;
  v.evidence = std::move(evidence);
  return v;
}

std::vector<std::string> declared_names(const std::vector<LexToken>& seg) {
  std::vector<std::string> names;
  auto name_before = [&](std::size_t k) {
    // k is the index of the token following the declarator name
    while (k > 0 && seg[k - 1].is_punct("]")) {
      std::size_t j = k - 1;
      while (j > 0 && !seg[j].is_punct("[")) --j;
      k = j;
    }
    if (k > 0 && seg[k - 1].category == TokenCategory::identifier) {
      names.push_back(seg[k - 1].lexeme);
    }
  };
  int depth = 0;
  int angle = 0;
  bool in_init = false;
  for (std::size_t k = 0; k < seg.size(); ++k) {
    const auto& t = seg[k];
    if (opens(t)) {
      ++depth;
      continue;
    }
    if (closes(t)) {
      --depth;
      continue;
    }
    if (depth > 0) continue;
    if (!in_init) {
      if (t.is_op("<")) ++angle;
      if (t.is_op(">")) angle = std::max(0, angle - 1);
      if (t.is_op(">>")) angle = std::max(0, angle - 2);
      if (angle > 0) continue;
      if (t.is_op("=")) {
        name_before(k);
        in_init = true;
      } else if (t.is_punct(",")) {
        name_before(k);
      }
    } else if (t.is_punct(",")) {
      in_init = false;
      angle = 0;
    }
  }
  if (!in_init) name_before(seg.size());
  return names;
}

/// Field names declared directly in the body of the class' own type.
std::vector<std::string> class_fields(const std::vector<LexToken>& tokens) {
  const std::size_t open = final_block_open(tokens);
  const std::size_t close = tokens.size() - 1;
  std::set<std::string> fields;
  std::vector<LexToken> segment;
  bool has_assign = false;
  for (std::size_t i = open + 1; i < close;) {
    const auto& t = tokens[i];
    if (t.is_punct("{")) {
      const std::size_t next = skip_group(tokens, i);
      if (has_assign) {
        segment.insert(segment.end(), tokens.begin() + static_cast<std::ptrdiff_t>(i),
                       tokens.begin() + static_cast<std::ptrdiff_t>(next));
      } else {
        segment.clear();  // member with a body
      }
      i = next;
      continue;
    }
    if (t.is_punct("(") || t.is_punct("[")) {
      const std::size_t next = skip_group(tokens, i);
      if (segment.empty() && t.is_punct("[")) {
        i = next;  // attribute section
        continue;
      }
      segment.insert(segment.end(), tokens.begin() + static_cast<std::ptrdiff_t>(i),
                     tokens.begin() + static_cast<std::ptrdiff_t>(next));
      i = next;
      continue;
    }
    if (t.is_punct(";")) {
      bool declaration = !segment.empty();
      for (const auto& s : segment) {
        if (s.is_op("=")) break;
        if (s.is_punct("(") || s.is_keyword("class") || s.is_keyword("interface") ||
            s.is_keyword("struct") || s.is_keyword("enum") || s.is_keyword("delegate") ||
            s.is_keyword("using") || s.is_keyword("import")) {
          declaration = false;
          break;
        }
      }
      if (declaration) {
        for (auto& n : declared_names(segment)) fields.insert(std::move(n));
      }
      segment.clear();
      has_assign = false;
      ++i;
      continue;
    }
    if (t.is_op("=")) has_assign = true;
    if (t.is_punct("@") && i + 1 < close) {
      // annotation: skip name and optional argument list
      ++i;
      while (i < close && (tokens[i].category == TokenCategory::identifier ||
                           tokens[i].is_punct("."))) {
        ++i;
      }
      if (i < close && tokens[i].is_punct("(")) i = skip_group(tokens, i);
      continue;
    }
    segment.push_back(t);
    ++i;
  }
  return {fields.begin(), fields.end()};
}

}  // namespace

std::string_view short_name(Smell smell) {
  switch (smell) {
    case Smell::complex_method: return "cm";
    case Smell::empty_catch_block: return "ecb";
    case Smell::magic_number: return "mn";
    case Smell::multifaceted_abstraction: return "ma";
  }
  return "?";
}

Smell parse_smell(std::string_view text) {
  for (Smell s : kAllSmells) {
    if (short_name(s) == text) return s;
  }
  throw std::invalid_argument("unknown smell: " + std::string(text));
}

FragmentKind granularity_of(Smell smell) {
  return smell == Smell::multifaceted_abstraction ? FragmentKind::code_class
                                                  : FragmentKind::method;
}

void Thresholds::validate() const {
  if (cc_limit <= 0) throw std::invalid_argument("cc_limit must be positive");
  if (min_methods <= 0) throw std::invalid_argument("min_methods must be positive");
  if (min_fields <= 0) throw std::invalid_argument("min_fields must be positive");
  if (!(lcom_limit > 0.0 && lcom_limit <= 1.0)) {
    throw std::invalid_argument("lcom_limit must lie in (0, 1]");
  }
}

std::string SmellVerdict::csv_line() const {
  return csv_field(path) + "," + std::string(to_string(kind)) + "," + csv_field(name) + "," +
         std::to_string(start_line) + "," + std::to_string(end_line) + "," +
         std::string(short_name(smell)) + "," + (positive ? "1" : "0") + "," +
         csv_field(evidence);
}

std::vector<LexToken> method_body(const CodeFragment& method) {
  const std::size_t open = final_block_open(method.tokens);
  return {method.tokens.begin() + static_cast<std::ptrdiff_t>(open), method.tokens.end()};
}

int cyclomatic_complexity(const CodeFragment& method) {
  const auto body = method_body(method);
  int cc = 1;
  for (std::size_t i = 0; i < body.size(); ++i) {
    const auto& t = body[i];
    if (t.category == TokenCategory::keyword) {
      if (t.lexeme == "if" || t.lexeme == "while" || t.lexeme == "for" ||
          t.lexeme == "foreach" || t.lexeme == "case" || t.lexeme == "catch") {
        ++cc;
      }
    } else if (t.category == TokenCategory::op) {
      if (t.lexeme == "&&" || t.lexeme == "||") {
        ++cc;
      } else if (t.lexeme == "?" && is_conditional(body, i)) {
        ++cc;
      }
    }
  }
  return cc;
}

std::vector<std::string> magic_literals(const CodeFragment& method, const Thresholds& th) {
  enum class Brace { block, initializer, enum_body };
  const auto body = method_body(method);
  std::vector<std::string> found;
  std::vector<Brace> braces;
  bool const_context = false;
  std::size_t statement_start = 0;
  std::size_t enum_depth = 0;

  for (std::size_t i = 0; i < body.size(); ++i) {
    const auto& t = body[i];
    if (t.is_keyword("const") || t.is_keyword("final") || t.is_keyword("readonly")) {
      const_context = true;
    } else if (t.is_punct(";")) {
      const_context = false;
      statement_start = i + 1;
    } else if (t.is_punct("{")) {
      const LexToken* prev = i > 0 ? &body[i - 1] : nullptr;
      Brace kind = Brace::block;
      bool is_enum = false;
      for (std::size_t k = statement_start; k < i; ++k) is_enum = is_enum || body[k].is_keyword("enum");
      if (is_enum) {
        kind = Brace::enum_body;
      } else if (prev && (prev->is_op("=") || prev->is_punct("]") || prev->is_punct(",") ||
                          (prev->is_punct("{") && !braces.empty() &&
                           braces.back() != Brace::block))) {
        kind = Brace::initializer;
      }
      braces.push_back(kind);
      if (kind == Brace::enum_body) ++enum_depth;
      if (kind != Brace::initializer) {
        const_context = false;
        statement_start = i + 1;
      }
    } else if (t.is_punct("}")) {
      Brace kind = braces.empty() ? Brace::block : braces.back();
      if (!braces.empty()) braces.pop_back();
      if (kind == Brace::enum_body) --enum_depth;
      if (kind != Brace::initializer) {
        const_context = false;
        statement_start = i + 1;
      }
    } else if (t.category == TokenCategory::numeric_literal) {
      std::string lexeme = t.lexeme;
      if (i >= 1 && body[i - 1].is_op("-") && (i < 2 || !is_value_like(body[i - 2]))) {
        lexeme = "-" + lexeme;
      }
      if (!th.allowed_literals.contains(lexeme) && !const_context && enum_depth == 0) {
        found.push_back(lexeme);
      }
    }
  }
  return found;
}

int count_empty_catch_blocks(const CodeFragment& method) {
  const auto& tokens = method.tokens;
  int count = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (!tokens[i].is_keyword("catch")) continue;
    std::size_t j = i + 1;
    if (j < tokens.size() && tokens[j].is_punct("(")) j = skip_group(tokens, j);
    if (j < tokens.size() && tokens[j].category == TokenCategory::identifier &&
        tokens[j].lexeme == "when") {
      ++j;
      if (j < tokens.size() && tokens[j].is_punct("(")) j = skip_group(tokens, j);
    }
    if (j + 1 < tokens.size() && tokens[j].is_punct("{") && tokens[j + 1].is_punct("}")) {
      ++count;
    }
  }
  return count;
}

MethodMetrics method_metrics(const CodeFragment& method, const Thresholds& t) {
  MethodMetrics m;
  m.cc = cyclomatic_complexity(method);
  m.magic_literal_count = static_cast<int>(magic_literals(method, t).size());
  m.empty_catch_count = count_empty_catch_blocks(method);
  return m;
}

double lcom_from_counts(int methods, int fields, int field_access_sum) {
  if (methods <= 1 || fields == 0) return 0.0;
  const double v = 1.0 - static_cast<double>(field_access_sum) /
                             (static_cast<double>(methods) * static_cast<double>(fields));
  return std::clamp(v, 0.0, 1.0);
}

ClassMetrics class_metrics(const CodeFragment& code_class) {
  SourceUnit unit;
  unit.path = code_class.source_unit;
  std::vector<CodeFragment> methods;
  for (auto& m : extract_fragments(unit, code_class.tokens, FragmentKind::method)) {
    if (m.container == code_class.name) methods.push_back(std::move(m));
  }
  const auto fields = class_fields(code_class.tokens);

  ClassMetrics cm;
  cm.methods = static_cast<int>(methods.size());
  cm.fields = static_cast<int>(fields.size());
  for (const auto& m : methods) {
    std::unordered_set<std::string> used;
    for (const auto& t : method_body(m)) {
      if (t.category == TokenCategory::identifier) used.insert(t.lexeme);
    }
    for (const auto& f : fields) cm.field_access_sum += used.contains(f) ? 1 : 0;
  }
  cm.lcom = lcom_from_counts(cm.methods, cm.fields, cm.field_access_sum);
  return cm;
}

double lcom(const CodeFragment& code_class) { return class_metrics(code_class).lcom; }

SmellVerdict detect_complex_method(const CodeFragment& method, const Thresholds& t) {
  const int cc = cyclomatic_complexity(method);
  return make_verdict(method, Smell::complex_method, cc > t.cc_limit,
                      "cc=" + std::to_string(cc));
}

SmellVerdict detect_magic_number(const CodeFragment& method, const Thresholds& t) {
  const auto literals = magic_literals(method, t);
  std::string evidence = "magic=" + std::to_string(literals.size());
  if (!literals.empty()) {
    evidence += ";literals=";
    for (std::size_t i = 0; i < literals.size(); ++i) {
      if (i) evidence += '|';
      evidence += literals[i];
    }
  }
  return make_verdict(method, Smell::magic_number, !literals.empty(), evidence);
}

SmellVerdict detect_empty_catch_block(const CodeFragment& method, const Thresholds&) {
  const int n = count_empty_catch_blocks(method);
  return make_verdict(method, Smell::empty_catch_block, n > 0,
                      "empty_catch=" + std::to_string(n));
}

SmellVerdict detect_multifaceted_abstraction(const CodeFragment& code_class,
                                             const Thresholds& t) {
  const ClassMetrics m = class_metrics(code_class);
  const bool positive =
      m.lcom >= t.lcom_limit && m.methods >= t.min_methods && m.fields >= t.min_fields;
  return make_verdict(code_class, Smell::multifaceted_abstraction, positive,
                      "lcom=" + format_fixed(m.lcom, 4) + ";m=" + std::to_string(m.methods) +
                          ";f=" + std::to_string(m.fields));
}

SmellVerdict detect(Smell smell, const CodeFragment& fragment, const Thresholds& t) {
  switch (smell) {
    case Smell::complex_method: return detect_complex_method(fragment, t);
    case Smell::empty_catch_block: return detect_empty_catch_block(fragment, t);
    case Smell::magic_number: return detect_magic_number(fragment, t);
    case Smell::multifaceted_abstraction: return detect_multifaceted_abstraction(fragment, t);
  }
  throw std::logic_error("unknown smell");
}

void CorpusReport::print(std::ostream& os) const {
  os << "corpus report (" << to_string(language) << ")\n";
  os << "  files scanned     " << files_scanned << "\n";
  os << "  files skipped     " << files_skipped << "\n";
  os << "  method fragments  " << method_fragments << "\n";
  os << "  class fragments   " << class_fragments << "\n";
  for (Smell s : kAllSmells) {
    os << "  positives " << short_name(s) << std::string(8 - short_name(s).size(), ' ')
       << positive_count(s) << "\n";
  }
}

LabeledCorpus label_scan(CorpusScan scan, const Thresholds& t) {
  t.validate();
  LabeledCorpus out;
  out.report.language = scan.language;
  out.report.files_scanned = scan.files_seen;
  out.report.files_skipped = scan.skipped.size();
  out.report.skipped = scan.skipped;
  for (const auto& unit : scan.units) {
    std::vector<std::pair<const CodeFragment*, SmellVerdict>> unit_verdicts;
    for (const auto& m : unit.methods) {
      for (Smell s : {Smell::complex_method, Smell::empty_catch_block, Smell::magic_number}) {
        unit_verdicts.emplace_back(&m, detect(s, m, t));
      }
    }
    for (const auto& c : unit.classes) {
      unit_verdicts.emplace_back(&c, detect(Smell::multifaceted_abstraction, c, t));
    }
    std::stable_sort(unit_verdicts.begin(), unit_verdicts.end(),
                     [](const auto& a, const auto& b) { return fragment_order(*a.first, *b.first); });
    for (auto& [frag, v] : unit_verdicts) {
      if (v.positive) ++out.report.positives[static_cast<int>(v.smell)];
      out.verdicts.push_back(std::move(v));
    }
    out.report.method_fragments += unit.methods.size();
    out.report.class_fragments += unit.classes.size();
  }
  out.scan = std::move(scan);
  return out;
}

LabeledCorpus label_corpus(const std::filesystem::path& root, Language lang,
                           const Thresholds& t) {
  if (!std::filesystem::is_directory(root)) {
    throw EmptyCorpusError("corpus directory does not exist: " + root.string());
  }
  CorpusScan scan = scan_corpus(root, lang);
  if (scan.files_seen == 0) {
    throw EmptyCorpusError("no " + std::string(to_string(lang)) + " files under " +
                           root.string());
  }
  return label_scan(std::move(scan), t);
}

void write_verdicts(std::ostream& os, const std::vector<SmellVerdict>& verdicts) {
  os << "path,kind,name,start,end,smell,positive,evidence\n";
  for (const auto& v : verdicts) os << v.csv_line() << "\n";
}

}  // namespace smellnet
