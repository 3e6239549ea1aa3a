#include "smellnet/synth.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include "smellnet/random.hpp"

namespace smellnet {

namespace {

const std::vector<std::string> kClassNouns = {"Order",   "Invoice", "Account", "Session", "Report",
                                              "Catalog", "Ledger",  "Route",   "Sensor",  "Queue",
                                              "Profile", "Payment", "Metric",  "Ticket",  "Stock"};
const std::vector<std::string> kClassRoles = {"Service", "Manager", "Handler", "Builder",
                                              "Processor", "Tracker", "Planner", "Store"};
const std::vector<std::string> kVerbs = {"compute", "update", "resolve", "check", "build",
                                         "load",    "apply",  "merge",   "scan",  "adjust",
                                         "measure", "count",  "select",  "refresh", "estimate"};
const std::vector<std::string> kObjects = {"Total", "Index", "Range",  "Buffer", "Entry",
                                           "Weight", "Score", "Level", "Offset", "Window",
                                           "Budget", "Delay", "Quota"};
const std::vector<std::string> kConstants = {"limit",  "maxSize", "threshold", "capacity",
                                             "step",   "margin",  "retries",   "scale",
                                             "timeout", "batch"};
const std::vector<std::string> kFields = {"count", "offset", "state", "cursor", "pending",
                                          "weight", "cache", "version", "level"};
const std::vector<std::string> kFacetFields = {"alpha", "bravo", "charlie", "delta", "echo",
                                               "foxtrot", "golf", "hotel", "india", "juliet"};
const std::vector<std::string> kMessages = {"starting", "retrying", "done", "skipping entry",
                                            "cache miss", "value clamped"};
const std::vector<int> kMagicValues = {2,  3,   5,   7,   10,  12,   16,   24,   42,   60,
                                       64, 100, 128, 255, 256, 500, 1000, 1024, 3600, 8080};

std::string capitalize(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

std::string upper_snake(const std::string& camel) {
  std::string out;
  for (char c : camel) {
    if (std::isupper(static_cast<unsigned char>(c))) out += '_';
    out += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  }
  return out;
}

template <typename T>
const T& pick(const std::vector<T>& v, Rng& rng) {
  return v[rng.uniform_index(v.size())];
}

std::size_t between(std::size_t lo, std::size_t hi, Rng& rng) {
  return lo + rng.uniform_index(hi - lo + 1);
}

/// Surface syntax that differs between the two languages.
struct Style {
  Language lang;

  bool java() const { return lang == Language::java; }
  std::string ext() const { return java() ? ".java" : ".cs"; }
  std::string method_name(const std::string& camel) const { return java() ? camel : capitalize(camel); }
  std::string constant_name(const std::string& camel) const {
    return java() ? upper_snake(camel) : capitalize(camel);
  }
  std::string constant_decl(const std::string& name, int value) const {
    return java() ? "private static final int " + name + " = " + std::to_string(value) + ";"
                  : "private const int " + name + " = " + std::to_string(value) + ";";
  }
  std::string log(const std::string& arg) const {
    return java() ? "System.out.println(" + arg + ");" : "Console.WriteLine(" + arg + ");";
  }
  std::string max_call() const { return java() ? "Math.max" : "Math.Max"; }
  std::string each_loop() const {
    return java() ? "for (int item : items) { total += item; }"
                  : "foreach (var item in items) { total += item; }";
  }
  std::string exception_message() const { return java() ? "e.getMessage()" : "e.Message"; }
  std::string length_of(const std::string& array) const {
    return array + (java() ? ".length" : ".Length");
  }
};

struct ClassContext {
  std::vector<std::string> constants;
  std::vector<std::string> fields;
};

struct Statement {
  std::string text;
  int decisions = 0;
};

std::vector<Statement> decision_templates(const Style& s) {
  return {
      {"if (v > {C}) { v = v - total; }", 1},
      {"if (total < {C}) { total = total + v; } else { total = total - v; }", 1},
      {"for (int i = v; i < {C}; i += v) { total += i; }", 1},
      {s.each_loop(), 1},
      {"v = v > {C} ? v : {C};", 1},
      {"while (v > {C}) { v = v - total; }", 1},
      {"if (v > {C} && total < {C}) { total = total + v; }", 2},
      {"if (v == total || total == {C}) { v = total; }", 2},
      {"switch (v) { case {C}: total = v; break; default: break; }", 1},
  };
}

Statement plain_statement(const Style& s, const ClassContext& ctx, std::size_t serial, Rng& rng) {
  switch (rng.uniform_index(9)) {
    case 0: return {"v = v + {C};"};
    case 1: return {"total = total * {C};"};
    case 2: return {"total += v;"};
    case 3: return {"v = v * total;"};
    case 4: return {"int t" + std::to_string(serial) + " = v - {C};"};
    case 5: return {pick(ctx.fields, rng) + " = v;"};
    case 6: return {"v = " + s.max_call() + "(v, {C});"};
    case 7: return {s.log("\"" + pick(kMessages, rng) + "\"")};
    default: return {"total = total + " + pick(ctx.fields, rng) + ";"};
  }
}

struct MethodPlan {
  bool complex_method = false;
  bool empty_catch = false;
  bool magic_number = false;
};

/// Clean methods name every constant they use; magic methods spell each one
/// out as a bare literal.
std::string fill_slots(std::string body, const Style& s, const ClassContext& ctx, bool magic,
                       Rng& rng) {
  std::string out;
  std::size_t from = 0;
  for (std::size_t p = body.find("{C}"); p != std::string::npos; p = body.find("{C}", from)) {
    out += body.substr(from, p - from);
    out += magic ? std::to_string(pick(kMagicValues, rng))
                 : s.constant_name(pick(ctx.constants, rng));
    from = p + 3;
  }
  return out + body.substr(from);
}

std::vector<std::string> method_body(const Style& s, const SyntheticSpec& spec,
                                     const ClassContext& ctx, const MethodPlan& plan, Rng& rng) {
  std::vector<Statement> stmts;
  const auto templates = decision_templates(s);
  int budget = plan.complex_method ? 8 + static_cast<int>(rng.uniform_index(3))
                                   : static_cast<int>(rng.uniform_index(3));
  while (budget > 0) {
    const Statement& t = pick(templates, rng);
    if (t.decisions > budget) continue;
    stmts.push_back(t);
    budget -= t.decisions;
  }
  const std::size_t plain = between(spec.min_statements, spec.max_statements, rng);
  for (std::size_t i = 0; i < plain; ++i) stmts.push_back(plain_statement(s, ctx, i, rng));
  rng.shuffle(stmts);

  std::vector<std::string> lines = {"int v = value;", "int total = " + s.length_of("items") + ";"};
  for (const auto& st : stmts) lines.push_back(st.text);
  if (plan.empty_catch) {
    lines.push_back("try { v = " + s.method_name("normalize") + "(v, {C}); } catch (Exception e) { }");
  } else if (rng.bernoulli(0.3)) {
    lines.push_back("try { v = " + s.method_name("normalize") + "(v, {C}); } catch (Exception e) { " +
                    s.log(s.exception_message()) + " }");
  }
  lines.push_back(rng.bernoulli(0.5) ? "return v + {C};" : "return total + v;");

  if (plan.magic_number) {
    std::size_t slots = 0;
    for (const auto& l : lines) {
      for (std::size_t p = l.find("{C}"); p != std::string::npos; p = l.find("{C}", p + 3)) ++slots;
    }
    if (slots == 0) lines.insert(lines.end() - 1, "v = v + {C};");
  }
  for (auto& l : lines) l = fill_slots(l, s, ctx, plan.magic_number, rng);
  return lines;
}

class SourceWriter {
 public:
  explicit SourceWriter(const Style& s) : style_(s) {}

  void line(const std::string& text) {
    out_ << std::string(indent_ * 4, ' ') << text << "\n";
  }
  void open(const std::string& header) {
    if (style_.java()) {
      line(header + " {");
    } else {
      line(header);
      line("{");
    }
    ++indent_;
  }
  void close() {
    --indent_;
    line("}");
  }
  void blank() { out_ << "\n"; }
  std::string str() const { return out_.str(); }

 private:
  const Style& style_;
  std::ostringstream out_;
  std::size_t indent_ = 0;
};

}  // namespace

void SyntheticSpec::validate() const {
  if (methods_per_class == 0) throw std::invalid_argument("methods_per_class must be positive");
  if (min_statements > max_statements) throw std::invalid_argument("min_statements > max_statements");
  for (std::size_t n : {complex_method, empty_catch, magic_number}) {
    if (n > methods) throw std::invalid_argument("cannot inject into more methods than generated");
  }
}

std::size_t SyntheticManifest::count_methods() const {
  return static_cast<std::size_t>(std::count_if(entries.begin(), entries.end(), [](const auto& e) {
    return e.kind == FragmentKind::method;
  }));
}

std::size_t SyntheticManifest::count_classes() const { return entries.size() - count_methods(); }

void SyntheticManifest::write(std::ostream& os) const {
  os << "path,kind,container,name,cm,ecb,mn,ma\n";
  for (const auto& e : entries) {
    os << e.path << ',' << to_string(e.kind) << ',' << e.container << ',' << e.name << ','
       << e.complex_method << ',' << e.empty_catch << ',' << e.magic_number << ','
       << e.multifaceted << '\n';
  }
}

SyntheticManifest SyntheticManifest::read(std::istream& is) {
  SyntheticManifest m;
  std::string line;
  std::getline(is, line);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::istringstream in(line);
    for (std::string cell; std::getline(in, cell, ',');) f.push_back(cell);
    if (f.size() != 8) throw std::invalid_argument("bad manifest line: " + line);
    ManifestEntry e;
    e.path = f[0];
    e.kind = f[1] == "method" ? FragmentKind::method : FragmentKind::code_class;
    e.container = f[2];
    e.name = f[3];
    e.complex_method = f[4] == "1";
    e.empty_catch = f[5] == "1";
    e.magic_number = f[6] == "1";
    e.multifaceted = f[7] == "1";
    m.entries.push_back(std::move(e));
  }
  return m;
}

SyntheticManifest generate_corpus(const SyntheticSpec& spec, const std::filesystem::path& root) {
  spec.validate();
  const Style style{spec.language};
  Rng rng(spec.seed);

  std::vector<MethodPlan> plans(spec.methods);
  auto mark = [&](std::size_t count, bool MethodPlan::*flag) {
    std::vector<std::size_t> order(spec.methods);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    for (std::size_t i = 0; i < count; ++i) plans[order[i]].*flag = true;
  };
  mark(spec.complex_method, &MethodPlan::complex_method);
  mark(spec.empty_catch, &MethodPlan::empty_catch);
  mark(spec.magic_number, &MethodPlan::magic_number);

  const std::size_t normal_classes = (spec.methods + spec.methods_per_class - 1) / spec.methods_per_class;
  const std::size_t total_classes = normal_classes + spec.multifaceted;
  SyntheticManifest manifest;
  std::size_t next_method = 0;

  for (std::size_t k = 0; k < total_classes; ++k) {
    const bool facet = k >= normal_classes;
    const std::string module = "module" + std::to_string(k / 10);
    const std::string ns = style.java() ? "synth." + module : "Synth." + capitalize(module);
    const std::string class_name =
        pick(kClassNouns, rng) + pick(kClassRoles, rng) + std::to_string(k);
    const std::string rel = module + "/" + class_name + style.ext();
    const std::string container = ns + "." + class_name;

    SourceWriter w(style);
    if (style.java()) {
      w.line("package " + ns + ";");
      w.blank();
    } else {
      w.line("using System;");
      w.blank();
      w.open("namespace " + ns);
    }
    w.open("public class " + class_name);

    std::vector<ManifestEntry> methods;
    if (facet) {
      // Every method touches exactly one field, so LCOM = 1 - 1/fields.
      std::vector<std::string> fields = kFacetFields;
      rng.shuffle(fields);
      fields.resize(between(8, fields.size(), rng));
      for (const auto& f : fields) w.line("private int " + f + ";");
      const std::size_t count = between(8, 12, rng);
      for (std::size_t m = 0; m < count; ++m) {
        const std::string& f = fields[m % fields.size()];
        const std::string verb = m < fields.size() ? "update" : "reset";
        const std::string name = style.method_name(verb + capitalize(f));
        w.blank();
        w.open("public void " + name + "(int value)");
        switch (rng.uniform_index(3)) {
          case 0: w.line(f + " = " + f + " + value;"); break;
          case 1: w.line(f + " = value;"); break;
          default: w.line(f + "++;"); break;
        }
        w.close();
        methods.push_back({rel, FragmentKind::method, container, name});
      }
    } else {
      ClassContext ctx;
      std::vector<std::string> consts = kConstants, fields = kFields;
      rng.shuffle(consts);
      rng.shuffle(fields);
      ctx.constants.assign(consts.begin(), consts.begin() + 3);
      ctx.fields.assign(fields.begin(), fields.begin() + 3);
      for (const auto& c : ctx.constants) {
        w.line(style.constant_decl(style.constant_name(c), pick(kMagicValues, rng)));
      }
      for (const auto& f : ctx.fields) w.line("private int " + f + ";");

      std::set<std::string> used;
      const std::size_t count = std::min(spec.methods_per_class, spec.methods - next_method);
      for (std::size_t m = 0; m < count; ++m) {
        const MethodPlan& plan = plans[next_method++];
        std::string name = style.method_name(pick(kVerbs, rng) + pick(kObjects, rng));
        while (!used.insert(name).second) name += "X";
        w.blank();
        w.open("public int " + name + "(int value, int[] items)");
        for (const auto& l : method_body(style, spec, ctx, plan, rng)) w.line(l);
        w.close();
        methods.push_back({rel, FragmentKind::method, container, name, plan.complex_method,
                           plan.empty_catch, plan.magic_number, false});
      }
    }
    w.close();
    if (!style.java()) w.close();

    std::filesystem::create_directories(root / module);
    std::ofstream out(root / module / (class_name + style.ext()), std::ios::binary);
    out << w.str();

    ManifestEntry cls{rel, FragmentKind::code_class, ns, class_name};
    cls.multifaceted = facet;
    manifest.entries.push_back(cls);
    for (auto& e : methods) manifest.entries.push_back(std::move(e));
  }
  return manifest;
}

}  // namespace smellnet
