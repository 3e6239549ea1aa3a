#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "smellnet/code_model.hpp"

using namespace smellnet;
namespace fs = std::filesystem;

namespace {

SourceUnit unit_from(const std::string& text, Language lang) {
  SourceUnit u;
  u.path = "snippet";
  u.language = lang;
  u.text = text;
  return u;
}

std::vector<std::string> names(const std::string& text, Language lang, FragmentKind kind) {
  std::vector<std::string> out;
  for (const auto& f : extract_fragments(unit_from(text, lang), kind)) out.push_back(f.name);
  return out;
}

std::vector<std::string> lexemes(const std::string& text, Language lang) {
  std::vector<std::string> out;
  for (const auto& t : lex(text, lang)) out.push_back(t.lexeme);
  return out;
}

using Names = std::vector<std::string>;

}  // namespace

TEST(Lexer, CategoriesAndPositions) {
  const auto tokens = lex("int x = 42;\n  if (x >= 1) y = \"s\";", Language::csharp);
  ASSERT_EQ(tokens.size(), 15u);
  EXPECT_EQ(tokens[0].category, TokenCategory::keyword);
  EXPECT_EQ(tokens[1].category, TokenCategory::identifier);
  EXPECT_EQ(tokens[2].category, TokenCategory::op);
  EXPECT_EQ(tokens[3].category, TokenCategory::numeric_literal);
  EXPECT_EQ(tokens[4].category, TokenCategory::punctuation);
  EXPECT_EQ(tokens[5].lexeme, "if");
  EXPECT_EQ(tokens[5].line, 2);
  EXPECT_EQ(tokens[5].column, 3);
  EXPECT_EQ(tokens[8].lexeme, ">=");
  EXPECT_EQ(tokens[13].category, TokenCategory::string_literal);
}

TEST(Lexer, CommentsAndStringsHideBraces) {
  const auto lx = lexemes("a /* { */ b // }\n c \"}\" '{'", Language::java);
  EXPECT_EQ(lx, (Names{"a", "b", "c", "\"}\"", "'{'"}));
}

TEST(Lexer, CSharpStringForms) {
  const auto tokens = lex("s = @\"C:\\dir\"\"x\"; t = $\"{a} {{b}}\";", Language::csharp);
  ASSERT_EQ(tokens.size(), 8u);
  EXPECT_EQ(tokens[2].category, TokenCategory::string_literal);
  EXPECT_EQ(tokens[6].category, TokenCategory::string_literal);
}

TEST(Lexer, NumericForms) {
  for (const char* n : {"0x1F", "1_000", "3.14f", "2e10", "10L", "0b101", ".5"}) {
    const auto tokens = lex(n, Language::java);
    ASSERT_EQ(tokens.size(), 1u) << n;
    EXPECT_EQ(tokens[0].category, TokenCategory::numeric_literal) << n;
  }
}

TEST(Lexer, KeywordsDependOnLanguage) {
  EXPECT_EQ(lex("foreach", Language::csharp)[0].category, TokenCategory::keyword);
  EXPECT_EQ(lex("foreach", Language::java)[0].category, TokenCategory::identifier);
  EXPECT_EQ(lex("final", Language::java)[0].category, TokenCategory::keyword);
  EXPECT_EQ(lex("final", Language::csharp)[0].category, TokenCategory::identifier);
  EXPECT_TRUE(is_keyword(Language::csharp, "readonly"));
  EXPECT_FALSE(is_keyword(Language::java, "readonly"));
}

TEST(Lexer, RejectsBrokenInput) {
  EXPECT_THROW(lex("x = \"open", Language::java), SourceError);
  EXPECT_THROW(lex("c = 'a", Language::java), SourceError);
  EXPECT_THROW(lex("/* never closed", Language::csharp), SourceError);
  try {
    lex("a\n  \"open", Language::java);
    FAIL();
  } catch (const SourceError& e) {
    EXPECT_EQ(e.kind(), SourceError::Kind::unterminated_literal);
    EXPECT_EQ(e.line(), 2);
    EXPECT_EQ(e.column(), 3);
  }
}

TEST(Lexer, Utf8Validation) {
  EXPECT_TRUE(is_valid_utf8("plain ascii"));
  EXPECT_TRUE(is_valid_utf8("caf\xc3\xa9"));
  EXPECT_FALSE(is_valid_utf8("bad \xc3"));
  EXPECT_FALSE(is_valid_utf8("\xff"));
}

TEST(Lexer, LanguageFromExtension) {
  EXPECT_EQ(language_from_path("a/B.cs"), Language::csharp);
  EXPECT_EQ(language_from_path("a/B.java"), Language::java);
  EXPECT_EQ(language_from_path("a/B.txt"), std::nullopt);
  EXPECT_EQ(parse_language("java"), Language::java);
  EXPECT_THROW(parse_language("cobol"), std::invalid_argument);
}

TEST(Fragments, MethodsAndConstructors) {
  EXPECT_EQ(names("class A { A() { } void M(int x) { } static int N() { return 0; } }",
                  Language::csharp, FragmentKind::method),
            (Names{"A", "M", "N"}));
}

TEST(Fragments, InterfaceDeclarationsHaveNoBodies) {
  EXPECT_TRUE(names("interface I { void A(); int B(int x); string C(); }", Language::csharp,
                    FragmentKind::method)
                  .empty());
  EXPECT_EQ(names("interface I { void a(); }", Language::java, FragmentKind::code_class),
            (Names{"I"}));
}

TEST(Fragments, AbstractMembersAndFieldInitializers) {
  EXPECT_EQ(names("abstract class A { abstract void M(); int[] xs = new int[] { 1, 2 }; "
                  "Func<int> f = () => { return 1; }; void N() { } }",
                  Language::csharp, FragmentKind::method),
            (Names{"N"}));
}

TEST(Fragments, PropertiesAreNotMethods) {
  EXPECT_EQ(names("class A { int X { get { return 1; } set { } } int Y => 2; void M() { } }",
                  Language::csharp, FragmentKind::method),
            (Names{"M"}));
}

TEST(Fragments, ExpressionBodiedMembersYieldNothing) {
  EXPECT_TRUE(names("class A { int M() => 3; }", Language::csharp, FragmentKind::method).empty());
}

TEST(Fragments, LambdasAndLocalFunctionsStayInside) {
  const auto frags = extract_fragments(
      unit_from("class A { void M() { Action a = () => { Do(); }; int L(int x) { return x; } } }",
                Language::csharp),
      FragmentKind::method);
  ASSERT_EQ(frags.size(), 1u);
  EXPECT_EQ(frags[0].name, "M");
}

TEST(Fragments, NestedTypesBelongToOutermostClass) {
  const std::string src =
      "namespace N { class Outer { void A() { } class Inner { void B() { } } } class Next { } }";
  EXPECT_EQ(names(src, Language::csharp, FragmentKind::code_class), (Names{"Outer", "Next"}));
  const auto methods = extract_fragments(unit_from(src, Language::csharp), FragmentKind::method);
  ASSERT_EQ(methods.size(), 2u);
  EXPECT_EQ(methods[0].container, "N.Outer");
  EXPECT_EQ(methods[1].container, "N.Outer.Inner");
}

TEST(Fragments, JavaPackageAndAnnotations) {
  const std::string src =
      "package a.b;\n@Entity\npublic class C {\n  @Override\n  public String toString() { return \"\"; }\n"
      "  @SuppressWarnings(\"x\") void m() { }\n}\n";
  const auto methods = extract_fragments(unit_from(src, Language::java), FragmentKind::method);
  ASSERT_EQ(methods.size(), 2u);
  EXPECT_EQ(methods[0].name, "toString");
  EXPECT_EQ(methods[0].container, "a.b.C");
  EXPECT_EQ(methods[0].start_line, 4);
  EXPECT_EQ(methods[0].end_line, 5);
}

TEST(Fragments, CSharpAttributesAndGenerics) {
  EXPECT_EQ(names("class A { [Test] [Category(\"x\")] public void T() { } "
                  "public List<T> Make<T>(int n) where T : new() { return null; } }",
                  Language::csharp, FragmentKind::method),
            (Names{"T", "Make"}));
}

TEST(Fragments, JavaThrowsClause) {
  EXPECT_EQ(names("class A { void read() throws IOException, Exception { } }", Language::java,
                  FragmentKind::method),
            (Names{"read"}));
}

TEST(Fragments, ControlStatementsAreNotMethods) {
  EXPECT_EQ(names("class A { void M() { if (x) { } while (y) { } for (;;) { } switch (z) { } } }",
                  Language::csharp, FragmentKind::method),
            (Names{"M"}));
}

TEST(Fragments, EnumsAndStructsAreClasses) {
  EXPECT_EQ(names("enum Color { Red, Green } struct P { int x; void M() { } }", Language::csharp,
                  FragmentKind::code_class),
            (Names{"Color", "P"}));
}

TEST(Fragments, LineSpanAndId) {
  const auto frags = extract_fragments(
      unit_from("class A {\n  void M()\n  {\n    x();\n  }\n}\n", Language::csharp), FragmentKind::method);
  ASSERT_EQ(frags.size(), 1u);
  EXPECT_EQ(frags[0].start_line, 2);
  EXPECT_EQ(frags[0].end_line, 5);
  EXPECT_EQ(frags[0].id(), "snippet:2:3");
}

TEST(Fragments, UnbalancedBracesAreRejected) {
  EXPECT_THROW(extract_fragments(unit_from("class A { void M() { }", Language::csharp),
                                 FragmentKind::method),
               SourceError);
  EXPECT_THROW(extract_fragments(unit_from("class A { ) }", Language::csharp), FragmentKind::method),
               SourceError);
}

TEST(Scan, SkipsBadFilesAndSortsPaths) {
  const fs::path dir = fs::temp_directory_path() / "smellnet_scan";
  fs::remove_all(dir);
  fs::create_directories(dir / "z");
  std::ofstream(dir / "z" / "B.java") << "class B { void m() { } }";
  std::ofstream(dir / "A.java") << "class A { void m() { } void n() { } }";
  std::ofstream(dir / "Bad.java") << "class Bad { \xff }";
  std::ofstream(dir / "Ignored.cs") << "class C { }";
  const auto scan = scan_corpus(dir, Language::java);
  EXPECT_EQ(scan.files_seen, 3u);
  ASSERT_EQ(scan.units.size(), 2u);
  EXPECT_EQ(scan.units[0].path, "A.java");
  EXPECT_EQ(scan.units[1].path, "z/B.java");
  EXPECT_EQ(scan.units[0].methods.size(), 2u);
  ASSERT_EQ(scan.skipped.size(), 1u);
  EXPECT_EQ(scan.skipped[0].path, "Bad.java");
  EXPECT_EQ(scan.skipped[0].diagnostic().rfind("SKIP Bad.java", 0), 0u);
}
