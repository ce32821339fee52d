#include <doctest.h>

#include <algorithm>
#include <functional>

#include "cvalue/syntax.hpp"

using namespace cvalue::syntax;

namespace {

SyntaxTree java(const std::string &src) { return parse_source(src, "java"); }

NodeId find(const SyntaxTree &t, Kind kind, const std::string &label = {}) {
  for (NodeId i = 0; i < t.size(); ++i)
    if (t.node(i).kind == kind && (label.empty() || t.node(i).label == label)) return i;
  return kNoNode;
}

}  // namespace

TEST_CASE("empty source gives an empty unit") {
  auto t = java("");
  REQUIRE(t.size() == 1);
  CHECK(t.node(t.root()).kind == Kind::CompilationUnit);
  CHECK(t.node(t.root()).children.empty());
  CHECK(extract_functions(t).empty());
}

TEST_CASE("one method with one return gives one unit") {
  auto t = java("class A { int f() { return 1; } }");
  auto fs = extract_functions(t, "A.java");
  REQUIRE(fs.size() == 1);
  CHECK(fs[0].qualified_name == "A.f()");
  CHECK(fs[0].simple_name == "f");
  CHECK(fs[0].file == "A.java");
  CHECK(fs[0].body != kNoNode);
}

TEST_CASE("invalid text throws ParseError with a position") {
  CHECK_THROWS_AS(java("class A { int f( { }"), ParseError);
  try {
    java("class A { void f() { int x = 1 } }");
    FAIL("expected ParseError");
  } catch (const ParseError &e) {
    CHECK(e.position() > 0);
  }
  CHECK_THROWS_AS(java("class A { String s = \"open; }"), ParseError);
}

TEST_CASE("two methods and overloads get distinct names") {
  auto t = java("class A { void f(int a) {} void f(String s) {} void g() {} }");
  auto fs = extract_functions(t);
  REQUIRE(fs.size() == 3);
  CHECK(fs[0].qualified_name == "A.f(int)");
  CHECK(fs[1].qualified_name == "A.f(String)");
  CHECK(fs[2].qualified_name == "A.g()");
}

TEST_CASE("lambdas become nested units named after their method") {
  auto t = java("class Cls { void m() { Runnable r = () -> { go(); }; Runnable s = () -> stop(); } }");
  auto fs = extract_functions(t);
  REQUIRE(fs.size() == 3);
  CHECK(fs[1].qualified_name.ends_with("m()$lambda0"));
  CHECK(fs[2].qualified_name.ends_with("m()$lambda1"));
  CHECK(fs[1].enclosing == 0);
  // reparsing reproduces the same names
  auto again = extract_functions(java("class Cls { void m() { Runnable r = () -> { go(); }; Runnable s = () -> stop(); } }"));
  CHECK(again[1].qualified_name == fs[1].qualified_name);
}

TEST_CASE("constructors, initializers and nested classes are units") {
  auto t = java("class A { A(int x) {} static { init(); } class B { void h() {} } }");
  auto fs = extract_functions(t);
  std::vector<std::string> names;
  for (const auto &f : fs) names.push_back(f.qualified_name);
  CHECK(names.size() == 3);
  CHECK(std::find(names.begin(), names.end(), "A.A(int)") != names.end());
  CHECK(std::find(names.begin(), names.end(), "A.B.h()") != names.end());
}

TEST_CASE("node categories") {
  auto t = java("class A { @Override public void f() { int count = 0; log.debug(\"x\"); System.out.println(count); run(); } }");
  SUBCASE("declarator identifier is name-bearing") {
    auto frag = find(t, Kind::VariableFragment);
    REQUIRE(frag != kNoNode);
    bool found = false;
    for (auto c : t.node(frag).children)
      if (t.node(c).kind == Kind::SimpleName && t.node(c).label == "count") {
        CHECK(t.node(c).category == NodeCategory::NameBearing);
        found = true;
      }
    CHECK(found);
  }
  SUBCASE("annotation and access modifier are modifiers") {
    auto ann = find(t, Kind::Annotation);
    REQUIRE(ann != kNoNode);
    CHECK(t.node(ann).category == NodeCategory::Modifier);
    auto mod = find(t, Kind::Modifier, "public");
    REQUIRE(mod != kNoNode);
    CHECK(t.node(mod).category == NodeCategory::Modifier);
  }
  SUBCASE("log calls are log statements, plain calls are not") {
    std::vector<NodeCategory> stmt_categories;
    for (NodeId i = 0; i < t.size(); ++i)
      if (t.node(i).kind == Kind::ExpressionStatement) stmt_categories.push_back(t.node(i).category);
    REQUIRE(stmt_categories.size() == 3);
    CHECK(stmt_categories[0] == NodeCategory::LogStatement);
    CHECK(stmt_categories[1] == NodeCategory::LogStatement);
    CHECK(stmt_categories[2] != NodeCategory::LogStatement);
  }
  SUBCASE("no node in the tree is a comment") {
    auto c = java("class A { /* c */ void f() { // x\n int a = 1; } }");
    for (const auto &n : c.nodes()) CHECK(n.category != NodeCategory::Comment);
    CHECK(c.comments().size() == 2);
  }
}

TEST_CASE("custom blacklist") {
  ParseOptions options;
  options.blacklist.patterns = {"audit"};
  auto t = parse_source("class A { void f() { audit.write(1); log.debug(2); } }", "java", options);
  std::vector<NodeCategory> cats;
  for (const auto &n : t.nodes())
    if (n.kind == Kind::ExpressionStatement) cats.push_back(n.category);
  REQUIRE(cats.size() == 2);
  CHECK(cats[0] == NodeCategory::LogStatement);
  CHECK(cats[1] == NodeCategory::Other);
}

TEST_CASE("comment metrics count physical lines") {
  SUBCASE("no comments") {
    std::string src = "class A {\n";
    for (int i = 0; i < 8; ++i) src += "  int f" + std::to_string(i) + ";\n";
    src += "}";
    auto t = java(src);
    CHECK(comment_metrics(t, t.node(t.root()).span) == LineCounts{0, 10});
  }
  SUBCASE("all comment") {
    std::string src = "// a\n// b\n/* c\n d */";
    auto t = java(src);
    CHECK(comment_metrics(t, Span{0, src.size()}) == LineCounts{4, 4});
  }
  SUBCASE("three-line block comment in twelve lines") {
    std::string src = "class A {\n  void f() {\n    /* one\n       two\n       three */\n";
    for (int i = 0; i < 5; ++i) src += "    g();\n";
    src += "  }\n}";
    auto t = java(src);
    CHECK(comment_metrics(t, Span{0, src.size()}) == LineCounts{3, 12});
  }
}

TEST_CASE("tree invariants") {
  std::string src = R"(package p;
import java.util.List;
public class A<T> extends B implements C {
  private int x = 1, y[];
  enum E { ONE, TWO }
  @SuppressWarnings("all")
  public <U> List<U> f(final int a, String... rest) throws Exception {
    for (int i = 0; i < a; i++) { x += i; }
    for (String s : rest) { if (s == null) continue; else break; }
    while (x > 0) x--;
    do { x++; } while (x < 3);
    switch (a) { case 1: case 2: x = 0; break; default: x = 1; }
    try (var r = open()) { r.go(); } catch (IllegalStateException | IllegalArgumentException e) { throw e; } finally { x = 2; }
    int[] arr = new int[] {1, 2};
    Object o = (Object) arr;
    boolean b = o instanceof int[] && a > 0 || a < -1;
    x = b ? 1 : 2;
    Runnable r = this::toString;
    synchronized (this) { x <<= 1; }
    label: for (;;) { break label; }
    assert x > 0 : "positive";
    return new java.util.ArrayList<U>();
  }
}
)";
  auto t = java(src);
  auto t2 = java(src);
  REQUIRE(t.size() == t2.size());
  for (NodeId i = 0; i < t.size(); ++i) {
    const auto &n = t.node(i);
    CHECK(n.kind == t2.node(i).kind);
    CHECK(n.label == t2.node(i).label);
    int expect = 1;
    for (auto c : n.children) {
      expect = std::max(expect, 1 + t.node(c).depth);
      CHECK(t.node(c).span.begin >= n.span.begin);
      CHECK(t.node(c).span.end <= n.span.end);
      CHECK(t.node(c).parent == i);
    }
    CHECK(n.depth == expect);
  }
  CHECK(extract_functions(t).size() == 1);
}
