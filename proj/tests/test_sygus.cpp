#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "homcalc/parse.hpp"
#include "homcalc/sygus.hpp"
#include "homcalc/typecheck.hpp"

using namespace homcalc;

namespace {

SynthProblem problem(const char* f_text, Value init, const char* path) {
  SynthProblem p;
  auto f = std::make_shared<Func>(*parse_fn_text(f_text));
  TypeEnv env;
  typecheck_fn(*f, env);
  p.f = f;
  p.init = std::move(init);
  p.state_type = p.f->params[0].second;
  p.row_type = p.f->params[1].second;
  p.path = path;
  return p;
}

}  // namespace

TEST_CASE("scalar sum export") {
  std::string text = export_sygus(
      problem("(lambda ((s int) (x int)) (+ s x))", int_v(0), "scalar"));
  CHECK(text.find("(synth-fun h ((a Int) (b Int)) Int") != std::string::npos);
  CHECK(text.find("(constraint (= (h s 0) s))") != std::string::npos);
  CHECK(text.find("(constraint (= (f (h b1 b2) r) (h b1 (f b2 r))))") !=
        std::string::npos);
  CHECK(text.find("(check-synth)") != std::string::npos);
  auto errs = sygus_check(text);
  for (const auto& e : errs) CAPTURE(e);
  CHECK(errs.empty());
}

TEST_CASE("tuple-state export uses tuple sorts and selectors") {
  std::string text = export_sygus(problem(
      "(lambda ((s (tuple bool int)) (x int)) (tuple true x))",
      tuple_v({bool_v(false), int_v(0)}), "tuple"));
  CHECK(text.find("(Tuple Bool Int)") != std::string::npos);
  CHECK(text.find("tuple.select") != std::string::npos);
  auto errs = sygus_check(text);
  for (const auto& e : errs) CAPTURE(e);
  CHECK(errs.empty());
}

TEST_CASE("map-state export declares the key-value set sort and library") {
  std::string text = export_sygus(problem(
      R"((lambda ((s (map int int)) (x int))
           (update s x (+ (get-or-else s x (int 0)) (int 1)))))",
      map_v({}), "map"));
  CHECK(text.find("(Set (Tuple Int Int))") != std::string::npos);
  CHECK(text.find("map.access") != std::string::npos);
  CHECK(text.find("map.update") != std::string::npos);
  CHECK(text.find("map.contains_key") != std::string::npos);
  CHECK(text.find("map.map_values") != std::string::npos);
  auto errs = sygus_check(text);
  for (const auto& e : errs) CAPTURE(e);
  CHECK(errs.empty());
}

TEST_CASE("grammar non-terminals are emitted in alphabetical order") {
  std::string text = export_sygus(problem(
      R"((lambda ((s (tuple str int int)) (x (tuple str int)))
        (tuple (proj 1 x) (+ (proj 2 s) (proj 2 x)) (+ (proj 3 s) (int 1)))))",
      tuple_v({str_v(""), int_v(0), int_v(0)}), "avg"));
  auto errs = sygus_check(text);
  for (const auto& e : errs) CAPTURE(e);
  CHECK(errs.empty());

  // Extract the declaration list of the synth-fun grammar and check order.
  size_t at = text.find("(synth-fun");
  REQUIRE(at != std::string::npos);
  std::vector<std::string> names;
  size_t cursor = at;
  while ((cursor = text.find("(NT", cursor)) != std::string::npos) {
    size_t end = text.find_first_of(" )", cursor + 1);
    names.push_back(text.substr(cursor + 1, end - cursor - 1));
    cursor = end;
    if (names.size() > 64) break;
  }
  REQUIRE(!names.empty());
  // The declaration list lists each non-terminal once before the rules
  // repeat them; the first k distinct names must be sorted.
  std::vector<std::string> decls;
  for (const auto& n : names) {
    if (!decls.empty() && n == decls.front()) break;
    decls.push_back(n);
  }
  CHECK(std::is_sorted(decls.begin(), decls.end()));
}

TEST_CASE("commutativity constraint appears only when requested") {
  SynthProblem p =
      problem("(lambda ((s int) (x int)) (+ s x))", int_v(0), "scalar");
  CHECK(export_sygus(p, false).find("(= (h b1 b2) (h b2 b1))") ==
        std::string::npos);
  CHECK(export_sygus(p, true).find("(= (h b1 b2) (h b2 b1))") !=
        std::string::npos);
}

TEST_CASE("fold bodies cannot be exported") {
  CHECK_THROWS_AS(
      export_sygus(problem(
          R"((lambda ((s int) (x (list int)))
               (fold (lambda ((acc int) (e int)) (+ acc e)) s x)))",
          int_v(0), "bad")),
      ExportError);
}

TEST_CASE("checker rejects malformed files") {
  CHECK(!sygus_check("(set-logic ALL").empty());
  CHECK(!sygus_check("(set-logic ALL)\n(check-synth)").empty());  // no synth-fun
  CHECK(!sygus_check("(set-logic ALL)\n(synth-fun h ((a Int)) Int)").empty());
  CHECK(!sygus_check(
             "(set-logic ALL)\n(synth-fun h ((a Int)) Int)\n(check-synth)\n"
             "(constraint true)")
             .empty());  // command after check-synth
  CHECK(!sygus_check("(frobnicate)\n(check-synth)").empty());
  CHECK(sygus_check(
            "(set-logic ALL)\n(synth-fun h ((a Int) (b Int)) Int)\n"
            "(declare-var s Int)\n(constraint (= (h s 0) s))\n(check-synth)")
            .empty());
}
