#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "homcalc/parse.hpp"
#include "homcalc/refute.hpp"
#include "homcalc/typecheck.hpp"

using namespace homcalc;

namespace {

Program load(const char* text) { return typecheck_program(parse_program(text)); }

FuncPtr fn(const char* text) {
  auto f = std::make_shared<Func>(*parse_fn_text(text));
  TypeEnv env;
  typecheck_fn(*f, env);
  return f;
}

GenConfig with_harvest(const Program& p) {
  GenConfig cfg;
  harvest_constants(p, cfg);
  return cfg;
}

}  // namespace

TEST_CASE("sum and max aggregations are not refuted") {
  GenConfig cfg;
  Program sum = load(R"((program (input d (df int))
    (aggregate (lambda ((s int) (x int)) (+ s x)) (int 0))))");
  CHECK(!refute_hom(sum, cfg));
  Program mx = load(R"((program (input d (df int))
    (aggregate (lambda ((s int) (x int)) (max s x)) (int -9223372036854775808))))");
  CHECK(!refute_hom(mx, cfg));
}

TEST_CASE("clickstream checkout counter is refuted") {
  Program p = load(R"((program
    (input events (df (tuple int str str)))
    (aggregate
      (lambda ((s (tuple int int int (set str))) (x (tuple int str str)))
        (tuple
          (ite (= (proj 1 s) (int 0)) (proj 1 x) (proj 1 s))
          (ite (and (not (= (proj 2 x) (str ""))) (not (= (proj 2 x) (str "N/A"))))
               (+ (proj 2 s) (int 1)) (proj 2 s))
          (ite (= (proj 3 x) (str "order_checkout"))
               (ite (and (not (= (proj 2 x) (str ""))) (not (= (proj 2 x) (str "N/A"))))
                    (+ (proj 2 s) (int 1)) (proj 2 s))
               (proj 3 s))
          (ite (and (not (= (proj 2 x) (str ""))) (not (= (proj 2 x) (str "N/A"))))
               (insert (proj 4 s) (proj 2 x)) (proj 4 s))))
      (tuple (int 0) (int 0) (int 0) (set-empty str)))))");
  GenConfig cfg = with_harvest(p);
  auto cx = refute_hom(p, cfg);
  REQUIRE(cx.has_value());
  CHECK(cx->kind == CounterexampleKind::HomRefute);
  CHECK(replay_counterexample(*cx, p));

  // The specific frames reported in the worked example reproduce it too.
  std::vector<std::pair<std::string, Type>> cols = {
      {"c1", int_type()}, {"c2", str_type()}, {"c3", str_type()}};
  Counterexample manual;
  manual.kind = CounterexampleKind::HomRefute;
  manual.d1 = {cols, {tuple_v({int_v(5), str_v("product"), str_v("add_cart")})}};
  manual.d1b = manual.d1;
  manual.d2 = {cols,
               {tuple_v({int_v(0), str_v("N/A"), str_v("order_checkout")})}};
  manual.d2b = {cols, {}};
  CHECK(replay_counterexample(manual, p));
}

TEST_CASE("list accumulators hit the two normalizer refutation conditions") {
  GenConfig cfg;
  Value empty_list = list_v({});

  // Condition 1: f(I,x) = I for all x, yet f([5],x) = [5,1] differs from [5].
  FuncPtr f1 = fn(R"((lambda ((s (list int)) (x int))
    (ite (= s (list-empty int)) (list-empty int) (append s (int 1)))))");
  auto cx1 = refute_norm(f1, empty_list, list_type(int_type()), int_type(), cfg);
  REQUIRE(cx1.has_value());
  CHECK(cx1->kind == CounterexampleKind::NormRefute1);
  CHECK(replay_counterexample(*cx1, f1, empty_list));

  // Condition 2: images of the initializer collide while a seeded state
  // separates the rows: f([1,2],3) = [1,2,3] but f([1,2],0) = [1,2,0].
  FuncPtr f2 = fn(R"((lambda ((s (list int)) (x int))
    (ite (= s (list-empty int)) (append (list-empty int) (int 1)) (append s x))))");
  auto cx2 = refute_norm(f2, empty_list, list_type(int_type()), int_type(), cfg);
  REQUIRE(cx2.has_value());
  CHECK(cx2->kind == CounterexampleKind::NormRefute2);
  CHECK(replay_counterexample(*cx2, f2, empty_list));
  CHECK(!canon_eq(cx2->lhs, cx2->rhs));
}

TEST_CASE("reset-on-match accumulator fails condition 1") {
  // Exhaustive oracle over the [-3,3] box first: f(0,0) = 0 = I while
  // f(1,0) = 0 != 1, so a violation of condition (1) exists.
  FuncPtr f = fn("(lambda ((s int) (x int)) (ite (= s x) (int 0) x))");
  bool oracle_found = false;
  {
    Fuel fuel;
    for (int x = -3; x <= 3 && !oracle_found; ++x) {
      Value fi = apply_fn(f, {int_v(0), int_v(x)}, fuel);
      if (!canon_eq(fi, int_v(0))) continue;
      for (int s = -3; s <= 3; ++s) {
        Value fs = apply_fn(f, {int_v(s), int_v(x)}, fuel);
        if (!canon_eq(fs, int_v(s))) {
          oracle_found = true;
          break;
        }
      }
    }
  }
  REQUIRE(oracle_found);

  GenConfig cfg;
  auto cx = refute_norm(f, int_v(0), int_type(), int_type(), cfg);
  REQUIRE(cx.has_value());
  CHECK(cx->kind == CounterexampleKind::NormRefute1);
  CHECK(replay_counterexample(*cx, f, int_v(0)));
}

TEST_CASE("homomorphic accumulators pass refute_norm") {
  GenConfig cfg;
  CHECK(!refute_norm(fn("(lambda ((s int) (x int)) (+ s x))"), int_v(0),
                     int_type(), int_type(), cfg));
  CHECK(!refute_norm(fn("(lambda ((s int) (x int)) (+ s (int 1)))"), int_v(0),
                     int_type(), int_type(), cfg));
  CHECK(!refute_norm(fn("(lambda ((s (tuple bool int)) (x int)) (tuple true x))"),
                     tuple_v({bool_v(false), int_v(0)}),
                     tuple_type({bool_type(), int_type()}), int_type(), cfg));
}

TEST_CASE("same seed reproduces the same counterexample") {
  FuncPtr f = fn("(lambda ((s int) (x int)) (ite (= s x) (int 0) x))");
  GenConfig cfg;
  cfg.seed = 42;
  auto a = refute_norm(f, int_v(0), int_type(), int_type(), cfg);
  auto b = refute_norm(f, int_v(0), int_type(), int_type(), cfg);
  REQUIRE(a.has_value());
  REQUIRE(b.has_value());
  CHECK(canon_eq(a->state, b->state));
  CHECK(canon_eq(a->row, b->row));
}

TEST_CASE("refuted witnesses shrink toward small values") {
  FuncPtr f = fn(R"((lambda ((s (list int)) (x int))
    (ite (= s (list-empty int)) (list-empty int) (append s (int 1)))))");
  GenConfig cfg;
  auto cx = refute_norm(f, list_v({}), list_type(int_type()), int_type(), cfg);
  REQUIRE(cx.has_value());
  // A single-element list state suffices; shrinking should reach it.
  CHECK(cx->state.elems.size() == 1);
}
