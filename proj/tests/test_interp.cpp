#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <map>

#include "doctest.h"
#include "homcalc/gen.hpp"
#include "homcalc/interp.hpp"
#include "homcalc/parse.hpp"
#include "homcalc/typecheck.hpp"

using namespace homcalc;

namespace {

Value run(const char* expr_text, Env env = {}) {
  TypeEnv tenv;
  Expr e = typecheck_expr(parse_expr_text(expr_text), tenv);
  Fuel fuel;
  return eval(e, env, fuel);
}

Program load(const char* text) { return typecheck_program(parse_program(text)); }

const char* kSumFreq = R"((program
  (input d (df int))
  (aggregate
    (lambda ((s (tuple int (map int int))) (x int))
      (tuple (+ (proj 1 s) x)
             (update (proj 2 s) x (+ (get-or-else (proj 2 s) x (int 0)) (int 1)))))
    (tuple (int 0) (map-empty int int)))))";

const char* kAvgTemperature = R"((program
  (input readings (df (tuple str int)))
  (aggregate
    (lambda ((s (tuple str int int)) (x (tuple str int)))
      (tuple (proj 1 x) (+ (proj 2 s) (proj 2 x)) (+ (proj 3 s) (int 1))))
    (tuple (str "") (int 0) (int 0)))))";

}  // namespace

TEST_CASE("update inserts into the empty map") {
  Value v = run("(update (map-empty int int) (int 1) (int 2))");
  CHECK(canon_eq(v, map_v({{int_v(1), int_v(2)}})));
}

TEST_CASE("outer join produces paired values with null absence markers") {
  Value v = run(
      "(outer-join (update (map-empty int int) (int 1) (int 2))"
      " (update (update (map-empty int int) (int 1) (int 3)) (int 2) (int 5)))");
  Value expect = map_v({{int_v(1), tuple_v({int_v(2), int_v(3)})},
                        {int_v(2), tuple_v({null_v(), int_v(5)})}});
  CHECK(canon_eq(v, expect));
}

TEST_CASE("get on an absent key is an evaluation error") {
  try {
    run("(get (update (map-empty int int) (int 1) (int 2)) (int 3))");
    FAIL("expected error");
  } catch (const EvalError& ex) {
    CHECK(ex.error_kind == EvalErrorKind::AbsentKey);
  }
}

TEST_CASE("sum plus frequency matches a hand fold") {
  Program p = load(kSumFreq);
  DataFrame d{{{"c1", int_type()}}, {int_v(2), int_v(2), int_v(5)}};

  // Independent oracle: plain C++ fold.
  std::int64_t sum = 0;
  std::map<std::int64_t, std::int64_t> freq;
  for (const Value& r : d.rows) {
    sum += r.i;
    freq[r.i] += 1;
  }
  CHECK(sum == 9);
  REQUIRE(freq.size() == 2);
  CHECK(freq[2] == 2);
  CHECK(freq[5] == 1);

  Fuel fuel;
  Value got = run_program(p, d, fuel);
  std::vector<std::pair<Value, Value>> entries;
  for (auto [k, n] : freq) entries.emplace_back(int_v(k), int_v(n));
  CHECK(canon_eq(got, tuple_v({int_v(sum), map_v(entries)})));
}

TEST_CASE("empty dataframe yields the initializer") {
  Program p = load(kSumFreq);
  DataFrame d{{{"c1", int_type()}}, {}};
  Fuel fuel;
  CHECK(canon_eq(run_program(p, d, fuel),
                 tuple_v({int_v(0), map_v({})})));
}

TEST_CASE("keyed sum and count over a single row") {
  Program p = load(kAvgTemperature);
  DataFrame d{{{"key", str_type()}, {"value", int_type()}},
              {tuple_v({str_v("key"), int_v(5)})}};
  Fuel fuel;
  CHECK(canon_eq(run_program(p, d, fuel),
                 tuple_v({str_v("key"), int_v(5), int_v(1)})));
}

TEST_CASE("apply_fn basics") {
  FuncPtr maxacc = parse_fn_text("(lambda ((s int) (x int)) (max s x))");
  Func f = *maxacc;
  TypeEnv tenv;
  typecheck_fn(f, tenv);
  Fuel fuel;
  CHECK(canon_eq(apply_fn(f, {int_v(3), int_v(7)}, fuel), int_v(7)));
}

TEST_CASE("bid accumulator single step") {
  FuncPtr fp = parse_fn_text(R"((lambda ((s (tuple float int (map int int)))
                                         (x (tuple float int)))
    (tuple (max (proj 1 s) (proj 1 x))
           (ite (> (proj 1 x) (float 1000.0)) (+ (proj 2 s) (int 1)) (proj 2 s))
           (update (proj 3 s) (proj 2 x)
                   (+ (get-or-else (proj 3 s) (proj 2 x) (int 0)) (int 1))))))");
  Func f = *fp;
  TypeEnv tenv;
  typecheck_fn(f, tenv);

  // Hand evaluation: max(1000.0, 1192.08) = 1192.08; 1192.08 > 1000 bumps the
  // counter; item 2 enters the empty count map with count 1.
  Value buffer = tuple_v({float_v(1000.0), int_v(0), map_v({})});
  Value row = tuple_v({float_v(1192.08), int_v(2)});
  Fuel fuel;
  Value got = apply_fn(f, {buffer, row}, fuel);
  CHECK(canon_eq(got, tuple_v({float_v(1192.08), int_v(1),
                               map_v({{int_v(2), int_v(1)}})})));
}

TEST_CASE("map merge combinator behaves like the keyed sum merge") {
  FuncPtr h4 = parse_fn_text(R"((lambda ((m1 (map int int)) (m2 (map int int)))
    (fold (lambda ((acc (map int int)) (e (tuple int int)))
            (update acc (proj 1 e)
                    (+ (proj 2 e) (get-or-else m1 (proj 1 e) (int 0)))))
          m1 m2)))");
  Func f = *h4;
  TypeEnv tenv;
  typecheck_fn(f, tenv);
  Fuel fuel;
  Value m1 = map_v({{int_v(1), int_v(2)}});
  Value m2 = map_v({{int_v(1), int_v(3)}, {int_v(7), int_v(1)}});
  Value got = apply_fn(f, {m1, m2}, fuel);
  CHECK(canon_eq(got, map_v({{int_v(1), int_v(5)}, {int_v(7), int_v(1)}})));
}

TEST_CASE("distinct evaluation errors") {
  auto kind_of = [](const char* text) {
    try {
      run(text);
    } catch (const EvalError& ex) {
      return ex.error_kind;
    }
    return EvalErrorKind::Internal;
  };
  CHECK(kind_of("(/ (int 1) (int 0))") == EvalErrorKind::DivisionByZero);
  CHECK(kind_of("(+ (int 9223372036854775807) (int 1))") ==
        EvalErrorKind::IntOverflow);
  CHECK(kind_of("(zip (append (list-empty int) (int 1)) (list-empty int))") ==
        EvalErrorKind::ZipLengthMismatch);
}

TEST_CASE("fuel bounds pathological folds") {
  TypeEnv tenv;
  Expr e = typecheck_expr(
      parse_expr_text("(fold (lambda ((a int) (x int)) (+ a x)) (int 0)"
                      " (append (append (list-empty int) (int 1)) (int 2)))"),
      tenv);
  Fuel fuel;
  fuel.remaining = 3;
  Env env;
  try {
    eval(e, env, fuel);
    FAIL("expected fuel exhaustion");
  } catch (const EvalError& ex) {
    CHECK(ex.error_kind == EvalErrorKind::FuelExhausted);
  }
}

TEST_CASE("ite is lazy in the untaken branch") {
  CHECK(canon_eq(run("(ite (contains (map-empty int int) (int 1))"
                     " (get (map-empty int int) (int 1)) (int 7))"),
                 int_v(7)));
}

TEST_CASE("higher order ops follow the standard semantics") {
  CHECK(canon_eq(
      run("(map (lambda ((x int)) (* x (int 2)))"
          " (append (append (list-empty int) (int 1)) (int 5)))"),
      list_v({int_v(2), int_v(10)})));
  CHECK(canon_eq(
      run("(filter (lambda ((x int)) (> x (int 1)))"
          " (append (append (list-empty int) (int 1)) (int 5)))"),
      list_v({int_v(5)})));
  CHECK(canon_eq(
      run("(zip (append (list-empty int) (int 1))"
          " (append (list-empty str) (str \"a\")))"),
      list_v({tuple_v({int_v(1), str_v("a")})})));
  // Map over a map transforms values and keeps keys.
  CHECK(canon_eq(
      run("(map (lambda ((p (tuple int int))) (+ (proj 2 p) (int 1)))"
          " (update (map-empty int int) (int 4) (int 9)))"),
      map_v({{int_v(4), int_v(10)}})));
  // Conversions: list to map by index, set to map with null values.
  CHECK(canon_eq(
      run("(convert (map int str) (append (list-empty str) (str \"z\")))"),
      map_v({{int_v(0), str_v("z")}})));
  CHECK(canon_eq(run("(convert (map str str) (insert (set-empty str) (str \"q\")))"),
                 map_v({{str_v("q"), null_v()}})));
}

TEST_CASE("type preservation and determinism on random programs") {
  Program p = load(kSumFreq);
  GenConfig cfg;
  Rng rng(99);
  std::vector<std::pair<std::string, Type>> cols = {{"c1", int_type()}};
  for (int i = 0; i < 100; ++i) {
    DataFrame d = random_df(cols, cfg, rng);
    Fuel f1, f2;
    Value a = run_program(p, d, f1);
    Value b = run_program(p, d, f2);
    CHECK(canon_eq(a, b));
    REQUIRE(a.kind == ValueKind::Tuple);
    CHECK(a.elems[0].kind == ValueKind::Int);
    CHECK(a.elems[1].kind == ValueKind::Map);
  }
}

TEST_CASE("left-fold split: P(d1 ++ d2) folds d2 from P(d1)") {
  Program p = load(kSumFreq);
  GenConfig cfg;
  Rng rng(123);
  std::vector<std::pair<std::string, Type>> cols = {{"c1", int_type()}};
  for (int i = 0; i < 200; ++i) {
    DataFrame d1 = random_df(cols, cfg, rng);
    DataFrame d2 = random_df(cols, cfg, rng);
    Fuel f1, f2, f3;
    Value whole = run_program(p, concat_df(d1, d2), f1);
    Value left = run_program(p, d1, f2);
    Value split = fold_rows(*p.accumulator, left, d2.rows, f3);
    CHECK(canon_eq(whole, split));
  }
}

TEST_CASE("pipelines distribute over concatenation before the fold") {
  // Select and project apply rowwise, so the fold of the second frame can
  // resume from the first frame's result.
  const char* text = R"((program
    (input bids (df (tuple float int int)))
    (select (lambda ((row (tuple float int int))) (= (proj 2 row) (int 2024))))
    (project (lambda ((row (tuple float int int))) (tuple (proj 1 row) (proj 3 row))))
    (aggregate
      (lambda ((s (tuple float int)) (x (tuple float int)))
        (tuple (max (proj 1 s) (proj 1 x)) (+ (proj 2 s) (int 1))))
      (tuple (float 0.0) (int 0)))))";
  Program p = load(text);
  GenConfig cfg;
  harvest_constants(p, cfg);
  Rng rng(616);
  std::vector<std::pair<std::string, Type>> cols = {
      {"c1", float_type()}, {"c2", int_type()}, {"c3", int_type()}};
  for (int i = 0; i < 200; ++i) {
    DataFrame d1 = random_df(cols, cfg, rng);
    DataFrame d2 = random_df(cols, cfg, rng);
    Fuel f1, f2, f3;
    Value whole = run_program(p, concat_df(d1, d2), f1);
    Value left = run_program(p, d1, f2);
    // Apply the pipeline to d2's rows by hand, then resume the fold.
    std::vector<Value> piped;
    for (const auto& r : d2.rows) {
      if (!canon_eq(r.elems[1], int_v(2024))) continue;
      piped.push_back(tuple_v({r.elems[0], r.elems[2]}));
    }
    Value split = fold_rows(*p.accumulator, left, piped, f3);
    CHECK(canon_eq(whole, split));
  }
}
