// Acceptance suite: exercises every top-level requirement end to end and
// prints one PASS/FAIL line per criterion. Exits nonzero if any fails.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <vector>

#include "homcalc/driver.hpp"
#include "homcalc/parse.hpp"
#include "homcalc/typecheck.hpp"

using namespace homcalc;

namespace {

int failures = 0;

void report(int criterion, bool ok, const std::string& what) {
  std::printf("%s criterion-%d: %s\n", ok ? "PASS" : "FAIL", criterion,
              what.c_str());
  if (!ok) ++failures;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    std::fprintf(stderr, "cannot open %s\n", path.c_str());
    std::exit(2);
  }
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

Program load_bench(const std::string& name) {
  return typecheck_program(
      parse_program(slurp(std::string(HOMCALC_BENCH_DIR) + "/" + name)));
}

FuncPtr load_fixture(const std::string& name) {
  auto f = std::make_shared<Func>(*parse_fn_text(
      slurp(std::string(HOMCALC_BENCH_DIR) + "/fixtures/" + name)));
  TypeEnv env;
  typecheck_fn(*f, env);
  return f;
}

Value apply2(const FuncPtr& h, const Value& a, const Value& b) {
  Fuel fuel;
  return apply_fn(h, {a, b}, fuel);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

struct BenchResult {
  std::string name;
  Program program;
  Verdict verdict;
  double seconds = 0;
};

Value eval_init(const Program& p) {
  Fuel fuel;
  Env env;
  return eval(p.init, env, fuel);
}

Value reachable_state(const Program& p, const GenConfig& cfg, Rng& rng) {
  std::vector<Value> rows = random_rows(p.row_type, cfg, rng);
  Fuel fuel;
  return fold_rows(*p.accumulator, eval_init(p), rows, fuel);
}

}  // namespace

int main() {
  const std::vector<std::string> homomorphic = {
      "bid_aggregator.hc", "sum_freq.hc",      "avg_temperature.hc",
      "count.hc",          "flag_latest.hc",   "e1_max.hc",
      "e2_high_count.hc",  "e4_item_counts.hc"};
  const std::vector<std::string> refutable = {
      "clickstream.hc", "last_if_equal.hc", "norm_refute1.hc",
      "norm_refute2.hc"};

  // ----- criterion 1: synthesis corpus ----------------------------------
  std::vector<BenchResult> solved;
  {
    bool ok = true;
    std::string detail;
    for (const auto& name : homomorphic) {
      BenchResult r;
      r.name = name;
      r.program = load_bench(name);
      DriverOptions opt;
      auto t0 = std::chrono::steady_clock::now();
      r.verdict = is_homomorphism(r.program, opt);
      r.seconds = seconds_since(t0);
      if (r.verdict.status != VerdictStatus::Homomorphic) {
        ok = false;
        detail += " " + name + "=not-homomorphic";
      } else {
        GenConfig oc;
        harvest_constants(r.program, oc);
        oc.seed = 771;
        oc.trials = 1000;
        if (auto fail = oracle_check(r.program, *r.verdict.merge, oc)) {
          ok = false;
          detail += " " + name + "=oracle-fail";
        }
      }
      if (r.seconds > 30.0) {
        ok = false;
        detail += " " + name + "=slow";
      }
      solved.push_back(std::move(r));
    }
    report(1, ok,
           "8 homomorphic benchmarks synthesize and validate on 1000 frame "
           "pairs within 30s each" + detail);
  }

  // ----- criterion 2: ground-truth equivalence --------------------------
  {
    bool ok = true;
    std::string detail;
    const BenchResult& bid = solved[0];
    if (bid.verdict.merge) {
      FuncPtr written = load_fixture("bid_merge.hc");
      GenConfig cfg;
      Rng rng(88);
      for (int i = 0; i < 1000 && ok; ++i) {
        Value a = random_value(bid.program.state_type, cfg, rng);
        Value b = random_value(bid.program.state_type, cfg, rng);
        if (!canon_eq(apply2(bid.verdict.merge, a, b), apply2(written, a, b))) {
          ok = false;
          detail += " bid-merge-disagrees";
        }
      }
    } else {
      ok = false;
    }

    const BenchResult& avg = solved[2];
    if (avg.verdict.merge) {
      FuncPtr fixed = load_fixture("avg_temperature_merge_fixed.hc");
      FuncPtr buggy = load_fixture("avg_temperature_merge_buggy.hc");
      GenConfig cfg;
      harvest_constants(avg.program, cfg);
      Rng rng(89);
      for (int i = 0; i < 1000 && ok; ++i) {
        Value a = reachable_state(avg.program, cfg, rng);
        Value b = reachable_state(avg.program, cfg, rng);
        if (!canon_eq(apply2(avg.verdict.merge, a, b), apply2(fixed, a, b))) {
          ok = false;
          detail += " avg-fixed-disagrees";
        }
      }
      // Disagreement with the buggy merge, including the empty-fold state.
      Value folded = tuple_v({str_v("key"), int_v(5), int_v(1)});
      Value empty = eval_init(avg.program);
      bool separated =
          !canon_eq(apply2(avg.verdict.merge, folded, empty),
                    apply2(buggy, folded, empty));
      if (!separated) {
        ok = false;
        detail += " avg-buggy-not-separated";
      }
    } else {
      ok = false;
    }
    report(2, ok,
           "synthesized merges match the handwritten ones and expose the "
           "buggy variant at the empty-fold state" + detail);
  }

  // ----- criterion 3: refutation corpus ---------------------------------
  {
    bool ok = true;
    std::string detail;
    for (const auto& name : refutable) {
      Program p = load_bench(name);
      DriverOptions opt;
      auto t0 = std::chrono::steady_clock::now();
      Verdict v = is_homomorphism(p, opt);
      double secs = seconds_since(t0);
      if (v.status != VerdictStatus::Refuted) {
        ok = false;
        detail += " " + name + "=not-refuted";
        continue;
      }
      bool replays = false;
      if (v.counterexample->kind == CounterexampleKind::HomRefute)
        replays = replay_counterexample(*v.counterexample, p);
      else
        replays = replay_counterexample(*v.counterexample, p.accumulator,
                                        eval_init(p));
      if (!replays) {
        ok = false;
        detail += " " + name + "=counterexample-does-not-replay";
      }
      if (secs > 10.0) {
        ok = false;
        detail += " " + name + "=slow";
      }
    }
    report(3, ok,
           "4 non-homomorphic benchmarks refute within 10s and every "
           "counterexample replays" + detail);
  }

  // ----- criterion 4: normalizer laws ------------------------------------
  {
    bool ok = true;
    std::string detail;
    for (const auto& r : solved) {
      if (!r.verdict.merge) {
        ok = false;
        continue;
      }
      SynthProblem prob;
      prob.f = r.program.accumulator;
      prob.init = eval_init(r.program);
      prob.state_type = r.program.state_type;
      prob.row_type = r.program.row_type;
      GenConfig cfg;
      harvest_constants(r.program, cfg);
      cfg.trials = 1000;
      cfg.seed = 4242;
      if (verify_normalizer(prob, *r.verdict.merge, cfg)) {
        ok = false;
        detail += " " + r.name + "=laws-fail";
      }
      // Exhaustive scan on the [-3,3] box for integer-shaped benchmarks.
      if (prob.state_type == int_type() && prob.row_type == int_type()) {
        for (int s = -3; s <= 3 && ok; ++s) {
          Value hs = apply2(r.verdict.merge, int_v(s), prob.init);
          if (!canon_eq(hs, int_v(s))) {
            ok = false;
            detail += " " + r.name + "=identity-box";
          }
        }
        for (int b1 = -3; b1 <= 3 && ok; ++b1)
          for (int b2 = -3; b2 <= 3 && ok; ++b2)
            for (int rr = -3; rr <= 3 && ok; ++rr) {
              Fuel fuel;
              Value lhs = apply_fn(
                  prob.f,
                  {apply2(r.verdict.merge, int_v(b1), int_v(b2)), int_v(rr)},
                  fuel);
              Value rhs = apply2(r.verdict.merge, int_v(b1),
                                 apply_fn(prob.f, {int_v(b2), int_v(rr)}, fuel));
              if (!canon_eq(lhs, rhs)) {
                ok = false;
                detail += " " + r.name + "=commutativity-box";
              }
            }
      }
    }
    report(4, ok,
           "every synthesized merge satisfies the identity and "
           "commutativity laws on 1000 seeded triples and small integer "
           "boxes" + detail);
  }

  // ----- criterion 5: decomposition soundness ----------------------------
  {
    bool ok = true;
    std::string detail;
    std::vector<std::string> all = homomorphic;
    all.insert(all.end(), refutable.begin(), refutable.end());
    for (const auto& name : all) {
      Program p = load_bench(name);
      DecompExpr d = decompose(*p.accumulator);
      FuncPtr back = convert_back(d, *p.accumulator);
      auto backty = std::make_shared<Func>(*back);
      TypeEnv tenv;
      typecheck_fn(*backty, tenv);
      GenConfig cfg;
      harvest_constants(p, cfg);
      Rng rng(31337);
      int agreements = 0;
      for (int i = 0; i < 500; ++i) {
        Value s = random_value(p.state_type, cfg, rng);
        Value x = random_value(p.row_type, cfg, rng);
        Fuel f1, f2;
        std::optional<Value> va, vb;
        try {
          va = apply_fn(p.accumulator, {s, x}, f1);
        } catch (const EvalError&) {
        }
        try {
          vb = apply_fn(backty, {s, x}, f2);
        } catch (const EvalError&) {
        }
        if (va.has_value() != vb.has_value() ||
            (va && vb && !canon_eq(*va, *vb))) {
          ok = false;
          detail += " " + name + "=mismatch";
          break;
        }
        if (va) ++agreements;
      }
      if (agreements < 250) {
        ok = false;
        detail += " " + name + "=too-many-errors";
      }
    }
    report(5, ok,
           "decompose-then-convert-back is eval-equal to every corpus "
           "accumulator on 500 seeded pairs" + detail);
  }

  // ----- criterion 6: refuter/synth consistency --------------------------
  {
    bool ok = true;
    std::string detail;
    for (const auto& r : solved) {
      if (!r.verdict.merge) continue;
      Value init = eval_init(r.program);
      for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        GenConfig cfg;
        harvest_constants(r.program, cfg);
        cfg.seed = seed * 7919;
        if (auto cx = refute_norm(r.program.accumulator, init,
                                  r.program.state_type, r.program.row_type,
                                  cfg)) {
          ok = false;
          detail += " " + r.name + "@" + std::to_string(seed);
        }
      }
    }
    report(6, ok,
           "no synthesized accumulator is refuted across 10 seeds" + detail);
  }

  // ----- criterion 7: leaf-enumerator completeness ------------------------
  {
    struct Planted {
      const char* f;
      Value init;
      const char* expect;
    };
    const Planted cases[] = {
        {"(lambda ((s int) (x int)) (+ s x))", int_v(0),
         "(lambda ((a int) (b int)) (+ a b))"},
        {"(lambda ((s int) (x int)) (+ s (int 1)))", int_v(0),
         "(lambda ((a int) (b int)) (+ a b))"},
        {"(lambda ((s int) (x int)) (max s x))",
         int_v(std::numeric_limits<std::int64_t>::min()),
         "(lambda ((a int) (b int)) (max a b))"},
        {"(lambda ((s int) (x int)) (min s x))",
         int_v(std::numeric_limits<std::int64_t>::max()),
         "(lambda ((a int) (b int)) (min a b))"},
        {"(lambda ((s bool) (x int)) (or s (> x (int 0))))", bool_v(false),
         "(lambda ((a bool) (b bool)) (or a b))"},
        {"(lambda ((s bool) (x int)) (and s (> x (int 0))))", bool_v(true),
         "(lambda ((a bool) (b bool)) (and a b))"},
        {"(lambda ((s int) (x int)) (* s x))", int_v(1),
         "(lambda ((a int) (b int)) (* a b))"},
        {"(lambda ((s str) (x str)) (strcat s x))", str_v(""),
         "(lambda ((a str) (b str)) (strcat a b))"},
        {"(lambda ((s (list int)) (x int)) (append s x))", list_v({}),
         "(lambda ((a (list int)) (b (list int))) (concat a b))"},
        {"(lambda ((s int) (x int)) (ite (= x (int 0)) s x))", int_v(0),
         "(lambda ((a int) (b int)) (ite (= b (int 0)) a b))"},
    };
    bool ok = true;
    std::string detail;
    for (const auto& c : cases) {
      auto f = std::make_shared<Func>(*parse_fn_text(c.f));
      TypeEnv env;
      typecheck_fn(*f, env);
      SynthProblem prob;
      prob.f = f;
      prob.init = c.init;
      prob.state_type = f->params[0].second;
      prob.row_type = f->params[1].second;
      SynthOptions opt;
      SynthOutcome out = synth_leaf(prob, opt);
      if (out.status != SynthOutcome::Solved ||
          print_fn(*out.normalizer.h) != c.expect) {
        ok = false;
        detail += std::string(" miss:") + c.expect;
      } else if (expr_size(out.normalizer.h->body) > 7) {
        ok = false;
        detail += std::string(" oversized:") + c.expect;
      }
    }
    report(7, ok,
           "10 planted problems of size at most 7 are recovered "
           "smallest-first" + detail);
  }

  // ----- criterion 8: byte-identical reports ------------------------------
  {
    std::string bin = std::string(HOMCALC_BIN_DIR) + "/homcalc";
    std::string bench = std::string(HOMCALC_BENCH_DIR);
    bool ok = true;
    std::string detail;
    for (const char* name : {"bid_aggregator.hc", "clickstream.hc"}) {
      std::string base = bin + " check " + bench + "/" + name +
                         " --seed 5 --json > /tmp/homcalc_rep_";
      if (std::system((base + "1.json").c_str()) < 0 ||
          std::system((base + "2.json").c_str()) < 0) {
        ok = false;
        break;
      }
      if (slurp("/tmp/homcalc_rep_1.json") != slurp("/tmp/homcalc_rep_2.json")) {
        ok = false;
        detail += std::string(" ") + name + "=reports-differ";
      }
    }
    report(8, ok, "repeated runs produce byte-identical reports" + detail);
  }

  // ----- criterion 9: SyGuS export ----------------------------------------
  {
    bool ok = true;
    std::string detail;
    struct Fixture {
      const char* what;
      const char* f;
      Value init;
    };
    const Fixture fixtures[] = {
        {"scalar", "(lambda ((s int) (x int)) (+ s x))", int_v(0)},
        {"tuple", "(lambda ((s (tuple bool int)) (x int)) (tuple true x))",
         tuple_v({bool_v(false), int_v(0)})},
        {"map",
         "(lambda ((s (map int int)) (x int))"
         " (update s x (+ (get-or-else s x (int 0)) (int 1))))",
         map_v({})},
    };
    for (const auto& fx : fixtures) {
      auto f = std::make_shared<Func>(*parse_fn_text(fx.f));
      TypeEnv env;
      typecheck_fn(*f, env);
      SynthProblem prob;
      prob.f = f;
      prob.init = fx.init;
      prob.state_type = f->params[0].second;
      prob.row_type = f->params[1].second;
      prob.path = fx.what;
      std::string text = export_sygus(prob);
      auto errs = sygus_check(text);
      if (!errs.empty()) {
        ok = false;
        detail += std::string(" ") + fx.what + "=" + errs.front();
      }
    }
    report(9, ok,
           "scalar, tuple, and map leaf exports pass the bundled "
           "SyGuS-IF v2 checker" + detail);
  }

  if (failures) std::printf("%d criterion(s) FAILED\n", failures);
  else std::printf("all acceptance criteria PASSED\n");
  return failures == 0 ? 0 : 1;
}
