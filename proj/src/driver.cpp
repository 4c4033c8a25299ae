#include "homcalc/driver.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "homcalc/parse.hpp"
#include "homcalc/typecheck.hpp"
#include "json.hpp"

namespace homcalc {

const char* verdict_status_name(VerdictStatus s) {
  switch (s) {
    case VerdictStatus::Homomorphic: return "HOMOMORPHIC";
    case VerdictStatus::Refuted: return "REFUTED";
    case VerdictStatus::Unknown: return "UNKNOWN";
  }
  return "?";
}

std::string OracleFailure::describe() const {
  return "merge disagrees with the program\n  d1 = " + df_to_string(d1) +
         "\n  d2 = " + df_to_string(d2) +
         "\n  P(d1 ++ d2)        = " + value_to_string(expect) +
         "\n  merge(P(d1),P(d2)) = " + value_to_string(got);
}

namespace {

constexpr long long kOracleFuel = 4'000'000;

std::vector<std::pair<std::string, Type>> input_columns(const Program& p) {
  std::vector<std::pair<std::string, Type>> columns;
  const Type& row = p.input_type.args[0];
  if (row.kind == TypeKind::Tuple) {
    for (size_t i = 0; i < row.args.size(); ++i)
      columns.emplace_back("c" + std::to_string(i + 1), row.args[i]);
  } else {
    columns.emplace_back("c1", row);
  }
  return columns;
}

struct PhaseClock {
  long long last = eval_steps_total();
  long long take() {
    long long now = eval_steps_total();
    long long delta = now - last;
    last = now;
    return delta / 10'000;
  }
};

}  // namespace

std::optional<OracleFailure> oracle_check(const Program& p, const Func& merge,
                                          const GenConfig& cfg) {
  auto mp = std::make_shared<Func>(merge);
  Rng rng = Rng(cfg.seed).split(0x4F5243);
  auto columns = input_columns(p);

  auto run = [&](const DataFrame& d) -> std::optional<Value> {
    Fuel fuel;
    fuel.remaining = kOracleFuel;
    try {
      return run_program(p, d, fuel);
    } catch (const EvalError&) {
      return std::nullopt;
    }
  };

  for (int t = 0; t < cfg.trials; ++t) {
    DataFrame d1 = random_df(columns, cfg, rng);
    DataFrame d2 = random_df(columns, cfg, rng);
    if (t == 0) d2.rows.clear();
    if (t == 1) d1.rows.clear();
    auto p1 = run(d1);
    auto p2 = run(d2);
    auto whole = run(concat_df(d1, d2));
    if (!p1 || !p2 || !whole) continue;
    Fuel fuel;
    fuel.remaining = kOracleFuel;
    std::optional<Value> merged;
    try {
      merged = apply_fn(*mp, {*p1, *p2}, fuel);
    } catch (const EvalError&) {
      merged = std::nullopt;
    }
    if (!merged || !canon_eq(*merged, *whole)) {
      OracleFailure fail;
      fail.d1 = std::move(d1);
      fail.d2 = std::move(d2);
      fail.expect = *whole;
      fail.got = merged ? *merged : str_v("<error>");
      return fail;
    }
  }
  return std::nullopt;
}

Verdict is_homomorphism(const Program& p, const DriverOptions& opt) {
  Verdict v;
  v.seed = opt.cfg.seed;
  PhaseClock clock;

  GenConfig cfg = opt.cfg;
  harvest_constants(p, cfg);

  // Evaluate the initializer once; it is a closed expression.
  Value init;
  {
    Fuel fuel;
    Env env;
    try {
      init = eval(p.init, env, fuel);
    } catch (const EvalError& ex) {
      v.status = VerdictStatus::Unknown;
      v.reason = std::string("initializer failed to evaluate: ") + ex.what();
      return v;
    }
  }

  // Phase 1: homomorphism refutation on the whole program.
  if (auto cx = refute_hom(p, cfg)) {
    v.trace.push_back("Refutation");
    v.status = VerdictStatus::Refuted;
    v.counterexample = std::move(cx);
    v.refute_ms = clock.take();
    return v;
  }

  // Phase 2: normalizer refutation on the accumulator.
  if (auto cx = refute_norm(p.accumulator, init, p.state_type, p.row_type,
                            cfg)) {
    v.trace.push_back(counterexample_kind_name(cx->kind));
    v.status = VerdictStatus::Refuted;
    v.counterexample = std::move(cx);
    v.refute_ms = clock.take();
    return v;
  }
  v.refute_ms = clock.take();

  if (opt.dump_decomp) {
    std::vector<std::string> dtrace;
    DecompExpr d = decompose(*p.accumulator, &dtrace);
    std::cerr << dump_decomp(d) << "\n";
  }
  {
    // Synthesis re-runs decomposition with the verdict's trace attached;
    // this pass only accounts the phase's work.
    decompose(*p.accumulator);
  }
  v.decomp_ms = clock.take();

  // Phase 3: normalizer synthesis (refutation already ran at this level).
  SynthProblem problem;
  problem.f = p.accumulator;
  problem.init = init;
  problem.state_type = p.state_type;
  problem.row_type = p.row_type;

  SynthOptions sopt;
  sopt.cfg = cfg;
  sopt.budget = opt.budget;
  sopt.require_commutative = opt.require_commutative;
  sopt.refute_first = false;
  sopt.trace = &v.trace;
  if (!opt.emit_sygus_dir.empty()) {
    std::string dir = opt.emit_sygus_dir;
    bool commutative = opt.require_commutative;
    sopt.on_leaf = [dir, commutative](const SynthProblem& leaf) {
      std::filesystem::create_directories(dir);
      std::ofstream out(dir + "/" + leaf.path + ".sl");
      out << export_sygus(leaf, commutative);
    };
  }

  SynthOutcome outcome = synth_normalizer(problem, sopt);
  v.synth_ms = clock.take();

  if (outcome.status == SynthOutcome::Refuted) {
    v.status = VerdictStatus::Refuted;
    v.counterexample = outcome.counterexample;
    return v;
  }
  if (outcome.status == SynthOutcome::Unknown) {
    v.status = VerdictStatus::Unknown;
    v.reason = outcome.reason;
    return v;
  }

  // Lift the accumulator's normalizer through the relational pipeline.
  v.trace.push_back("Var");
  for (const auto& step : p.pipeline)
    v.trace.push_back(step.kind == StepKind::Select ? "Rel(select)"
                                                    : "Rel(project)");
  v.trace.push_back("Agg");
  v.trace.push_back("Top");

  // Phase 4: independent randomized validation at the program level.
  if (auto fail = oracle_check(p, *outcome.normalizer.h, cfg)) {
    v.status = VerdictStatus::Unknown;
    v.reason = "synthesized merge failed program-level validation: " +
               fail->describe();
    v.oracle_ms = clock.take();
    return v;
  }
  v.oracle_ms = clock.take();

  v.status = VerdictStatus::Homomorphic;
  v.merge = outcome.normalizer.h;
  return v;
}

// ---------------------------------------------------------------------------
// JSON report and CLI
// ---------------------------------------------------------------------------

namespace {

nlohmann::ordered_json counterexample_json(const Counterexample& cx) {
  nlohmann::ordered_json j;
  switch (cx.kind) {
    case CounterexampleKind::HomRefute: j["kind"] = "hom-refute"; break;
    case CounterexampleKind::NormRefute1: j["kind"] = "norm-refute-1"; break;
    case CounterexampleKind::NormRefute2: j["kind"] = "norm-refute-2"; break;
  }
  nlohmann::ordered_json w = nlohmann::ordered_json::array();
  if (cx.kind == CounterexampleKind::HomRefute) {
    w.push_back(df_to_string(cx.d1));
    w.push_back(df_to_string(cx.d1b));
    w.push_back(df_to_string(cx.d2));
    w.push_back(df_to_string(cx.d2b));
  } else {
    w.push_back(value_to_string(cx.state));
    w.push_back(value_to_string(cx.row));
    if (cx.kind == CounterexampleKind::NormRefute2)
      w.push_back(value_to_string(cx.row2));
  }
  j["witnesses"] = w;
  j["lhs"] = value_to_string(cx.lhs);
  j["rhs"] = value_to_string(cx.rhs);
  return j;
}

}  // namespace

std::string verdict_to_json(const Verdict& v) {
  nlohmann::ordered_json j;
  j["status"] = verdict_status_name(v.status);
  if (v.status == VerdictStatus::Homomorphic) j["merge_text"] = print_fn(*v.merge);
  if (v.status == VerdictStatus::Refuted && v.counterexample)
    j["counterexample"] = counterexample_json(*v.counterexample);
  if (v.status == VerdictStatus::Unknown) j["reason"] = v.reason;
  j["trace"] = v.trace;
  j["timings"] = {{"parse_ms", v.parse_ms},
                  {"refute_ms", v.refute_ms},
                  {"decomp_ms", v.decomp_ms},
                  {"synth_ms", v.synth_ms},
                  {"oracle_ms", v.oracle_ms}};
  j["seed"] = v.seed;
  return j.dump(2) + "\n";
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"homcalc: decides whether a dataframe aggregation has a merge "
               "operator, synthesizing it or refuting its existence"};
  app.require_subcommand(1);

  auto* check = app.add_subcommand("check", "analyze one program file");
  std::string file;
  check->add_option("file", file, "program file")->required();
  std::uint64_t seed = 0;
  bool seed_set = false;
  check->add_option("--seed", seed, "generator seed")
      ->each([&](const std::string&) { seed_set = true; });
  int trials = 1000;
  check->add_option("--trials", trials, "trials per randomized phase");
  int max_rows = 6;
  check->add_option("--max-rows", max_rows, "max rows per generated frame");
  int budget_leaf = 20;
  check->add_option("--budget-leaf", budget_leaf,
                    "leaf synthesis budget (work seconds)");
  std::string emit_sygus;
  check->add_option("--emit-sygus", emit_sygus,
                    "directory for leaf problems in SyGuS-IF v2");
  bool dump_decomp = false;
  check->add_flag("--dump-decomp", dump_decomp, "print decomposed trees");
  bool require_commutative = false;
  check->add_flag("--require-commutative", require_commutative,
                  "additionally require merge(a,b) = merge(b,a)");
  bool json = false;
  check->add_flag("--json", json, "machine-readable report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 64;
  }

  if (trials < 1 || max_rows < 0 || budget_leaf < 1) {
    std::cerr << "error: --trials, --max-rows, and --budget-leaf must be "
                 "positive\n";
    return 64;
  }

  std::ifstream in(file);
  if (!in) {
    std::cerr << "error: cannot open " << file << "\n";
    return 66;
  }
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());

  DriverOptions opt;
  if (seed_set) {
    opt.cfg.seed = seed;
  } else if (const char* env = std::getenv("HOMCALC_SEED")) {
    opt.cfg.seed = std::strtoull(env, nullptr, 10);
  }
  opt.cfg.trials = trials;
  opt.cfg.max_rows = max_rows;
  opt.budget.leaf_nodes = static_cast<long long>(budget_leaf) * 150'000;
  opt.require_commutative = require_commutative;
  opt.dump_decomp = dump_decomp;
  opt.emit_sygus_dir = emit_sygus;

  Program program;
  long long steps_before = eval_steps_total();
  try {
    program = typecheck_program(parse_program(text));
  } catch (const ParseError& ex) {
    std::cerr << "parse error: " << ex.what() << "\n";
    return 65;
  } catch (const TypeError& ex) {
    std::cerr << "type error: " << ex.what() << "\n";
    return 65;
  }

  Verdict v = is_homomorphism(program, opt);
  v.parse_ms = (eval_steps_total() - steps_before) / 10'000 - v.refute_ms -
               v.decomp_ms - v.synth_ms - v.oracle_ms;
  if (v.parse_ms < 0) v.parse_ms = 0;

  if (json) {
    std::cout << verdict_to_json(v);
  } else {
    std::cout << verdict_status_name(v.status) << "\n";
    if (v.status == VerdictStatus::Homomorphic)
      std::cout << "merge: " << print_fn(*v.merge) << "\n";
    if (v.status == VerdictStatus::Refuted && v.counterexample)
      std::cout << v.counterexample->describe() << "\n";
    if (v.status == VerdictStatus::Unknown)
      std::cout << "reason: " << v.reason << "\n";
    std::cout << "trace:";
    for (const auto& r : v.trace) std::cout << " " << r;
    std::cout << "\n";
  }

  switch (v.status) {
    case VerdictStatus::Homomorphic: return 0;
    case VerdictStatus::Refuted: return 1;
    case VerdictStatus::Unknown: return 2;
  }
  return 2;
}

}  // namespace homcalc
