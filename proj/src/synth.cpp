#include "homcalc/synth.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <unordered_set>

#include "homcalc/parse.hpp"
#include "homcalc/typecheck.hpp"

namespace homcalc {

namespace {

constexpr long long kEvalFuel = 200'000;

std::optional<Value> try_apply2(const FuncPtr& f, const Value& a,
                                const Value& b) {
  Fuel fuel;
  fuel.remaining = kEvalFuel;
  try {
    return apply_fn(f, {a, b}, fuel);
  } catch (const EvalError&) {
    return std::nullopt;
  }
}

void note(const SynthOptions& opt, const std::string& rule) {
  if (opt.trace) opt.trace->push_back(rule);
}

Rng path_rng(const SynthOptions& opt, const std::string& path,
             std::uint64_t phase) {
  std::uint64_t h = 1469598103934665603ULL;
  for (char c : path) h = (h ^ static_cast<unsigned char>(c)) * 1099511628211ULL;
  return Rng(opt.cfg.seed).split(h ^ phase);
}

}  // namespace

std::string VerifyFailure::describe() const {
  std::string out = "law '" + law + "' violated";
  out += "\n  s/b1 = " + value_to_string(law == "identity" ? s : b1);
  if (law != "identity") {
    out += "\n  b2 = " + value_to_string(b2);
    out += "\n  row = " + value_to_string(row);
  }
  out += "\n  lhs = " + value_to_string(lhs) + "\n  rhs = " + value_to_string(rhs);
  return out;
}

Expr value_to_expr(const Value& v, const Type& t) {
  switch (v.kind) {
    case ValueKind::Int:
    case ValueKind::Bool:
    case ValueKind::Float:
    case ValueKind::Str:
      return const_e(v);
    case ValueKind::Tuple: {
      std::vector<Expr> elems;
      for (size_t i = 0; i < v.elems.size(); ++i)
        elems.push_back(value_to_expr(v.elems[i], t.args[i]));
      return tuple_e(std::move(elems));
    }
    case ValueKind::List: {
      Expr out = default_e(t);
      for (const auto& e : v.elems)
        out = append_e(out, value_to_expr(e, t.args[0]));
      return out;
    }
    case ValueKind::Set: {
      Expr out = default_e(t);
      for (const auto& e : v.elems)
        out = insert_e(out, value_to_expr(e, t.args[0]));
      return out;
    }
    case ValueKind::Map: {
      Expr out = default_e(t);
      for (const auto& [k, val] : v.entries)
        out = update_e(out, value_to_expr(k, t.args[0]),
                       value_to_expr(val, t.args[1]));
      return out;
    }
    case ValueKind::Null:
      break;
  }
  throw UnsupportedTypeError("cannot render value as expression");
}

// ---------------------------------------------------------------------------
// Verification
// ---------------------------------------------------------------------------

namespace {

std::vector<Value> sample_reachable(const SynthProblem& p, const GenConfig& cfg,
                                    Rng& rng, int count) {
  std::vector<Value> out;
  out.push_back(p.init);
  for (int i = 0; i < count; ++i) {
    std::vector<Value> rows = random_rows(p.row_type, cfg, rng);
    Fuel fuel;
    fuel.remaining = kEvalFuel;
    try {
      out.push_back(fold_rows(*p.f, p.init, rows, fuel));
    } catch (const EvalError&) {
    }
  }
  return out;
}

// All-integer shape check for the exhaustive small-domain scan.
bool int_shaped(const Type& t, int max_slots) {
  if (t.kind == TypeKind::Int) return max_slots >= 1;
  if (t.kind == TypeKind::Tuple && static_cast<int>(t.args.size()) <= max_slots) {
    for (const auto& a : t.args)
      if (a.kind != TypeKind::Int) return false;
    return true;
  }
  return false;
}

void enumerate_box(const Type& t, std::vector<Value>& out) {
  if (t.kind == TypeKind::Int) {
    for (int i = -3; i <= 3; ++i) out.push_back(int_v(i));
    return;
  }
  std::vector<std::vector<Value>> parts(t.args.size());
  for (size_t i = 0; i < t.args.size(); ++i) enumerate_box(t.args[i], parts[i]);
  std::vector<Value> acc = {tuple_v({})};
  for (const auto& part : parts) {
    std::vector<Value> next;
    for (const auto& base : acc)
      for (const auto& v : part) {
        Value e = base;
        e.elems.push_back(v);
        next.push_back(std::move(e));
      }
    acc = std::move(next);
  }
  out = std::move(acc);
}

}  // namespace

std::optional<VerifyFailure> verify_normalizer(const SynthProblem& p,
                                               const Func& h,
                                               const GenConfig& cfg,
                                               bool require_commutative) {
  auto hp = std::make_shared<Func>(h);
  Rng rng = Rng(cfg.seed).split(0x564659);
  GenConfig vc = cfg;
  harvest_constants(*p.f, vc);

  auto check_identity = [&](const Value& s) -> std::optional<VerifyFailure> {
    auto got = try_apply2(hp, s, p.init);
    if (got && canon_eq(*got, s)) return std::nullopt;
    VerifyFailure fail;
    fail.law = "identity";
    fail.s = s;
    fail.lhs = got ? *got : str_v("<error>");
    fail.rhs = s;
    return fail;
  };

  auto check_comm = [&](const Value& b1, const Value& b2,
                        const Value& r) -> std::optional<VerifyFailure> {
    auto merged = try_apply2(hp, b1, b2);
    auto fb2 = try_apply2(p.f, b2, r);
    if (!merged || !fb2) return std::nullopt;  // outside either domain
    auto lhs = try_apply2(p.f, *merged, r);
    auto rhs = try_apply2(hp, b1, *fb2);
    // A triple where either route leaves the value domain (overflow and the
    // like) says nothing about the law; the aggregation is equally undefined
    // on the frames that would reach it.
    if (!lhs || !rhs) return std::nullopt;
    if (canon_eq(*lhs, *rhs)) return std::nullopt;
    VerifyFailure fail;
    fail.law = "commutativity";
    fail.b1 = b1;
    fail.b2 = b2;
    fail.row = r;
    fail.lhs = lhs ? *lhs : str_v("<error>");
    fail.rhs = rhs ? *rhs : str_v("<error>");
    return fail;
  };

  // Identity on arbitrary states (plus the initializer itself).
  int id_checks = std::max(64, cfg.trials / 4);
  if (auto fail = check_identity(p.init)) return fail;
  for (int i = 0; i < id_checks; ++i) {
    Value s = random_value(p.state_type, vc, rng);
    if (auto fail = check_identity(s)) return fail;
  }

  // Commutativity on reachable state pairs.
  std::vector<Value> reach = sample_reachable(p, vc, rng, cfg.trials / 3 + 16);
  for (int i = 0; i < cfg.trials; ++i) {
    const Value& b1 = reach[rng.below(reach.size())];
    const Value& b2 = reach[rng.below(reach.size())];
    Value r = random_value(p.row_type, vc, rng);
    if (auto fail = check_comm(b1, b2, r)) return fail;
    if (require_commutative) {
      auto ab = try_apply2(hp, b1, b2);
      auto ba = try_apply2(hp, b2, b1);
      if (ab && ba && !canon_eq(*ab, *ba)) {
        VerifyFailure fail;
        fail.law = "commutativity";
        fail.b1 = b1;
        fail.b2 = b2;
        fail.lhs = *ab;
        fail.rhs = *ba;
        return fail;
      }
    }
  }

  // Exhaustive scan of small integer boxes where the shapes allow it.
  if (int_shaped(p.state_type, 1) && int_shaped(p.row_type, 2)) {
    std::vector<Value> states, rows;
    enumerate_box(p.state_type, states);
    enumerate_box(p.row_type, rows);
    for (const auto& s : states)
      if (auto fail = check_identity(s)) return fail;
    for (const auto& b1 : states)
      for (const auto& b2 : states)
        for (const auto& r : rows)
          if (auto fail = check_comm(b1, b2, r)) return fail;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Leaf enumeration
// ---------------------------------------------------------------------------

namespace {

struct Bank {
  // Merge inputs; the first `pinned` entries carry required outputs obtained
  // by folding f over concatenated row samples.
  std::vector<std::pair<Value, Value>> inputs;
  std::vector<Value> outputs;  // size == pinned
  size_t pinned = 0;
};

Bank make_bank(const SynthProblem& p, const GenConfig& cfg, Rng& rng) {
  Bank bank;
  auto fold_from = [&](Value start,
                       const std::vector<Value>& rows) -> std::optional<Value> {
    Fuel fuel;
    fuel.remaining = kEvalFuel;
    try {
      return fold_rows(*p.f, std::move(start), rows, fuel);
    } catch (const EvalError&) {
      return std::nullopt;
    }
  };

  // Pinned merge examples: h(fold(R1), fold(R2)) must equal fold(R1 ++ R2).
  std::unordered_set<std::string> seen;
  int want = 28;
  for (int i = 0; i < 140 && static_cast<int>(bank.outputs.size()) < want; ++i) {
    std::vector<Value> r1 = random_rows(p.row_type, cfg, rng);
    std::vector<Value> r2 = random_rows(p.row_type, cfg, rng);
    // Several pins fold against the initializer itself; merging with an
    // empty fold is where lazy candidates that echo one side go wrong.
    if (i < 6 && i % 2 == 0) r2.clear();
    if (i < 6 && i % 2 == 1) r1.clear();
    auto a = fold_from(p.init, r1);
    if (!a) continue;
    auto b = fold_from(p.init, r2);
    auto out = fold_from(*a, r2);
    if (!b || !out) continue;
    std::string key = value_to_string(*a) + "|" + value_to_string(*b);
    if (!seen.insert(key).second) continue;
    bank.inputs.emplace_back(*a, *b);
    bank.outputs.push_back(*out);
  }
  bank.pinned = bank.inputs.size();

  // Unpinned pairs for signature discrimination only: arbitrary pairs plus
  // identity-anchored ones, which mirror the verifier's probes.
  for (int i = 0; i < 16; ++i)
    bank.inputs.emplace_back(random_value(p.state_type, cfg, rng),
                             random_value(p.state_type, cfg, rng));
  for (int i = 0; i < 8; ++i) {
    bank.inputs.emplace_back(random_value(p.state_type, cfg, rng), p.init);
    bank.inputs.emplace_back(p.init, random_value(p.state_type, cfg, rng));
  }
  return bank;
}

struct Term {
  Expr expr;
  int size = 1;
};

std::string type_key(const Type& t) { return type_to_string(t); }

// A pinned-output specification for one searched component.
struct ComponentSpec {
  Type type;
  int index = 0;  // 1-based state slot; 0 = the whole state
  std::vector<Value> targets;  // required outputs over the pinned bank inputs
};

Value slot(const Value& v, int index) {
  return index == 0 ? v : v.elems[index - 1];
}

struct TypePresence {
  bool has_int = false, has_float = false, has_str = false, has_bool = false;
  std::vector<Type> tuples, lists, sets, maps;

  void observe(const Type& t) {
    switch (t.kind) {
      case TypeKind::Int: has_int = true; break;
      case TypeKind::Float: has_float = true; break;
      case TypeKind::Str: has_str = true; break;
      case TypeKind::Bool: has_bool = true; break;
      case TypeKind::Tuple:
        if (std::none_of(tuples.begin(), tuples.end(),
                         [&](const Type& x) { return x == t; }))
          tuples.push_back(t);
        for (const auto& a : t.args) observe(a);
        break;
      case TypeKind::List:
        if (std::none_of(lists.begin(), lists.end(),
                         [&](const Type& x) { return x == t; }))
          lists.push_back(t);
        observe(t.args[0]);
        break;
      case TypeKind::Set:
        if (std::none_of(sets.begin(), sets.end(),
                         [&](const Type& x) { return x == t; }))
          sets.push_back(t);
        observe(t.args[0]);
        break;
      case TypeKind::Map:
        if (std::none_of(maps.begin(), maps.end(),
                         [&](const Type& x) { return x == t; }))
          maps.push_back(t);
        observe(t.args[0]);
        observe(t.args[1]);
        break;
      default:
        break;
    }
  }
};

}  // namespace

SynthOutcome synth_leaf(const SynthProblem& p, const SynthOptions& opt,
                        const std::vector<ExtraTerminal>& extras) {
  note(opt, "Norm-Synth");
  if (opt.on_leaf) opt.on_leaf(p);

  Rng rng = path_rng(opt, p.path, 0x4C454146);
  GenConfig bank_cfg = opt.cfg;
  harvest_constants(*p.f, bank_cfg);
  Bank bank = make_bank(p, bank_cfg, rng);
  if (bank.pinned == 0) {
    SynthOutcome out;
    out.status = SynthOutcome::Unknown;
    out.reason = "no usable examples for leaf synthesis at " + p.path;
    return out;
  }

  // Component specs: tuple states search per slot, everything else whole.
  std::vector<ComponentSpec> specs;
  if (p.state_type.kind == TypeKind::Tuple) {
    for (size_t i = 0; i < p.state_type.args.size(); ++i) {
      ComponentSpec spec;
      spec.type = p.state_type.args[i];
      spec.index = static_cast<int>(i) + 1;
      specs.push_back(std::move(spec));
    }
  } else {
    ComponentSpec spec;
    spec.type = p.state_type;
    spec.index = 0;
    specs.push_back(std::move(spec));
  }
  for (auto& spec : specs)
    for (size_t i = 0; i < bank.pinned; ++i)
      spec.targets.push_back(slot(bank.outputs[i], spec.index));

  // Counterexample-guided restarts: when every assembly fails verification,
  // the failure witnesses join the bank (identity failures as pinned
  // examples, commutativity failures as discriminators) and enumeration
  // reruns with the sharper signatures.
  std::vector<Value> learned_identity;
  std::vector<std::pair<Value, Value>> learned_pairs;
  long long total_constructed = 0;
  int verify_calls = 0;
  const int verify_budget = 260;
  for (int attempt = 0; attempt < 3; ++attempt) {
    for (const auto& s : learned_identity) {
      bank.inputs.insert(bank.inputs.begin() + bank.pinned, {s, p.init});
      bank.outputs.push_back(s);
      ++bank.pinned;
    }
    learned_identity.clear();
    for (auto& pr : learned_pairs) bank.inputs.push_back(pr);
    learned_pairs.clear();
    for (auto& spec : specs) {
      spec.targets.clear();
      for (size_t i = 0; i < bank.pinned; ++i)
        spec.targets.push_back(slot(bank.outputs[i], spec.index));
    }

    // --- enumeration state -----------------------------------------------
    std::map<std::string, std::vector<Term>> pools;
    std::map<std::string, std::unordered_set<std::uint64_t>> seen;
    std::vector<std::vector<Term>> hits(specs.size());
    std::unordered_set<std::string> tried;  // assemblies already verified
    long long constructed = 0;

    auto signature_hash = [&](const Expr& e,
                              std::vector<std::optional<Value>>* pins_out)
        -> std::uint64_t {
      std::uint64_t h = 1469598103934665603ULL;
      for (size_t i = 0; i < bank.inputs.size(); ++i) {
        Fuel fuel;
        fuel.remaining = 20'000;
        Env env;
        env = env.bind("a", bank.inputs[i].first);
        env = env.bind("b", bank.inputs[i].second);
        std::optional<Value> v;
        try {
          v = eval(e, env, fuel);
        } catch (const EvalError&) {
        }
        std::string chunk = v ? value_to_string(*v) : "!";
        for (char c : chunk) h = (h ^ static_cast<unsigned char>(c)) * 1099511628211ULL;
        h = (h ^ 0x3B) * 1099511628211ULL;
        if (pins_out && i < bank.pinned) pins_out->push_back(std::move(v));
      }
      return h;
    };

    auto add = [&](Expr e, int size, const Type& t) {
      ++constructed;
      std::vector<std::optional<Value>> pins;
      std::uint64_t h = signature_hash(e, &pins);
      if (!seen[type_key(t)].insert(h).second) return;
      Term term{std::move(e), size};
      for (size_t c = 0; c < specs.size(); ++c) {
        if (!(specs[c].type == t)) continue;
        bool ok = true;
        for (size_t i = 0; i < bank.pinned && ok; ++i)
          ok = pins[i].has_value() && canon_eq(*pins[i], specs[c].targets[i]);
        if (ok) hits[c].push_back(term);
      }
      pools[type_key(t)].push_back(std::move(term));
    };

    auto pool_at = [&](const Type& t, int size) {
      std::vector<Term> out;
      auto it = pools.find(type_key(t));
      if (it == pools.end()) return out;
      for (const auto& term : it->second)
        if (term.size == size) out.push_back(term);
      return out;
    };

    // --- terminals ----------------------------------------------------------
    TypePresence types;
    types.observe(p.state_type);
    types.observe(p.row_type);

    add(var_e("a"), 1, p.state_type);
    add(var_e("b"), 1, p.state_type);
    for (const auto& x : extras) add(x.expr, 1, x.type);

    if (types.has_int) {
      std::vector<std::int64_t> ints = {0, 1};
      for (auto v : bank_cfg.int_pool) ints.push_back(v);
      ints.push_back(std::numeric_limits<std::int64_t>::min());
      ints.push_back(std::numeric_limits<std::int64_t>::max());
      std::sort(ints.begin(), ints.end());
      ints.erase(std::unique(ints.begin(), ints.end()), ints.end());
      for (auto v : ints) add(const_e(int_v(v)), 1, int_type());
    }
    if (types.has_float) {
      std::vector<double> floats = {0.0, 1.0};
      for (auto v : bank_cfg.float_pool) floats.push_back(v);
      floats.push_back(std::numeric_limits<double>::lowest());
      floats.push_back(std::numeric_limits<double>::max());
      std::sort(floats.begin(), floats.end());
      floats.erase(std::unique(floats.begin(), floats.end()), floats.end());
      for (auto v : floats) add(const_e(float_v(v)), 1, float_type());
    }
    add(const_e(bool_v(false)), 1, bool_type());
    add(const_e(bool_v(true)), 1, bool_type());
    if (types.has_str) {
      std::vector<std::string> strs = {""};
      for (const auto& s : bank_cfg.str_pool) strs.push_back(s);
      std::sort(strs.begin(), strs.end());
      strs.erase(std::unique(strs.begin(), strs.end()), strs.end());
      for (const auto& s : strs) add(const_e(str_v(s)), 1, str_type());
    }

    // --- assembly -----------------------------------------------------------
    auto assemble_and_verify = [&]() -> std::optional<Normalizer> {
      for (const auto& h : hits)
        if (h.empty()) return std::nullopt;
      struct Choice {
        std::vector<size_t> idx;
        int total;
      };
      std::vector<Choice> choices;
      size_t cap = specs.size() == 1 ? 40 : 16;
      std::vector<size_t> limits;
      for (auto& h : hits) limits.push_back(std::min(h.size(), cap));
      std::vector<size_t> idx(specs.size(), 0);
      while (true) {
        int total = 0;
        for (size_t c = 0; c < specs.size(); ++c) total += hits[c][idx[c]].size;
        choices.push_back({idx, total});
        size_t c = 0;
        while (c < specs.size() && ++idx[c] >= limits[c]) idx[c++] = 0;
        if (c == specs.size()) break;
        if (choices.size() > 800) break;
      }
      std::stable_sort(choices.begin(), choices.end(),
                       [](const Choice& x, const Choice& y) {
                         return x.total < y.total;
                       });
      for (const auto& choice : choices) {
        Expr body;
        if (specs.size() == 1) {
          body = hits[0][choice.idx[0]].expr;
        } else {
          std::vector<Expr> comps;
          for (size_t c = 0; c < specs.size(); ++c)
            comps.push_back(hits[c][choice.idx[c]].expr);
          body = tuple_e(std::move(comps));
        }
        FuncPtr h = make_fn({{"a", p.state_type}, {"b", p.state_type}},
                            std::move(body));
        if (!tried.insert(print_expr(h->body)).second) continue;
        if (++verify_calls > verify_budget) return std::nullopt;
        auto fail = verify_normalizer(p, *h, opt.cfg, opt.require_commutative);
        if (!fail) {
          Normalizer n;
          n.h = h;
          n.rules = {"Norm-Synth"};
          return n;
        }
        if (fail->law == "identity") {
          bool dup = std::any_of(
              learned_identity.begin(), learned_identity.end(),
              [&](const Value& v) { return canon_eq(v, fail->s); });
          if (!dup) learned_identity.push_back(fail->s);
        } else {
          learned_pairs.emplace_back(fail->b1, fail->b2);
        }
      }
      return std::nullopt;
    };

    if (auto n = assemble_and_verify()) {
      SynthOutcome out;
      out.status = SynthOutcome::Solved;
      out.normalizer = *n;
      return out;
    }

    // Growth limits: a type grows to the full size budget only while some
    // component of that type is still unsolved; support types stay small so
    // cross-products of irrelevant operands do not swamp the search.
    auto size_cap = [&](const Type& t) -> int {
      for (size_t c = 0; c < specs.size(); ++c)
        if (specs[c].type == t && hits[c].empty()) return opt.budget.max_term_size;
      if (t.kind == TypeKind::Bool) return 5;
      return 4;
    };

    // --- productions, iterated alphabetically --------------------------------
    struct Production {
      std::string name;
      std::function<void(int)> grow;
    };

    auto binary_op = [&](Builtin op, const Type& operand, const Type& result,
                         int size) {
      if (size > size_cap(result)) return;
      for (int ls = 1; ls <= size - 2; ++ls) {
        int rs = size - 1 - ls;
        for (const Term& l : pool_at(operand, ls))
          for (const Term& r : pool_at(operand, rs)) {
            if (constructed > opt.budget.leaf_nodes) return;
            add(call_e(op, {l.expr, r.expr}), size, result);
          }
      }
    };

    std::vector<Production> prods;
    auto add_prod = [&](const std::string& name, std::function<void(int)> fn) {
      prods.push_back({name, std::move(fn)});
    };

    for (Builtin op : {Builtin::Add, Builtin::Sub, Builtin::Mul, Builtin::Div,
                       Builtin::Max, Builtin::Min}) {
      add_prod(builtin_name(op), [&, op](int size) {
        if (types.has_int) binary_op(op, int_type(), int_type(), size);
        if (types.has_float) binary_op(op, float_type(), float_type(), size);
      });
    }
    for (Builtin op : {Builtin::Lt, Builtin::Le, Builtin::Gt, Builtin::Ge,
                       Builtin::Eq}) {
      add_prod(builtin_name(op), [&, op](int size) {
        if (types.has_int) binary_op(op, int_type(), bool_type(), size);
        if (types.has_float) binary_op(op, float_type(), bool_type(), size);
        if (types.has_str &&
            (op == Builtin::Eq || op == Builtin::Lt || op == Builtin::Gt))
          binary_op(op, str_type(), bool_type(), size);
      });
    }
    add_prod("and", [&](int size) {
      binary_op(Builtin::And, bool_type(), bool_type(), size);
    });
    add_prod("or", [&](int size) {
      binary_op(Builtin::Or, bool_type(), bool_type(), size);
    });
    add_prod("not", [&](int size) {
      if (size > size_cap(bool_type())) return;
      for (const Term& x : pool_at(bool_type(), size - 1))
        add(call_e(Builtin::Not, {x.expr}), size, bool_type());
    });
    add_prod("strcat", [&](int size) {
      if (types.has_str) binary_op(Builtin::StrCat, str_type(), str_type(), size);
    });
    add_prod("strlen", [&](int size) {
      if (!types.has_str || size > size_cap(int_type())) return;
      for (const Term& x : pool_at(str_type(), size - 1))
        add(call_e(Builtin::StrLen, {x.expr}), size, int_type());
    });
    add_prod("concat", [&](int size) {
      for (const auto& lt : types.lists) binary_op(Builtin::Concat, lt, lt, size);
    });
    add_prod("len", [&](int size) {
      if (size > size_cap(int_type())) return;
      for (const auto& lt : types.lists)
        for (const Term& x : pool_at(lt, size - 1))
          add(call_e(Builtin::Len, {x.expr}), size, int_type());
    });
    add_prod("union", [&](int size) {
      for (const auto& st : types.sets) {
        if (size > size_cap(st)) continue;
        for (int ls = 1; ls <= size - 2; ++ls)
          for (const Term& l : pool_at(st, ls))
            for (const Term& r : pool_at(st, size - 1 - ls))
              add(union_e(l.expr, r.expr), size, st);
      }
    });
    add_prod("get", [&](int size) {
      for (const auto& mt : types.maps) {
        if (size > size_cap(mt.args[1])) continue;
        for (int ls = 1; ls <= size - 2; ++ls)
          for (const Term& m : pool_at(mt, ls))
            for (const Term& k : pool_at(mt.args[0], size - 1 - ls))
              add(call_e(Builtin::Get, {m.expr, k.expr}), size, mt.args[1]);
      }
    });
    add_prod("contains", [&](int size) {
      if (size > size_cap(bool_type())) return;
      for (const auto& mt : types.maps)
        for (int ls = 1; ls <= size - 2; ++ls)
          for (const Term& m : pool_at(mt, ls))
            for (const Term& k : pool_at(mt.args[0], size - 1 - ls))
              add(call_e(Builtin::Contains, {m.expr, k.expr}), size, bool_type());
    });
    add_prod("ite", [&](int size) {
      std::vector<Type> targets;
      if (types.has_int) targets.push_back(int_type());
      if (types.has_float) targets.push_back(float_type());
      if (types.has_str) targets.push_back(str_type());
      if (types.has_bool) targets.push_back(bool_type());
      for (const auto& t : types.tuples) targets.push_back(t);
      for (const auto& t : types.lists) targets.push_back(t);
      for (const auto& t : types.sets) targets.push_back(t);
      for (const auto& t : types.maps) targets.push_back(t);
      for (const auto& target : targets) {
        if (size > size_cap(target)) continue;
        for (int cs = 1; cs <= size - 3; ++cs)
          for (int ts = 1; ts <= size - 2 - cs; ++ts) {
            int es = size - 1 - cs - ts;
            for (const Term& c : pool_at(bool_type(), cs))
              for (const Term& th : pool_at(target, ts))
                for (const Term& el : pool_at(target, es)) {
                  if (constructed > opt.budget.leaf_nodes) return;
                  add(ite_e(c.expr, th.expr, el.expr), size, target);
                }
          }
      }
    });
    add_prod("proj", [&](int size) {
      for (const auto& tt : types.tuples)
        for (const Term& t : pool_at(tt, size - 1))
          for (size_t i = 1; i <= tt.args.size(); ++i) {
            if (size > size_cap(tt.args[i - 1])) continue;
            add(proj_e(static_cast<int>(i), t.expr), size, tt.args[i - 1]);
          }
    });

    std::stable_sort(prods.begin(), prods.end(),
                     [](const Production& a, const Production& b) {
                       return a.name < b.name;
                     });

    for (int size = 2; size <= opt.budget.max_term_size; ++size) {
      for (auto& prod : prods) {
        if (constructed > opt.budget.leaf_nodes) break;
        prod.grow(size);
      }
      if (auto n = assemble_and_verify()) {
        SynthOutcome out;
        out.status = SynthOutcome::Solved;
        out.normalizer = *n;
        return out;
      }
      if (constructed > opt.budget.leaf_nodes) break;
    }


    total_constructed += constructed;
    if (total_constructed > opt.budget.leaf_nodes) break;
    if (verify_calls > verify_budget) break;
    if (learned_identity.empty() && learned_pairs.empty()) break;
  }

  SynthOutcome out;
  out.status = SynthOutcome::Unknown;
  out.reason = total_constructed > opt.budget.leaf_nodes
                   ? "leaf enumeration budget exhausted at " + p.path
                   : "no normalizer within size limit at " + p.path;
  return out;
}

// ---------------------------------------------------------------------------
// Deductive composition
// ---------------------------------------------------------------------------

Normalizer compose_product(
    const std::vector<std::pair<Normalizer, std::vector<int>>>& children,
    const Type& state_type) {
  if (children.size() == 1 &&
      children[0].second.size() == state_type.args.size()) {
    return children[0].first;
  }
  size_t arity = state_type.args.size();
  std::vector<Expr> comps(arity);
  std::vector<bool> covered(arity, false);
  for (const auto& [child, indices] : children) {
    auto project = [&](const std::string& v) {
      if (indices.size() == 1) return proj_e(indices[0], var_e(v));
      std::vector<Expr> parts;
      for (int i : indices) parts.push_back(proj_e(i, var_e(v)));
      return tuple_e(std::move(parts));
    };
    for (size_t pos = 0; pos < indices.size(); ++pos) {
      int slot_index = indices[pos];
      if (slot_index < 1 || slot_index > static_cast<int>(arity) ||
          covered[slot_index - 1])
        throw std::logic_error("product composition with bad component cover");
      Expr merged = apply_e(child.h, {project("a"), project("b")});
      comps[slot_index - 1] =
          indices.size() == 1
              ? merged
              : proj_e(static_cast<int>(pos) + 1, std::move(merged));
      covered[slot_index - 1] = true;
    }
  }
  for (bool c : covered)
    if (!c) throw std::logic_error("product composition missing a component");

  Normalizer out;
  out.h = make_fn({{"a", state_type}, {"b", state_type}},
                  tuple_e(std::move(comps)));
  out.rules.push_back("Norm-Product");
  for (const auto& [child, indices] : children)
    out.rules.insert(out.rules.end(), child.rules.begin(), child.rules.end());
  return out;
}

Normalizer compose_coll(const Normalizer& child, const Value& elem_default,
                        const Type& coll_type) {
  if (!coll_type.is_collection())
    throw std::logic_error("collection composition over a non-collection");
  Type key_type, val_type;
  switch (coll_type.kind) {
    case TypeKind::Map:
      key_type = coll_type.args[0];
      val_type = coll_type.args[1];
      break;
    case TypeKind::List:
      key_type = int_type();
      val_type = coll_type.args[0];
      break;
    default:  // Set
      key_type = coll_type.args[0];
      val_type = coll_type.args[0];
      break;
  }
  Type as_map = map_type(key_type, val_type);

  auto to_map = [&](const std::string& v) {
    Expr e = var_e(v);
    return coll_type.kind == TypeKind::Map ? e : convert_e(as_map, e);
  };
  Expr join = outer_join_e(to_map("a"), to_map("b"));

  Expr dflt = value_to_expr(elem_default, val_type);
  std::string pv = "p";
  Expr left = call_e(Builtin::Fill, {proj_e(1, proj_e(2, var_e(pv))), dflt});
  Expr right = call_e(Builtin::Fill, {proj_e(2, proj_e(2, var_e(pv))), dflt});
  Expr merged_val = apply_e(child.h, {left, right});
  Type pair_t = tuple_type({key_type, tuple_type({val_type, val_type})});
  FuncPtr mapper = make_fn({{pv, pair_t}}, std::move(merged_val));
  Expr mapped = map_e(mapper, std::move(join));

  Expr body = coll_type.kind == TypeKind::Map
                  ? std::move(mapped)
                  : convert_e(coll_type, std::move(mapped));

  Normalizer out;
  out.h = make_fn({{"a", coll_type}, {"b", coll_type}}, std::move(body));
  out.rules.push_back("Norm-Coll");
  out.rules.insert(out.rules.end(), child.rules.begin(), child.rules.end());
  return out;
}

// ---------------------------------------------------------------------------
// Deductive matching of collection-shaped accumulator bodies
// ---------------------------------------------------------------------------

namespace {

struct CollRoute {
  SynthProblem element;   // the reduced element-level problem
  Value elem_default;
  Type coll_type;
};

// Matches a point update `update(s, K, W)` where K reads only the row and W
// reads s solely through `ite(contains(s,K), get(s,K), default)`; also the
// guarded insert form for sets. Produces the element-level accumulator with
// the key threaded through the row.
std::optional<CollRoute> match_point_update(const SynthProblem& p) {
  const Func& f = *p.f;
  if (f.params.size() != 2) return std::nullopt;
  const std::string& s = f.params[0].first;
  const std::string& x = f.params[1].first;
  Expr body = f.body;

  // Optional row-only guard around the whole update.
  Expr guard = const_e(bool_v(true));
  if (body.kind == ExprKind::Ite && expr_equal(body.args[2], var_e(s)) &&
      !occurs_free(body.args[0], s)) {
    guard = body.args[0];
    body = body.args[1];
  }

  if (p.state_type.kind == TypeKind::Set && body.kind == ExprKind::Insert &&
      expr_equal(body.args[0], var_e(s)) && !occurs_free(body.args[1], s)) {
    // Insertion of row-derived elements: handled by the union merge, which
    // the caller tries via the collection route with a trivial child.
    CollRoute route;
    route.coll_type = p.state_type;
    route.elem_default = default_value(p.state_type.args[0]);
    return route;  // element problem unused for sets
  }

  if (p.state_type.kind != TypeKind::Map) return std::nullopt;
  if (body.kind != ExprKind::Update) return std::nullopt;
  if (!expr_equal(body.args[0], var_e(s))) return std::nullopt;
  const Expr& key = body.args[1];
  if (occurs_free(key, s)) return std::nullopt;
  const Type& val_t = p.state_type.args[1];
  Value dflt = default_value(val_t);

  // getOrElse pattern with the same key and the default value.
  Expr pattern = ite_e(call_e(Builtin::Contains, {var_e(s), key}),
                       call_e(Builtin::Get, {var_e(s), key}),
                       value_to_expr(dflt, val_t));
  std::string v = "v0";
  while (occurs_free(f.body, v)) v += "_";
  Expr w = replace_subexpr(body.args[2], pattern, var_e(v));
  if (occurs_free(w, s)) return std::nullopt;

  // Element accumulator over (key, row) pairs.
  std::string pr = "p0";
  while (occurs_free(f.body, pr) || pr == v) pr += "_";
  Type elem_row = tuple_type({p.state_type.args[0], p.row_type});
  Expr key_sub = subst(key, x, proj_e(2, var_e(pr)));
  Expr w_sub = subst(w, x, proj_e(2, var_e(pr)));
  Expr guard_sub = subst(guard, x, proj_e(2, var_e(pr)));
  Expr cond = call_e(Builtin::Eq, {proj_e(1, var_e(pr)), key_sub});
  bool guard_trivial = guard_sub.kind == ExprKind::Const &&
                       guard_sub.constant.kind == ValueKind::Bool &&
                       guard_sub.constant.b;
  if (!guard_trivial) cond = call_e(Builtin::And, {guard_sub, cond});

  Expr elem_body = ite_e(std::move(cond), std::move(w_sub), var_e(v));
  CollRoute route;
  route.coll_type = p.state_type;
  route.elem_default = dflt;
  route.element.f = make_fn({{v, val_t}, {pr, elem_row}}, std::move(elem_body));
  route.element.init = dflt;
  route.element.state_type = val_t;
  route.element.row_type = elem_row;
  route.element.path = p.path + ".elem";
  return route;
}

bool is_true_guard(const DecompExpr& d) {
  return d.guard_fn && d.guard_fn->body.kind == ExprKind::Const &&
         d.guard_fn->body.constant.kind == ValueKind::Bool &&
         d.guard_fn->body.constant.b;
}

// Matches the canonical elementwise iterate produced by decomposition: the
// body transforms one element of the state collection and may read the row.
// Produces the element-level problem with the key threaded through the row.
std::optional<CollRoute> match_iterate(const SynthProblem& p,
                                       const DecompExpr& iter,
                                       const Type& coll_type,
                                       const std::string& row_name,
                                       const std::string& path) {
  if (iter.kind != DecompKind::CollIterFree) return std::nullopt;
  if (!is_true_guard(iter)) return std::nullopt;
  if (!coll_type.is_collection()) return std::nullopt;

  CollRoute route;
  route.coll_type = coll_type;
  if (coll_type.kind == TypeKind::Set) {
    route.elem_default = default_value(coll_type.args[0]);
    return route;  // union merge; element problem unused
  }

  // Body sits under the row binder wrap.
  const DecompExpr* inner = iter.body.get();
  if (inner->kind == DecompKind::FnComp) inner = inner->body.get();
  if (inner->kind != DecompKind::Plain) return std::nullopt;
  Expr body = inner->plain;

  Type key_t =
      coll_type.kind == TypeKind::Map ? coll_type.args[0] : int_type();
  Type val_t =
      coll_type.kind == TypeKind::Map ? coll_type.args[1] : coll_type.args[0];

  std::string v = "v0", pr = "p0";
  while (occurs_free(body, v)) v += "_";
  while (occurs_free(body, pr) || pr == v) pr += "_";

  if (coll_type.kind == TypeKind::Map) {
    // Element variable is the (key, value) entry; rebind its parts.
    body = replace_subexpr(body, proj_e(2, var_e(iter.iter_var)), var_e(v));
    body = replace_subexpr(body, proj_e(1, var_e(iter.iter_var)),
                           proj_e(1, var_e(pr)));
    if (occurs_free(body, iter.iter_var)) return std::nullopt;
  } else {
    body = subst(body, iter.iter_var, var_e(v));
  }
  body = subst(body, row_name, proj_e(2, var_e(pr)));

  Type elem_row = tuple_type({key_t, p.row_type});
  route.elem_default = default_value(val_t);
  route.element.f = make_fn({{v, val_t}, {pr, elem_row}}, std::move(body));
  route.element.init = route.elem_default;
  route.element.state_type = val_t;
  route.element.row_type = elem_row;
  route.element.path = path + ".elem";
  return route;
}

}  // namespace

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

namespace {

SynthOutcome solved(Normalizer n) {
  SynthOutcome out;
  out.status = SynthOutcome::Solved;
  out.normalizer = std::move(n);
  return out;
}

SynthOutcome unknown(std::string reason) {
  SynthOutcome out;
  out.status = SynthOutcome::Unknown;
  out.reason = std::move(reason);
  return out;
}

FuncPtr retype(const FuncPtr& f) {
  auto copy = std::make_shared<Func>(*f);
  TypeEnv env;
  typecheck_fn(*copy, env);
  return copy;
}

// Attempts the collection route: solve the element problem (or use the
// trivial union child for sets) and compose; the result must verify against
// the original problem.
std::optional<Normalizer> try_coll_route(const SynthProblem& p,
                                         const CollRoute& route,
                                         const SynthOptions& opt, int depth);

SynthOutcome solve(const SynthProblem& p, const SynthOptions& opt, int depth);

std::optional<Normalizer> try_coll_route(const SynthProblem& p,
                                         const CollRoute& route,
                                         const SynthOptions& opt, int depth) {
  Normalizer child;
  if (route.coll_type.kind == TypeKind::Set) {
    child.h = make_fn({{"a", route.coll_type.args[0]},
                       {"b", route.coll_type.args[0]}},
                      var_e("b"));
    child.rules = {"Norm-Synth"};
  } else {
    SynthProblem elem = route.element;
    elem.f = retype(elem.f);
    SynthOptions sub = opt;
    sub.refute_first = true;
    SynthOutcome r = solve(elem, sub, depth + 1);
    if (r.status != SynthOutcome::Solved) return std::nullopt;
    child = r.normalizer;
  }
  Normalizer composed = route.coll_type.kind == TypeKind::Set
                            ? [&] {
                                Normalizer n;
                                n.h = make_fn({{"a", route.coll_type},
                                               {"b", route.coll_type}},
                                              union_e(var_e("a"), var_e("b")));
                                n.rules = {"Norm-Coll"};
                                return n;
                              }()
                            : compose_coll(child, route.elem_default,
                                           route.coll_type);
  if (verify_normalizer(p, *composed.h, opt.cfg, opt.require_commutative))
    return std::nullopt;
  note(opt, "Norm-Coll");
  return composed;
}

SynthOutcome solve(const SynthProblem& p, const SynthOptions& opt, int depth) {
  if (depth > opt.budget.max_depth)
    return unknown("synthesis recursion limit at " + p.path);

  if (opt.refute_first) {
    GenConfig rc = opt.cfg;
    harvest_constants(*p.f, rc);
    rc.seed = path_rng(opt, p.path, 0x524E).next();
    if (auto cx = refute_norm(p.f, p.init, p.state_type, p.row_type, rc)) {
      note(opt, counterexample_kind_name(cx->kind));
      SynthOutcome out;
      out.status = SynthOutcome::Refuted;
      out.counterexample = *cx;
      return out;
    }
  }

  DecompExpr root = decompose(*p.f, opt.trace);
  const std::string& row_name = p.f->params[1].first;

  // Whole-state collection iterate.
  if (root.kind == DecompKind::CollIterFree) {
    if (auto route = match_iterate(p, root, p.state_type, row_name, p.path))
      if (auto n = try_coll_route(p, *route, opt, depth)) return solved(*n);
  }

  // Tuple split into independent groups.
  if (root.kind == DecompKind::TupleD && !root.groups.empty()) {
    std::vector<std::pair<Normalizer, std::vector<int>>> children;
    std::vector<ExtraTerminal> extras;
    bool all_solved = true;
    for (size_t gi = 0; gi < root.comps.size(); ++gi) {
      const auto& g = root.groups[gi];
      const DecompExpr& comp = root.comps[gi];

      SynthProblem sub;
      sub.path = p.path + "." + std::to_string(g[0]);
      sub.state_type =
          g.size() == 1 ? p.state_type.args[g[0] - 1] : [&] {
            std::vector<Type> parts;
            for (int i : g) parts.push_back(p.state_type.args[i - 1]);
            return tuple_type(std::move(parts));
          }();
      sub.row_type = p.row_type;
      sub.init = g.size() == 1 ? p.init.elems[g[0] - 1] : [&] {
        std::vector<Value> parts;
        for (int i : g) parts.push_back(p.init.elems[i - 1]);
        return tuple_v(std::move(parts));
      }();

      // Sub-accumulator: rebuild a standalone function over the group state.
      std::string sv = comp.kind == DecompKind::FnComp ? comp.binder : "g0";
      Expr body;
      if (comp.kind == DecompKind::FnComp) {
        body = to_canonical_expr(*comp.body, var_e(sv));
      } else if (comp.kind == DecompKind::CollIterFree) {
        const DecompExpr* inner = comp.body.get();
        Expr ibody = to_canonical_expr(*inner, var_e(sv));
        FuncPtr mapper =
            make_fn({{comp.iter_var, comp.iter_var_type}}, std::move(ibody));
        body = map_e(mapper, filter_e(comp.guard_fn, var_e(sv)));
      } else {
        all_solved = false;
        continue;
      }
      sub.f = retype(
          make_fn({{sv, sub.state_type}, {row_name, p.row_type}}, body));

      SynthOptions sopt = opt;
      sopt.refute_first = true;
      SynthOutcome r;
      if (comp.kind == DecompKind::CollIterFree) {
        // The sub-problem named by the collection rule is the element-level
        // accumulator; refutation runs there, inside the route.
        if (auto route = match_iterate(sub, comp, sub.state_type, row_name,
                                       sub.path)) {
          if (auto n = try_coll_route(sub, *route, opt, depth + 1))
            r = solved(*n);
          else
            r.status = SynthOutcome::Unknown;
        } else {
          r = solve(sub, sopt, depth + 1);
        }
      } else {
        r = solve(sub, sopt, depth + 1);
      }

      if (r.status == SynthOutcome::Solved) {
        children.emplace_back(r.normalizer, g);
        auto project = [&](const char* v) {
          if (g.size() == 1) return proj_e(g[0], var_e(v));
          std::vector<Expr> parts;
          for (int i : g) parts.push_back(proj_e(i, var_e(v)));
          return tuple_e(std::move(parts));
        };
        extras.push_back(
            {apply_e(r.normalizer.h, {project("a"), project("b")}),
             sub.state_type});
      } else {
        // Sub-refutation must not refute the whole problem.
        all_solved = false;
      }
    }
    if (all_solved && !children.empty()) {
      Normalizer composed = compose_product(children, p.state_type);
      if (!verify_normalizer(p, *composed.h, opt.cfg, opt.require_commutative)) {
        note(opt, "Norm-Product");
        return solved(std::move(composed));
      }
    }
    // Fallback: whole-state leaf synthesis seeded with solved sub-merges.
    note(opt, "Fallback-Leaf");
    return synth_leaf(p, opt, extras);
  }

  // No useful decomposition: try the point-update shape, then enumerate.
  if (auto route = match_point_update(p))
    if (auto n = try_coll_route(p, *route, opt, depth)) return solved(*n);
  return synth_leaf(p, opt);
}

}  // namespace

SynthOutcome synth_normalizer(const SynthProblem& p, const SynthOptions& opt) {
  SynthProblem fixed = p;
  fixed.f = retype(p.f);
  return solve(fixed, opt, 0);
}

}  // namespace homcalc
