#include "homcalc/refute.hpp"

#include <algorithm>
#include <map>

namespace homcalc {

const char* counterexample_kind_name(CounterexampleKind k) {
  switch (k) {
    case CounterexampleKind::HomRefute: return "Refutation";
    case CounterexampleKind::NormRefute1: return "Norm-Refute-1";
    case CounterexampleKind::NormRefute2: return "Norm-Refute-2";
  }
  return "?";
}

std::string Counterexample::describe() const {
  std::string out = counterexample_kind_name(kind);
  if (kind == CounterexampleKind::HomRefute) {
    out += "\n  d1  = " + df_to_string(d1);
    out += "\n  d1' = " + df_to_string(d1b);
    out += "\n  d2  = " + df_to_string(d2);
    out += "\n  d2' = " + df_to_string(d2b);
    out += "\n  P(d1 ++ d2)   = " + value_to_string(lhs);
    out += "\n  P(d1' ++ d2') = " + value_to_string(rhs);
  } else {
    out += "\n  s  = " + value_to_string(state);
    out += "\n  x  = " + value_to_string(row);
    if (kind == CounterexampleKind::NormRefute2)
      out += "\n  x' = " + value_to_string(row2);
    out += "\n  lhs = " + value_to_string(lhs);
    out += "\n  rhs = " + value_to_string(rhs);
  }
  return out;
}

namespace {

constexpr long long kTrialFuel = 2'000'000;

std::optional<Value> try_run(const Program& p, const DataFrame& d) {
  Fuel fuel;
  fuel.remaining = kTrialFuel;
  try {
    return run_program(p, d, fuel);
  } catch (const EvalError&) {
    return std::nullopt;
  }
}

std::optional<Value> try_apply(const FuncPtr& f, const std::vector<Value>& args) {
  Fuel fuel;
  fuel.remaining = kTrialFuel;
  try {
    return apply_fn(f, args, fuel);
  } catch (const EvalError&) {
    return std::nullopt;
  }
}

// Scalar shrink candidates, stepping toward the type's default.
std::vector<Value> shrink_value(const Value& v) {
  std::vector<Value> out;
  switch (v.kind) {
    case ValueKind::Int:
      if (v.i != 0) {
        out.push_back(int_v(0));
        out.push_back(int_v(v.i / 2));
        if (v.i > 0) out.push_back(int_v(v.i - 1));
        if (v.i < 0) out.push_back(int_v(v.i + 1));
      }
      break;
    case ValueKind::Bool:
      if (v.b) out.push_back(bool_v(false));
      break;
    case ValueKind::Float:
      if (v.f != 0.0) {
        out.push_back(float_v(0.0));
        out.push_back(float_v(v.f / 2.0));
      }
      break;
    case ValueKind::Str:
      if (!v.s.empty()) {
        out.push_back(str_v(""));
        out.push_back(str_v(v.s.substr(0, v.s.size() - 1)));
      }
      break;
    case ValueKind::Tuple:
      for (size_t i = 0; i < v.elems.size(); ++i)
        for (const auto& cand : shrink_value(v.elems[i])) {
          Value t = v;
          t.elems[i] = cand;
          out.push_back(std::move(t));
        }
      break;
    case ValueKind::List:
      for (size_t i = 0; i < v.elems.size(); ++i) {
        Value t = v;
        t.elems.erase(t.elems.begin() + i);
        out.push_back(std::move(t));
      }
      break;
    case ValueKind::Set:
      for (size_t i = 0; i < v.elems.size(); ++i) {
        std::vector<Value> rest = v.elems;
        rest.erase(rest.begin() + i);
        out.push_back(set_v(std::move(rest)));
      }
      break;
    case ValueKind::Map:
      for (size_t i = 0; i < v.entries.size(); ++i) {
        Value t = v;
        t.entries.erase(t.entries.begin() + i);
        out.push_back(std::move(t));
      }
      break;
    case ValueKind::Null:
      break;
  }
  return out;
}

std::vector<DataFrame> shrink_df(const DataFrame& d) {
  std::vector<DataFrame> out;
  for (size_t i = 0; i < d.rows.size(); ++i) {
    DataFrame t = d;
    t.rows.erase(t.rows.begin() + i);
    out.push_back(std::move(t));
  }
  for (size_t i = 0; i < d.rows.size(); ++i)
    for (const auto& cand : shrink_value(d.rows[i])) {
      DataFrame t = d;
      t.rows[i] = cand;
      out.push_back(std::move(t));
    }
  return out;
}

bool hom_violation_holds(const Program& p, const Counterexample& cx,
                         Value* lhs_out, Value* rhs_out) {
  auto p1 = try_run(p, cx.d1);
  auto p1b = try_run(p, cx.d1b);
  auto p2 = try_run(p, cx.d2);
  auto p2b = try_run(p, cx.d2b);
  if (!p1 || !p1b || !p2 || !p2b) return false;
  if (!canon_eq(*p1, *p1b) || !canon_eq(*p2, *p2b)) return false;
  std::optional<Value> lhs, rhs;
  try {
    lhs = try_run(p, concat_df(cx.d1, cx.d2));
    rhs = try_run(p, concat_df(cx.d1b, cx.d2b));
  } catch (const SchemaError&) {
    return false;
  }
  if (!lhs || !rhs || canon_eq(*lhs, *rhs)) return false;
  if (lhs_out) *lhs_out = *lhs;
  if (rhs_out) *rhs_out = *rhs;
  return true;
}

Counterexample shrink_hom(const Program& p, Counterexample cx) {
  bool progress = true;
  int rounds = 0;
  while (progress && rounds++ < 40) {
    progress = false;
    DataFrame* slots[4] = {&cx.d1, &cx.d1b, &cx.d2, &cx.d2b};
    for (DataFrame* slot : slots) {
      for (const auto& cand : shrink_df(*slot)) {
        Counterexample t = cx;
        // Mirror the shrink into the matching slot of t.
        DataFrame* tslots[4] = {&t.d1, &t.d1b, &t.d2, &t.d2b};
        for (int i = 0; i < 4; ++i)
          if (slots[i] == slot) *tslots[i] = cand;
        if (hom_violation_holds(p, t, &t.lhs, &t.rhs)) {
          cx = t;
          progress = true;
          break;
        }
      }
      if (progress) break;
    }
  }
  return cx;
}

}  // namespace

std::optional<Counterexample> refute_hom(const Program& p, const GenConfig& cfg) {
  Rng rng = Rng(cfg.seed).split(0x484F4D);  // stream tag for this phase

  std::vector<std::pair<std::string, Type>> columns;
  const Type& row = p.input_type.args[0];
  if (row.kind == TypeKind::Tuple) {
    for (size_t i = 0; i < row.args.size(); ++i)
      columns.emplace_back("c" + std::to_string(i + 1), row.args[i]);
  } else {
    columns.emplace_back("c1", row);
  }

  // Pool of frames bucketed by program output. The empty frame is always
  // present; single-row frames dominate so collisions stay shrunken.
  int pool_size = std::max(16, cfg.trials / 8);
  std::vector<DataFrame> pool;
  std::vector<Value> outputs;
  auto add_frame = [&](DataFrame d) {
    auto out = try_run(p, d);
    if (!out) return;
    pool.push_back(std::move(d));
    outputs.push_back(std::move(*out));
  };
  add_frame(DataFrame{columns, {}});

  // Systematic single-row frames over the harvested constants: guard-driven
  // programs change behaviour exactly at these values, so the frames that
  // witness a violation are in the pool at every seed.
  {
    std::vector<std::vector<Value>> per_col;
    for (const auto& [name, t] : columns) {
      std::vector<Value> vals;
      switch (t.kind) {
        case TypeKind::Int:
          vals.push_back(int_v(0));
          vals.push_back(int_v(1));
          for (auto v : cfg.int_pool) vals.push_back(int_v(v));
          break;
        case TypeKind::Float:
          vals.push_back(float_v(0.0));
          for (auto v : cfg.float_pool) vals.push_back(float_v(v));
          break;
        case TypeKind::Str:
          vals.push_back(str_v(""));
          vals.push_back(str_v("a"));
          for (const auto& s : cfg.str_pool) vals.push_back(str_v(s));
          break;
        case TypeKind::Bool:
          vals.push_back(bool_v(false));
          vals.push_back(bool_v(true));
          break;
        default:
          vals.push_back(default_value(t));
          break;
      }
      std::vector<Value> uniq;
      for (const auto& v : vals)
        if (std::none_of(uniq.begin(), uniq.end(),
                         [&](const Value& u) { return canon_eq(u, v); }))
          uniq.push_back(v);
      per_col.push_back(std::move(uniq));
    }
    long long combos = 1;
    for (const auto& vals : per_col) combos *= static_cast<long long>(vals.size());
    if (combos <= 96) {
      std::vector<size_t> idx(per_col.size(), 0);
      while (true) {
        std::vector<Value> row;
        for (size_t c = 0; c < per_col.size(); ++c)
          row.push_back(per_col[c][idx[c]]);
        Value r = row.size() == 1 ? row[0] : tuple_v(std::move(row));
        add_frame(DataFrame{columns, {r}});
        size_t c = 0;
        while (c < per_col.size() && ++idx[c] >= per_col[c].size()) idx[c++] = 0;
        if (c == per_col.size()) break;
      }
    }
  }

  for (int i = 0; i < pool_size; ++i) {
    GenConfig small = cfg;
    small.max_rows = 1 + static_cast<int>(rng.below(cfg.max_rows));
    add_frame(random_df(columns, small, rng));
  }

  // Collision pairs: indices with equal output. Small frames first; the
  // sharpest violations pair a frame against a shorter one with the same
  // output (often the empty frame).
  std::vector<std::pair<size_t, size_t>> collisions;
  for (size_t i = 0; i < pool.size(); ++i)
    for (size_t j = i + 1; j < pool.size(); ++j)
      if (canon_eq(outputs[i], outputs[j]) &&
          !df_equals(pool[i], pool[j]))
        collisions.emplace_back(i, j);
  std::stable_sort(collisions.begin(), collisions.end(),
                   [&](const auto& a, const auto& b) {
                     size_t sa = pool[a.first].rows.size() +
                                 pool[a.second].rows.size();
                     size_t sb = pool[b.first].rows.size() +
                                 pool[b.second].rows.size();
                     return sa < sb;
                   });

  auto check = [&](const DataFrame& a, const DataFrame& ab, const DataFrame& b,
                   const DataFrame& bb) -> std::optional<Counterexample> {
    Counterexample cx;
    cx.kind = CounterexampleKind::HomRefute;
    cx.d1 = a;
    cx.d1b = ab;
    cx.d2 = b;
    cx.d2b = bb;
    if (hom_violation_holds(p, cx, &cx.lhs, &cx.rhs))
      return shrink_hom(p, std::move(cx));
    return std::nullopt;
  };

  long long budget = static_cast<long long>(cfg.trials) * 48;

  // Sweep every collision pair against a widening prefix of pool frames used
  // identically on the opposite side, in both orientations, so the budget
  // spreads across pairs before it deepens into any one of them.
  for (size_t prefix : {size_t{12}, pool.size()}) {
    for (const auto& [i, j] : collisions) {
      size_t lo = prefix == 12 ? 0 : 12;
      for (size_t k = lo; k < std::min(prefix, pool.size()); ++k) {
        if (budget <= 0) return std::nullopt;
        budget -= 2;
        if (auto cx = check(pool[k], pool[k], pool[i], pool[j])) return cx;
        if (auto cx = check(pool[i], pool[j], pool[k], pool[k])) return cx;
      }
    }
  }

  // Genuine collision pairs on both sides.
  for (const auto& [i, j] : collisions) {
    for (const auto& [i2, j2] : collisions) {
      if (budget <= 0) return std::nullopt;
      --budget;
      if (auto cx = check(pool[i], pool[j], pool[i2], pool[j2])) return cx;
    }
  }
  return std::nullopt;
}

namespace {

bool norm1_violation(const FuncPtr& f, const Value& init, const Value& s,
                     const Value& x, Value* lhs, Value* rhs) {
  auto fi = try_apply(f, {init, x});
  if (!fi || !canon_eq(*fi, init)) return false;
  auto fs = try_apply(f, {s, x});
  if (!fs || canon_eq(*fs, s)) return false;
  if (lhs) *lhs = *fs;
  if (rhs) *rhs = s;
  return true;
}

bool norm2_violation(const FuncPtr& f, const Value& init, const Value& s,
                     const Value& x, const Value& xb, Value* lhs, Value* rhs) {
  auto fi = try_apply(f, {init, x});
  auto fib = try_apply(f, {init, xb});
  if (!fi || !fib || !canon_eq(*fi, *fib)) return false;
  auto fs = try_apply(f, {s, x});
  auto fsb = try_apply(f, {s, xb});
  if (!fs || !fsb || canon_eq(*fs, *fsb)) return false;
  if (lhs) *lhs = *fs;
  if (rhs) *rhs = *fsb;
  return true;
}

Counterexample shrink_norm(const FuncPtr& f, const Value& init,
                           Counterexample cx) {
  bool progress = true;
  int rounds = 0;
  while (progress && rounds++ < 60) {
    progress = false;
    auto try_replace = [&](Value Counterexample::* field, const Value& cand) {
      Counterexample t = cx;
      t.*field = cand;
      bool ok = t.kind == CounterexampleKind::NormRefute1
                    ? norm1_violation(f, init, t.state, t.row, &t.lhs, &t.rhs)
                    : norm2_violation(f, init, t.state, t.row, t.row2, &t.lhs,
                                      &t.rhs);
      if (ok) {
        cx = t;
        progress = true;
      }
      return ok;
    };
    for (const auto& cand : shrink_value(cx.state))
      if (try_replace(&Counterexample::state, cand)) break;
    if (progress) continue;
    for (const auto& cand : shrink_value(cx.row))
      if (try_replace(&Counterexample::row, cand)) break;
    if (progress) continue;
    if (cx.kind == CounterexampleKind::NormRefute2)
      for (const auto& cand : shrink_value(cx.row2))
        if (try_replace(&Counterexample::row2, cand)) break;
  }
  return cx;
}

}  // namespace

std::optional<Counterexample> refute_norm(const FuncPtr& f, const Value& init,
                                          const Type& state_type,
                                          const Type& row_type,
                                          const GenConfig& cfg) {
  Rng rng = Rng(cfg.seed).split(0x4E524D);

  // Row pool, bucketed by f(I, x) for condition (2) collisions.
  int pool_size = std::max(24, cfg.trials / 8);
  std::vector<Value> rows;
  std::vector<Value> images;
  for (int i = 0; i < pool_size; ++i) {
    Value x = random_value(row_type, cfg, rng);
    auto img = try_apply(f, {init, x});
    if (!img) continue;
    rows.push_back(std::move(x));
    images.push_back(std::move(*img));
  }

  std::vector<Value> states;
  states.push_back(init);
  int state_pool = std::max(16, cfg.trials / 16);
  for (int i = 0; i < state_pool; ++i)
    states.push_back(random_value(state_type, cfg, rng));

  int budget = cfg.trials;

  // Condition (1): f(I,x) = I but f(s,x) != s.
  for (size_t i = 0; i < rows.size() && budget > 0; ++i) {
    if (!canon_eq(images[i], init)) continue;
    for (const auto& s : states) {
      if (--budget < 0) break;
      Counterexample cx;
      cx.kind = CounterexampleKind::NormRefute1;
      cx.state = s;
      cx.row = rows[i];
      if (norm1_violation(f, init, cx.state, cx.row, &cx.lhs, &cx.rhs))
        return shrink_norm(f, init, std::move(cx));
    }
  }

  // Condition (2): f(I,x) = f(I,x') but f(s,x) != f(s,x').
  for (size_t i = 0; i < rows.size() && budget > 0; ++i) {
    for (size_t j = i + 1; j < rows.size() && budget > 0; ++j) {
      if (!canon_eq(images[i], images[j]) || canon_eq(rows[i], rows[j]))
        continue;
      for (const auto& s : states) {
        if (--budget < 0) break;
        Counterexample cx;
        cx.kind = CounterexampleKind::NormRefute2;
        cx.state = s;
        cx.row = rows[i];
        cx.row2 = rows[j];
        if (norm2_violation(f, init, cx.state, cx.row, cx.row2, &cx.lhs,
                            &cx.rhs))
          return shrink_norm(f, init, std::move(cx));
      }
    }
  }
  return std::nullopt;
}

bool replay_counterexample(const Counterexample& cx, const Program& p) {
  if (cx.kind != CounterexampleKind::HomRefute) return false;
  Counterexample t = cx;
  return hom_violation_holds(p, t, nullptr, nullptr);
}

bool replay_counterexample(const Counterexample& cx, const FuncPtr& f,
                           const Value& init) {
  switch (cx.kind) {
    case CounterexampleKind::NormRefute1:
      return norm1_violation(f, init, cx.state, cx.row, nullptr, nullptr);
    case CounterexampleKind::NormRefute2:
      return norm2_violation(f, init, cx.state, cx.row, cx.row2, nullptr,
                             nullptr);
    case CounterexampleKind::HomRefute:
      return false;
  }
  return false;
}

}  // namespace homcalc
