#include "homcalc/interp.hpp"

#include <cmath>
#include <limits>

namespace homcalc {

namespace {
long long g_eval_steps = 0;
}

long long eval_steps_total() { return g_eval_steps; }
void eval_steps_add(long long n) { g_eval_steps += n; }

Env Env::bind(const std::string& name, Value v) const {
  Env out;
  auto node = std::make_shared<Node>();
  node->name = name;
  node->value = std::move(v);
  node->next = head_;
  out.head_ = node;
  return out;
}

const Value* Env::lookup(const std::string& name) const {
  for (const Node* n = head_.get(); n; n = n->next.get())
    if (n->name == name) return &n->value;
  return nullptr;
}

namespace {

[[noreturn]] void ev_err(EvalErrorKind k, const std::string& msg) {
  throw EvalError(k, msg);
}

void require_not_null(const Value& v) {
  if (v.kind == ValueKind::Null)
    ev_err(EvalErrorKind::NullValue, "null used as an ordinary value");
}

Value eval_builtin(Builtin op, const std::vector<Value>& a) {
  switch (op) {
    case Builtin::Add:
    case Builtin::Sub:
    case Builtin::Mul: {
      require_not_null(a[0]);
      require_not_null(a[1]);
      if (a[0].kind == ValueKind::Int) {
        std::int64_t r = 0;
        bool ovf = op == Builtin::Add ? __builtin_add_overflow(a[0].i, a[1].i, &r)
                   : op == Builtin::Sub
                       ? __builtin_sub_overflow(a[0].i, a[1].i, &r)
                       : __builtin_mul_overflow(a[0].i, a[1].i, &r);
        if (ovf) ev_err(EvalErrorKind::IntOverflow, "integer overflow");
        return int_v(r);
      }
      double x = a[0].f, y = a[1].f;
      double r = op == Builtin::Add ? x + y : op == Builtin::Sub ? x - y : x * y;
      return float_v(r);
    }
    case Builtin::Div: {
      require_not_null(a[0]);
      require_not_null(a[1]);
      if (a[0].kind == ValueKind::Int) {
        if (a[1].i == 0) ev_err(EvalErrorKind::DivisionByZero, "division by zero");
        if (a[0].i == std::numeric_limits<std::int64_t>::min() && a[1].i == -1)
          ev_err(EvalErrorKind::IntOverflow, "integer overflow");
        return int_v(a[0].i / a[1].i);
      }
      if (a[1].f == 0.0)
        ev_err(EvalErrorKind::DivisionByZero, "division by zero");
      return float_v(a[0].f / a[1].f);
    }
    case Builtin::Min:
    case Builtin::Max: {
      require_not_null(a[0]);
      require_not_null(a[1]);
      bool left;
      if (a[0].kind == ValueKind::Int)
        left = op == Builtin::Min ? a[0].i <= a[1].i : a[0].i >= a[1].i;
      else
        left = op == Builtin::Min ? a[0].f <= a[1].f : a[0].f >= a[1].f;
      return left ? a[0] : a[1];
    }
    case Builtin::Lt:
    case Builtin::Le:
    case Builtin::Gt:
    case Builtin::Ge: {
      require_not_null(a[0]);
      require_not_null(a[1]);
      int c;
      if (a[0].kind == ValueKind::Int)
        c = a[0].i < a[1].i ? -1 : a[0].i > a[1].i ? 1 : 0;
      else if (a[0].kind == ValueKind::Float)
        c = a[0].f < a[1].f ? -1 : a[0].f > a[1].f ? 1 : 0;
      else
        c = a[0].s.compare(a[1].s) < 0 ? -1 : a[0].s == a[1].s ? 0 : 1;
      switch (op) {
        case Builtin::Lt: return bool_v(c < 0);
        case Builtin::Le: return bool_v(c <= 0);
        case Builtin::Gt: return bool_v(c > 0);
        default: return bool_v(c >= 0);
      }
    }
    case Builtin::Eq:
      return bool_v(canon_eq(a[0], a[1]));
    case Builtin::And:
      return bool_v(a[0].b && a[1].b);
    case Builtin::Or:
      return bool_v(a[0].b || a[1].b);
    case Builtin::Not:
      return bool_v(!a[0].b);
    case Builtin::StrCat:
      require_not_null(a[0]);
      require_not_null(a[1]);
      return str_v(a[0].s + a[1].s);
    case Builtin::StrLen:
      require_not_null(a[0]);
      return int_v(static_cast<std::int64_t>(a[0].s.size()));
    case Builtin::Get: {
      const Value* v = map_find(a[0], a[1]);
      if (!v)
        ev_err(EvalErrorKind::AbsentKey,
               "map lookup of absent key " + value_to_string(a[1]));
      return *v;
    }
    case Builtin::Contains:
      return bool_v(map_find(a[0], a[1]) != nullptr);
    case Builtin::Fill:
      return a[0].kind == ValueKind::Null ? a[1] : a[0];
    case Builtin::Concat: {
      Value out = a[0];
      out.elems.insert(out.elems.end(), a[1].elems.begin(), a[1].elems.end());
      return out;
    }
    case Builtin::Len:
      return int_v(static_cast<std::int64_t>(a[0].elems.size()));
  }
  ev_err(EvalErrorKind::Internal, "unknown builtin");
}

// Entries of a collection as seen by map/filter/fold: list items, set
// members, or (key, value) pairs for maps.
std::vector<Value> collection_entries(const Value& c) {
  if (c.kind == ValueKind::Map) {
    std::vector<Value> out;
    out.reserve(c.entries.size());
    for (const auto& [k, v] : c.entries) out.push_back(tuple_v({k, v}));
    return out;
  }
  return c.elems;
}

Value convert_value(const Type& target, const Value& v) {
  if (v.kind == ValueKind::Map && target.kind == TypeKind::Map) return v;
  if (v.kind == ValueKind::List && target.kind == TypeKind::Map) {
    std::vector<std::pair<Value, Value>> entries;
    for (size_t i = 0; i < v.elems.size(); ++i)
      entries.emplace_back(int_v(static_cast<std::int64_t>(i)), v.elems[i]);
    return map_v(std::move(entries));
  }
  if (v.kind == ValueKind::Set && target.kind == TypeKind::Map) {
    std::vector<std::pair<Value, Value>> entries;
    for (const auto& e : v.elems) entries.emplace_back(e, null_v());
    return map_v(std::move(entries));
  }
  if (v.kind == ValueKind::Map && target.kind == TypeKind::List) {
    // Keys must be exactly 0..n-1.
    std::vector<Value> elems;
    for (size_t i = 0; i < v.entries.size(); ++i) {
      const auto& [k, val] = v.entries[i];
      if (k.kind != ValueKind::Int || k.i != static_cast<std::int64_t>(i))
        ev_err(EvalErrorKind::BadConversion,
               "map to list conversion requires contiguous integer keys");
      elems.push_back(val);
    }
    return list_v(std::move(elems));
  }
  if (v.kind == ValueKind::Map && target.kind == TypeKind::Set) {
    std::vector<Value> elems;
    for (const auto& [k, val] : v.entries) elems.push_back(k);
    return set_v(std::move(elems));
  }
  ev_err(EvalErrorKind::BadConversion, "unsupported conversion");
}

// Applies a lambda under the enclosing environment so bodies may reference
// outer binders (canonical forms close over the row variable).
Value call_in(const Func& f, const std::vector<Value>& args, const Env& env,
              Fuel& fuel) {
  if (f.params.size() != args.size())
    ev_err(EvalErrorKind::Internal, "arity mismatch in application");
  Env inner = env;
  for (size_t i = 0; i < args.size(); ++i)
    inner = inner.bind(f.params[i].first, args[i]);
  return eval(f.body, inner, fuel);
}

}  // namespace

Value eval(const Expr& e, const Env& env, Fuel& fuel) {
  fuel.tick();
  switch (e.kind) {
    case ExprKind::Const:
      return e.constant;
    case ExprKind::Default:
      return default_value(e.type_arg);
    case ExprKind::Var: {
      const Value* v = env.lookup(e.var);
      if (!v) ev_err(EvalErrorKind::Internal, "unbound variable '" + e.var + "'");
      return *v;
    }
    case ExprKind::Call: {
      std::vector<Value> args;
      args.reserve(e.args.size());
      for (const auto& a : e.args) args.push_back(eval(a, env, fuel));
      return eval_builtin(e.op, args);
    }
    case ExprKind::Apply: {
      std::vector<Value> args;
      args.reserve(e.args.size());
      for (const auto& a : e.args) args.push_back(eval(a, env, fuel));
      return call_in(*e.fn, args, env, fuel);
    }
    case ExprKind::Ite: {
      Value c = eval(e.args[0], env, fuel);
      return eval(c.b ? e.args[1] : e.args[2], env, fuel);
    }
    case ExprKind::TupleE: {
      std::vector<Value> elems;
      elems.reserve(e.args.size());
      for (const auto& a : e.args) elems.push_back(eval(a, env, fuel));
      return tuple_v(std::move(elems));
    }
    case ExprKind::Proj: {
      Value t = eval(e.args[0], env, fuel);
      if (t.kind != ValueKind::Tuple || e.index < 1 ||
          e.index > static_cast<int>(t.elems.size()))
        ev_err(EvalErrorKind::Internal, "bad projection");
      return t.elems[e.index - 1];
    }
    case ExprKind::Update: {
      Value m = eval(e.args[0], env, fuel);
      Value k = eval(e.args[1], env, fuel);
      Value v = eval(e.args[2], env, fuel);
      return map_update(m, k, v);
    }
    case ExprKind::Append: {
      Value l = eval(e.args[0], env, fuel);
      l.elems.push_back(eval(e.args[1], env, fuel));
      return l;
    }
    case ExprKind::Insert: {
      Value s = eval(e.args[0], env, fuel);
      return set_insert(s, eval(e.args[1], env, fuel));
    }
    case ExprKind::UnionE:
      return set_union(eval(e.args[0], env, fuel), eval(e.args[1], env, fuel));
    case ExprKind::OuterJoin: {
      Value m1 = eval(e.args[0], env, fuel);
      Value m2 = eval(e.args[1], env, fuel);
      std::vector<std::pair<Value, Value>> entries;
      for (const auto& [k, v] : m1.entries) {
        const Value* other = map_find(m2, k);
        entries.emplace_back(k, tuple_v({v, other ? *other : null_v()}));
      }
      for (const auto& [k, v] : m2.entries)
        if (!map_find(m1, k)) entries.emplace_back(k, tuple_v({null_v(), v}));
      return map_v(std::move(entries));
    }
    case ExprKind::Convert:
      return convert_value(e.type_arg, eval(e.args[0], env, fuel));
    case ExprKind::MapHO: {
      Value c = eval(e.args[0], env, fuel);
      if (c.kind == ValueKind::Map) {
        Value out = c;
        for (auto& [k, v] : out.entries)
          v = call_in(*e.fn, {tuple_v({k, v})}, env, fuel);
        return out;
      }
      std::vector<Value> mapped;
      mapped.reserve(c.elems.size());
      for (const auto& el : c.elems)
        mapped.push_back(call_in(*e.fn, {el}, env, fuel));
      return c.kind == ValueKind::Set ? set_v(std::move(mapped))
                                      : list_v(std::move(mapped));
    }
    case ExprKind::FilterHO: {
      Value c = eval(e.args[0], env, fuel);
      if (c.kind == ValueKind::Map) {
        std::vector<std::pair<Value, Value>> kept;
        for (const auto& [k, v] : c.entries)
          if (call_in(*e.fn, {tuple_v({k, v})}, env, fuel).b)
            kept.emplace_back(k, v);
        return map_v(std::move(kept));
      }
      std::vector<Value> kept;
      for (const auto& el : c.elems)
        if (call_in(*e.fn, {el}, env, fuel).b) kept.push_back(el);
      return c.kind == ValueKind::Set ? set_v(std::move(kept))
                                      : list_v(std::move(kept));
    }
    case ExprKind::Zip: {
      Value a = eval(e.args[0], env, fuel);
      Value b = eval(e.args[1], env, fuel);
      if (a.elems.size() != b.elems.size())
        ev_err(EvalErrorKind::ZipLengthMismatch, "zip of unequal lengths");
      std::vector<Value> out;
      out.reserve(a.elems.size());
      for (size_t i = 0; i < a.elems.size(); ++i)
        out.push_back(tuple_v({a.elems[i], b.elems[i]}));
      return list_v(std::move(out));
    }
    case ExprKind::Fold: {
      Value acc = eval(e.args[0], env, fuel);
      Value c = eval(e.args[1], env, fuel);
      for (const auto& entry : collection_entries(c))
        acc = call_in(*e.fn, {acc, entry}, env, fuel);
      return acc;
    }
  }
  ev_err(EvalErrorKind::Internal, "unknown expression kind");
}

Value apply_fn(const Func& f, const std::vector<Value>& args, Fuel& fuel) {
  if (f.params.size() != args.size())
    ev_err(EvalErrorKind::Internal, "arity mismatch in application");
  Env env;
  for (size_t i = 0; i < args.size(); ++i)
    env = env.bind(f.params[i].first, args[i]);
  return eval(f.body, env, fuel);
}

Value apply_fn(const FuncPtr& f, const std::vector<Value>& args, Fuel& fuel) {
  return apply_fn(*f, args, fuel);
}

Value run_program(const Program& p, const DataFrame& d, Fuel& fuel) {
  std::vector<Value> rows = d.rows;
  for (const auto& step : p.pipeline) {
    std::vector<Value> next;
    next.reserve(rows.size());
    for (const auto& r : rows) {
      if (step.kind == StepKind::Select) {
        if (apply_fn(*step.fn, {r}, fuel).b) next.push_back(r);
      } else {
        next.push_back(apply_fn(*step.fn, {r}, fuel));
      }
    }
    rows = std::move(next);
  }
  Env env;
  Value acc = eval(p.init, env, fuel);
  return fold_rows(*p.accumulator, std::move(acc), rows, fuel);
}

Value fold_rows(const Func& f, Value state, const std::vector<Value>& rows,
                Fuel& fuel) {
  for (const auto& r : rows) state = apply_fn(f, {state, r}, fuel);
  return state;
}

}  // namespace homcalc
