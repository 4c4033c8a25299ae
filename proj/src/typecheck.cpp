#include "homcalc/typecheck.hpp"

namespace homcalc {

TypeEnv TypeEnv::bind(const std::string& name, Type t) const {
  TypeEnv out;
  auto node = std::make_shared<Node>();
  node->name = name;
  node->type = std::move(t);
  node->next = head_;
  out.head_ = node;
  return out;
}

const Type* TypeEnv::lookup(const std::string& name) const {
  for (const Node* n = head_.get(); n; n = n->next.get())
    if (n->name == name) return &n->type;
  return nullptr;
}

namespace {

[[noreturn]] void err(const Expr& e, const std::string& msg) {
  throw TypeError(msg + " at " + std::to_string(e.line) + ":" +
                  std::to_string(e.col));
}

Type value_type(const Value& v, const Expr& site) {
  switch (v.kind) {
    case ValueKind::Int: return int_type();
    case ValueKind::Bool: return bool_type();
    case ValueKind::Float: return float_type();
    case ValueKind::Str: return str_type();
    default:
      err(site, "collection constants must be built with constructors");
  }
}

bool numeric(const Type& t) {
  return t.kind == TypeKind::Int || t.kind == TypeKind::Float;
}

Type check_builtin(const Expr& e, const std::vector<Type>& at) {
  auto same = [&](const std::string& what) {
    if (!(at[0] == at[1])) err(e, what + " requires equal operand types");
  };
  switch (e.op) {
    case Builtin::Add:
    case Builtin::Sub:
    case Builtin::Mul:
    case Builtin::Div:
      same("arithmetic");
      if (!numeric(at[0])) err(e, "arithmetic requires int or float");
      return at[0];
    case Builtin::Min:
    case Builtin::Max:
      same("min/max");
      if (!numeric(at[0])) err(e, "min/max requires int or float");
      return at[0];
    case Builtin::Lt:
    case Builtin::Le:
    case Builtin::Gt:
    case Builtin::Ge:
      same("comparison");
      if (!numeric(at[0]) && at[0].kind != TypeKind::Str)
        err(e, "ordering comparison requires int, float, or str");
      return bool_type();
    case Builtin::Eq:
      same("equality");
      if (at[0].kind == TypeKind::Fn || at[0].kind == TypeKind::DataFrame)
        err(e, "equality is not defined on functions or dataframes");
      return bool_type();
    case Builtin::And:
    case Builtin::Or:
      same("logic");
      if (at[0].kind != TypeKind::Bool) err(e, "logic requires bool");
      return bool_type();
    case Builtin::Not:
      if (at[0].kind != TypeKind::Bool) err(e, "not requires bool");
      return bool_type();
    case Builtin::StrCat:
      same("strcat");
      if (at[0].kind != TypeKind::Str) err(e, "strcat requires str");
      return str_type();
    case Builtin::StrLen:
      if (at[0].kind != TypeKind::Str) err(e, "strlen requires str");
      return int_type();
    case Builtin::Get:
      if (at[0].kind != TypeKind::Map) err(e, "get requires a map");
      if (!(at[1] == at[0].args[0])) err(e, "get key type mismatch");
      return at[0].args[1];
    case Builtin::Contains:
      if (at[0].kind != TypeKind::Map) err(e, "contains requires a map");
      if (!(at[1] == at[0].args[0])) err(e, "contains key type mismatch");
      return bool_type();
    case Builtin::Fill:
      // First argument may hold the null absence marker; result is the
      // second argument's type.
      if (at[1].kind == TypeKind::Fn || at[1].kind == TypeKind::DataFrame)
        err(e, "fill default must be a first-order value");
      return at[1];
    case Builtin::Concat:
      same("concat");
      if (at[0].kind != TypeKind::List) err(e, "concat requires lists");
      return at[0];
    case Builtin::Len:
      if (at[0].kind != TypeKind::List) err(e, "len requires a list");
      return int_type();
  }
  err(e, "unknown builtin");
}

Type check_fn_against(const Func& f, const std::vector<Type>& arg_types,
                      const TypeEnv& env, const Expr& site);

Expr check(const Expr& e, const TypeEnv& env);

// Typechecks f's body with params bound; verifies declared params match the
// expected argument types.
Type check_fn_against(const Func& f, const std::vector<Type>& arg_types,
                      const TypeEnv& env, const Expr& site) {
  if (f.params.size() != arg_types.size())
    err(site, "function arity mismatch: expected " +
                  std::to_string(arg_types.size()) + ", got " +
                  std::to_string(f.params.size()));
  TypeEnv inner = env;
  for (size_t i = 0; i < f.params.size(); ++i) {
    if (!(f.params[i].second == arg_types[i]))
      err(site, "parameter '" + f.params[i].first + "' declared " +
                    type_to_string(f.params[i].second) + " but applied to " +
                    type_to_string(arg_types[i]));
    inner = inner.bind(f.params[i].first, f.params[i].second);
  }
  Expr body = check(f.body, inner);
  return body.type;
}

// Re-checks the lambda in place so its body carries annotations.
Type annotate_fn(Func& f, const TypeEnv& env) {
  TypeEnv inner = env;
  for (const auto& [name, t] : f.params) inner = inner.bind(name, t);
  f.body = check(f.body, inner);
  return f.body.type;
}

FuncPtr annotated(const FuncPtr& fn, const TypeEnv& env) {
  auto copy = std::make_shared<Func>(*fn);
  annotate_fn(*copy, env);
  return copy;
}

Expr check(const Expr& e, const TypeEnv& env) {
  Expr out = e;
  std::vector<Type> at;
  if (e.kind != ExprKind::Ite) {  // ITE handled below for clarity
    for (size_t i = 0; i < e.args.size(); ++i) {
      out.args[i] = check(e.args[i], env);
      at.push_back(out.args[i].type);
    }
  }
  switch (e.kind) {
    case ExprKind::Const:
      out.type = value_type(e.constant, e);
      break;
    case ExprKind::Default:
      if (e.type_arg.kind == TypeKind::Fn ||
          e.type_arg.kind == TypeKind::DataFrame)
        err(e, "no default value for " + type_to_string(e.type_arg));
      if (e.type_arg.kind == TypeKind::Map &&
          !valid_key_type(e.type_arg.args[0]))
        err(e, "map keys must be scalars or tuples of scalars");
      out.type = e.type_arg;
      break;
    case ExprKind::Var: {
      const Type* t = env.lookup(e.var);
      if (!t) err(e, "unbound variable '" + e.var + "'");
      out.type = *t;
      break;
    }
    case ExprKind::Call:
      out.type = check_builtin(out, at);
      break;
    case ExprKind::Apply: {
      out.fn = annotated(e.fn, env);
      out.type = check_fn_against(*out.fn, at, env, e);
      break;
    }
    case ExprKind::Ite: {
      out.args[0] = check(e.args[0], env);
      out.args[1] = check(e.args[1], env);
      out.args[2] = check(e.args[2], env);
      if (out.args[0].type.kind != TypeKind::Bool)
        err(e, "ite condition must be bool");
      if (!(out.args[1].type == out.args[2].type))
        err(e, "ite branches have different types: " +
                   type_to_string(out.args[1].type) + " vs " +
                   type_to_string(out.args[2].type));
      out.type = out.args[1].type;
      break;
    }
    case ExprKind::TupleE: {
      if (at.size() < 2) err(e, "tuple needs at least 2 elements");
      out.type = tuple_type(at);
      break;
    }
    case ExprKind::Proj: {
      if (at[0].kind != TypeKind::Tuple) err(e, "proj requires a tuple");
      if (e.index < 1 || e.index > static_cast<int>(at[0].args.size()))
        err(e, "proj index " + std::to_string(e.index) + " out of range for " +
                   type_to_string(at[0]));
      out.type = at[0].args[e.index - 1];
      break;
    }
    case ExprKind::Update: {
      if (at[0].kind != TypeKind::Map) err(e, "update requires a map");
      if (!valid_key_type(at[0].args[0]))
        err(e, "map keys must be scalars or tuples of scalars");
      if (!(at[1] == at[0].args[0])) err(e, "update key type mismatch");
      if (!(at[2] == at[0].args[1])) err(e, "update value type mismatch");
      out.type = at[0];
      break;
    }
    case ExprKind::Append: {
      if (at[0].kind != TypeKind::List) err(e, "append requires a list");
      if (!(at[1] == at[0].args[0])) err(e, "append element type mismatch");
      out.type = at[0];
      break;
    }
    case ExprKind::Insert: {
      if (at[0].kind != TypeKind::Set) err(e, "insert requires a set");
      if (!(at[1] == at[0].args[0])) err(e, "insert element type mismatch");
      out.type = at[0];
      break;
    }
    case ExprKind::UnionE: {
      if (at[0].kind != TypeKind::Set || !(at[0] == at[1]))
        err(e, "union requires two sets of the same type");
      out.type = at[0];
      break;
    }
    case ExprKind::OuterJoin: {
      if (at[0].kind != TypeKind::Map || !(at[0] == at[1]))
        err(e, "outer join requires two maps of the same type");
      out.type = map_type(at[0].args[0],
                          tuple_type({at[0].args[1], at[0].args[1]}));
      break;
    }
    case ExprKind::Convert: {
      const Type& src = at[0];
      const Type& dst = e.type_arg;
      bool ok = false;
      if (src.kind == TypeKind::List && dst.kind == TypeKind::Map)
        ok = dst.args[0] == int_type() && dst.args[1] == src.args[0];
      else if (src.kind == TypeKind::Set && dst.kind == TypeKind::Map)
        ok = dst.args[0] == src.args[0] && dst.args[1] == src.args[0];
      else if (src.kind == TypeKind::Map && dst.kind == TypeKind::List)
        ok = src.args[0] == int_type() && dst.args[0] == src.args[1];
      else if (src.kind == TypeKind::Map && dst.kind == TypeKind::Set)
        ok = dst.args[0] == src.args[0];
      else if (src.kind == TypeKind::Map && dst == src)
        ok = true;
      if (!ok)
        err(e, "no conversion from " + type_to_string(src) + " to " +
                   type_to_string(dst));
      out.type = dst;
      break;
    }
    case ExprKind::MapHO: {
      if (!at[0].is_collection()) err(e, "map requires a collection");
      Type elem = at[0].kind == TypeKind::Map
                      ? tuple_type({at[0].args[0], at[0].args[1]})
                      : at[0].args[0];
      out.fn = annotated(e.fn, env);
      Type ret = check_fn_against(*out.fn, {elem}, env, e);
      if (at[0].kind == TypeKind::Map)
        out.type = map_type(at[0].args[0], ret);  // keys preserved
      else if (at[0].kind == TypeKind::List)
        out.type = list_type(ret);
      else
        out.type = set_type(ret);
      break;
    }
    case ExprKind::FilterHO: {
      if (!at[0].is_collection()) err(e, "filter requires a collection");
      Type elem = at[0].kind == TypeKind::Map
                      ? tuple_type({at[0].args[0], at[0].args[1]})
                      : at[0].args[0];
      out.fn = annotated(e.fn, env);
      Type ret = check_fn_against(*out.fn, {elem}, env, e);
      if (ret.kind != TypeKind::Bool) err(e, "filter predicate must be bool");
      out.type = at[0];
      break;
    }
    case ExprKind::Zip: {
      if (at[0].kind != TypeKind::List || at[1].kind != TypeKind::List)
        err(e, "zip requires two lists");
      out.type = list_type(tuple_type({at[0].args[0], at[1].args[0]}));
      break;
    }
    case ExprKind::Fold: {
      // args = [init, coll]
      if (!at[1].is_collection()) err(e, "fold requires a collection");
      Type elem = at[1].kind == TypeKind::Map
                      ? tuple_type({at[1].args[0], at[1].args[1]})
                      : at[1].args[0];
      out.fn = annotated(e.fn, env);
      Type ret = check_fn_against(*out.fn, {at[0], elem}, env, e);
      if (!(ret == at[0]))
        err(e, "fold function must return the accumulator type");
      out.type = at[0];
      break;
    }
  }
  out.typed = true;
  return out;
}

}  // namespace

Expr typecheck_expr(const Expr& e, const TypeEnv& env) {
  return check(e, env);
}

Type typecheck_fn(Func& f, const TypeEnv& env) {
  Type ret = annotate_fn(f, env);
  std::vector<Type> params;
  for (const auto& [n, t] : f.params) params.push_back(t);
  return fn_type(std::move(params), ret);
}

Program typecheck_program(const Program& p) {
  Program out = p;
  if (out.input_type.kind != TypeKind::DataFrame)
    throw TypeError("program input must have a dataframe type");
  Type row = out.input_type.args[0];
  if (!valid_row_type(row))
    throw TypeError("dataframe rows must be first-order values");
  TypeEnv env;
  for (auto& step : out.pipeline) {
    auto fn = std::make_shared<Func>(*step.fn);
    Type ret = check_fn_against(*fn, {row}, env, fn->body);
    annotate_fn(*fn, env);
    step.fn = fn;
    if (step.kind == StepKind::Select) {
      if (ret.kind != TypeKind::Bool)
        throw TypeError("select predicate must return bool");
    } else {
      if (!valid_row_type(ret))
        throw TypeError("project must return a first-order row");
      row = ret;
    }
  }
  out.row_type = row;

  out.init = check(out.init, env);
  Type state = out.init.type;
  auto acc = std::make_shared<Func>(*out.accumulator);
  Type ret = check_fn_against(*acc, {state, row}, env, acc->body);
  annotate_fn(*acc, env);
  out.accumulator = acc;
  if (!(ret == state))
    throw TypeError("accumulator must return the state type " +
                    type_to_string(state) + ", got " + type_to_string(ret));
  out.state_type = state;
  out.typed = true;
  return out;
}

}  // namespace homcalc
