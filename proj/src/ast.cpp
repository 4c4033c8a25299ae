#include "homcalc/ast.hpp"

#include <algorithm>

namespace homcalc {

const char* builtin_name(Builtin b) {
  switch (b) {
    case Builtin::Add: return "+";
    case Builtin::Sub: return "-";
    case Builtin::Mul: return "*";
    case Builtin::Div: return "/";
    case Builtin::Lt: return "<";
    case Builtin::Le: return "<=";
    case Builtin::Gt: return ">";
    case Builtin::Ge: return ">=";
    case Builtin::Eq: return "=";
    case Builtin::And: return "and";
    case Builtin::Or: return "or";
    case Builtin::Not: return "not";
    case Builtin::Min: return "min";
    case Builtin::Max: return "max";
    case Builtin::StrCat: return "strcat";
    case Builtin::StrLen: return "strlen";
    case Builtin::Get: return "get";
    case Builtin::Contains: return "contains";
    case Builtin::Fill: return "fill";
    case Builtin::Concat: return "concat";
    case Builtin::Len: return "len";
  }
  return "?";
}

int builtin_arity(Builtin b) {
  switch (b) {
    case Builtin::Not:
    case Builtin::StrLen:
    case Builtin::Len:
      return 1;
    default:
      return 2;
  }
}

Expr const_e(Value v) {
  Expr e;
  e.kind = ExprKind::Const;
  e.constant = std::move(v);
  return e;
}
Expr default_e(Type t) {
  Expr e;
  e.kind = ExprKind::Default;
  e.type_arg = std::move(t);
  return e;
}
Expr var_e(std::string name) {
  Expr e;
  e.kind = ExprKind::Var;
  e.var = std::move(name);
  return e;
}
Expr call_e(Builtin op, std::vector<Expr> args) {
  Expr e;
  e.kind = ExprKind::Call;
  e.op = op;
  e.args = std::move(args);
  return e;
}
Expr apply_e(FuncPtr fn, std::vector<Expr> args) {
  Expr e;
  e.kind = ExprKind::Apply;
  e.fn = std::move(fn);
  e.args = std::move(args);
  return e;
}
Expr ite_e(Expr c, Expr t, Expr els) {
  Expr e;
  e.kind = ExprKind::Ite;
  e.args = {std::move(c), std::move(t), std::move(els)};
  return e;
}
Expr tuple_e(std::vector<Expr> elems) {
  Expr e;
  e.kind = ExprKind::TupleE;
  e.args = std::move(elems);
  return e;
}
Expr proj_e(int index, Expr sub) {
  Expr e;
  e.kind = ExprKind::Proj;
  e.index = index;
  e.args = {std::move(sub)};
  return e;
}
Expr update_e(Expr m, Expr k, Expr v) {
  Expr e;
  e.kind = ExprKind::Update;
  e.args = {std::move(m), std::move(k), std::move(v)};
  return e;
}
Expr append_e(Expr l, Expr x) {
  Expr e;
  e.kind = ExprKind::Append;
  e.args = {std::move(l), std::move(x)};
  return e;
}
Expr insert_e(Expr s, Expr x) {
  Expr e;
  e.kind = ExprKind::Insert;
  e.args = {std::move(s), std::move(x)};
  return e;
}
Expr union_e(Expr a, Expr b) {
  Expr e;
  e.kind = ExprKind::UnionE;
  e.args = {std::move(a), std::move(b)};
  return e;
}
Expr outer_join_e(Expr a, Expr b) {
  Expr e;
  e.kind = ExprKind::OuterJoin;
  e.args = {std::move(a), std::move(b)};
  return e;
}
Expr convert_e(Type target, Expr c) {
  Expr e;
  e.kind = ExprKind::Convert;
  e.type_arg = std::move(target);
  e.args = {std::move(c)};
  return e;
}
Expr map_e(FuncPtr fn, Expr coll) {
  Expr e;
  e.kind = ExprKind::MapHO;
  e.fn = std::move(fn);
  e.args = {std::move(coll)};
  return e;
}
Expr filter_e(FuncPtr fn, Expr coll) {
  Expr e;
  e.kind = ExprKind::FilterHO;
  e.fn = std::move(fn);
  e.args = {std::move(coll)};
  return e;
}
Expr zip_e(Expr a, Expr b) {
  Expr e;
  e.kind = ExprKind::Zip;
  e.args = {std::move(a), std::move(b)};
  return e;
}
Expr fold_e(FuncPtr fn, Expr init, Expr coll) {
  Expr e;
  e.kind = ExprKind::Fold;
  e.fn = std::move(fn);
  e.args = {std::move(init), std::move(coll)};
  return e;
}

FuncPtr make_fn(std::vector<std::pair<std::string, Type>> params, Expr body) {
  auto f = std::make_shared<Func>();
  f->params = std::move(params);
  f->body = std::move(body);
  return f;
}

namespace {

bool binds(const FuncPtr& fn, const std::string& name) {
  if (!fn) return false;
  for (const auto& [p, t] : fn->params)
    if (p == name) return true;
  return false;
}

}  // namespace

Expr subst(const Expr& e, const std::string& name, const Expr& replacement) {
  if (e.kind == ExprKind::Var) return e.var == name ? replacement : e;
  Expr out = e;
  for (auto& a : out.args) a = subst(a, name, replacement);
  if (out.fn && !binds(out.fn, name) && occurs_free(out.fn->body, name)) {
    auto f = std::make_shared<Func>(*out.fn);
    f->body = subst(f->body, name, replacement);
    out.fn = f;
  }
  return out;
}

bool occurs_free(const Expr& e, const std::string& name) {
  if (e.kind == ExprKind::Var) return e.var == name;
  for (const auto& a : e.args)
    if (occurs_free(a, name)) return true;
  if (e.fn && !binds(e.fn, name)) return occurs_free(e.fn->body, name);
  return false;
}

int expr_size(const Expr& e) {
  int n = 1;
  for (const auto& a : e.args) n += expr_size(a);
  if (e.fn) n += expr_size(e.fn->body);
  return n;
}

bool expr_equal(const Expr& a, const Expr& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case ExprKind::Const:
      if (!canon_eq(a.constant, b.constant)) return false;
      break;
    case ExprKind::Default:
    case ExprKind::Convert:
      if (a.type_arg != b.type_arg) return false;
      break;
    case ExprKind::Var:
      if (a.var != b.var) return false;
      break;
    case ExprKind::Call:
      if (a.op != b.op) return false;
      break;
    case ExprKind::Proj:
      if (a.index != b.index) return false;
      break;
    default:
      break;
  }
  if (a.args.size() != b.args.size()) return false;
  for (size_t i = 0; i < a.args.size(); ++i)
    if (!expr_equal(a.args[i], b.args[i])) return false;
  if (!a.fn != !b.fn) return false;
  if (a.fn) {
    if (a.fn->params.size() != b.fn->params.size()) return false;
    for (size_t i = 0; i < a.fn->params.size(); ++i) {
      if (a.fn->params[i].first != b.fn->params[i].first) return false;
      if (a.fn->params[i].second != b.fn->params[i].second) return false;
    }
    if (!expr_equal(a.fn->body, b.fn->body)) return false;
  }
  return true;
}

}  // namespace homcalc
