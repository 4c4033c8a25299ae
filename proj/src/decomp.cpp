#include "homcalc/decomp.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "homcalc/parse.hpp"

namespace homcalc {

FuncPtr id_fn(const std::string& name, const Type& t) {
  return make_fn({{name, t}}, var_e(name));
}

namespace {

void note(std::vector<std::string>* trace, const char* rule) {
  if (trace) trace->push_back(rule);
}

Expr true_e() { return const_e(bool_v(true)); }

bool is_true(const Expr& e) {
  return e.kind == ExprKind::Const && e.constant.kind == ValueKind::Bool &&
         e.constant.b;
}

// Peephole: projections of literal tuples collapse so fused map/filter
// bodies stay readable.
Expr simp(Expr e) {
  for (auto& a : e.args) a = simp(std::move(a));
  if (e.fn) {
    auto f = std::make_shared<Func>(*e.fn);
    f->body = simp(f->body);
    e.fn = f;
  }
  if (e.kind == ExprKind::Proj && e.args[0].kind == ExprKind::TupleE) {
    if (e.index >= 1 && e.index <= static_cast<int>(e.args[0].args.size()))
      return e.args[0].args[e.index - 1];
  }
  return e;
}

DecompExpr plain(Expr e) {
  DecompExpr d;
  d.kind = DecompKind::Plain;
  d.plain = std::move(e);
  return d;
}

struct Ctx {
  std::string state_name, row_name;
  std::set<std::string> used_names;
  int fresh_counter = 0;
  std::vector<std::string>* trace = nullptr;

  std::string fresh(const std::string& stem) {
    std::string name;
    do {
      name = stem + std::to_string(++fresh_counter);
    } while (used_names.count(name));
    used_names.insert(name);
    return name;
  }
};

void collect_names(const Expr& e, std::set<std::string>& out) {
  if (e.kind == ExprKind::Var) out.insert(e.var);
  for (const auto& a : e.args) collect_names(a, out);
  if (e.fn) {
    for (const auto& [n, t] : e.fn->params) out.insert(n);
    collect_names(e.fn->body, out);
  }
}

// Decomposition of a (typechecked) body expression.
DecompExpr decomp_expr(const Expr& e, Ctx& ctx);

// Fuses a transform function into an iteration body. For map-kind sources
// the function sees the (key, value) entry and yields the new value.
Expr fuse_into_body(const Func& fn, const Expr& body, const DecompExpr& iter,
                    bool source_is_map) {
  const std::string& param = fn.params[0].first;
  Expr arg = source_is_map
                 ? tuple_e({proj_e(1, var_e(iter.iter_var)), body})
                 : body;
  return simp(subst(fn.body, param, arg));
}

DecompExpr decomp_expr(const Expr& e, Ctx& ctx) {
  const Type& t = e.type;

  // Tuple-typed conditionals whose test depends only on the row distribute
  // into the components, so the tuple rule below still applies.
  if (e.kind == ExprKind::Ite && t.kind == TypeKind::Tuple) {
    std::set<std::string> names;
    collect_names(e.args[0], names);
    bool row_only = !names.count(ctx.state_name);
    if (row_only) {
      note(ctx.trace, "Decomp-Ite-Distribute");
      std::vector<Expr> comps;
      for (int i = 1; i <= static_cast<int>(t.args.size()); ++i) {
        Expr c = ite_e(e.args[0], simp(proj_e(i, e.args[1])),
                       simp(proj_e(i, e.args[2])));
        c.type = t.args[i - 1];
        c.typed = true;
        comps.push_back(std::move(c));
      }
      Expr tup = tuple_e(std::move(comps));
      tup.type = t;
      tup.typed = true;
      return decomp_expr(tup, ctx);
    }
  }

  if (e.kind == ExprKind::TupleE) {
    note(ctx.trace, "Decomp-Tuple");
    DecompExpr d;
    d.kind = DecompKind::TupleD;
    for (const auto& a : e.args) d.comps.push_back(decomp_expr(a, ctx));
    return d;
  }

  if (t.is_collection()) {
    if (e.kind == ExprKind::Var || e.kind == ExprKind::Proj) {
      note(ctx.trace, "Decomp-Collection");
      DecompExpr d;
      d.kind = DecompKind::CollIterBound;
      d.iter_var = ctx.fresh("e");
      d.iter_var_type = t.kind == TypeKind::Map
                            ? tuple_type({t.args[0], t.args[1]})
                            : t.args[0];
      Expr body = t.kind == TypeKind::Map ? proj_e(2, var_e(d.iter_var))
                                          : var_e(d.iter_var);
      d.body = std::make_shared<DecompExpr>(plain(std::move(body)));
      d.guard = true_e();
      d.source = e;
      return d;
    }
    if (e.kind == ExprKind::MapHO) {
      DecompExpr inner = decomp_expr(e.args[0], ctx);
      if (inner.kind == DecompKind::CollIterBound &&
          inner.body->kind == DecompKind::Plain) {
        note(ctx.trace, "Decomp-Map");
        bool src_map = e.args[0].type.kind == TypeKind::Map;
        Expr new_body = fuse_into_body(*e.fn, inner.body->plain, inner, src_map);
        inner.body = std::make_shared<DecompExpr>(plain(std::move(new_body)));
        return inner;
      }
      return plain(e);
    }
    if (e.kind == ExprKind::FilterHO) {
      DecompExpr inner = decomp_expr(e.args[0], ctx);
      if (inner.kind == DecompKind::CollIterBound &&
          inner.body->kind == DecompKind::Plain) {
        note(ctx.trace, "Decomp-Filter");
        bool src_map = e.args[0].type.kind == TypeKind::Map;
        Expr pred = fuse_into_body(*e.fn, inner.body->plain, inner, src_map);
        inner.guard = is_true(inner.guard)
                          ? pred
                          : call_e(Builtin::And, {inner.guard, pred});
        return inner;
      }
      return plain(e);
    }
    return plain(e);
  }

  note(ctx.trace, "Decomp-BaseType");
  return plain(e);
}

// Wraps the row binder around a decomposed body: components and iteration
// bodies each become functions of the binder, with an identity destructor.
DecompExpr wrap_binder(const std::string& name, const Type& t, DecompExpr d,
                       Ctx& ctx) {
  switch (d.kind) {
    case DecompKind::TupleD: {
      for (auto& c : d.comps) c = wrap_binder(name, t, std::move(c), ctx);
      return d;
    }
    case DecompKind::CollIterBound: {
      *d.body = wrap_binder(name, t, std::move(*d.body), ctx);
      return d;
    }
    default: {
      DecompExpr out;
      out.kind = DecompKind::FnComp;
      out.binder = name;
      out.binder_type = t;
      out.body = std::make_shared<DecompExpr>(std::move(d));
      out.destructor = id_fn(name, t);
      return out;
    }
  }
}

// --- occurrence analysis for tuple grouping --------------------------------

// Bodies are held by shared_ptr; clone before any in-place rewriting.
DecompExpr deep_clone(const DecompExpr& d) {
  DecompExpr out = d;
  if (d.body) out.body = std::make_shared<DecompExpr>(deep_clone(*d.body));
  for (size_t i = 0; i < out.comps.size(); ++i)
    out.comps[i] = deep_clone(d.comps[i]);
  return out;
}

void replace_in_decomp(DecompExpr& d, const Expr& pattern, const Expr& repl) {
  switch (d.kind) {
    case DecompKind::Plain:
      d.plain = replace_subexpr(d.plain, pattern, repl);
      break;
    case DecompKind::FnComp:
      replace_in_decomp(*d.body, pattern, repl);
      break;
    case DecompKind::TupleD:
      for (auto& c : d.comps) replace_in_decomp(c, pattern, repl);
      break;
    case DecompKind::CollIterBound:
      replace_in_decomp(*d.body, pattern, repl);
      d.guard = replace_subexpr(d.guard, pattern, repl);
      d.source = replace_subexpr(d.source, pattern, repl);
      break;
    case DecompKind::CollIterFree:
      replace_in_decomp(*d.body, pattern, repl);
      break;
  }
}

void collect_names_decomp(const DecompExpr& d, std::set<std::string>& out) {
  switch (d.kind) {
    case DecompKind::Plain:
      collect_names(d.plain, out);
      break;
    case DecompKind::FnComp:
      out.insert(d.binder);
      collect_names_decomp(*d.body, out);
      break;
    case DecompKind::TupleD:
      for (const auto& c : d.comps) collect_names_decomp(c, out);
      break;
    case DecompKind::CollIterBound:
      out.insert(d.iter_var);
      collect_names_decomp(*d.body, out);
      collect_names(d.guard, out);
      collect_names(d.source, out);
      break;
    case DecompKind::CollIterFree:
      out.insert(d.iter_var);
      collect_names_decomp(*d.body, out);
      if (d.guard_fn) collect_names(d.guard_fn->body, out);
      break;
  }
}

bool decomp_mentions(const DecompExpr& d, const std::string& name) {
  switch (d.kind) {
    case DecompKind::Plain:
      return occurs_free(d.plain, name);
    case DecompKind::FnComp:
      return decomp_mentions(*d.body, name);
    case DecompKind::TupleD:
      for (const auto& c : d.comps)
        if (decomp_mentions(c, name)) return true;
      return false;
    case DecompKind::CollIterBound:
      return decomp_mentions(*d.body, name) || occurs_free(d.guard, name) ||
             occurs_free(d.source, name);
    case DecompKind::CollIterFree:
      return decomp_mentions(*d.body, name);
  }
  return false;
}

// Indices i such that (proj i binder) occurs in the component; whole=true if
// the binder also occurs outside any projection.
void component_reads(const DecompExpr& d, const std::string& binder, int arity,
                     std::set<int>& indices, bool& whole) {
  DecompExpr probe = deep_clone(d);
  for (int i = 1; i <= arity; ++i) {
    Expr pattern = proj_e(i, var_e(binder));
    Expr marker = var_e("#read" + std::to_string(i));
    replace_in_decomp(probe, pattern, marker);
  }
  for (int i = 1; i <= arity; ++i)
    if (decomp_mentions(probe, "#read" + std::to_string(i))) indices.insert(i);
  if (decomp_mentions(probe, binder)) whole = true;
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

FuncPtr compose_destructor(const FuncPtr& outer, const Expr& path_of_binder,
                           const std::string& binder) {
  // outer : orig -> binder_value; result : orig -> path[binder := outer body]
  Expr body = subst(path_of_binder, binder, outer->body);
  return make_fn(outer->params, simp(body));
}

}  // namespace

Expr replace_subexpr(const Expr& e, const Expr& pattern,
                     const Expr& replacement) {
  if (expr_equal(e, pattern)) return replacement;
  // Identify the pattern's root variable to respect shadowing.
  const Expr* root = &pattern;
  while (!root->args.empty()) root = &root->args[0];
  std::string root_var = root->kind == ExprKind::Var ? root->var : "";
  Expr out = e;
  for (auto& a : out.args) a = replace_subexpr(a, pattern, replacement);
  if (out.fn) {
    bool shadowed = false;
    for (const auto& [n, t] : out.fn->params)
      if (n == root_var) shadowed = true;
    if (!shadowed) {
      auto f = std::make_shared<Func>(*out.fn);
      f->body = replace_subexpr(f->body, pattern, replacement);
      out.fn = f;
    }
  }
  return out;
}

namespace {

DecompExpr simplify_impl(const std::string& binder, const Type& binder_type,
                         const FuncPtr& destructor, DecompExpr body,
                         bool allow_split, bool allow_tuple_split,
                         std::vector<std::string>* trace) {
  // C-Ind: an iteration whose source is a projection path of the binder and
  // whose body/guard do not otherwise mention it becomes destructor-bound.
  if (allow_split && body.kind == DecompKind::CollIterBound) {
    const Expr& src = body.source;
    const Expr* root = &src;
    while (root->kind == ExprKind::Proj) root = &root->args[0];
    bool rooted = root->kind == ExprKind::Var && root->var == binder;
    if (rooted && !decomp_mentions(*body.body, binder) &&
        !occurs_free(body.guard, binder)) {
      note(trace, "Simplify-C-Ind");
      DecompExpr out;
      out.kind = DecompKind::CollIterFree;
      out.body = body.body;
      out.iter_var = body.iter_var;
      out.iter_var_type = body.iter_var_type;
      out.guard_fn = make_fn({{body.iter_var, body.iter_var_type}}, body.guard);
      out.destructor = compose_destructor(destructor, src, binder);
      return out;
    }
  }

  // Tuple-Inductive with grouping: split components by the state slots they
  // read; each closed group gets a fresh binder over just those slots.
  // Nested tuples split one level at a time: the recursion below keeps
  // collection rebinding but leaves deeper tuple structure for the next
  // round of decomposition.
  if (allow_split && allow_tuple_split && body.kind == DecompKind::TupleD &&
      binder_type.kind == TypeKind::Tuple &&
      body.comps.size() == binder_type.args.size()) {
    int n = static_cast<int>(body.comps.size());
    std::vector<std::set<int>> reads(n);
    bool whole = false;
    for (int i = 0; i < n; ++i)
      component_reads(body.comps[i], binder, n, reads[i], whole);

    if (!whole) {
      UnionFind uf(n);
      for (int i = 0; i < n; ++i)
        for (int j : reads[i]) uf.unite(i, j - 1);
      std::vector<std::vector<int>> groups;  // 1-based indices, ordered
      std::vector<int> group_of(n, -1);
      for (int i = 0; i < n; ++i) {
        int r = uf.find(i);
        if (group_of[r] < 0) {
          group_of[r] = static_cast<int>(groups.size());
          groups.emplace_back();
        }
        groups[group_of[r]].push_back(i + 1);
      }
      if (groups.size() > 1) {
        note(trace, "Simplify-Tuple-Inductive");
        DecompExpr out;
        out.kind = DecompKind::TupleD;
        std::set<std::string> names;
        names.insert(binder);
        collect_names_decomp(body, names);
        int counter = 0;
        for (const auto& g : groups) {
          std::string v;
          do {
            v = "v" + std::to_string(++counter);
          } while (names.count(v));

          Type vt = g.size() == 1
                        ? binder_type.args[g[0] - 1]
                        : [&] {
                            std::vector<Type> parts;
                            for (int idx : g)
                              parts.push_back(binder_type.args[idx - 1]);
                            return tuple_type(std::move(parts));
                          }();
          // Substitute slot reads with the fresh binder (or its parts).
          std::vector<DecompExpr> members;
          for (int idx : g) members.push_back(deep_clone(body.comps[idx - 1]));
          for (size_t pos = 0; pos < g.size(); ++pos) {
            Expr pattern = proj_e(g[pos], var_e(binder));
            Expr repl = g.size() == 1
                            ? var_e(v)
                            : proj_e(static_cast<int>(pos) + 1, var_e(v));
            for (auto& m : members) replace_in_decomp(m, pattern, repl);
          }
          // Destructor selecting this group's slots from the original state.
          Expr path = g.size() == 1
                          ? proj_e(g[0], var_e(binder))
                          : [&] {
                              std::vector<Expr> parts;
                              for (int idx : g)
                                parts.push_back(proj_e(idx, var_e(binder)));
                              return tuple_e(std::move(parts));
                            }();
          FuncPtr d_g = compose_destructor(destructor, path, binder);

          DecompExpr member = g.size() == 1 ? std::move(members[0]) : [&] {
            DecompExpr td;
            td.kind = DecompKind::TupleD;
            td.comps = std::move(members);
            return td;
          }();
          out.comps.push_back(simplify_impl(v, vt, d_g, std::move(member),
                                            allow_split,
                                            /*allow_tuple_split=*/false,
                                            trace));
          out.groups.push_back(g);
        }
        return out;
      }
    }
  }

  note(trace, "Simplify-Function");
  DecompExpr out;
  out.kind = DecompKind::FnComp;
  out.binder = binder;
  out.binder_type = binder_type;
  out.body = std::make_shared<DecompExpr>(std::move(body));
  out.destructor = destructor;
  return out;
}

}  // namespace

DecompExpr simplify_fn(const std::string& binder, const Type& binder_type,
                       const FuncPtr& destructor, DecompExpr body,
                       bool allow_split, std::vector<std::string>* trace) {
  return simplify_impl(binder, binder_type, destructor, std::move(body),
                       allow_split, allow_split, trace);
}

DecompExpr decompose(const Func& f, std::vector<std::string>* trace) {
  Ctx ctx;
  ctx.trace = trace;
  if (f.params.size() != 2)
    return plain(f.body);
  ctx.state_name = f.params[0].first;
  ctx.row_name = f.params[1].first;
  collect_names(f.body, ctx.used_names);

  DecompExpr body = decomp_expr(f.body, ctx);
  note(trace, "Decomp-Lam-Ind");
  DecompExpr with_row =
      wrap_binder(f.params[1].first, f.params[1].second, std::move(body), ctx);
  note(trace, "Decomp-Lam-Ind");
  return simplify_fn(f.params[0].first, f.params[0].second,
                     id_fn(f.params[0].first, f.params[0].second),
                     std::move(with_row), /*allow_split=*/true, trace);
}

namespace {

Expr to_canonical(const DecompExpr& d, const Expr& state_carrier);

Expr fncomp_to_expr(const DecompExpr& d, const Expr& state_carrier) {
  // binder := destructor(original state); inner row binders are identity.
  Expr bound = d.destructor ? simp(subst(d.destructor->body,
                                         d.destructor->params[0].first,
                                         state_carrier))
                            : state_carrier;
  Expr inner = to_canonical(*d.body, state_carrier);
  return simp(subst(inner, d.binder, bound));
}

Expr to_canonical(const DecompExpr& d, const Expr& state_carrier) {
  switch (d.kind) {
    case DecompKind::Plain:
      return d.plain;
    case DecompKind::FnComp: {
      if (d.destructor && expr_equal(d.destructor->body,
                                     var_e(d.destructor->params[0].first))) {
        // Identity destructor (row binder wrap): nothing to substitute.
        return to_canonical(*d.body, state_carrier);
      }
      return fncomp_to_expr(d, state_carrier);
    }
    case DecompKind::TupleD: {
      std::vector<Expr> comps;
      for (const auto& c : d.comps)
        comps.push_back(to_canonical(c, state_carrier));
      // Grouped components produced tuples over their slots; flatten back to
      // the original component order.
      if (!d.groups.empty()) {
        std::vector<std::pair<int, Expr>> placed;
        for (size_t gi = 0; gi < d.groups.size(); ++gi) {
          const auto& g = d.groups[gi];
          if (g.size() == 1) {
            placed.emplace_back(g[0], comps[gi]);
          } else {
            for (size_t pos = 0; pos < g.size(); ++pos)
              placed.emplace_back(g[pos],
                                  simp(proj_e(static_cast<int>(pos) + 1,
                                              comps[gi])));
          }
        }
        std::sort(placed.begin(), placed.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        std::vector<Expr> ordered;
        for (auto& [idx, ex] : placed) ordered.push_back(std::move(ex));
        return tuple_e(std::move(ordered));
      }
      return tuple_e(std::move(comps));
    }
    case DecompKind::CollIterBound: {
      Expr body = to_canonical(*d.body, state_carrier);
      FuncPtr mapper = make_fn({{d.iter_var, d.iter_var_type}}, body);
      FuncPtr pred = make_fn({{d.iter_var, d.iter_var_type}}, d.guard);
      return map_e(mapper, filter_e(pred, d.source));
    }
    case DecompKind::CollIterFree: {
      Expr src = simp(subst(d.destructor->body, d.destructor->params[0].first,
                            state_carrier));
      Expr body = to_canonical(*d.body, state_carrier);
      FuncPtr mapper = make_fn({{d.iter_var, d.iter_var_type}}, body);
      return map_e(mapper, filter_e(d.guard_fn, src));
    }
  }
  return d.plain;
}

}  // namespace

Expr to_canonical_expr(const DecompExpr& d, const Expr& state_carrier) {
  return simp(to_canonical(d, state_carrier));
}

FuncPtr convert_back(const DecompExpr& d, const Func& original) {
  Expr carrier = var_e(original.params[0].first);
  Expr body = to_canonical(d, carrier);
  return make_fn(original.params, simp(body));
}

bool decomposable(const DecompExpr& d) {
  return d.kind == DecompKind::TupleD || d.kind == DecompKind::CollIterFree;
}

std::string dump_decomp(const DecompExpr& d, int indent) {
  std::string pad(indent * 2, ' ');
  switch (d.kind) {
    case DecompKind::Plain:
      return pad + "Plain " + print_expr(d.plain);
    case DecompKind::FnComp:
      return pad + "FnComp binder=" + d.binder +
             " destructor=" + print_fn(*d.destructor) + "\n" +
             dump_decomp(*d.body, indent + 1);
    case DecompKind::TupleD: {
      std::string out = pad + "Tuple";
      for (size_t i = 0; i < d.comps.size(); ++i) {
        out += "\n";
        if (i < d.groups.size()) {
          out += pad + "  group {";
          for (size_t j = 0; j < d.groups[i].size(); ++j)
            out += (j ? "," : "") + std::to_string(d.groups[i][j]);
          out += "}\n";
        }
        out += dump_decomp(d.comps[i], indent + 1);
      }
      return out;
    }
    case DecompKind::CollIterBound:
      return pad + "Iter " + d.iter_var + " in " + print_expr(d.source) +
             " guard=" + print_expr(d.guard) + "\n" +
             dump_decomp(*d.body, indent + 1);
    case DecompKind::CollIterFree:
      return pad + "IterFree " + d.iter_var +
             " destructor=" + print_fn(*d.destructor) +
             " guard=" + print_fn(*d.guard_fn) + "\n" +
             dump_decomp(*d.body, indent + 1);
  }
  return pad + "?";
}

}  // namespace homcalc
