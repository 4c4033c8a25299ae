#ifndef HOMCALC_DECOMP_HPP
#define HOMCALC_DECOMP_HPP

#include <memory>
#include <vector>

#include "homcalc/ast.hpp"

namespace homcalc {

// ---------------------------------------------------------------------------
// Decomposed expressions. An accumulator body is rewritten bottom-up into one
// of five forms; binder simplification then replaces tuple projections of the
// state with fresh, simpler-typed variables and rebinds collection iterations
// through destructor functions.
// ---------------------------------------------------------------------------

enum class DecompKind {
  Plain,          // an ordinary expression
  FnComp,         // (lambda binder. body) composed with a destructor
  TupleD,         // componentwise decomposition of a tuple
  CollIterBound,  // iteration body/guard over elements of a source expression
  CollIterFree,   // iteration whose source is abstracted via a destructor
};

struct DecompExpr {
  DecompKind kind = DecompKind::Plain;

  Expr plain;  // Plain

  // FnComp
  std::string binder;
  Type binder_type;
  std::shared_ptr<DecompExpr> body;  // also CollIter body
  FuncPtr destructor;                // FnComp; CollIterFree

  // TupleD: components in original order plus the 1-based state indices each
  // grouped component covers (empty until state simplification runs).
  std::vector<DecompExpr> comps;
  std::vector<std::vector<int>> groups;

  // Collection iteration. The body transforms one element (the iteration
  // variable); for map sources the body produces the entry's new value.
  std::string iter_var;
  Type iter_var_type;
  Expr guard;     // CollIterBound: boolean over iter_var (and outer binders)
  Expr source;    // CollIterBound
  FuncPtr guard_fn;  // CollIterFree
};

/// Rewrites a two-parameter accumulator into decomposed form. Requires a
/// typechecked function. Rule applications append their names to trace when
/// it is non-null.
DecompExpr decompose(const Func& f, std::vector<std::string>* trace = nullptr);

/// Binder simplification: rewrites (binder, destructor, body) so that nested
/// expressions receive the simplest input their uses allow. `allow_split`
/// enables tuple grouping and collection rebinding (used for the state
/// binder, not the row binder).
DecompExpr simplify_fn(const std::string& binder, const Type& binder_type,
                       const FuncPtr& destructor, DecompExpr body,
                       bool allow_split,
                       std::vector<std::string>* trace = nullptr);

/// Converts back to a standard two-parameter function in canonical form.
/// The result is semantically equivalent to the decomposed original.
FuncPtr convert_back(const DecompExpr& d, const Func& original);

/// Expression form of a decomposed body with binders resolved through their
/// destructors against the given state expression.
Expr to_canonical_expr(const DecompExpr& d, const Expr& state_carrier);

/// True if decomposition found structure worth splitting: a tuple that
/// separates into more than one group, or a collection iteration over the
/// state.
bool decomposable(const DecompExpr& d);

std::string dump_decomp(const DecompExpr& d, int indent = 0);

/// Identity function of the given parameter name/type.
FuncPtr id_fn(const std::string& name, const Type& t);

/// Replaces every occurrence of `pattern` (an expression whose root variable
/// is free) with `replacement`, skipping scopes that rebind that variable.
Expr replace_subexpr(const Expr& e, const Expr& pattern,
                     const Expr& replacement);

}  // namespace homcalc

#endif
