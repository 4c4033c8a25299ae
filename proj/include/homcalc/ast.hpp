#ifndef HOMCALC_AST_HPP
#define HOMCALC_AST_HPP

#include <memory>
#include <string>
#include <vector>

#include "homcalc/value.hpp"

namespace homcalc {

// ---------------------------------------------------------------------------
// Expressions mirror the aggregation DSL: constants, defaults, variables,
// built-in calls, lambda application, conditionals, tuples/projections,
// collection constructors, outer join, conversions, and the higher-order
// map/filter/zip/fold operations.
// ---------------------------------------------------------------------------

enum class Builtin {
  Add,
  Sub,
  Mul,
  Div,
  Lt,
  Le,
  Gt,
  Ge,
  Eq,
  And,
  Or,
  Not,
  Min,
  Max,
  StrCat,
  StrLen,
  Get,       // map lookup, errors on absent key
  Contains,  // map key membership
  Fill,      // fill(v, d): d if v is the null marker, else v
  Concat,    // list concatenation
  Len,       // list length
};

const char* builtin_name(Builtin b);
int builtin_arity(Builtin b);

enum class ExprKind {
  Const,     // value literal
  Default,   // default value of type_arg
  Var,       // variable reference
  Call,      // builtin op applied to args
  Apply,     // lambda literal applied to args
  Ite,       // lazy conditional
  TupleE,    // tuple constructor
  Proj,      // 1-based tuple projection
  Update,    // map update
  Append,    // list append
  Insert,    // set insert
  UnionE,    // set union
  OuterJoin, // map outer join
  Convert,   // collection conversion to type_arg
  MapHO,     // map(fn, coll)
  FilterHO,  // filter(fn, coll)
  Zip,       // zip(list, list)
  Fold,      // fold(fn, init, coll)
};

struct Func;
using FuncPtr = std::shared_ptr<const Func>;

struct Expr {
  ExprKind kind = ExprKind::Const;
  Value constant;          // Const
  Type type_arg;           // Default, Convert
  std::string var;         // Var
  Builtin op = Builtin::Add;  // Call
  int index = 0;           // Proj (1-based)
  FuncPtr fn;              // Apply, MapHO, FilterHO, Fold
  std::vector<Expr> args;

  // Filled in by the typechecker.
  Type type;
  bool typed = false;

  int line = 0, col = 0;
};

struct Func {
  std::vector<std::pair<std::string, Type>> params;
  Expr body;
};

enum class StepKind { Project, Select };

struct PipelineStep {
  StepKind kind;
  FuncPtr fn;
};

struct Program {
  std::string input_name;
  Type input_type;  // DataFrame type
  std::vector<PipelineStep> pipeline;
  FuncPtr accumulator;  // f : state x row -> state
  Expr init;            // I : state

  /// Row type after the pipeline (valid once typechecked).
  Type row_type;
  Type state_type;
  bool typed = false;
};

// Convenience constructors used throughout synthesis and tests.
Expr const_e(Value v);
Expr default_e(Type t);
Expr var_e(std::string name);
Expr call_e(Builtin op, std::vector<Expr> args);
Expr apply_e(FuncPtr fn, std::vector<Expr> args);
Expr ite_e(Expr c, Expr t, Expr e);
Expr tuple_e(std::vector<Expr> elems);
Expr proj_e(int index, Expr e);
Expr update_e(Expr m, Expr k, Expr v);
Expr append_e(Expr l, Expr e);
Expr insert_e(Expr s, Expr e);
Expr union_e(Expr a, Expr b);
Expr outer_join_e(Expr a, Expr b);
Expr convert_e(Type target, Expr c);
Expr map_e(FuncPtr fn, Expr coll);
Expr filter_e(FuncPtr fn, Expr coll);
Expr zip_e(Expr a, Expr b);
Expr fold_e(FuncPtr fn, Expr init, Expr coll);

FuncPtr make_fn(std::vector<std::pair<std::string, Type>> params, Expr body);

/// Substitutes replacement for every free occurrence of name.
Expr subst(const Expr& e, const std::string& name, const Expr& replacement);

/// Free variable occurrence check (respects lambda shadowing).
bool occurs_free(const Expr& e, const std::string& name);

/// Node count of the expression tree, descending into lambda bodies.
int expr_size(const Expr& e);

/// Structural equality, ignoring type annotations and source positions.
bool expr_equal(const Expr& a, const Expr& b);

}  // namespace homcalc

#endif
