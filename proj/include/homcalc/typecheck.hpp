#ifndef HOMCALC_TYPECHECK_HPP
#define HOMCALC_TYPECHECK_HPP

#include <stdexcept>
#include <string>

#include "homcalc/ast.hpp"

namespace homcalc {

struct TypeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class TypeEnv {
 public:
  TypeEnv() = default;
  TypeEnv bind(const std::string& name, Type t) const;
  const Type* lookup(const std::string& name) const;

 private:
  struct Node {
    std::string name;
    Type type;
    std::shared_ptr<const Node> next;
  };
  std::shared_ptr<const Node> head_;
};

/// Annotates every node with its type. Throws TypeError on ill-typed input.
Expr typecheck_expr(const Expr& e, const TypeEnv& env);

/// Returns the function's type as Fn(params..., ret) and annotates the body.
Type typecheck_fn(Func& f, const TypeEnv& env);

/// Checks pipeline steps left to right, then the accumulator against the
/// final row type; fills row_type/state_type on the result.
Program typecheck_program(const Program& p);

}  // namespace homcalc

#endif
