#ifndef HOMCALC_INTERP_HPP
#define HOMCALC_INTERP_HPP

#include <memory>
#include <stdexcept>
#include <string>

#include "homcalc/ast.hpp"

namespace homcalc {

enum class EvalErrorKind {
  DivisionByZero,
  IntOverflow,
  AbsentKey,
  ZipLengthMismatch,
  BadConversion,
  NullValue,   // null absence marker used where a value is required
  FuelExhausted,
  Internal,
};

struct EvalError : std::runtime_error {
  EvalErrorKind error_kind;
  EvalError(EvalErrorKind k, const std::string& msg)
      : std::runtime_error(msg), error_kind(k) {}
};

class Env {
 public:
  Env() = default;
  Env bind(const std::string& name, Value v) const;
  const Value* lookup(const std::string& name) const;

 private:
  struct Node {
    std::string name;
    Value value;
    std::shared_ptr<const Node> next;
  };
  std::shared_ptr<const Node> head_;
};

/// Process-wide count of evaluation steps. Deterministic for a fixed input
/// and seed; the driver reports per-phase deltas as its work measure.
long long eval_steps_total();
void eval_steps_add(long long n);

/// Shared step counter. Every eval call consumes fuel; exhaustion raises
/// EvalError(FuelExhausted).
struct Fuel {
  long long remaining = 10'000'000;
  long long used = 0;

  ~Fuel() { eval_steps_add(used); }
  Fuel() = default;
  Fuel(const Fuel&) = delete;
  Fuel& operator=(const Fuel&) = delete;

  void tick() {
    ++used;
    if (--remaining < 0)
      throw EvalError(EvalErrorKind::FuelExhausted, "evaluation fuel exhausted");
  }
};

Value eval(const Expr& e, const Env& env, Fuel& fuel);
Value apply_fn(const Func& f, const std::vector<Value>& args, Fuel& fuel);
Value apply_fn(const FuncPtr& f, const std::vector<Value>& args, Fuel& fuel);

/// Runs the pipeline left to right, then left-folds the accumulator over the
/// remaining rows starting from the initializer.
Value run_program(const Program& p, const DataFrame& d, Fuel& fuel);

/// Left fold of the accumulator from an explicit starting state; used by the
/// verifier and test oracles.
Value fold_rows(const Func& f, Value state, const std::vector<Value>& rows,
                Fuel& fuel);

}  // namespace homcalc

#endif
