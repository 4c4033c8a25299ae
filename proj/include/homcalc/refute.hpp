#ifndef HOMCALC_REFUTE_HPP
#define HOMCALC_REFUTE_HPP

#include <optional>

#include "homcalc/gen.hpp"
#include "homcalc/interp.hpp"

namespace homcalc {

enum class CounterexampleKind { HomRefute, NormRefute1, NormRefute2 };

const char* counterexample_kind_name(CounterexampleKind k);

/// A checked witness of non-homomorphism. Every counterexample returned by
/// the refuter has already been replayed through the interpreter.
struct Counterexample {
  CounterexampleKind kind;

  // HomRefute: P(d1)=P(d1b), P(d2)=P(d2b), P(d1 ++ d2) != P(d1b ++ d2b).
  DataFrame d1, d1b, d2, d2b;

  // NormRefute1: f(I,x)=I but f(s,x)!=s.
  // NormRefute2: f(I,x)=f(I,xb) but f(s,x)!=f(s,xb).
  Value state, row, row2;

  // The two sides of the violated equality.
  Value lhs, rhs;

  std::string describe() const;
};

/// Searches for dataframes violating the merge-consistency axiom:
/// a pool of random frames is bucketed by program output, and colliding
/// pairs are cross-concatenated. Returns nothing once the trial budget is
/// spent. Evaluation errors during trials are skipped.
std::optional<Counterexample> refute_hom(const Program& p, const GenConfig& cfg);

/// Checks the two necessary conditions for a normalizer of (f, I):
///   (1) f(I,x) = I  implies  f(s,x) = s
///   (2) f(I,x) = f(I,x')  implies  f(s,x) = f(s,x')
/// row_type is the accumulator's second parameter type.
std::optional<Counterexample> refute_norm(const FuncPtr& f, const Value& init,
                                          const Type& state_type,
                                          const Type& row_type,
                                          const GenConfig& cfg);

/// Replays a counterexample; true if it still witnesses the violation.
bool replay_counterexample(const Counterexample& cx, const Program& p);
bool replay_counterexample(const Counterexample& cx, const FuncPtr& f,
                           const Value& init);

}  // namespace homcalc

#endif
