#ifndef HOMCALC_SYNTH_HPP
#define HOMCALC_SYNTH_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "homcalc/decomp.hpp"
#include "homcalc/refute.hpp"

namespace homcalc {

struct SynthProblem {
  FuncPtr f;         // accumulator: state x row -> state
  Value init;        // evaluated initializer
  Type state_type;
  Type row_type;
  std::string path = "root";  // sub-problem path, used for seeds and export
};

struct Normalizer {
  FuncPtr h;  // state x state -> state
  std::vector<std::string> rules;  // provenance, in application order
};

struct VerifyFailure {
  std::string law;  // "identity" or "commutativity"
  Value s, b1, b2, row, lhs, rhs;
  std::string describe() const;
};

/// Checks the identity law h(s,I) = s on arbitrary states and the
/// generalized-commutativity law f(h(b1,b2),r) = h(b1,f(b2,r)) on states
/// reachable by folding f, plus an exhaustive scan of small integer domains
/// when both state and row are integer-shaped.
std::optional<VerifyFailure> verify_normalizer(const SynthProblem& p,
                                               const Func& h,
                                               const GenConfig& cfg,
                                               bool require_commutative = false);

struct SynthBudget {
  long long leaf_nodes = 3'000'000;  // enumerator term constructions
  int max_term_size = 10;
  int max_depth = 6;
};

struct SynthOptions {
  GenConfig cfg;
  SynthBudget budget;
  bool require_commutative = false;
  bool refute_first = true;  // run the normalizer refutation before solving
  std::vector<std::string>* trace = nullptr;
  // Called for every leaf-level problem encountered (SyGuS export hook).
  std::function<void(const SynthProblem&)> on_leaf;
};

struct SynthOutcome {
  enum Status { Solved, Refuted, Unknown } status = Unknown;
  Normalizer normalizer;          // Solved
  Counterexample counterexample;  // Refuted
  std::string reason;             // Unknown
};

/// Full dispatch: refute, decompose into product/collection sub-problems,
/// fall back to whole-state enumeration with solved sub-normalizers as extra
/// terminals, and always gate results through verify_normalizer.
SynthOutcome synth_normalizer(const SynthProblem& p, const SynthOptions& opt);

/// Extra grammar terminal available to the leaf enumerator (sub-problem
/// solutions; counted as size 1).
struct ExtraTerminal {
  Expr expr;
  Type type;
};

/// Bottom-up enumerative search over a typed grammar, pruned by observational
/// equivalence on a seeded bank; candidates must match merge outputs pinned
/// from concrete folds before full verification. Smallest candidates first;
/// non-terminal productions are tried in alphabetical order.
SynthOutcome synth_leaf(const SynthProblem& p, const SynthOptions& opt,
                        const std::vector<ExtraTerminal>& extras = {});

/// Tuple composition: h(a,b) reassembles per-group merges in component
/// order. Children must cover all state components disjointly.
Normalizer compose_product(
    const std::vector<std::pair<Normalizer, std::vector<int>>>& children,
    const Type& state_type);

/// Collection composition: the children merge is applied per key over the
/// outer join of the two collections (converted through maps), with null
/// sides filled by the element default.
Normalizer compose_coll(const Normalizer& child, const Value& elem_default,
                        const Type& coll_type);

/// Renders a value as an expression that evaluates back to it.
Expr value_to_expr(const Value& v, const Type& t);

}  // namespace homcalc

#endif
