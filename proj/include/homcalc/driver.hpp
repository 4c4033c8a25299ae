#ifndef HOMCALC_DRIVER_HPP
#define HOMCALC_DRIVER_HPP

#include <optional>
#include <string>

#include "homcalc/sygus.hpp"
#include "homcalc/synth.hpp"

namespace homcalc {

enum class VerdictStatus { Homomorphic, Refuted, Unknown };

const char* verdict_status_name(VerdictStatus s);

struct Verdict {
  VerdictStatus status = VerdictStatus::Unknown;
  FuncPtr merge;                                 // Homomorphic
  std::optional<Counterexample> counterexample;  // Refuted
  std::string reason;                            // Unknown
  std::vector<std::string> trace;                // applied rules, in order

  // Per-phase work, in units of 10k evaluation steps. Deterministic for a
  // fixed (program, seed, flags) triple, unlike wall-clock time.
  long long parse_ms = 0, refute_ms = 0, decomp_ms = 0, synth_ms = 0,
            oracle_ms = 0;
  std::uint64_t seed = 0;
};

struct DriverOptions {
  GenConfig cfg;
  SynthBudget budget;
  bool require_commutative = false;
  bool dump_decomp = false;
  std::string emit_sygus_dir;  // empty disables export
};

struct OracleFailure {
  DataFrame d1, d2;
  Value expect, got;
  std::string describe() const;
};

/// End-to-end decision: homomorphism refutation, normalizer refutation,
/// decomposition-driven synthesis with leaf fallback, lifting through the
/// relational pipeline, and a final randomized program-level validation of
/// the synthesized merge.
Verdict is_homomorphism(const Program& p, const DriverOptions& opt);

/// Validates a merge candidate against the whole program on random
/// schema-compatible frame pairs: P(D1 ++ D2) must equal merge(P(D1), P(D2)).
std::optional<OracleFailure> oracle_check(const Program& p, const Func& merge,
                                          const GenConfig& cfg);

std::string verdict_to_json(const Verdict& v);

int run_cli(int argc, const char* const* argv);

}  // namespace homcalc

#endif
