#ifndef HOMCALC_SYGUS_HPP
#define HOMCALC_SYGUS_HPP

#include <stdexcept>
#include <string>
#include <vector>

#include "homcalc/synth.hpp"

namespace homcalc {

struct ExportError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Emits a SyGuS-IF v2 problem for a leaf-level synthesis task: lists as
/// sequences, sets native, maps as sets of key-value tuples backed by a
/// recursive primitive library, with the identity and commutativity
/// constraints universally quantified. Grammar non-terminals are sorted
/// alphabetically.
std::string export_sygus(const SynthProblem& p,
                         bool require_commutative = false);

/// Structural checker for SyGuS-IF v2 files: balanced s-expressions, known
/// top-level commands with the right shapes, declared non-terminals, and a
/// final check-synth. Returns human-readable problems; empty means the file
/// passes.
std::vector<std::string> sygus_check(const std::string& text);

}  // namespace homcalc

#endif
