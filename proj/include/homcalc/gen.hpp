#ifndef HOMCALC_GEN_HPP
#define HOMCALC_GEN_HPP

#include <cstdint>
#include <vector>

#include "homcalc/ast.hpp"

namespace homcalc {

/// SplitMix64: tiny splittable PRNG. Child streams derived with split() are
/// independent of draw order, which keeps verdicts stable no matter how
/// sub-problems are scheduled.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Value in [0, n).
  std::uint64_t below(std::uint64_t n) { return n ? next() % n : 0; }

  std::int64_t range(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

  bool chance(double p) { return (next() >> 11) * 0x1.0p-53 < p; }

  Rng split(std::uint64_t tag) const {
    Rng child(state_ ^ (tag * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL));
    child.next();
    return child;
  }

 private:
  std::uint64_t state_;
};

struct GenConfig {
  std::uint64_t seed = 1;
  int trials = 1000;
  int max_rows = 6;
  std::int64_t int_lo = -8;
  std::int64_t int_hi = 8;
  int max_coll_size = 4;
  int max_str_len = 3;

  // Constants harvested from the program under analysis. Generated values
  // draw from these pools alongside the base ranges so that guards like
  // string-equality tests and numeric thresholds are actually exercised.
  std::vector<std::int64_t> int_pool;
  std::vector<double> float_pool;
  std::vector<std::string> str_pool;
};

/// Small dyadic rationals (k / 2^j); exact in binary64 so sums and
/// comparisons reproduce bit-for-bit.
double random_dyadic(Rng& rng);

Value random_value(const Type& t, const GenConfig& cfg, Rng& rng);

/// Random row list for the given row type, length 0..max_rows.
std::vector<Value> random_rows(const Type& row, const GenConfig& cfg, Rng& rng);

DataFrame random_df(const std::vector<std::pair<std::string, Type>>& columns,
                    const GenConfig& cfg, Rng& rng);

/// Collects scalar constants appearing in an expression/function/program into
/// the config pools. Numeric constants also contribute their +-1 neighbours.
void harvest_constants(const Expr& e, GenConfig& cfg);
void harvest_constants(const Func& f, GenConfig& cfg);
void harvest_constants(const Program& p, GenConfig& cfg);

}  // namespace homcalc

#endif
