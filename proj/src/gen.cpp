#include "homcalc/gen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace homcalc {

double random_dyadic(Rng& rng) {
  std::int64_t numer = rng.range(-24, 24);
  int shift = static_cast<int>(rng.below(4));  // denominator 1, 2, 4, or 8
  return static_cast<double>(numer) / static_cast<double>(1 << shift);
}

namespace {

const char* kAlphabet[] = {"a", "b", "c", "d"};

std::string random_string(const GenConfig& cfg, Rng& rng) {
  int len = static_cast<int>(rng.below(cfg.max_str_len + 1));
  std::string out;
  for (int i = 0; i < len; ++i) out += kAlphabet[rng.below(4)];
  return out;
}

}  // namespace

Value random_value(const Type& t, const GenConfig& cfg, Rng& rng) {
  switch (t.kind) {
    case TypeKind::Int:
      if (!cfg.int_pool.empty() && rng.chance(0.35))
        return int_v(cfg.int_pool[rng.below(cfg.int_pool.size())]);
      return int_v(rng.range(cfg.int_lo, cfg.int_hi));
    case TypeKind::Bool:
      return bool_v(rng.below(2) == 1);
    case TypeKind::Float:
      if (!cfg.float_pool.empty() && rng.chance(0.35))
        return float_v(cfg.float_pool[rng.below(cfg.float_pool.size())]);
      return float_v(random_dyadic(rng));
    case TypeKind::Str:
      if (!cfg.str_pool.empty() && rng.chance(0.45))
        return str_v(cfg.str_pool[rng.below(cfg.str_pool.size())]);
      return str_v(random_string(cfg, rng));
    case TypeKind::Tuple: {
      std::vector<Value> elems;
      elems.reserve(t.args.size());
      for (const auto& a : t.args) elems.push_back(random_value(a, cfg, rng));
      return tuple_v(std::move(elems));
    }
    case TypeKind::List: {
      int n = static_cast<int>(rng.below(cfg.max_coll_size + 1));
      std::vector<Value> elems;
      for (int i = 0; i < n; ++i)
        elems.push_back(random_value(t.args[0], cfg, rng));
      return list_v(std::move(elems));
    }
    case TypeKind::Set: {
      int n = static_cast<int>(rng.below(cfg.max_coll_size + 1));
      std::vector<Value> elems;
      for (int i = 0; i < n; ++i)
        elems.push_back(random_value(t.args[0], cfg, rng));
      return set_v(std::move(elems));
    }
    case TypeKind::Map: {
      int n = static_cast<int>(rng.below(cfg.max_coll_size + 1));
      std::vector<std::pair<Value, Value>> entries;
      for (int i = 0; i < n; ++i)
        entries.emplace_back(random_value(t.args[0], cfg, rng),
                             random_value(t.args[1], cfg, rng));
      return map_v(std::move(entries));
    }
    case TypeKind::DataFrame:
    case TypeKind::Fn:
      break;
  }
  throw UnsupportedTypeError("cannot generate values of " + type_to_string(t));
}

std::vector<Value> random_rows(const Type& row, const GenConfig& cfg, Rng& rng) {
  int n = static_cast<int>(rng.below(cfg.max_rows + 1));
  std::vector<Value> rows;
  rows.reserve(n);
  for (int i = 0; i < n; ++i) rows.push_back(random_value(row, cfg, rng));
  return rows;
}

DataFrame random_df(const std::vector<std::pair<std::string, Type>>& columns,
                    const GenConfig& cfg, Rng& rng) {
  DataFrame d;
  d.columns = columns;
  d.rows = random_rows(d.row_type(), cfg, rng);
  return d;
}

namespace {

void add_int(GenConfig& cfg, std::int64_t v) {
  std::vector<std::int64_t> xs = {v};
  if (v > std::numeric_limits<std::int64_t>::min()) xs.push_back(v - 1);
  if (v < std::numeric_limits<std::int64_t>::max()) xs.push_back(v + 1);
  for (std::int64_t x : xs)
    if (std::find(cfg.int_pool.begin(), cfg.int_pool.end(), x) ==
        cfg.int_pool.end())
      cfg.int_pool.push_back(x);
}

void add_float(GenConfig& cfg, double v) {
  for (double x : {v - 1.0, v, v + 1.0})
    if (std::find(cfg.float_pool.begin(), cfg.float_pool.end(), x) ==
        cfg.float_pool.end())
      cfg.float_pool.push_back(x);
}

void add_str(GenConfig& cfg, const std::string& v) {
  if (std::find(cfg.str_pool.begin(), cfg.str_pool.end(), v) ==
      cfg.str_pool.end())
    cfg.str_pool.push_back(v);
}

void harvest_value(const Value& v, GenConfig& cfg) {
  switch (v.kind) {
    case ValueKind::Int: add_int(cfg, v.i); break;
    case ValueKind::Float: add_float(cfg, v.f); break;
    case ValueKind::Str: add_str(cfg, v.s); break;
    default: break;
  }
}

}  // namespace

void harvest_constants(const Expr& e, GenConfig& cfg) {
  if (e.kind == ExprKind::Const) harvest_value(e.constant, cfg);
  for (const auto& a : e.args) harvest_constants(a, cfg);
  if (e.fn) harvest_constants(e.fn->body, cfg);
}

void harvest_constants(const Func& f, GenConfig& cfg) {
  harvest_constants(f.body, cfg);
}

void harvest_constants(const Program& p, GenConfig& cfg) {
  for (const auto& step : p.pipeline) harvest_constants(step.fn->body, cfg);
  harvest_constants(p.accumulator->body, cfg);
  harvest_constants(p.init, cfg);
}

}  // namespace homcalc
