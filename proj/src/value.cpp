#include "homcalc/value.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <sstream>

namespace homcalc {

bool Type::operator==(const Type& other) const {
  if (kind != other.kind || args.size() != other.args.size()) return false;
  for (size_t i = 0; i < args.size(); ++i)
    if (!(args[i] == other.args[i])) return false;
  return true;
}

Type int_type() { return Type{TypeKind::Int, {}}; }
Type bool_type() { return Type{TypeKind::Bool, {}}; }
Type float_type() { return Type{TypeKind::Float, {}}; }
Type str_type() { return Type{TypeKind::Str, {}}; }

Type tuple_type(std::vector<Type> elems) {
  return Type{TypeKind::Tuple, std::move(elems)};
}
Type list_type(Type elem) { return Type{TypeKind::List, {std::move(elem)}}; }
Type map_type(Type key, Type val) {
  return Type{TypeKind::Map, {std::move(key), std::move(val)}};
}
Type set_type(Type elem) { return Type{TypeKind::Set, {std::move(elem)}}; }
Type df_type(Type row) { return Type{TypeKind::DataFrame, {std::move(row)}}; }
Type fn_type(std::vector<Type> params, Type ret) {
  params.push_back(std::move(ret));
  return Type{TypeKind::Fn, std::move(params)};
}

bool valid_key_type(const Type& t) {
  if (t.is_scalar()) return true;
  if (t.kind == TypeKind::Tuple) {
    for (const auto& e : t.args)
      if (!e.is_scalar()) return false;
    return true;
  }
  return false;
}

bool valid_row_type(const Type& t) {
  switch (t.kind) {
    case TypeKind::Fn:
    case TypeKind::DataFrame:
      return false;
    default:
      for (const auto& a : t.args)
        if (!valid_row_type(a)) return false;
      return true;
  }
}

std::string type_to_string(const Type& t) {
  switch (t.kind) {
    case TypeKind::Int: return "int";
    case TypeKind::Bool: return "bool";
    case TypeKind::Float: return "float";
    case TypeKind::Str: return "str";
    case TypeKind::Tuple: {
      std::string out = "(tuple";
      for (const auto& a : t.args) out += " " + type_to_string(a);
      return out + ")";
    }
    case TypeKind::List: return "(list " + type_to_string(t.args[0]) + ")";
    case TypeKind::Map:
      return "(map " + type_to_string(t.args[0]) + " " +
             type_to_string(t.args[1]) + ")";
    case TypeKind::Set: return "(set " + type_to_string(t.args[0]) + ")";
    case TypeKind::DataFrame: return "(df " + type_to_string(t.args[0]) + ")";
    case TypeKind::Fn: {
      std::string out = "(fn";
      for (const auto& a : t.args) out += " " + type_to_string(a);
      return out + ")";
    }
  }
  return "?";
}

// ---------------------------------------------------------------------------

namespace {

int cmp3(std::int64_t a, std::int64_t b) { return a < b ? -1 : a > b ? 1 : 0; }

std::uint64_t float_order_key(double d) {
  std::uint64_t bits = std::bit_cast<std::uint64_t>(d);
  // Flip so the order matches IEEE totalOrder: negatives reversed below
  // positives.
  if (bits & 0x8000000000000000ULL) return ~bits;
  return bits | 0x8000000000000000ULL;
}

}  // namespace

int Value::compare(const Value& other) const {
  if (kind != other.kind)
    return cmp3(static_cast<int>(kind), static_cast<int>(other.kind));
  switch (kind) {
    case ValueKind::Int: return cmp3(i, other.i);
    case ValueKind::Bool: return cmp3(b ? 1 : 0, other.b ? 1 : 0);
    case ValueKind::Float: {
      std::uint64_t x = float_order_key(f), y = float_order_key(other.f);
      return x < y ? -1 : x > y ? 1 : 0;
    }
    case ValueKind::Str: return s.compare(other.s) < 0 ? -1 : s == other.s ? 0 : 1;
    case ValueKind::Null: return 0;
    case ValueKind::Tuple:
    case ValueKind::List:
    case ValueKind::Set: {
      size_t n = std::min(elems.size(), other.elems.size());
      for (size_t k = 0; k < n; ++k) {
        int c = elems[k].compare(other.elems[k]);
        if (c != 0) return c;
      }
      return cmp3(static_cast<std::int64_t>(elems.size()),
                  static_cast<std::int64_t>(other.elems.size()));
    }
    case ValueKind::Map: {
      size_t n = std::min(entries.size(), other.entries.size());
      for (size_t k = 0; k < n; ++k) {
        int c = entries[k].first.compare(other.entries[k].first);
        if (c != 0) return c;
        c = entries[k].second.compare(other.entries[k].second);
        if (c != 0) return c;
      }
      return cmp3(static_cast<std::int64_t>(entries.size()),
                  static_cast<std::int64_t>(other.entries.size()));
    }
  }
  return 0;
}

Value int_v(std::int64_t i) {
  Value v;
  v.kind = ValueKind::Int;
  v.i = i;
  return v;
}
Value bool_v(bool b) {
  Value v;
  v.kind = ValueKind::Bool;
  v.b = b;
  return v;
}
Value float_v(double f) {
  Value v;
  v.kind = ValueKind::Float;
  v.f = f;
  return v;
}
Value str_v(std::string s) {
  Value v;
  v.kind = ValueKind::Str;
  v.s = std::move(s);
  return v;
}
Value tuple_v(std::vector<Value> elems) {
  Value v;
  v.kind = ValueKind::Tuple;
  v.elems = std::move(elems);
  return v;
}
Value list_v(std::vector<Value> elems) {
  Value v;
  v.kind = ValueKind::List;
  v.elems = std::move(elems);
  return v;
}
Value null_v() {
  Value v;
  v.kind = ValueKind::Null;
  return v;
}

Value set_v(std::vector<Value> elems) {
  Value v;
  v.kind = ValueKind::Set;
  std::sort(elems.begin(), elems.end(),
            [](const Value& a, const Value& b) { return a.compare(b) < 0; });
  elems.erase(std::unique(elems.begin(), elems.end(),
                          [](const Value& a, const Value& b) {
                            return a.compare(b) == 0;
                          }),
              elems.end());
  v.elems = std::move(elems);
  return v;
}

Value map_v(std::vector<std::pair<Value, Value>> entries) {
  Value v;
  v.kind = ValueKind::Map;
  std::stable_sort(entries.begin(), entries.end(),
                   [](const auto& a, const auto& b) {
                     return a.first.compare(b.first) < 0;
                   });
  // Keep the last binding for duplicate keys.
  std::vector<std::pair<Value, Value>> out;
  for (auto& e : entries) {
    if (!out.empty() && out.back().first.compare(e.first) == 0)
      out.back().second = std::move(e.second);
    else
      out.push_back(std::move(e));
  }
  v.entries = std::move(out);
  return v;
}

Value map_update(const Value& m, const Value& key, const Value& val) {
  Value out = m;
  auto it = std::lower_bound(out.entries.begin(), out.entries.end(), key,
                             [](const auto& e, const Value& k) {
                               return e.first.compare(k) < 0;
                             });
  if (it != out.entries.end() && it->first.compare(key) == 0)
    it->second = val;
  else
    out.entries.insert(it, {key, val});
  return out;
}

const Value* map_find(const Value& m, const Value& key) {
  auto it = std::lower_bound(m.entries.begin(), m.entries.end(), key,
                             [](const auto& e, const Value& k) {
                               return e.first.compare(k) < 0;
                             });
  if (it != m.entries.end() && it->first.compare(key) == 0) return &it->second;
  return nullptr;
}

Value set_insert(const Value& s, const Value& elem) {
  Value out = s;
  auto it = std::lower_bound(out.elems.begin(), out.elems.end(), elem,
                             [](const Value& a, const Value& b) {
                               return a.compare(b) < 0;
                             });
  if (it == out.elems.end() || it->compare(elem) != 0)
    out.elems.insert(it, elem);
  return out;
}

Value set_union(const Value& a, const Value& b) {
  std::vector<Value> merged = a.elems;
  merged.insert(merged.end(), b.elems.begin(), b.elems.end());
  return set_v(std::move(merged));
}

bool canon_eq(const Value& a, const Value& b) { return a.compare(b) == 0; }

std::string value_to_string(const Value& v) {
  switch (v.kind) {
    case ValueKind::Int: return "(int " + std::to_string(v.i) + ")";
    case ValueKind::Bool: return v.b ? "true" : "false";
    case ValueKind::Float: return "(float " + float_to_string(v.f) + ")";
    case ValueKind::Str: {
      std::string out = "(str \"";
      for (char c : v.s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
      }
      return out + "\")";
    }
    case ValueKind::Null: return "null";
    case ValueKind::Tuple:
    case ValueKind::List:
    case ValueKind::Set: {
      std::string head = v.kind == ValueKind::Tuple ? "(tuple-of"
                         : v.kind == ValueKind::List ? "(list-of"
                                                     : "(set-of";
      for (const auto& e : v.elems) head += " " + value_to_string(e);
      return head + ")";
    }
    case ValueKind::Map: {
      std::string out = "(map-of";
      for (const auto& [k, val] : v.entries)
        out += " (" + value_to_string(k) + " " + value_to_string(val) + ")";
      return out + ")";
    }
  }
  return "?";
}

Value default_value(const Type& t) {
  switch (t.kind) {
    case TypeKind::Int: return int_v(0);
    case TypeKind::Bool: return bool_v(false);
    case TypeKind::Float: return float_v(0.0);
    case TypeKind::Str: return str_v("");
    case TypeKind::Tuple: {
      std::vector<Value> elems;
      elems.reserve(t.args.size());
      for (const auto& e : t.args) elems.push_back(default_value(e));
      return tuple_v(std::move(elems));
    }
    case TypeKind::List: return list_v({});
    case TypeKind::Map: return map_v({});
    case TypeKind::Set: return set_v({});
    case TypeKind::DataFrame:
    case TypeKind::Fn:
      throw UnsupportedTypeError("no default value for " + type_to_string(t));
  }
  throw UnsupportedTypeError("no default value");
}

// ---------------------------------------------------------------------------

Type DataFrame::row_type() const {
  if (columns.size() == 1) return columns[0].second;
  std::vector<Type> parts;
  parts.reserve(columns.size());
  for (const auto& [name, t] : columns) parts.push_back(t);
  return tuple_type(std::move(parts));
}

bool DataFrame::schema_equals(const DataFrame& other) const {
  if (columns.size() != other.columns.size()) return false;
  for (size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].first != other.columns[i].first) return false;
    if (!(columns[i].second == other.columns[i].second)) return false;
  }
  return true;
}

DataFrame concat_df(const DataFrame& d1, const DataFrame& d2) {
  if (!d1.schema_equals(d2))
    throw SchemaError("concat of dataframes with mismatched schemas");
  DataFrame out = d1;
  out.rows.insert(out.rows.end(), d2.rows.begin(), d2.rows.end());
  return out;
}

bool df_equals(const DataFrame& a, const DataFrame& b) {
  if (!a.schema_equals(b) || a.rows.size() != b.rows.size()) return false;
  for (size_t i = 0; i < a.rows.size(); ++i)
    if (!canon_eq(a.rows[i], b.rows[i])) return false;
  return true;
}

std::string df_to_string(const DataFrame& d) {
  std::string out = "(dataframe (";
  for (size_t i = 0; i < d.columns.size(); ++i) {
    if (i) out += " ";
    out += "(" + d.columns[i].first + " " + type_to_string(d.columns[i].second) +
           ")";
  }
  out += ")";
  for (const auto& r : d.rows) out += " " + value_to_string(r);
  return out + ")";
}

std::string float_to_string(double d) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), d);
  std::string out(buf, end);
  if (out.find('.') == std::string::npos &&
      out.find('e') == std::string::npos &&
      out.find("inf") == std::string::npos &&
      out.find("nan") == std::string::npos)
    out += ".0";
  return out;
}

}  // namespace homcalc
