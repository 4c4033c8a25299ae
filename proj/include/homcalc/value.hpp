#ifndef HOMCALC_VALUE_HPP
#define HOMCALC_VALUE_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace homcalc {

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

enum class TypeKind {
  Int,
  Bool,
  Float,
  Str,
  Tuple,
  List,
  Map,
  Set,
  DataFrame,
  Fn,
};

struct Type {
  TypeKind kind = TypeKind::Int;
  // Tuple: elements; List/Set: [elem]; Map: [key, val];
  // DataFrame: [row]; Fn: params... followed by return type.
  std::vector<Type> args;

  bool operator==(const Type& other) const;
  bool operator!=(const Type& other) const { return !(*this == other); }

  bool is_scalar() const {
    return kind == TypeKind::Int || kind == TypeKind::Bool ||
           kind == TypeKind::Float || kind == TypeKind::Str;
  }
  bool is_collection() const {
    return kind == TypeKind::List || kind == TypeKind::Map ||
           kind == TypeKind::Set;
  }
};

Type int_type();
Type bool_type();
Type float_type();
Type str_type();
Type tuple_type(std::vector<Type> elems);
Type list_type(Type elem);
Type map_type(Type key, Type val);
Type set_type(Type elem);
Type df_type(Type row);
Type fn_type(std::vector<Type> params, Type ret);

/// True if t may be used as a map key: scalar or tuple of scalars.
bool valid_key_type(const Type& t);
/// True if t may be a dataframe row: scalar, or tuple, free of Fn/DF.
bool valid_row_type(const Type& t);

std::string type_to_string(const Type& t);

// ---------------------------------------------------------------------------
// Values
// ---------------------------------------------------------------------------

enum class ValueKind {
  Int,
  Bool,
  Float,
  Str,
  Tuple,
  List,
  Map,
  Set,
  Null,  // absence marker produced by outer joins and set->map conversion
};

struct Value {
  ValueKind kind = ValueKind::Int;
  std::int64_t i = 0;
  bool b = false;
  double f = 0.0;
  std::string s;
  std::vector<Value> elems;  // tuple elements, list items, set members (sorted)
  std::vector<std::pair<Value, Value>> entries;  // map entries (sorted by key)

  bool operator==(const Value& other) const { return compare(other) == 0; }
  bool operator!=(const Value& other) const { return compare(other) != 0; }

  /// Total order used for canonical map/set storage. Floats compare by the
  /// IEEE-754 total order on their bit patterns, so -0.0 < 0.0.
  int compare(const Value& other) const;
};

Value int_v(std::int64_t i);
Value bool_v(bool b);
Value float_v(double f);
Value str_v(std::string s);
Value tuple_v(std::vector<Value> elems);
Value list_v(std::vector<Value> elems);
Value null_v();

/// Builds a set value; input order does not matter, duplicates collapse.
Value set_v(std::vector<Value> elems);
/// Builds a map value; later entries for the same key win.
Value map_v(std::vector<std::pair<Value, Value>> entries);

/// Returns a copy of m with key bound to val (insert or overwrite).
Value map_update(const Value& m, const Value& key, const Value& val);
const Value* map_find(const Value& m, const Value& key);
Value set_insert(const Value& s, const Value& elem);
Value set_union(const Value& a, const Value& b);

/// Structural equality on canonical forms. Float comparison is bit-exact.
bool canon_eq(const Value& a, const Value& b);

std::string value_to_string(const Value& v);

struct UnsupportedTypeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Default value of a type: 0, false, 0.0, "", componentwise tuple defaults,
/// empty collections. Fn and DataFrame have no default.
Value default_value(const Type& t);

// ---------------------------------------------------------------------------
// Dataframes
// ---------------------------------------------------------------------------

struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DataFrame {
  std::vector<std::pair<std::string, Type>> columns;
  // Each row is a TupleV matching the column types positionally, or a plain
  // scalar for single-column frames.
  std::vector<Value> rows;

  Type row_type() const;
  bool schema_equals(const DataFrame& other) const;
};

/// Concatenation: rows of d1 followed by rows of d2. Schemas must match.
DataFrame concat_df(const DataFrame& d1, const DataFrame& d2);

bool df_equals(const DataFrame& a, const DataFrame& b);
std::string df_to_string(const DataFrame& d);

/// Shortest decimal rendering that round-trips; integral values keep a ".0"
/// suffix so they re-parse as floats.
std::string float_to_string(double d);

}  // namespace homcalc

#endif
