#include "homcalc/parse.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <map>
#include <memory>
#include <optional>

namespace homcalc {

namespace {

// ---------------------------------------------------------------------------
// S-expression reader
// ---------------------------------------------------------------------------

struct Sexp {
  enum Kind { Atom, Str, List } kind = Atom;
  std::string text;        // Atom token or string payload
  std::vector<Sexp> items;
  int line = 1, col = 1;

  bool is(const std::string& head) const {
    return kind == List && !items.empty() && items[0].kind == Atom &&
           items[0].text == head;
  }
};

class Reader {
 public:
  explicit Reader(const std::string& src) : src_(src) {}

  std::vector<Sexp> read_all() {
    std::vector<Sexp> out;
    skip_ws();
    while (!eof()) {
      out.push_back(read());
      skip_ws();
    }
    return out;
  }

 private:
  const std::string& src_;
  size_t pos_ = 0;
  int line_ = 1, col_ = 1;

  bool eof() const { return pos_ >= src_.size(); }
  char peek() const { return src_[pos_]; }

  char advance() {
    char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_ws() {
    while (!eof()) {
      char c = peek();
      if (c == ';') {
        while (!eof() && peek() != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  Sexp read() {
    skip_ws();
    if (eof()) throw ParseError("unexpected end of input", line_, col_);
    Sexp s;
    s.line = line_;
    s.col = col_;
    char c = peek();
    if (c == '(') {
      advance();
      s.kind = Sexp::List;
      skip_ws();
      while (!eof() && peek() != ')') {
        s.items.push_back(read());
        skip_ws();
      }
      if (eof()) throw ParseError("unterminated list", s.line, s.col);
      advance();  // ')'
      return s;
    }
    if (c == ')') throw ParseError("unexpected ')'", line_, col_);
    if (c == '"') {
      advance();
      s.kind = Sexp::Str;
      while (!eof() && peek() != '"') {
        char d = advance();
        if (d == '\\') {
          if (eof()) throw ParseError("unterminated string", s.line, s.col);
          s.text += advance();
        } else {
          s.text += d;
        }
      }
      if (eof()) throw ParseError("unterminated string", s.line, s.col);
      advance();  // '"'
      return s;
    }
    s.kind = Sexp::Atom;
    while (!eof() && !std::isspace(static_cast<unsigned char>(peek())) &&
           peek() != '(' && peek() != ')' && peek() != ';')
      s.text += advance();
    return s;
  }
};

[[noreturn]] void fail(const Sexp& s, const std::string& msg) {
  throw ParseError(msg, s.line, s.col);
}

// ---------------------------------------------------------------------------
// AST builder
// ---------------------------------------------------------------------------

Type build_type(const Sexp& s) {
  if (s.kind == Sexp::Atom) {
    if (s.text == "int") return int_type();
    if (s.text == "bool") return bool_type();
    if (s.text == "float") return float_type();
    if (s.text == "str") return str_type();
    fail(s, "unknown type '" + s.text + "'");
  }
  if (s.kind != Sexp::List || s.items.empty() || s.items[0].kind != Sexp::Atom)
    fail(s, "expected a type");
  const std::string& head = s.items[0].text;
  size_t n = s.items.size();
  if (head == "tuple") {
    if (n < 3) fail(s, "tuple type needs at least 2 elements");
    std::vector<Type> elems;
    for (size_t i = 1; i < n; ++i) elems.push_back(build_type(s.items[i]));
    return tuple_type(std::move(elems));
  }
  if (head == "list" && n == 2) return list_type(build_type(s.items[1]));
  if (head == "set" && n == 2) return set_type(build_type(s.items[1]));
  if (head == "map" && n == 3)
    return map_type(build_type(s.items[1]), build_type(s.items[2]));
  if (head == "df" && n == 2) return df_type(build_type(s.items[1]));
  fail(s, "unknown type form '" + head + "'");
}

const std::map<std::string, Builtin>& builtin_table() {
  static const std::map<std::string, Builtin> table = {
      {"+", Builtin::Add},       {"-", Builtin::Sub},
      {"*", Builtin::Mul},       {"/", Builtin::Div},
      {"<", Builtin::Lt},        {"<=", Builtin::Le},
      {">", Builtin::Gt},        {">=", Builtin::Ge},
      {"=", Builtin::Eq},        {"and", Builtin::And},
      {"or", Builtin::Or},       {"not", Builtin::Not},
      {"min", Builtin::Min},     {"max", Builtin::Max},
      {"strcat", Builtin::StrCat}, {"strlen", Builtin::StrLen},
      {"get", Builtin::Get},     {"contains", Builtin::Contains},
      {"fill", Builtin::Fill},   {"concat", Builtin::Concat},
      {"len", Builtin::Len},
  };
  return table;
}

FuncPtr build_fn(const Sexp& s);

Expr at(Expr e, const Sexp& s) {
  e.line = s.line;
  e.col = s.col;
  return e;
}

Expr build_expr(const Sexp& s) {
  if (s.kind == Sexp::Atom) {
    if (s.text == "true") return at(const_e(bool_v(true)), s);
    if (s.text == "false") return at(const_e(bool_v(false)), s);
    return at(var_e(s.text), s);
  }
  if (s.kind == Sexp::Str) fail(s, "bare string; use (str \"...\")");
  if (s.items.empty()) fail(s, "empty form");

  // ((lambda ...) args...) immediate application
  if (s.items[0].kind == Sexp::List) {
    if (!s.items[0].is("lambda")) fail(s.items[0], "expected lambda in head position");
    FuncPtr fn = build_fn(s.items[0]);
    std::vector<Expr> args;
    for (size_t i = 1; i < s.items.size(); ++i)
      args.push_back(build_expr(s.items[i]));
    return at(apply_e(std::move(fn), std::move(args)), s);
  }

  const std::string& head = s.items[0].text;
  size_t n = s.items.size();
  auto want = [&](size_t k) {
    if (n != k + 1)
      fail(s, "'" + head + "' expects " + std::to_string(k) + " arguments");
  };

  if (head == "int") {
    want(1);
    if (s.items[1].kind != Sexp::Atom) fail(s, "int literal expected");
    std::int64_t v = 0;
    const std::string& t = s.items[1].text;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || p != t.data() + t.size())
      fail(s.items[1], "bad integer literal '" + t + "'");
    return at(const_e(int_v(v)), s);
  }
  if (head == "float") {
    want(1);
    if (s.items[1].kind != Sexp::Atom) fail(s, "float literal expected");
    const std::string& t = s.items[1].text;
    char* end = nullptr;
    double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size())
      fail(s.items[1], "bad float literal '" + t + "'");
    return at(const_e(float_v(v)), s);
  }
  if (head == "str") {
    want(1);
    if (s.items[1].kind != Sexp::Str) fail(s, "string literal expected");
    return at(const_e(str_v(s.items[1].text)), s);
  }
  if (head == "default") {
    want(1);
    return at(default_e(build_type(s.items[1])), s);
  }
  if (head == "map-empty") {
    want(2);
    return at(default_e(map_type(build_type(s.items[1]), build_type(s.items[2]))), s);
  }
  if (head == "list-empty") {
    want(1);
    return at(default_e(list_type(build_type(s.items[1]))), s);
  }
  if (head == "set-empty") {
    want(1);
    return at(default_e(set_type(build_type(s.items[1]))), s);
  }
  if (head == "ite") {
    want(3);
    return at(ite_e(build_expr(s.items[1]), build_expr(s.items[2]),
                    build_expr(s.items[3])),
              s);
  }
  if (head == "tuple") {
    if (n < 3) fail(s, "tuple needs at least 2 elements");
    std::vector<Expr> elems;
    for (size_t i = 1; i < n; ++i) elems.push_back(build_expr(s.items[i]));
    return at(tuple_e(std::move(elems)), s);
  }
  if (head == "proj") {
    want(2);
    if (s.items[1].kind != Sexp::Atom) fail(s, "proj index expected");
    int idx = std::atoi(s.items[1].text.c_str());
    return at(proj_e(idx, build_expr(s.items[2])), s);
  }
  if (head == "update") {
    want(3);
    return at(update_e(build_expr(s.items[1]), build_expr(s.items[2]),
                       build_expr(s.items[3])),
              s);
  }
  if (head == "append") {
    want(2);
    return at(append_e(build_expr(s.items[1]), build_expr(s.items[2])), s);
  }
  if (head == "insert") {
    want(2);
    return at(insert_e(build_expr(s.items[1]), build_expr(s.items[2])), s);
  }
  if (head == "union") {
    want(2);
    return at(union_e(build_expr(s.items[1]), build_expr(s.items[2])), s);
  }
  if (head == "outer-join") {
    want(2);
    return at(outer_join_e(build_expr(s.items[1]), build_expr(s.items[2])), s);
  }
  if (head == "convert") {
    want(2);
    return at(convert_e(build_type(s.items[1]), build_expr(s.items[2])), s);
  }
  if (head == "map") {
    want(2);
    return at(map_e(build_fn(s.items[1]), build_expr(s.items[2])), s);
  }
  if (head == "filter") {
    want(2);
    return at(filter_e(build_fn(s.items[1]), build_expr(s.items[2])), s);
  }
  if (head == "zip") {
    want(2);
    return at(zip_e(build_expr(s.items[1]), build_expr(s.items[2])), s);
  }
  if (head == "fold") {
    want(3);
    return at(fold_e(build_fn(s.items[1]), build_expr(s.items[2]),
                     build_expr(s.items[3])),
              s);
  }
  if (head == "get-or-else") {
    // Sugar: (ite (contains m k) (get m k) d)
    want(3);
    Expr m = build_expr(s.items[1]);
    Expr k = build_expr(s.items[2]);
    Expr d = build_expr(s.items[3]);
    return at(ite_e(call_e(Builtin::Contains, {m, k}),
                    call_e(Builtin::Get, {m, k}), d),
              s);
  }
  if (head == "lambda") fail(s, "lambda is not a value in expression position");

  auto it = builtin_table().find(head);
  if (it != builtin_table().end()) {
    want(static_cast<size_t>(builtin_arity(it->second)));
    std::vector<Expr> args;
    for (size_t i = 1; i < n; ++i) args.push_back(build_expr(s.items[i]));
    return at(call_e(it->second, std::move(args)), s);
  }
  fail(s, "unknown form '" + head + "'");
}

FuncPtr build_fn(const Sexp& s) {
  if (!s.is("lambda") || s.items.size() != 3)
    fail(s, "expected (lambda ((name type)...) body)");
  const Sexp& plist = s.items[1];
  if (plist.kind != Sexp::List) fail(plist, "expected parameter list");
  std::vector<std::pair<std::string, Type>> params;
  for (const auto& p : plist.items) {
    if (p.kind != Sexp::List || p.items.size() != 2 ||
        p.items[0].kind != Sexp::Atom)
      fail(p, "expected (name type) parameter");
    params.emplace_back(p.items[0].text, build_type(p.items[1]));
  }
  return make_fn(std::move(params), build_expr(s.items[2]));
}

Program build_program(const Sexp& s) {
  Program p;
  bool have_input = false, have_agg = false;
  for (size_t i = 1; i < s.items.size(); ++i) {
    const Sexp& form = s.items[i];
    if (form.is("input")) {
      if (form.items.size() != 3 || form.items[1].kind != Sexp::Atom)
        fail(form, "expected (input name (df type))");
      p.input_name = form.items[1].text;
      p.input_type = build_type(form.items[2]);
      if (p.input_type.kind != TypeKind::DataFrame)
        fail(form.items[2], "program input must be a dataframe type");
      have_input = true;
    } else if (form.is("select") || form.is("project")) {
      if (form.items.size() != 2) fail(form, "expected one function argument");
      PipelineStep step;
      step.kind = form.is("select") ? StepKind::Select : StepKind::Project;
      step.fn = build_fn(form.items[1]);
      p.pipeline.push_back(std::move(step));
    } else if (form.is("aggregate")) {
      if (form.items.size() != 3)
        fail(form, "expected (aggregate fn init)");
      p.accumulator = build_fn(form.items[1]);
      p.init = build_expr(form.items[2]);
      have_agg = true;
    } else {
      fail(form, "unknown program form");
    }
  }
  if (!have_input) fail(s, "program missing (input ...)");
  if (!have_agg) fail(s, "program missing (aggregate ...)");
  return p;
}

}  // namespace

ParseResult parse(const std::string& text) {
  Reader reader(text);
  std::vector<Sexp> forms = reader.read_all();
  if (forms.empty()) throw ParseError("empty input", 1, 1);
  if (forms.size() != 1)
    throw ParseError("expected a single top-level form", forms[1].line,
                     forms[1].col);
  const Sexp& top = forms[0];
  if (top.is("program")) return build_program(top);
  return build_expr(top);
}

Program parse_program(const std::string& text) {
  auto r = parse(text);
  if (auto* p = std::get_if<Program>(&r)) return std::move(*p);
  throw ParseError("expected a (program ...) form", 1, 1);
}

Expr parse_expr_text(const std::string& text) {
  auto r = parse(text);
  if (auto* e = std::get_if<Expr>(&r)) return std::move(*e);
  throw ParseError("expected an expression", 1, 1);
}

FuncPtr parse_fn_text(const std::string& text) {
  Reader reader(text);
  std::vector<Sexp> forms = reader.read_all();
  if (forms.size() != 1) throw ParseError("expected a single lambda", 1, 1);
  return build_fn(forms[0]);
}

Type parse_type_text(const std::string& text) {
  Reader reader(text);
  std::vector<Sexp> forms = reader.read_all();
  if (forms.size() != 1) throw ParseError("expected a single type", 1, 1);
  return build_type(forms[0]);
}

// ---------------------------------------------------------------------------
// Pretty printer (canonical form; parse . print is the identity)
// ---------------------------------------------------------------------------

namespace {

std::string print_value_literal(const Value& v) {
  // Scalar constants print in parseable literal form. Collection constants
  // only arise internally; they print via constructor chains.
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
    default: return value_to_string(v);
  }
}

}  // namespace

std::string print_expr(const Expr& e) {
  switch (e.kind) {
    case ExprKind::Const: return print_value_literal(e.constant);
    case ExprKind::Default: return "(default " + type_to_string(e.type_arg) + ")";
    case ExprKind::Var: return e.var;
    case ExprKind::Call: {
      std::string out = "(" + std::string(builtin_name(e.op));
      for (const auto& a : e.args) out += " " + print_expr(a);
      return out + ")";
    }
    case ExprKind::Apply: {
      std::string out = "(" + print_fn(*e.fn);
      for (const auto& a : e.args) out += " " + print_expr(a);
      return out + ")";
    }
    case ExprKind::Ite:
      return "(ite " + print_expr(e.args[0]) + " " + print_expr(e.args[1]) +
             " " + print_expr(e.args[2]) + ")";
    case ExprKind::TupleE: {
      std::string out = "(tuple";
      for (const auto& a : e.args) out += " " + print_expr(a);
      return out + ")";
    }
    case ExprKind::Proj:
      return "(proj " + std::to_string(e.index) + " " + print_expr(e.args[0]) +
             ")";
    case ExprKind::Update:
      return "(update " + print_expr(e.args[0]) + " " + print_expr(e.args[1]) +
             " " + print_expr(e.args[2]) + ")";
    case ExprKind::Append:
      return "(append " + print_expr(e.args[0]) + " " + print_expr(e.args[1]) +
             ")";
    case ExprKind::Insert:
      return "(insert " + print_expr(e.args[0]) + " " + print_expr(e.args[1]) +
             ")";
    case ExprKind::UnionE:
      return "(union " + print_expr(e.args[0]) + " " + print_expr(e.args[1]) +
             ")";
    case ExprKind::OuterJoin:
      return "(outer-join " + print_expr(e.args[0]) + " " +
             print_expr(e.args[1]) + ")";
    case ExprKind::Convert:
      return "(convert " + type_to_string(e.type_arg) + " " +
             print_expr(e.args[0]) + ")";
    case ExprKind::MapHO:
      return "(map " + print_fn(*e.fn) + " " + print_expr(e.args[0]) + ")";
    case ExprKind::FilterHO:
      return "(filter " + print_fn(*e.fn) + " " + print_expr(e.args[0]) + ")";
    case ExprKind::Zip:
      return "(zip " + print_expr(e.args[0]) + " " + print_expr(e.args[1]) +
             ")";
    case ExprKind::Fold:
      return "(fold " + print_fn(*e.fn) + " " + print_expr(e.args[0]) + " " +
             print_expr(e.args[1]) + ")";
  }
  return "?";
}

std::string print_fn(const Func& f) {
  std::string out = "(lambda (";
  for (size_t i = 0; i < f.params.size(); ++i) {
    if (i) out += " ";
    out += "(" + f.params[i].first + " " + type_to_string(f.params[i].second) +
           ")";
  }
  return out + ") " + print_expr(f.body) + ")";
}

std::string print_program(const Program& p) {
  std::string out = "(program\n  (input " + p.input_name + " " +
                    type_to_string(p.input_type) + ")";
  for (const auto& step : p.pipeline) {
    out += "\n  (";
    out += step.kind == StepKind::Select ? "select " : "project ";
    out += print_fn(*step.fn) + ")";
  }
  out += "\n  (aggregate " + print_fn(*p.accumulator) + " " +
         print_expr(p.init) + "))";
  return out;
}

}  // namespace homcalc
