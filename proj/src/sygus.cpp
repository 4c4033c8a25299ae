#include "homcalc/sygus.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

namespace homcalc {

namespace {

// ---------------------------------------------------------------------------
// Sort and term rendering
// ---------------------------------------------------------------------------

std::string sort_of(const Type& t) {
  switch (t.kind) {
    case TypeKind::Int: return "Int";
    case TypeKind::Bool: return "Bool";
    case TypeKind::Float: return "Real";
    case TypeKind::Str: return "String";
    case TypeKind::Tuple: {
      std::string out = "(Tuple";
      for (const auto& a : t.args) out += " " + sort_of(a);
      return out + ")";
    }
    case TypeKind::List: return "(Seq " + sort_of(t.args[0]) + ")";
    case TypeKind::Set: return "(Set " + sort_of(t.args[0]) + ")";
    case TypeKind::Map:
      return "(Set (Tuple " + sort_of(t.args[0]) + " " + sort_of(t.args[1]) +
             "))";
    default:
      throw ExportError("unsupported type in export: " + type_to_string(t));
  }
}

std::string lit_int(std::int64_t v) {
  if (v < 0) return "(- " + std::to_string(-v) + ")";
  return std::to_string(v);
}

std::string lit_real(double v) {
  std::ostringstream os;
  os.precision(17);
  os << std::showpoint << std::abs(v);
  std::string body = os.str();
  if (body.back() == '.') body += "0";
  return v < 0 ? "(- " + body + ")" : body;
}

std::string render_value(const Value& v, const Type& t) {
  switch (v.kind) {
    case ValueKind::Int: return lit_int(v.i);
    case ValueKind::Bool: return v.b ? "true" : "false";
    case ValueKind::Float: return lit_real(v.f);
    case ValueKind::Str: {
      std::string out = "\"";
      for (char c : v.s) {
        out += c;
        if (c == '"') out += c;  // SMT-LIB doubles quotes
      }
      return out + "\"";
    }
    case ValueKind::Tuple: {
      std::string out = "(tuple";
      for (size_t i = 0; i < v.elems.size(); ++i)
        out += " " + render_value(v.elems[i], t.args[i]);
      return out + ")";
    }
    case ValueKind::List: {
      if (v.elems.empty()) return "(as seq.empty " + sort_of(t) + ")";
      std::string out = "(seq.++";
      for (const auto& e : v.elems)
        out += " (seq.unit " + render_value(e, t.args[0]) + ")";
      return out + ")";
    }
    case ValueKind::Set: {
      if (v.elems.empty()) return "(as set.empty " + sort_of(t) + ")";
      std::string out = "(set.union";
      for (const auto& e : v.elems)
        out += " (set.singleton " + render_value(e, t.args[0]) + ")";
      return out + (v.elems.size() > 1 ? ")" : ")");
    }
    case ValueKind::Map: {
      if (v.entries.empty()) return "(as set.empty " + sort_of(t) + ")";
      std::string out = "(set.union";
      for (const auto& [k, val] : v.entries)
        out += " (set.singleton (tuple " + render_value(k, t.args[0]) + " " +
               render_value(val, t.args[1]) + "))";
      return out + ")";
    }
    case ValueKind::Null:
      break;
  }
  throw ExportError("unsupported value in export");
}

struct Emitter {
  bool uses_map_lib = false;
  Type map_key, map_val;

  void mark_map(const Type& t) {
    uses_map_lib = true;
    map_key = t.args[0];
    map_val = t.args[1];
  }

  std::string term(const Expr& e) {
    switch (e.kind) {
      case ExprKind::Const:
        return render_value(e.constant, e.type);
      case ExprKind::Default:
        return render_value(default_value(e.type_arg), e.type_arg);
      case ExprKind::Var:
        return e.var;
      case ExprKind::Ite:
        return "(ite " + term(e.args[0]) + " " + term(e.args[1]) + " " +
               term(e.args[2]) + ")";
      case ExprKind::TupleE: {
        std::string out = "(tuple";
        for (const auto& a : e.args) out += " " + term(a);
        return out + ")";
      }
      case ExprKind::Proj:
        return "((_ tuple.select " + std::to_string(e.index - 1) + ") " +
               term(e.args[0]) + ")";
      case ExprKind::Update:
        mark_map(e.args[0].type);
        return "(map.update " + term(e.args[0]) + " " + term(e.args[1]) + " " +
               term(e.args[2]) + ")";
      case ExprKind::Append:
        return "(seq.++ " + term(e.args[0]) + " (seq.unit " + term(e.args[1]) +
               "))";
      case ExprKind::Insert:
        return "(set.insert " + term(e.args[1]) + " " + term(e.args[0]) + ")";
      case ExprKind::UnionE:
        return "(set.union " + term(e.args[0]) + " " + term(e.args[1]) + ")";
      case ExprKind::Call:
        return call(e);
      default:
        throw ExportError("expression form not supported in export: " +
                          std::string(builtin_name(Builtin::Add)));
    }
  }

  std::string call(const Expr& e) {
    bool real = !e.args.empty() && e.args[0].type.kind == TypeKind::Float;
    auto bin = [&](const char* op) {
      return "(" + std::string(op) + " " + term(e.args[0]) + " " +
             term(e.args[1]) + ")";
    };
    switch (e.op) {
      case Builtin::Add: return bin("+");
      case Builtin::Sub: return bin("-");
      case Builtin::Mul: return bin("*");
      case Builtin::Div: return bin(real ? "/" : "div");
      case Builtin::Lt: return bin("<");
      case Builtin::Le: return bin("<=");
      case Builtin::Gt: return bin(">");
      case Builtin::Ge: return bin(">=");
      case Builtin::Eq: return bin("=");
      case Builtin::And: return bin("and");
      case Builtin::Or: return bin("or");
      case Builtin::Not: return "(not " + term(e.args[0]) + ")";
      case Builtin::Min:
        return "(ite (<= " + term(e.args[0]) + " " + term(e.args[1]) + ") " +
               term(e.args[0]) + " " + term(e.args[1]) + ")";
      case Builtin::Max:
        return "(ite (>= " + term(e.args[0]) + " " + term(e.args[1]) + ") " +
               term(e.args[0]) + " " + term(e.args[1]) + ")";
      case Builtin::StrCat: return bin("str.++");
      case Builtin::StrLen: return "(str.len " + term(e.args[0]) + ")";
      case Builtin::Get:
        mark_map(e.args[0].type);
        return "(map.access " + term(e.args[0]) + " " + term(e.args[1]) + ")";
      case Builtin::Contains:
        mark_map(e.args[0].type);
        return "(map.contains_key " + term(e.args[0]) + " " + term(e.args[1]) +
               ")";
      case Builtin::Concat: return bin("seq.++");
      case Builtin::Len: return "(seq.len " + term(e.args[0]) + ")";
      case Builtin::Fill:
        throw ExportError("null-filling has no direct SMT encoding");
    }
    throw ExportError("builtin not supported in export");
  }
};

std::string map_library(const Type& key, const Type& val) {
  std::string K = sort_of(key), V = sort_of(val);
  std::string M = "(Set (Tuple " + K + " " + V + "))";
  std::string empty = "(as set.empty " + M + ")";
  std::ostringstream os;
  os << "; recursive primitive library over maps encoded as key-value sets\n";
  os << "(define-fun-rec map.contains_key ((m " << M << ") (k " << K
     << ")) Bool\n"
     << "  (ite (= m " << empty << ") false\n"
     << "    (let ((e (set.choose m)))\n"
     << "      (or (= ((_ tuple.select 0) e) k)\n"
     << "          (map.contains_key (set.minus m (set.singleton e)) k)))))\n";
  os << "(define-fun-rec map.access ((m " << M << ") (k " << K << ")) " << V
     << "\n"
     << "  (ite (= m " << empty << ") "
     << render_value(default_value(val), val) << "\n"
     << "    (let ((e (set.choose m)))\n"
     << "      (ite (= ((_ tuple.select 0) e) k) ((_ tuple.select 1) e)\n"
     << "        (map.access (set.minus m (set.singleton e)) k)))))\n";
  os << "(define-fun map.update ((m " << M << ") (k " << K << ") (v " << V
     << ")) " << M << "\n"
     << "  (set.insert (tuple k v)\n"
     << "    (set.filter (lambda ((e (Tuple " << K << " " << V
     << "))) (distinct ((_ tuple.select 0) e) k)) m)))\n";
  os << "(define-fun-rec map.map_values ((m " << M << ") (d " << V << ")) "
     << M << "\n"
     << "  (ite (= m " << empty << ") m\n"
     << "    (let ((e (set.choose m)))\n"
     << "      (set.insert (tuple ((_ tuple.select 0) e) d)\n"
     << "        (map.map_values (set.minus m (set.singleton e)) d)))))\n";
  return os.str();
}

// Grammar for the state sort; non-terminal names chosen so the alphabetical
// order is also the emission order.
std::string grammar_for(const SynthProblem& p, Emitter& em) {
  struct NonTerminal {
    std::string name;
    Type type;
    std::vector<std::string> prods;
  };
  std::vector<NonTerminal> nts;
  auto ensure = [&](const std::string& name, const Type& t) -> NonTerminal& {
    for (auto& nt : nts)
      if (nt.name == name) return nt;
    nts.push_back({name, t, {}});
    return nts.back();
  };

  // Collect the scalar types reachable from the state type.
  std::set<std::string> seen;
  std::vector<Type> todo = {p.state_type};
  bool has_int = false, has_bool_src = false, has_float = false,
       has_str = false;
  std::vector<Type> tuples, lists, sets, maps;
  while (!todo.empty()) {
    Type t = todo.back();
    todo.pop_back();
    if (!seen.insert(type_to_string(t)).second) continue;
    switch (t.kind) {
      case TypeKind::Int: has_int = true; break;
      case TypeKind::Bool: has_bool_src = true; break;
      case TypeKind::Float: has_float = true; break;
      case TypeKind::Str: has_str = true; break;
      case TypeKind::Tuple:
        tuples.push_back(t);
        for (const auto& a : t.args) todo.push_back(a);
        break;
      case TypeKind::List:
        lists.push_back(t);
        todo.push_back(t.args[0]);
        break;
      case TypeKind::Set:
        sets.push_back(t);
        todo.push_back(t.args[0]);
        break;
      case TypeKind::Map:
        maps.push_back(t);
        em.mark_map(t);
        todo.push_back(t.args[0]);
        todo.push_back(t.args[1]);
        break;
      default: break;
    }
  }

  auto nt_name = [&](const Type& t) -> std::string {
    switch (t.kind) {
      case TypeKind::Int: return "NTInt";
      case TypeKind::Bool: return "NTBool";
      case TypeKind::Float: return "NTReal";
      case TypeKind::Str: return "NTString";
      default: {
        // Deterministic short name per composite type.
        std::string key = type_to_string(t);
        std::uint64_t h = 1469598103934665603ULL;
        for (char c : key)
          h = (h ^ static_cast<unsigned char>(c)) * 1099511628211ULL;
        std::ostringstream os;
        os << "NTC" << std::hex << (h & 0xFFFF);
        return os.str();
      }
    }
  };

  std::string start_name = "NTA";  // sorts first alphabetically
  ensure(start_name, p.state_type);

  auto scalar_rules = [&](NonTerminal& nt) {
    const Type& t = nt.type;
    std::string self = nt.name;
    auto harvested = [&] {
      GenConfig hc;
      harvest_constants(*p.f, hc);
      return hc;
    }();
    switch (t.kind) {
      case TypeKind::Int: {
        nt.prods = {"0", "1"};
        for (auto v : harvested.int_pool) nt.prods.push_back(lit_int(v));
        for (const char* op : {"+", "-", "*", "div"})
          nt.prods.push_back("(" + std::string(op) + " " + self + " " + self +
                             ")");
        nt.prods.push_back("(ite NTBool " + self + " " + self + ")");
        break;
      }
      case TypeKind::Float: {
        nt.prods = {"0.0", "1.0"};
        for (auto v : harvested.float_pool) nt.prods.push_back(lit_real(v));
        for (const char* op : {"+", "-", "*"})
          nt.prods.push_back("(" + std::string(op) + " " + self + " " + self +
                             ")");
        nt.prods.push_back("(ite NTBool " + self + " " + self + ")");
        break;
      }
      case TypeKind::Str: {
        nt.prods = {"\"\""};
        for (const auto& s : harvested.str_pool)
          nt.prods.push_back("\"" + s + "\"");
        nt.prods.push_back("(str.++ " + self + " " + self + ")");
        nt.prods.push_back("(ite NTBool " + self + " " + self + ")");
        break;
      }
      case TypeKind::Bool: {
        nt.prods = {"true", "false"};
        nt.prods.push_back("(and " + self + " " + self + ")");
        nt.prods.push_back("(or " + self + " " + self + ")");
        nt.prods.push_back("(not " + self + ")");
        break;
      }
      default: break;
    }
  };

  if (has_int || true) {  // comparisons need an Int side in most grammars
    has_int = true;
    scalar_rules(ensure("NTInt", int_type()));
  }
  scalar_rules(ensure("NTBool", bool_type()));
  if (has_float) scalar_rules(ensure("NTReal", float_type()));
  if (has_str) scalar_rules(ensure("NTString", str_type()));
  (void)has_bool_src;

  // Comparisons feed NTBool.
  {
    NonTerminal& b = ensure("NTBool", bool_type());
    for (const char* op : {"<", "<=", "=", ">", ">="})
      b.prods.push_back("(" + std::string(op) + " NTInt NTInt)");
    if (has_float)
      for (const char* op : {"<", "="})
        b.prods.push_back("(" + std::string(op) + " NTReal NTReal)");
    if (has_str) b.prods.push_back("(= NTString NTString)");
  }
  if (has_str)
    ensure("NTInt", int_type()).prods.push_back("(str.len NTString)");

  // Composite productions.
  for (const auto& t : tuples) {
    NonTerminal& nt = t == p.state_type ? ensure(start_name, t)
                                        : ensure(nt_name(t), t);
    std::string ctor = "(tuple";
    for (const auto& a : t.args)
      ctor += " " + (a.is_scalar() ? (a.kind == TypeKind::Int ? "NTInt"
                                      : a.kind == TypeKind::Bool
                                          ? "NTBool"
                                          : a.kind == TypeKind::Float
                                                ? "NTReal"
                                                : "NTString")
                                   : nt_name(a));
    ctor += ")";
    nt.prods.push_back(ctor);
    nt.prods.push_back("(ite NTBool " + nt.name + " " + nt.name + ")");
  }
  for (const auto& t : lists) {
    NonTerminal& nt = t == p.state_type ? ensure(start_name, t)
                                        : ensure(nt_name(t), t);
    nt.prods.push_back("(seq.++ " + nt.name + " " + nt.name + ")");
    nt.prods.push_back("(as seq.empty " + sort_of(t) + ")");
  }
  for (const auto& t : sets) {
    NonTerminal& nt = t == p.state_type ? ensure(start_name, t)
                                        : ensure(nt_name(t), t);
    nt.prods.push_back("(set.union " + nt.name + " " + nt.name + ")");
    nt.prods.push_back("(as set.empty " + sort_of(t) + ")");
  }
  for (const auto& t : maps) {
    NonTerminal& nt = t == p.state_type ? ensure(start_name, t)
                                        : ensure(nt_name(t), t);
    auto scalar_nt = [](const Type& s) -> std::string {
      switch (s.kind) {
        case TypeKind::Int: return "NTInt";
        case TypeKind::Bool: return "NTBool";
        case TypeKind::Float: return "NTReal";
        default: return "NTString";
      }
    };
    std::string knt = scalar_nt(t.args[0]);
    std::string vnt = scalar_nt(t.args[1]);
    nt.prods.push_back("(map.update " + nt.name + " " + knt + " " + vnt + ")");
    ensure(vnt, t.args[1]).prods.push_back("(map.access " + nt.name + " " +
                                           knt + ")");
    ensure("NTBool", bool_type())
        .prods.push_back("(map.contains_key " + nt.name + " " + knt + ")");
  }

  // Both state arguments are terminals of the start symbol (and of any
  // matching component non-terminal).
  for (auto& nt : nts)
    if (nt.type == p.state_type) {
      nt.prods.insert(nt.prods.begin(), "b");
      nt.prods.insert(nt.prods.begin(), "a");
    }
  // A scalar start symbol delegates to the scalar rules.
  if (p.state_type.is_scalar())
    ensure(start_name, p.state_type).prods = {nt_name(p.state_type)};
  if (p.state_type.kind == TypeKind::Tuple)
    for (auto& nt : nts)
      for (size_t i = 0; i < p.state_type.args.size(); ++i)
        if (nt.type == p.state_type.args[i]) {
          nt.prods.push_back("((_ tuple.select " + std::to_string(i) + ") a)");
          nt.prods.push_back("((_ tuple.select " + std::to_string(i) + ") b)");
        }

  std::sort(nts.begin(), nts.end(),
            [](const NonTerminal& a, const NonTerminal& b) {
              return a.name < b.name;
            });

  std::ostringstream os;
  os << "  (";
  for (size_t i = 0; i < nts.size(); ++i) {
    if (i) os << " ";
    os << "(" << nts[i].name << " " << sort_of(nts[i].type) << ")";
  }
  os << ")\n  (";
  for (size_t i = 0; i < nts.size(); ++i) {
    if (i) os << "\n   ";
    os << "(" << nts[i].name << " " << sort_of(nts[i].type) << " (";
    for (size_t j = 0; j < nts[i].prods.size(); ++j) {
      if (j) os << " ";
      os << nts[i].prods[j];
    }
    os << "))";
  }
  os << ")";
  return os.str();
}

}  // namespace

std::string export_sygus(const SynthProblem& p, bool require_commutative) {
  Emitter em;
  std::string st = sort_of(p.state_type);
  std::string rt = sort_of(p.row_type);

  // f's body, rendered with its own parameter names.
  std::string fbody = em.term(p.f->body);
  std::string grammar = grammar_for(p, em);

  std::ostringstream os;
  os << "; leaf-level normalizer synthesis problem: " << p.path << "\n";
  os << "(set-logic ALL)\n\n";
  if (em.uses_map_lib) os << map_library(em.map_key, em.map_val) << "\n";

  os << "(define-fun f ((" << p.f->params[0].first << " " << st << ") ("
     << p.f->params[1].first << " " << rt << ")) " << st << "\n  " << fbody
     << ")\n\n";

  os << "(synth-fun h ((a " << st << ") (b " << st << ")) " << st << "\n"
     << grammar << ")\n\n";

  os << "(declare-var s " << st << ")\n";
  os << "(declare-var b1 " << st << ")\n";
  os << "(declare-var b2 " << st << ")\n";
  os << "(declare-var r " << rt << ")\n\n";

  std::string init = render_value(p.init, p.state_type);
  os << "; identity side condition\n";
  os << "(constraint (= (h s " << init << ") s))\n";
  os << "; generalized commutativity\n";
  os << "(constraint (= (f (h b1 b2) r) (h b1 (f b2 r))))\n";
  if (require_commutative)
    os << "(constraint (= (h b1 b2) (h b2 b1)))\n";
  os << "\n(check-synth)\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Structural checker
// ---------------------------------------------------------------------------

namespace {

struct SNode {
  bool atom = true;
  std::string text;
  std::vector<SNode> items;
};

struct SReader {
  const std::string& s;
  size_t i = 0;
  explicit SReader(const std::string& src) : s(src) {}

  void ws() {
    while (i < s.size()) {
      if (s[i] == ';') {
        while (i < s.size() && s[i] != '\n') ++i;
      } else if (std::isspace(static_cast<unsigned char>(s[i]))) {
        ++i;
      } else {
        break;
      }
    }
  }

  bool eof() {
    ws();
    return i >= s.size();
  }

  SNode read() {
    ws();
    if (i >= s.size()) throw std::runtime_error("unexpected end of file");
    SNode n;
    if (s[i] == '(') {
      ++i;
      n.atom = false;
      ws();
      while (i < s.size() && s[i] != ')') {
        n.items.push_back(read());
        ws();
      }
      if (i >= s.size()) throw std::runtime_error("unbalanced parenthesis");
      ++i;
      return n;
    }
    if (s[i] == ')') throw std::runtime_error("stray closing parenthesis");
    if (s[i] == '"') {
      ++i;
      n.text = "\"";
      while (i < s.size()) {
        if (s[i] == '"' && i + 1 < s.size() && s[i + 1] == '"') {
          n.text += "\"\"";
          i += 2;
        } else if (s[i] == '"') {
          ++i;
          break;
        } else {
          n.text += s[i++];
        }
      }
      n.text += "\"";
      return n;
    }
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i])) &&
           s[i] != '(' && s[i] != ')' && s[i] != ';')
      n.text += s[i++];
    return n;
  }
};

bool valid_sort(const SNode& n) {
  if (n.atom) return !n.text.empty();
  if (n.items.empty() || !n.items[0].atom) return false;
  // (_ BitVec k) style and parameterized sorts.
  for (size_t i = 1; i < n.items.size(); ++i)
    if (!valid_sort(n.items[i]) && !n.items[i].atom) return false;
  return true;
}

bool valid_term(const SNode& n) {
  if (n.atom) return !n.text.empty();
  if (n.items.empty()) return false;
  for (const auto& it : n.items)
    if (!valid_term(it)) return false;
  return true;
}

bool valid_param_list(const SNode& n, std::vector<std::string>* errs,
                      const char* where) {
  if (n.atom) {
    errs->push_back(std::string(where) + ": parameter list must be a list");
    return false;
  }
  for (const auto& p : n.items) {
    if (p.atom || p.items.size() != 2 || !p.items[0].atom ||
        !valid_sort(p.items[1])) {
      errs->push_back(std::string(where) + ": malformed parameter binding");
      return false;
    }
  }
  return true;
}

}  // namespace

std::vector<std::string> sygus_check(const std::string& text) {
  std::vector<std::string> errs;
  std::vector<SNode> cmds;
  try {
    SReader r(text);
    while (!r.eof()) cmds.push_back(r.read());
  } catch (const std::exception& ex) {
    errs.push_back(ex.what());
    return errs;
  }
  if (cmds.empty()) {
    errs.push_back("empty file");
    return errs;
  }

  int synth_funs = 0;
  bool check_synth = false;
  for (size_t ci = 0; ci < cmds.size(); ++ci) {
    const SNode& c = cmds[ci];
    if (c.atom || c.items.empty() || !c.items[0].atom) {
      errs.push_back("top-level form is not a command");
      continue;
    }
    const std::string& head = c.items[0].text;
    if (head == "set-logic") {
      if (c.items.size() != 2 || !c.items[1].atom)
        errs.push_back("set-logic expects one symbol");
    } else if (head == "declare-var") {
      if (c.items.size() != 3 || !c.items[1].atom || !valid_sort(c.items[2]))
        errs.push_back("declare-var expects a name and a sort");
    } else if (head == "define-fun" || head == "define-fun-rec") {
      if (c.items.size() != 5 || !c.items[1].atom ||
          !valid_sort(c.items[3]) || !valid_term(c.items[4]))
        errs.push_back(head + " expects name, params, sort, body");
      else
        valid_param_list(c.items[2], &errs, head.c_str());
    } else if (head == "synth-fun") {
      ++synth_funs;
      if (c.items.size() < 4 || c.items.size() > 6 || !c.items[1].atom ||
          !valid_sort(c.items[3])) {
        errs.push_back("synth-fun expects name, params, sort [, grammar]");
        continue;
      }
      valid_param_list(c.items[2], &errs, "synth-fun");
      if (c.items.size() == 6) {
        // Grammar: declaration list plus grouped rule list.
        const SNode& decls = c.items[4];
        const SNode& rules = c.items[5];
        std::set<std::string> declared;
        if (decls.atom) {
          errs.push_back("synth-fun grammar: non-terminal list malformed");
        } else {
          for (const auto& d : decls.items) {
            if (d.atom || d.items.size() != 2 || !d.items[0].atom ||
                !valid_sort(d.items[1]))
              errs.push_back("synth-fun grammar: bad non-terminal entry");
            else
              declared.insert(d.items[0].text);
          }
        }
        if (rules.atom) {
          errs.push_back("synth-fun grammar: rule list malformed");
        } else {
          for (const auto& g : rules.items) {
            if (g.atom || g.items.size() != 3 || !g.items[0].atom ||
                !valid_sort(g.items[1]) || g.items[2].atom) {
              errs.push_back("synth-fun grammar: bad grouped rule");
              continue;
            }
            if (!declared.count(g.items[0].text))
              errs.push_back("synth-fun grammar: rule for undeclared " +
                             g.items[0].text);
            for (const auto& prod : g.items[2].items)
              if (!valid_term(prod))
                errs.push_back("synth-fun grammar: malformed production");
          }
        }
      }
    } else if (head == "constraint") {
      if (c.items.size() != 2 || !valid_term(c.items[1]))
        errs.push_back("constraint expects one term");
    } else if (head == "check-synth") {
      check_synth = true;
      if (ci + 1 != cmds.size())
        errs.push_back("check-synth must be the final command");
    } else {
      errs.push_back("unknown command '" + head + "'");
    }
  }
  if (synth_funs != 1) errs.push_back("expected exactly one synth-fun");
  if (!check_synth) errs.push_back("missing check-synth");
  return errs;
}

}  // namespace homcalc
