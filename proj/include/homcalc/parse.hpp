#ifndef HOMCALC_PARSE_HPP
#define HOMCALC_PARSE_HPP

#include <stdexcept>
#include <string>
#include <variant>

#include "homcalc/ast.hpp"

namespace homcalc {

struct ParseError : std::runtime_error {
  int line, col;
  ParseError(const std::string& msg, int line_, int col_)
      : std::runtime_error(msg + " at " + std::to_string(line_) + ":" +
                           std::to_string(col_)),
        line(line_),
        col(col_) {}
};

using ParseResult = std::variant<Program, Expr>;

/// Parses one `(program ...)` form, or a single standalone expression
/// (typically a lambda used as a merge fixture). Comments run from `;`
/// to end of line.
ParseResult parse(const std::string& text);

Program parse_program(const std::string& text);
Expr parse_expr_text(const std::string& text);
FuncPtr parse_fn_text(const std::string& text);
Type parse_type_text(const std::string& text);

std::string print_expr(const Expr& e);
std::string print_fn(const Func& f);
std::string print_program(const Program& p);

}  // namespace homcalc

#endif
