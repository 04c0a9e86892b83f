#pragma once

// Arithmetic expressions over the selection rates b0, b1, used to define
// response functions in scenario files.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?
//   primary := number | 'b0' | 'b1' | name '(' expr (',' expr)* ')' | '(' expr ')'
//
// Functions: sin, cos, exp, abs (one argument), min, max (two arguments).

#include <memory>
#include <stdexcept>
#include <string>

#include "fairdyn/dynamics.hpp"

namespace fairdyn {

class ParseError : public ValidationError {
 public:
  enum class Kind { Syntax, UnknownIdentifier, Arity };
  ParseError(Kind kind, std::size_t position, const std::string& message);
  Kind kind() const { return kind_; }
  std::size_t position() const { return position_; }

 private:
  Kind kind_;
  std::size_t position_;
};

class Expression {
 public:
  struct Node;

  static Expression parse(const std::string& source);

  double evaluate(double b0, double b1) const;
  double operator()(double b0, double b1) const { return evaluate(b0, b1); }
  const std::string& source() const { return source_; }

 private:
  std::string source_;
  std::shared_ptr<const Node> root_;
};

// Response functions from source text. Lipschitz constants are optional.
DynamicsSpec parse_dynamics(const std::string& exprF0, const std::string& exprF1,
                            std::optional<double> declaredL0 = std::nullopt,
                            std::optional<double> declaredL1 = std::nullopt);

}  // namespace fairdyn
