#include "fairdyn/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <vector>

namespace fairdyn {

ParseError::ParseError(Kind kind, std::size_t position, const std::string& message)
    : ValidationError(message + " at position " + std::to_string(position)), kind_(kind), position_(position) {}

struct Expression::Node {
  enum class Op { Const, B0, B1, Neg, Add, Sub, Mul, Div, Pow, Sin, Cos, Exp, Abs, Min, Max };
  Op op = Op::Const;
  double value = 0.0;
  std::shared_ptr<const Node> a, b;

  double eval(double b0, double b1) const {
    switch (op) {
      case Op::Const: return value;
      case Op::B0: return b0;
      case Op::B1: return b1;
      case Op::Neg: return -a->eval(b0, b1);
      case Op::Add: return a->eval(b0, b1) + b->eval(b0, b1);
      case Op::Sub: return a->eval(b0, b1) - b->eval(b0, b1);
      case Op::Mul: return a->eval(b0, b1) * b->eval(b0, b1);
      case Op::Div: return a->eval(b0, b1) / b->eval(b0, b1);
      case Op::Pow: return std::pow(a->eval(b0, b1), b->eval(b0, b1));
      case Op::Sin: return std::sin(a->eval(b0, b1));
      case Op::Cos: return std::cos(a->eval(b0, b1));
      case Op::Exp: return std::exp(a->eval(b0, b1));
      case Op::Abs: return std::abs(a->eval(b0, b1));
      case Op::Min: return std::min(a->eval(b0, b1), b->eval(b0, b1));
      case Op::Max: return std::max(a->eval(b0, b1), b->eval(b0, b1));
    }
    return 0.0;
  }
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;
using Op = Node::Op;

NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

class Parser {
 public:
  explicit Parser(const std::string& src) : s_(src) {}

  NodePtr parse_all() {
    NodePtr e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) { throw ParseError(ParseError::Kind::Syntax, pos_, msg); }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  NodePtr expr() {
    NodePtr lhs = term();
    while (true) {
      if (accept('+')) lhs = make(Op::Add, lhs, term());
      else if (accept('-')) lhs = make(Op::Sub, lhs, term());
      else return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    while (true) {
      if (accept('*')) lhs = make(Op::Mul, lhs, unary());
      else if (accept('/')) lhs = make(Op::Div, lhs, unary());
      else return lhs;
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Op::Neg, unary());
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return make(Op::Pow, base, unary());
    return base;
  }

  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  NodePtr number() {
    const std::size_t start = pos_;
    double v = 0.0;
    const auto [end, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
    if (ec != std::errc() || end == s_.data() + pos_) fail("malformed number");
    pos_ = static_cast<std::size_t>(end - s_.data());
    if (pos_ < s_.size() && (std::isalpha(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
      pos_ = start;
      fail("malformed number");
    }
    auto n = std::make_shared<Node>();
    n->op = Op::Const;
    n->value = v;
    return n;
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    const std::string name = s_.substr(start, pos_ - start);
    if (name == "b0") return make(Op::B0);
    if (name == "b1") return make(Op::B1);

    struct Fn {
      const char* name;
      Op op;
      std::size_t arity;
    };
    static constexpr Fn fns[] = {{"sin", Op::Sin, 1}, {"cos", Op::Cos, 1}, {"exp", Op::Exp, 1},
                                 {"abs", Op::Abs, 1}, {"min", Op::Min, 2}, {"max", Op::Max, 2}};
    const Fn* fn = nullptr;
    for (const auto& f : fns)
      if (name == f.name) fn = &f;
    if (!fn) throw ParseError(ParseError::Kind::UnknownIdentifier, start, "unknown identifier '" + name + "'");

    expect('(');
    std::vector<NodePtr> args{expr()};
    while (accept(',')) args.push_back(expr());
    expect(')');
    if (args.size() != fn->arity)
      throw ParseError(ParseError::Kind::Arity, start,
                       name + " takes " + std::to_string(fn->arity) + " argument(s), got " +
                           std::to_string(args.size()));
    return make(fn->op, args[0], args.size() > 1 ? args[1] : nullptr);
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression Expression::parse(const std::string& source) {
  Expression e;
  e.source_ = source;
  e.root_ = Parser(source).parse_all();
  return e;
}

double Expression::evaluate(double b0, double b1) const { return root_->eval(b0, b1); }

DynamicsSpec parse_dynamics(const std::string& exprF0, const std::string& exprF1, std::optional<double> declaredL0,
                            std::optional<double> declaredL1) {
  Expression f0 = Expression::parse(exprF0);
  Expression f1 = Expression::parse(exprF1);
  return DynamicsSpec("expression", f0, f1, declaredL0, declaredL1);
}

}  // namespace fairdyn
