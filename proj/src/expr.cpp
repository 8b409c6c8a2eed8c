#include "gcurve/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>

#include "gcurve/errors.hpp"

namespace gcurve {

struct Expr::Node {
  enum class Op { Const, Var, Neg, Add, Sub, Mul, Div, Pow, Sin, Cos, Exp, Abs, Min, Max };
  Op op = Op::Const;
  double value = 0.0;
  std::size_t var = 0;
  std::vector<std::shared_ptr<const Node>> args;

  double eval(std::span<const double> x) const {
    switch (op) {
      case Op::Const: return value;
      case Op::Var: return x[var];
      case Op::Neg: return -args[0]->eval(x);
      case Op::Add: return args[0]->eval(x) + args[1]->eval(x);
      case Op::Sub: return args[0]->eval(x) - args[1]->eval(x);
      case Op::Mul: return args[0]->eval(x) * args[1]->eval(x);
      case Op::Div: return args[0]->eval(x) / args[1]->eval(x);
      case Op::Pow: {
        const double e = args[1]->eval(x);
        const double b = args[0]->eval(x);
        // small integer exponents by repeated multiplication so (r-2)^2 is exact-ish
        if (e == 2.0) return b * b;
        if (e == 3.0) return b * b * b;
        return std::pow(b, e);
      }
      case Op::Sin: return std::sin(args[0]->eval(x));
      case Op::Cos: return std::cos(args[0]->eval(x));
      case Op::Exp: return std::exp(args[0]->eval(x));
      case Op::Abs: return std::abs(args[0]->eval(x));
      case Op::Min: {
        double m = args[0]->eval(x);
        for (std::size_t i = 1; i < args.size(); ++i) m = std::min(m, args[i]->eval(x));
        return m;
      }
      case Op::Max: {
        double m = args[0]->eval(x);
        for (std::size_t i = 1; i < args.size(); ++i) m = std::max(m, args[i]->eval(x));
        return m;
      }
    }
    return 0.0;
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;
using Op = Expr::Node::Op;

NodePtr make(Op op, std::vector<NodePtr> args) {
  auto n = std::make_shared<Expr::Node>();
  n->op = op;
  n->args = std::move(args);
  return n;
}

NodePtr make_const(double v) {
  auto n = std::make_shared<Expr::Node>();
  n->op = Op::Const;
  n->value = v;
  return n;
}

class Parser {
 public:
  Parser(const std::string& src, const std::vector<std::string>& vars) : s_(src), vars_(vars) {}

  NodePtr parse() {
    NodePtr e = expression();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorKind::ParseError,
                "expression \"" + s_ + "\" at offset " + std::to_string(pos_) + ": " + msg);
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  NodePtr expression() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = make(Op::Add, {lhs, term()});
      } else if (accept('-')) {
        lhs = make(Op::Sub, {lhs, term()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = make(Op::Mul, {lhs, unary()});
      } else if (accept('/')) {
        lhs = make(Op::Div, {lhs, unary()});
      } else {
        return lhs;
      }
    }
  }

  // unary minus binds looser than ^, so -x^2 == -(x^2)
  NodePtr unary() {
    if (accept('-')) return make(Op::Neg, {unary()});
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return make(Op::Pow, {base, unary()});
    return base;
  }

  NodePtr primary() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    const char c = s_[pos_];
    if (accept('(')) {
      NodePtr e = expression();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  NodePtr number() {
    const char* begin = s_.c_str() + pos_;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) fail("malformed number");
    pos_ += static_cast<std::size_t>(end - begin);
    return make_const(v);
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
      ++pos_;
    }
    const std::string name = s_.substr(start, pos_ - start);
    if (name == "pi") return make_const(std::numbers::pi);
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      if (vars_[i] == name) {
        auto n = std::make_shared<Expr::Node>();
        n->op = Op::Var;
        n->var = i;
        return n;
      }
    }
    struct Fn {
      const char* name;
      Op op;
      bool variadic;
    };
    static constexpr Fn kFns[] = {{"sin", Op::Sin, false}, {"cos", Op::Cos, false},
                                  {"exp", Op::Exp, false}, {"abs", Op::Abs, false},
                                  {"min", Op::Min, true},  {"max", Op::Max, true}};
    for (const Fn& fn : kFns) {
      if (name != fn.name) continue;
      expect('(');
      std::vector<NodePtr> args{expression()};
      while (accept(',')) args.push_back(expression());
      expect(')');
      if (!fn.variadic && args.size() != 1) fail(name + " takes one argument");
      if (fn.variadic && args.size() < 2) fail(name + " takes at least two arguments");
      return make(fn.op, std::move(args));
    }
    pos_ = start;
    fail("unknown identifier '" + name + "'");
  }

  const std::string& s_;
  const std::vector<std::string>& vars_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr Expr::compile(const std::string& source, std::vector<std::string> variables) {
  Expr e;
  e.source_ = source;
  e.variables_ = std::move(variables);
  e.root_ = Parser(e.source_, e.variables_).parse();
  return e;
}

double Expr::operator()(std::span<const double> values) const {
  if (values.size() < variables_.size()) {
    throw Error(ErrorKind::DomainError, "expression \"" + source_ + "\" needs " +
                                            std::to_string(variables_.size()) + " variables");
  }
  return root_->eval(values);
}

}  // namespace gcurve
