#include "pnp/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <vector>

#include "pnp/error.hpp"

namespace pnp {

struct Expression::Node {
  enum class Kind { Number, Variable, Negate, Add, Sub, Mul, Div, Pow, Call };
  enum class Func { Exp, Log, Sin, Cos, Tan, Sqrt, Abs, Min, Max, Pow, Chi };

  Kind kind = Kind::Number;
  double value = 0.0;
  int variable = 0;  // 0..2 spatial, 3 time
  Func func = Func::Exp;
  std::vector<std::shared_ptr<const Node>> args;

  double eval(const Point& p, double t) const {
    switch (kind) {
      case Kind::Number: return value;
      case Kind::Variable: return variable == 3 ? t : p[variable];
      case Kind::Negate: return -args[0]->eval(p, t);
      case Kind::Add: return args[0]->eval(p, t) + args[1]->eval(p, t);
      case Kind::Sub: return args[0]->eval(p, t) - args[1]->eval(p, t);
      case Kind::Mul: return args[0]->eval(p, t) * args[1]->eval(p, t);
      case Kind::Div: return args[0]->eval(p, t) / args[1]->eval(p, t);
      case Kind::Pow: return std::pow(args[0]->eval(p, t), args[1]->eval(p, t));
      case Kind::Call: return call(p, t);
    }
    return 0.0;
  }

  double call(const Point& p, double t) const {
    const double a = args[0]->eval(p, t);
    switch (func) {
      case Func::Exp: return std::exp(a);
      case Func::Log: return std::log(a);
      case Func::Sin: return std::sin(a);
      case Func::Cos: return std::cos(a);
      case Func::Tan: return std::tan(a);
      case Func::Sqrt: return std::sqrt(a);
      case Func::Abs: return std::abs(a);
      case Func::Min: return std::min(a, args[1]->eval(p, t));
      case Func::Max: return std::max(a, args[1]->eval(p, t));
      case Func::Pow: return std::pow(a, args[1]->eval(p, t));
      case Func::Chi: {
        const double lo = args[1]->eval(p, t);
        const double hi = args[2]->eval(p, t);
        return (a >= lo && a <= hi) ? 1.0 : 0.0;
      }
    }
    return 0.0;
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Node = Expression::Node;

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodePtr parse() {
    NodePtr root = expr();
    skip_space();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw InvalidArgument("expression \"" + s_ + "\": " + msg + " at column " +
                          std::to_string(pos_ + 1));
  }

  void skip_space() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  static NodePtr binary(Node::Kind kind, NodePtr a, NodePtr b) {
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->args = {std::move(a), std::move(b)};
    return n;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = binary(Node::Kind::Add, lhs, term());
      } else if (accept('-')) {
        lhs = binary(Node::Kind::Sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = binary(Node::Kind::Mul, lhs, unary());
      } else if (accept('/')) {
        lhs = binary(Node::Kind::Div, lhs, unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) {
      auto n = std::make_shared<Node>();
      n->kind = Node::Kind::Negate;
      n->args = {unary()};
      return n;
    }
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return binary(Node::Kind::Pow, base, unary());
    return base;
  }

  NodePtr primary() {
    skip_space();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr inner = expr();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return name();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  NodePtr number() {
    const char* begin = s_.c_str() + pos_;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) fail("malformed number");
    pos_ += static_cast<std::size_t>(end - begin);
    auto n = std::make_shared<Node>();
    n->value = v;
    return n;
  }

  NodePtr name() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
      ++pos_;
    }
    const std::string id = s_.substr(start, pos_ - start);
    skip_space();
    if (pos_ < s_.size() && s_[pos_] == '(') {
      ++pos_;
      return call(id);
    }
    auto n = std::make_shared<Node>();
    if (id == "x" || id == "y" || id == "z" || id == "t") {
      n->kind = Node::Kind::Variable;
      n->variable = id == "x" ? 0 : id == "y" ? 1 : id == "z" ? 2 : 3;
    } else if (id == "pi") {
      n->value = std::numbers::pi;
    } else if (id == "e") {
      n->value = std::numbers::e;
    } else {
      pos_ = start;
      fail("unknown name '" + id + "'");
    }
    return n;
  }

  NodePtr call(const std::string& id) {
    struct Entry {
      const char* name;
      Node::Func func;
      std::size_t arity;
    };
    static constexpr Entry table[] = {
        {"exp", Node::Func::Exp, 1},  {"log", Node::Func::Log, 1},
        {"sin", Node::Func::Sin, 1},  {"cos", Node::Func::Cos, 1},
        {"tan", Node::Func::Tan, 1},  {"sqrt", Node::Func::Sqrt, 1},
        {"abs", Node::Func::Abs, 1},  {"min", Node::Func::Min, 2},
        {"max", Node::Func::Max, 2},  {"pow", Node::Func::Pow, 2},
        {"chi", Node::Func::Chi, 3},
    };
    const Entry* entry = nullptr;
    for (const auto& e : table) {
      if (id == e.name) entry = &e;
    }
    if (entry == nullptr) fail("unknown function '" + id + "'");

    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Call;
    n->func = entry->func;
    n->args.push_back(expr());
    while (accept(',')) n->args.push_back(expr());
    if (!accept(')')) fail("expected ')' after arguments of " + id);
    if (n->args.size() != entry->arity) {
      fail(id + " takes " + std::to_string(entry->arity) + " argument(s), got " +
           std::to_string(n->args.size()));
    }
    return n;
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression Expression::parse(const std::string& source) {
  Parser parser(source);
  return Expression(source, parser.parse());
}

double Expression::operator()(const Point& p, double t) const { return root_->eval(p, t); }

}  // namespace pnp
