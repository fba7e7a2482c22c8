#pragma once
/// @file expression.hpp
/// Small arithmetic grammar for user immersions in the variables u, v:
///
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := ('+' | '-') unary | power
///   power   := primary ('^' unary)?
///   primary := number | 'u' | 'v' | 'pi' | func '(' expr ')' | '(' expr ')'
///   func    := sin | cos | tan | exp | log | sqrt
///
/// Evaluation is on jets, so partials are exact.

#include <cctype>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "sasaki/jet.hpp"

namespace sasaki {

class Expression {
 public:
  Jet eval(const Jet& u, const Jet& v) const { return root_->eval(u, v, source_); }
  double eval(double u, double v) const { return eval(Jet(u), Jet(v)).value(); }
  const std::string& source() const { return source_; }

  friend Expression parse_expression(const std::string& text);

  /// parse tree node (internal)
  struct Node {
    enum class Kind { number, u, v, neg, add, sub, mul, div, pow, call } kind = Kind::number;
    double value = 0.0;
    std::string func;
    std::size_t begin = 0, end = 0;  ///< source span
    std::unique_ptr<Node> a, b;

    Jet eval(const Jet& u, const Jet& v, const std::string& src) const {
      try {
        switch (kind) {
          case Kind::number: return Jet(value);
          case Kind::u: return u;
          case Kind::v: return v;
          case Kind::neg: return -a->eval(u, v, src);
          case Kind::add: return a->eval(u, v, src) + b->eval(u, v, src);
          case Kind::sub: return a->eval(u, v, src) - b->eval(u, v, src);
          case Kind::mul: return a->eval(u, v, src) * b->eval(u, v, src);
          case Kind::div: return a->eval(u, v, src) / b->eval(u, v, src);
          case Kind::pow: return pow(a->eval(u, v, src), b->eval(u, v, src));
          case Kind::call: {
            const Jet x = a->eval(u, v, src);
            if (func == "sin") return sin(x);
            if (func == "cos") return cos(x);
            if (func == "tan") return sin(x) / cos(x);
            if (func == "exp") return exp(x);
            if (func == "log") return log(x);
            return sqrt(x);
          }
        }
      } catch (const EvaluationError& e) {
        const std::string what = e.what();
        if (what.find(" in '") != std::string::npos) throw;
        throw EvaluationError(what + " in '" + src.substr(begin, end - begin) + "'");
      }
      return Jet(0.0);
    }
  };

 private:
  std::string source_;
  std::shared_ptr<const Node> root_;
};

namespace detail {

class ExpressionParser {
 public:
  using Node = Expression::Node;
  explicit ExpressionParser(const std::string& s) : s_(s) {}

  std::unique_ptr<Node> parse() {
    auto n = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return n;
  }

 private:
  const std::string& s_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }
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
  static std::unique_ptr<Node> make(Node::Kind k, std::size_t begin, std::size_t end, std::unique_ptr<Node> a = {},
                                    std::unique_ptr<Node> b = {}) {
    auto n = std::make_unique<Node>();
    n->kind = k;
    n->begin = begin;
    n->end = end;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
  }

  std::unique_ptr<Node> expr() {
    skip();
    const std::size_t begin = pos_;
    auto lhs = term();
    for (;;) {
      if (accept('+')) lhs = make(Node::Kind::add, begin, 0, std::move(lhs), term());
      else if (accept('-')) lhs = make(Node::Kind::sub, begin, 0, std::move(lhs), term());
      else break;
      lhs->end = pos_;
    }
    return lhs;
  }
  std::unique_ptr<Node> term() {
    skip();
    const std::size_t begin = pos_;
    auto lhs = unary();
    for (;;) {
      if (accept('*')) lhs = make(Node::Kind::mul, begin, 0, std::move(lhs), unary());
      else if (accept('/')) lhs = make(Node::Kind::div, begin, 0, std::move(lhs), unary());
      else break;
      lhs->end = pos_;
    }
    return lhs;
  }
  std::unique_ptr<Node> unary() {
    skip();
    const std::size_t begin = pos_;
    if (accept('-')) {
      auto n = make(Node::Kind::neg, begin, 0, unary());
      n->end = pos_;
      return n;
    }
    if (accept('+')) return unary();
    return power();
  }
  std::unique_ptr<Node> power() {
    skip();
    const std::size_t begin = pos_;
    auto base = primary();
    if (accept('^')) {
      base = make(Node::Kind::pow, begin, 0, std::move(base), unary());
      base->end = pos_;
    }
    return base;
  }
  std::unique_ptr<Node> primary() {
    skip();
    const std::size_t begin = pos_;
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t used = 0;
      double x = 0.0;
      try {
        x = std::stod(s_.substr(pos_), &used);
      } catch (const std::exception&) {
        fail("malformed number");
      }
      pos_ += used;
      auto n = make(Node::Kind::number, begin, pos_);
      n->value = x;
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t end = pos_;
      while (end < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[end])) || s_[end] == '_')) ++end;
      const std::string id = s_.substr(pos_, end - pos_);
      if (id == "u" || id == "v") {
        pos_ = end;
        return make(id == "u" ? Node::Kind::u : Node::Kind::v, begin, pos_);
      }
      if (id == "pi") {
        pos_ = end;
        auto n = make(Node::Kind::number, begin, pos_);
        n->value = std::numbers::pi;
        return n;
      }
      static const std::vector<std::string> funcs{"sin", "cos", "tan", "exp", "log", "sqrt"};
      if (std::find(funcs.begin(), funcs.end(), id) == funcs.end()) fail("unknown identifier '" + id + "'");
      pos_ = end;
      if (!accept('(')) fail("expected '(' after " + id);
      auto n = make(Node::Kind::call, begin, 0, expr());
      n->func = id;
      if (!accept(')')) fail("expected ')'");
      n->end = pos_;
      return n;
    }
    if (accept('(')) {
      auto n = expr();
      if (!accept(')')) fail("expected ')'");
      return n;
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }
};

}  // namespace detail

/// Throws ParseError carrying the character position of the problem.
inline Expression parse_expression(const std::string& text) {
  Expression e;
  e.source_ = text;
  e.root_ = detail::ExpressionParser(text).parse();
  return e;
}

/// Splits "f1; f2; ..." into component expressions. Parse errors report the
/// position within the whole string.
inline std::vector<Expression> parse_components(const std::string& text, char sep = ';') {
  std::vector<Expression> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t end = text.find(sep, start);
    const std::string part = text.substr(start, end == std::string::npos ? std::string::npos : end - start);
    try {
      out.push_back(parse_expression(part));
    } catch (const ParseError& e) {
      const std::string msg = e.what();
      throw ParseError(msg.substr(0, msg.rfind(" at position ")), start + e.position());
    }
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return out;
}

}  // namespace sasaki
