#ifndef HTV_PARSER_HPP
#define HTV_PARSER_HPP

#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rational.hpp"

namespace htv {

struct parse_error : std::runtime_error {
  int line;
  int column;
  parse_error(const std::string& msg, int l, int c)
      : std::runtime_error("parse error at " + std::to_string(l) + ":" + std::to_string(c) +
                           ": " + msg),
        line(l),
        column(c) {}
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind {
    Number,   // integer literal
    Tau,      // t
    ShiftT,   // T
    DtauOp,   // Dtau
    Vac,      // vac
    Gen,      // bare generator name
    ModeTerm, // gen[expr]
    Chain,    // juxtaposed mode terms ending in vac
    Call,     // name(args...)
    Neg,
    Add,
    Sub,
    Mul,
    Div,
    Pow,
  };
  Kind kind;
  Integer number;             // Number
  std::string name;           // Gen / ModeTerm / Call
  long exponent = 0;          // Pow
  std::vector<ExprPtr> args;  // operands

  static std::shared_ptr<Expr> make(Kind k) {
    auto e = std::make_shared<Expr>();
    e->kind = k;
    return e;
  }
};

namespace detail {

struct Token {
  enum class Type { Number, Ident, Op, End } type;
  std::string text;
  Integer value;
  int line = 1, column = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) { advance(); }
  const Token& peek() const { return tok_; }
  Token next() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  std::string src_;
  std::size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  Token tok_;

  void advance() {
    while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n')) {
      if (src_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
      ++pos_;
    }
    tok_.line = line_;
    tok_.column = col_;
    if (pos_ >= src_.size()) {
      tok_.type = Token::Type::End;
      tok_.text = "<end>";
      return;
    }
    char c = src_[pos_];
    if (c >= '0' && c <= '9') {
      std::string digits;
      while (pos_ < src_.size() && src_[pos_] >= '0' && src_[pos_] <= '9') {
        digits += src_[pos_++];
        ++col_;
      }
      tok_.type = Token::Type::Number;
      tok_.text = digits;
      tok_.value = Integer(digits);
      return;
    }
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_') {
      std::string ident;
      while (pos_ < src_.size() &&
             ((src_[pos_] >= 'a' && src_[pos_] <= 'z') || (src_[pos_] >= 'A' && src_[pos_] <= 'Z') ||
              (src_[pos_] >= '0' && src_[pos_] <= '9') || src_[pos_] == '_')) {
        ident += src_[pos_++];
        ++col_;
      }
      tok_.type = Token::Type::Ident;
      tok_.text = ident;
      return;
    }
    static const std::string ops = "+-*/^()[],";
    if (ops.find(c) != std::string::npos) {
      tok_.type = Token::Type::Op;
      tok_.text = std::string(1, c);
      ++pos_;
      ++col_;
      return;
    }
    throw parse_error("unexpected character '" + std::string(1, c) + "'", line_, col_);
  }
};

}  // namespace detail

class Parser {
 public:
  explicit Parser(const std::string& src) : lex_(src) {}

  ExprPtr parse() {
    ExprPtr e = parse_expr();
    expect_end();
    return e;
  }

 private:
  detail::Lexer lex_;

  [[noreturn]] void fail(const std::string& expected) {
    const auto& t = lex_.peek();
    throw parse_error("expected " + expected + ", found '" + t.text + "'", t.line, t.column);
  }
  void expect_end() {
    if (lex_.peek().type != detail::Token::Type::End) fail("end of input");
  }
  bool at_op(const char* s) const {
    return lex_.peek().type == detail::Token::Type::Op && lex_.peek().text == s;
  }
  void eat_op(const char* s) {
    if (!at_op(s)) fail(std::string("'") + s + "'");
    lex_.next();
  }

  ExprPtr parse_expr() {
    ExprPtr lhs = parse_term();
    while (at_op("+") || at_op("-")) {
      bool plus = at_op("+");
      lex_.next();
      ExprPtr rhs = parse_term();
      auto e = Expr::make(plus ? Expr::Kind::Add : Expr::Kind::Sub);
      e->args = {lhs, rhs};
      lhs = e;
    }
    return lhs;
  }

  ExprPtr parse_term() {
    ExprPtr lhs = parse_factor();
    while (at_op("*") || at_op("/")) {
      bool mul = at_op("*");
      lex_.next();
      ExprPtr rhs = parse_factor();
      auto e = Expr::make(mul ? Expr::Kind::Mul : Expr::Kind::Div);
      e->args = {lhs, rhs};
      lhs = e;
    }
    return lhs;
  }

  ExprPtr parse_factor() {
    if (at_op("-")) {
      lex_.next();
      auto e = Expr::make(Expr::Kind::Neg);
      e->args = {parse_factor()};
      return e;
    }
    return parse_power();
  }

  ExprPtr parse_power() {
    ExprPtr base = parse_primary();
    if (at_op("^")) {
      lex_.next();
      bool neg = false;
      if (at_op("-")) {
        lex_.next();
        neg = true;
      }
      if (lex_.peek().type != detail::Token::Type::Number) fail("integer exponent");
      detail::Token t = lex_.next();
      auto e = Expr::make(Expr::Kind::Pow);
      e->exponent = static_cast<long>(t.value.convert_to<long long>());
      if (neg) e->exponent = -e->exponent;
      e->args = {base};
      return e;
    }
    return base;
  }

  bool starts_mode_or_vac() {
    const auto& t = lex_.peek();
    return t.type == detail::Token::Type::Ident &&
           (t.text == "vac" || true /* any ident could be a generator */);
  }

  ExprPtr parse_primary() {
    const auto& t = lex_.peek();
    if (t.type == detail::Token::Type::Number) {
      auto tok = lex_.next();
      auto e = Expr::make(Expr::Kind::Number);
      e->number = tok.value;
      return e;
    }
    if (at_op("(")) {
      lex_.next();
      ExprPtr inner = parse_expr();
      eat_op(")");
      return inner;
    }
    if (t.type != detail::Token::Type::Ident) fail("expression");
    auto tok = lex_.next();
    const std::string& name = tok.text;
    if (name == "t") return Expr::make(Expr::Kind::Tau);
    if (name == "T") return Expr::make(Expr::Kind::ShiftT);
    if (name == "Dtau") return Expr::make(Expr::Kind::DtauOp);
    if (name == "vac") return Expr::make(Expr::Kind::Vac);
    if (at_op("(")) {
      lex_.next();
      auto e = Expr::make(Expr::Kind::Call);
      e->name = name;
      if (!at_op(")")) {
        e->args.push_back(parse_expr());
        while (at_op(",")) {
          lex_.next();
          e->args.push_back(parse_expr());
        }
      }
      eat_op(")");
      return e;
    }
    if (at_op("[")) {
      // mode term, possibly the head of a state chain
      lex_.next();
      auto head = Expr::make(Expr::Kind::ModeTerm);
      head->name = name;
      head->args = {parse_expr()};
      eat_op("]");
      std::vector<ExprPtr> chain = {head};
      while (true) {
        const auto& nt = lex_.peek();
        if (nt.type != detail::Token::Type::Ident) break;
        if (nt.text == "vac") {
          lex_.next();
          chain.push_back(Expr::make(Expr::Kind::Vac));
          auto e = Expr::make(Expr::Kind::Chain);
          e->args = std::move(chain);
          return e;
        }
        auto gt = lex_.next();
        if (!at_op("[")) fail("'[' after generator in state chain");
        lex_.next();
        auto m = Expr::make(Expr::Kind::ModeTerm);
        m->name = gt.text;
        m->args = {parse_expr()};
        eat_op("]");
        chain.push_back(m);
      }
      if (chain.size() == 1) return head;
      auto e = Expr::make(Expr::Kind::Chain);
      e->args = std::move(chain);
      return e;
    }
    auto e = Expr::make(Expr::Kind::Gen);
    e->name = name;
    return e;
  }
};

inline ExprPtr parse_expression(const std::string& src) { return Parser(src).parse(); }

}  // namespace htv

#endif
