#ifndef HTV_EVAL_HPP
#define HTV_EVAL_HPP

#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "affine.hpp"
#include "conformal.hpp"
#include "hopf.hpp"
#include "ktau.hpp"
#include "parser.hpp"
#include "rational.hpp"
#include "vacuum.hpp"

namespace htv {

struct eval_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Value = std::variant<Rational, KElement, HopfElement, ConformalElement, LieElement, State>;

struct EvalContext {
  LieElement::Algebra algebra;
  std::shared_ptr<const VacuumModule> module;
  bool unicode = false;

  static EvalContext toda() {
    EvalContext ctx;
    ctx.algebra = ConformalAlgebra::toda();
    ctx.module = std::make_shared<const VacuumModule>(ctx.algebra);
    return ctx;
  }
  static EvalContext for_algebra(LieElement::Algebra alg) {
    EvalContext ctx;
    ctx.algebra = std::move(alg);
    if (ctx.algebra->generators().size() == 2) {
      try {
        ctx.module = std::make_shared<const VacuumModule>(ctx.algebra);
      } catch (const std::invalid_argument&) {
        // no PBW module structure; state expressions will be rejected
      }
    }
    return ctx;
  }

  bool is_generator(const std::string& name) const {
    if (!algebra) return false;
    for (const auto& g : algebra->generators())
      if (g == name) return true;
    return false;
  }
};

namespace detail_eval {

inline KElement as_k(const Value& v, const char* what) {
  if (std::holds_alternative<KElement>(v)) return std::get<KElement>(v);
  if (std::holds_alternative<Rational>(v)) return KElement::constant(std::get<Rational>(v));
  throw eval_error(std::string("expected a K_T expression for ") + what);
}
inline Rational as_rational(const Value& v, const char* what) {
  if (std::holds_alternative<Rational>(v)) return std::get<Rational>(v);
  if (std::holds_alternative<KElement>(v)) {
    const KElement& f = std::get<KElement>(v);
    if (f.is_constant()) return f.poly_coeff(0);
  }
  throw eval_error(std::string("expected a rational for ") + what);
}
inline long as_integer(const Value& v, const char* what) {
  Rational r = as_rational(v, what);
  if (denominator(r) != 1) throw eval_error(std::string("expected an integer for ") + what);
  return static_cast<long>(numerator(r).convert_to<long long>());
}
inline HopfElement as_hopf(const Value& v, const char* what) {
  if (std::holds_alternative<HopfElement>(v)) return std::get<HopfElement>(v);
  if (std::holds_alternative<Rational>(v)) return HopfElement::constant(std::get<Rational>(v));
  throw eval_error(std::string("expected a Hopf expression for ") + what);
}

}  // namespace detail_eval

inline Value eval(const ExprPtr& expr, const EvalContext& ctx);

namespace detail_eval {

inline Value add_values(const Value& a, const Value& b, bool subtract) {
  auto flip = [&](auto x) { return subtract ? x * Rational(-1) : x; };
  if (std::holds_alternative<State>(a) || std::holds_alternative<State>(b)) {
    if (!std::holds_alternative<State>(a) || !std::holds_alternative<State>(b))
      throw eval_error("cannot add a state to a non-state");
    return std::get<State>(a) + flip(std::get<State>(b));
  }
  if (std::holds_alternative<LieElement>(a) || std::holds_alternative<LieElement>(b)) {
    if (!std::holds_alternative<LieElement>(a) || !std::holds_alternative<LieElement>(b))
      throw eval_error("cannot add a Lie element to a non-Lie element");
    return std::get<LieElement>(a) + flip(std::get<LieElement>(b));
  }
  if (std::holds_alternative<ConformalElement>(a) || std::holds_alternative<ConformalElement>(b)) {
    if (!std::holds_alternative<ConformalElement>(a) ||
        !std::holds_alternative<ConformalElement>(b))
      throw eval_error("cannot add a conformal element to a non-conformal element");
    return std::get<ConformalElement>(a) + flip(std::get<ConformalElement>(b));
  }
  if (std::holds_alternative<HopfElement>(a) || std::holds_alternative<HopfElement>(b)) {
    return as_hopf(a, "addition") + (subtract ? as_hopf(b, "addition") * Rational(-1)
                                              : as_hopf(b, "addition"));
  }
  if (std::holds_alternative<KElement>(a) || std::holds_alternative<KElement>(b)) {
    return as_k(a, "addition") + flip(as_k(b, "addition"));
  }
  return std::get<Rational>(a) + flip(std::get<Rational>(b));
}

inline Value mul_values(const Value& a, const Value& b) {
  // scalar cases first
  if (std::holds_alternative<Rational>(a)) {
    const Rational& s = std::get<Rational>(a);
    if (std::holds_alternative<Rational>(b)) return s * std::get<Rational>(b);
    if (std::holds_alternative<KElement>(b)) return std::get<KElement>(b) * s;
    if (std::holds_alternative<HopfElement>(b)) return std::get<HopfElement>(b) * s;
    if (std::holds_alternative<ConformalElement>(b)) return std::get<ConformalElement>(b) * s;
    if (std::holds_alternative<LieElement>(b)) return std::get<LieElement>(b) * s;
    return std::get<State>(b) * s;
  }
  if (std::holds_alternative<Rational>(b)) return mul_values(b, a);
  if (std::holds_alternative<KElement>(a) && std::holds_alternative<KElement>(b))
    return std::get<KElement>(a) * std::get<KElement>(b);
  if (std::holds_alternative<HopfElement>(a) && std::holds_alternative<HopfElement>(b))
    return std::get<HopfElement>(a) * std::get<HopfElement>(b);
  if (std::holds_alternative<HopfElement>(a) && std::holds_alternative<ConformalElement>(b))
    return std::get<HopfElement>(a) * std::get<ConformalElement>(b);
  throw eval_error("unsupported multiplication between these value kinds");
}

inline Value pow_value(const Value& a, long e) {
  if (std::holds_alternative<Rational>(a))
    return rat_pow(std::get<Rational>(a), static_cast<int>(e));
  if (std::holds_alternative<KElement>(a)) return kelement_pow(std::get<KElement>(a), e);
  if (std::holds_alternative<HopfElement>(a)) {
    const HopfElement& h = std::get<HopfElement>(a);
    if (e >= 0) {
      HopfElement out = HopfElement::one();
      for (long i = 0; i < e; ++i) out *= h;
      return out;
    }
    // negative powers only for single group-like terms
    if (h.terms().size() == 1) {
      const auto& [key, c] = *h.terms().begin();
      if (key.second == 0 && c == 1) return HopfElement::T(key.first * e);
    }
    throw eval_error("negative power of a non-invertible Hopf element");
  }
  throw eval_error("unsupported power");
}

}  // namespace detail_eval

inline Value eval(const ExprPtr& expr, const EvalContext& ctx) {
  using detail_eval::as_integer;
  using detail_eval::as_k;
  switch (expr->kind) {
    case Expr::Kind::Number:
      return Rational(expr->number);
    case Expr::Kind::Tau:
      return KElement::variable();
    case Expr::Kind::ShiftT:
      return HopfElement::T(1);
    case Expr::Kind::DtauOp:
      return HopfElement::D(1);
    case Expr::Kind::Vac:
      return State::vacuum();
    case Expr::Kind::Gen: {
      if (!ctx.is_generator(expr->name))
        throw eval_error("unknown identifier '" + expr->name + "'");
      return ConformalElement::generator(expr->name);
    }
    case Expr::Kind::ModeTerm: {
      if (!ctx.is_generator(expr->name))
        throw eval_error("unknown generator '" + expr->name + "'");
      KElement p = as_k(eval(expr->args[0], ctx), "mode label");
      LieElement x(ctx.algebra);
      x.set_coord(expr->name, p);
      return x;
    }
    case Expr::Kind::Chain: {
      if (expr->args.empty() || expr->args.back()->kind != Expr::Kind::Vac)
        throw eval_error("a state chain must end in vac");
      if (!ctx.module) throw eval_error("no vacuum module for this algebra");
      State s = State::vacuum();
      for (std::size_t i = expr->args.size() - 1; i-- > 0;) {
        Value v = eval(expr->args[i], ctx);
        if (!std::holds_alternative<LieElement>(v))
          throw eval_error("state chains consist of mode terms");
        s = ctx.module->act(std::get<LieElement>(v), s);
      }
      return s;
    }
    case Expr::Kind::Call: {
      const std::string& f = expr->name;
      auto need = [&](std::size_t n) {
        if (expr->args.size() != n)
          throw eval_error("'" + f + "' takes " + std::to_string(n) + " argument(s)");
      };
      if (f == "ff") {
        need(1);
        return falling_factorial(as_integer(eval(expr->args[0], ctx), "ff"));
      }
      if (f == "shift") {
        need(2);
        long k = as_integer(eval(expr->args[0], ctx), "shift");
        return as_k(eval(expr->args[1], ctx), "shift").shifted(k);
      }
      if (f == "d") {
        need(1);
        return as_k(eval(expr->args[0], ctx), "d").derivative();
      }
      if (f == "tr") {
        need(1);
        return trace(as_k(eval(expr->args[0], ctx), "tr"));
      }
      if (f == "mode") {
        need(2);
        KElement g = as_k(eval(expr->args[0], ctx), "mode");
        return mode(g, as_integer(eval(expr->args[1], ctx), "mode"));
      }
      if (f == "hol") {
        need(1);
        return as_k(eval(expr->args[0], ctx), "hol").hol();
      }
      if (f == "sing") {
        need(1);
        return as_k(eval(expr->args[0], ctx), "sing").sing();
      }
      throw eval_error("unknown function '" + f + "'");
    }
    case Expr::Kind::Neg: {
      Value v = eval(expr->args[0], ctx);
      return detail_eval::mul_values(Value(Rational(-1)), v);
    }
    case Expr::Kind::Add:
      return detail_eval::add_values(eval(expr->args[0], ctx), eval(expr->args[1], ctx), false);
    case Expr::Kind::Sub:
      return detail_eval::add_values(eval(expr->args[0], ctx), eval(expr->args[1], ctx), true);
    case Expr::Kind::Mul:
      return detail_eval::mul_values(eval(expr->args[0], ctx), eval(expr->args[1], ctx));
    case Expr::Kind::Div: {
      Value a = eval(expr->args[0], ctx);
      Value b = eval(expr->args[1], ctx);
      if (std::holds_alternative<Rational>(a) && std::holds_alternative<Rational>(b)) {
        Rational d = std::get<Rational>(b);
        if (d == 0) throw eval_error("division by zero");
        return std::get<Rational>(a) / d;
      }
      KElement num = as_k(a, "division");
      KElement den = as_k(b, "division");
      try {
        return num * den.inverse();
      } catch (const non_integer_pole_error& e) {
        throw eval_error(std::string(e.what()) +
                         " (division must stay inside rational functions with integer poles)");
      }
    }
    case Expr::Kind::Pow:
      return detail_eval::pow_value(eval(expr->args[0], ctx), expr->exponent);
  }
  throw eval_error("unreachable expression kind");
}

// ---------------------------------------------------------------------------
// canonical printing

namespace detail_print {

inline std::string coeff_prefix(const Rational& c, bool lead) {
  // returns "", "-", "c*"-style prefix text and sign handling for joining
  std::string s = to_string(c < 0 ? -c : c);
  std::string out;
  if (lead)
    out = (c < 0 ? "-" : "");
  else
    out = (c < 0 ? " - " : " + ");
  if (s != "1") out += s + "*";
  return out;
}

inline std::string pole_atom(long n, int m, const std::string& var) {
  std::string base;
  if (n == 0)
    base = var;
  else if (n > 0)
    base = "(" + var + "-" + std::to_string(n) + ")";
  else
    base = "(" + var + "+" + std::to_string(-n) + ")";
  if (m > 1) base += "^" + std::to_string(m);
  return base;
}

}  // namespace detail_print

inline std::string print(const KElement& f, bool unicode = false) {
  const std::string var = unicode ? "\xcf\x84" : "t";
  if (f.is_zero()) return "0";
  std::string out;
  bool lead = true;
  for (std::size_t i = f.poly().size(); i-- > 0;) {
    const Rational& c = f.poly()[i];
    if (c == 0) continue;
    std::string mono = i == 0 ? "" : (i == 1 ? var : var + "^" + std::to_string(i));
    Rational ca = c < 0 ? -c : c;
    std::string cs = to_string(ca);
    std::string piece;
    if (mono.empty())
      piece = cs;
    else if (cs == "1")
      piece = mono;
    else
      piece = cs + "*" + mono;
    out += (lead ? (c < 0 ? "-" : "") : (c < 0 ? " - " : " + ")) + piece;
    lead = false;
  }
  for (const auto& [key, c] : f.poles()) {
    Rational ca = c < 0 ? -c : c;
    std::string piece = to_string(ca) + "/" + detail_print::pole_atom(key.first, key.second, var);
    out += (lead ? (c < 0 ? "-" : "") : (c < 0 ? " - " : " + ")) + piece;
    lead = false;
  }
  return out;
}

inline std::string print(const HopfElement& h) {
  if (h.is_zero()) return "0";
  std::string out;
  bool lead = true;
  for (const auto& [key, c] : h.terms()) {
    std::string sym;
    if (key.first != 0) sym = "T" + (key.first == 1 ? "" : "^" + std::to_string(key.first));
    if (key.second != 0) {
      if (!sym.empty()) sym += "*";
      sym += "Dtau" + (key.second == 1 ? "" : "^" + std::to_string(key.second));
    }
    Rational ca = c < 0 ? -c : c;
    std::string cs = to_string(ca);
    std::string piece;
    if (sym.empty())
      piece = cs;
    else if (cs == "1")
      piece = sym;
    else
      piece = cs + "*" + sym;
    out += (lead ? (c < 0 ? "-" : "") : (c < 0 ? " - " : " + ")) + piece;
    lead = false;
  }
  return out;
}

inline std::string print(const ConformalElement& e) {
  if (e.is_zero()) return "0";
  std::string out;
  bool lead = true;
  for (const auto& [gen, h] : e.coords()) {
    std::string hs = print(h);
    std::string piece;
    bool negated = false;
    if (hs == "1") {
      piece = gen;
    } else if (hs == "-1") {
      piece = gen;
      negated = true;
    } else if (h.terms().size() == 1) {
      if (hs.size() > 0 && hs[0] == '-') {
        negated = true;
        hs = hs.substr(1);
      }
      piece = hs + "*" + gen;
    } else {
      piece = "(" + hs + ")*" + gen;
    }
    out += (lead ? (negated ? "-" : "") : (negated ? " - " : " + ")) + piece;
    lead = false;
  }
  return out;
}

inline std::string print(const LieElement& x, bool unicode = false) {
  if (x.is_zero()) return "0";
  std::string out;
  bool lead = true;
  for (const auto& [gen, f] : x.coords()) {
    out += (lead ? "" : " + ") + gen + "[" + print(f, unicode) + "]";
    lead = false;
  }
  return out;
}

inline std::string print(const State& s, const VacuumModule& module, bool unicode = false) {
  if (s.is_zero()) return "0";
  std::string out;
  bool lead = true;
  for (const auto& [mono, c] : s.terms()) {
    std::string piece;
    for (const auto& mode : mono)
      piece += module.gen_name(mode.gen) + "[" + print(mode.label(), unicode) + "]";
    piece += "vac";
    out += detail_print::coeff_prefix(c, lead) + piece;
    lead = false;
  }
  return out;
}

inline std::string print_value(const Value& v, const EvalContext& ctx) {
  if (std::holds_alternative<Rational>(v)) return to_string(std::get<Rational>(v));
  if (std::holds_alternative<KElement>(v)) return print(std::get<KElement>(v), ctx.unicode);
  if (std::holds_alternative<HopfElement>(v)) return print(std::get<HopfElement>(v));
  if (std::holds_alternative<ConformalElement>(v)) return print(std::get<ConformalElement>(v));
  if (std::holds_alternative<LieElement>(v)) return print(std::get<LieElement>(v), ctx.unicode);
  if (!ctx.module) throw eval_error("no vacuum module to print states");
  return print(std::get<State>(v), *ctx.module, ctx.unicode);
}

// convenience used by algebra JSON loading
inline HopfElement parse_hopf(const std::string& text) {
  EvalContext ctx;  // no algebra needed for pure Hopf expressions
  Value v = eval(parse_expression(text), ctx);
  return detail_eval::as_hopf(v, "structure coefficient");
}

inline KElement parse_k(const std::string& text) {
  EvalContext ctx;
  return detail_eval::as_k(eval(parse_expression(text), ctx), "K_T expression");
}

}  // namespace htv

#endif
