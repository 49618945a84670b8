#ifndef HTV_DISTRIBUTIONS_HPP
#define HTV_DISTRIBUTIONS_HPP

#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bivariate.hpp"
#include "hopf.hpp"
#include "ktau.hpp"
#include "linalg.hpp"
#include "rational.hpp"

namespace htv {

struct untraceable_error : std::domain_error {
  using std::domain_error::domain_error;
};
struct extraction_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Twisted expansions

enum class Side { L, R };

// finite sum of separable products a(tau1) * b(tau2)
struct TwoVarSeries {
  std::vector<std::pair<KElement, KElement>> terms;
  bool exact = false;  // true when the expansion terminated below the order cap
  int order = 0;
};

// L_S f = sum_k ((T^-1 - 1)^k f)(tau1) tau2(k)/k!
// R_S f = sum_k S[(Delta^k f)](tau2) tau1(k)/k!   with S: tau -> -tau
inline TwoVarSeries twisted_expand(const KElement& f, Side side, int order) {
  if (order < 0) throw std::invalid_argument("twisted_expand: order must be >= 0");
  TwoVarSeries out;
  out.order = order;
  KElement g = f;
  for (int k = 0; k <= order; ++k) {
    if (g.is_zero()) {
      out.exact = true;
      return out;
    }
    const Rational invfact = Rational(1) / Rational(factorial(static_cast<unsigned>(k)));
    if (side == Side::L) {
      out.terms.push_back({g, falling_factorial(k) * invfact});
      g = g.shifted(-1) - g;
    } else {
      out.terms.push_back({falling_factorial(k) * invfact, g.negated_argument()});
      g = g.shifted(1) - g;
    }
  }
  out.exact = g.is_zero();
  return out;
}

inline Rational series_entry(const TwoVarSeries& s, long m, long n) {
  Rational out = 0;
  for (const auto& [a, b] : s.terms) out += mode(a, m) * mode(b, n);
  return out;
}

// ---------------------------------------------------------------------------
// Bidistributions backed by finite delta expansions

// One operation applied in slot 1 (valid on pure-delta cores only).
struct Slot1Op {
  bool is_hopf = false;
  HopfElement h;
  KElement f;
};

// sum_j a_j(tau2) (h_j)_2 delta(tau1, tau2), optionally with a chain of
// slot-1 operations.  Matrix entries (coefficients of tau1(m) tau2(n)) are
// exact closed-form evaluations, never truncations.
class BiDist {
 public:
  using Term = std::pair<KElement, HopfElement>;  // (a(tau2), h)

  static BiDist delta() {
    BiDist d;
    d.terms_.push_back({KElement::constant(1), HopfElement::one()});
    return d;
  }
  static BiDist from_terms(std::vector<Term> terms) {
    BiDist d;
    for (auto& t : terms) d.add_term(std::move(t.first), std::move(t.second));
    return d;
  }
  static BiDist zero() { return BiDist(); }

  const std::vector<Term>& terms() const { return terms_; }
  const std::vector<Slot1Op>& slot1_chain() const { return slot1_; }

  // coefficient of tau1(m) tau2(n)
  Rational entry(long m, long n) const {
    if (slot1_.empty()) {
      Rational out = 0;
      for (const auto& [a, h] : terms_)
        out += mode(a * h.act(falling_factorial(-m - 1)), n);
      return out;
    }
    if (!is_pure())
      throw untraceable_error(
          "slot-1 operations are supported on the canonical delta kernel only");
    Rational scale = pure_scale();
    if (scale == 0) return Rational(0);
    return scale * mode(apply_chain(falling_factorial(-n - 1)), m);
  }

  friend BiDist operator+(const BiDist& x, const BiDist& y) {
    if (!x.slot1_.empty() || !y.slot1_.empty())
      throw untraceable_error("cannot add slot-1 modified delta expansions");
    BiDist out = x;
    for (const auto& t : y.terms_) out.add_term(t.first, t.second);
    return out;
  }
  friend BiDist operator-(const BiDist& x, const BiDist& y) { return x + (y * Rational(-1)); }
  friend BiDist operator*(const BiDist& x, const Rational& s) {
    BiDist out = x;
    if (s == 0) {
      out.terms_.clear();
      return out;
    }
    for (auto& [a, h] : out.terms_) a = a * s;
    return out;
  }

  bool equal_on_window(const BiDist& other, long w) const {
    for (long m = -w; m <= w; ++m)
      for (long n = -w; n <= w; ++n)
        if (entry(m, n) != other.entry(m, n)) return false;
    return true;
  }

 private:
  std::vector<Term> terms_;
  std::vector<Slot1Op> slot1_;

  friend BiDist apply_hopf_slot(const HopfElement&, int, const BiDist&);
  friend BiDist multiply_function_slot(const KElement&, int, const BiDist&);
  friend class ScalarDistribution;
  friend struct TraceSlotAccess;

  bool is_pure() const {
    if (terms_.size() != 1) return terms_.empty();
    return terms_[0].first.is_constant() && terms_[0].second == HopfElement::one();
  }
  Rational pure_scale() const {
    if (terms_.empty()) return Rational(0);
    return terms_[0].first.poly_coeff(0);
  }
  KElement apply_chain(KElement g) const {
    for (const auto& op : slot1_) g = op.is_hopf ? op.h.act(g) : op.f * g;
    return g;
  }

  void add_term(KElement a, HopfElement h) {
    if (a.is_zero() || h.is_zero()) return;
    // split h into basis terms so like terms merge
    for (const auto& [key, c] : h.terms()) {
      HopfElement basis = HopfElement::term(key.first, key.second, 1);
      KElement coeff = a * c;
      bool merged = false;
      for (auto& [ta, th] : terms_) {
        if (th == basis) {
          ta += coeff;
          merged = true;
          break;
        }
      }
      if (!merged) terms_.push_back({coeff, basis});
    }
    for (std::size_t i = terms_.size(); i-- > 0;)
      if (terms_[i].first.is_zero()) terms_.erase(terms_.begin() + static_cast<long>(i));
  }
};

inline BiDist apply_hopf_slot(const HopfElement& h, int slot, const BiDist& d) {
  BiDist out = d;
  if (slot == 1) {
    out.slot1_.push_back({true, h, KElement()});
    return out;
  }
  if (slot != 2) throw std::invalid_argument("slot must be 1 or 2");
  if (!d.slot1_.empty())
    throw untraceable_error("slot-2 operation after slot-1 modification is unsupported");
  // basis term T^k d^s acts by the product rule on a(tau2) * K(tau1,tau2)
  BiDist acc = BiDist::zero();
  for (const auto& [key, c] : h.terms()) {
    std::vector<BiDist::Term> cur = d.terms_;
    for (int i = 0; i < key.second; ++i) {  // d_tau in slot 2, Leibniz
      std::vector<BiDist::Term> next;
      for (const auto& [a, hh] : cur) {
        next.push_back({a.derivative(), hh});
        next.push_back({a, HopfElement::D(1) * hh});
      }
      cur = std::move(next);
    }
    for (auto& [a, hh] : cur) {  // T^k in slot 2, ring endomorphism
      a = a.shifted(key.first);
      hh = HopfElement::T(key.first) * hh;
      a = a * c;
    }
    acc = acc + BiDist::from_terms(std::move(cur));
  }
  return acc;
}

inline BiDist multiply_function_slot(const KElement& f, int slot, const BiDist& d) {
  BiDist out = d;
  if (slot == 1) {
    out.slot1_.push_back({false, HopfElement(), f});
    return out;
  }
  if (slot != 2) throw std::invalid_argument("slot must be 1 or 2");
  if (!d.slot1_.empty())
    throw untraceable_error("slot-2 operation after slot-1 modification is unsupported");
  std::vector<BiDist::Term> terms;
  for (const auto& [a, h] : d.terms_) terms.push_back({f * a, h});
  return BiDist::from_terms(std::move(terms));
}

// ---------------------------------------------------------------------------
// One-variable scalar distributions (kernels in factorial coefficients)

class ScalarDistribution {
 public:
  std::map<long, Rational> coeffs;       // n -> coefficient of tau(n)
  std::optional<KElement> closed_form;   // exact kernel when available
  long win_lo = 0, win_hi = 0;
  bool exact = false;

  static ScalarDistribution from_kernel(const KElement& f, long lo, long hi) {
    ScalarDistribution d;
    d.win_lo = lo;
    d.win_hi = hi;
    d.closed_form = f;
    d.exact = true;
    for (long n = lo; n <= hi; ++n) {
      Rational c = mode(f, n);
      if (c != 0) d.coeffs[n] = c;
    }
    return d;
  }

  Rational coeff(long n) const {
    auto it = coeffs.find(n);
    return it == coeffs.end() ? Rational(0) : it->second;
  }

  // pairing <D, F> = Tr(kernel * F)
  Rational pair(const KElement& f) const {
    if (f.is_zero()) return Rational(0);
    if (closed_form) return trace(*closed_form * f);
    // <D, F> = sum_k coeffs[k] Tr(tau(k) F) and Tr(tau(k) F) = mode(F, -k-1);
    // the k-range that can contribute is {-n-1 : n in factorial support of F}
    // and must sit inside the certified window.
    FactorialSupport s = factorial_support(f);
    if (!s.bounded_low)
      throw untraceable_error("pairing requires a factorial-exact test function");
    if (s.hi < s.lo) return Rational(0);
    if (-s.hi - 1 < win_lo || -s.lo - 1 > win_hi)
      throw untraceable_error("test function factorial support exceeds the mode window");
    Rational out = 0;
    for (const auto& [k, c] : coeffs) out += c * mode(f, -k - 1);
    return out;
  }
};

// Tr_slot of a BiDist; the un-traced variable's kernel is reported in
// factorial coefficients over [lo, hi].
inline ScalarDistribution trace_slot(const BiDist& d, int slot, long lo, long hi) {
  ScalarDistribution out;
  out.win_lo = lo;
  out.win_hi = hi;
  if (slot == 1) {
    if (d.slot1_chain().empty()) {
      // Tr(tau(m')) = [m' == -1]; closed form in tau2
      KElement kernel;
      for (const auto& [a, h] : d.terms()) kernel += a * h.act(KElement::constant(1));
      out = ScalarDistribution::from_kernel(kernel, lo, hi);
      return out;
    }
    // slot-1 chain on the canonical kernel: coefficient(n) = Tr(chain(tau(-n-1)))
    bool pure = d.terms().size() == 1 && d.terms()[0].first.is_constant() &&
                d.terms()[0].second == HopfElement::one();
    if (!pure)
      throw untraceable_error("trace over slot 1 of a modified non-canonical expansion");
    const Rational scale = d.terms()[0].first.poly_coeff(0);
    for (long n = lo; n <= hi; ++n) {
      KElement g = falling_factorial(-n - 1);
      for (const auto& op : d.slot1_chain()) g = op.is_hopf ? op.h.act(g) : op.f * g;
      Rational c = scale * trace(g);
      if (c != 0) out.coeffs[n] = c;
    }
    out.exact = false;
    return out;
  }
  if (slot != 2) throw std::invalid_argument("slot must be 1 or 2");
  if (!d.slot1_chain().empty())
    throw untraceable_error("trace over slot 2 after slot-1 modification is unsupported");
  // kernel in tau1: sum_m' tau1(m') Tr(a h tau(-m'-1)); the sum over m' >= 0
  // is bounded by the degree count, the m' < 0 side is exact per coefficient.
  for (long n = lo; n <= hi; ++n) {
    // coefficient of tau1(n) needs m' = n only when reading off the basis:
    // mode(tau(m'), n) = [m' == n]
    Rational c = 0;
    for (const auto& [a, h] : d.terms()) c += trace(a * h.act(falling_factorial(-n - 1)));
    if (c != 0) out.coeffs[n] = c;
  }
  out.exact = false;
  return out;
}

// ---------------------------------------------------------------------------
// delta(p): obstruction to extending the twisted coproduct

struct DeltaResult {
  TwoVarSeries left;
  TwoVarSeries right;
  bool exact_zero = false;  // true when p is polynomial and the obstruction vanishes
  int order = 0;

  Rational entry(long m, long n) const {
    return series_entry(left, m, n) - series_entry(right, m, n);
  }
};

inline DeltaResult delta_of(const KElement& p, int order) {
  DeltaResult out;
  out.order = order;
  out.left = twisted_expand(p, Side::L, order);
  out.right = twisted_expand(p, Side::R, order);
  if (p.is_polynomial()) {
    // both series terminate; verify the obstruction vanishes identically
    Poly2 total;
    for (const auto& [a, b] : out.left.terms)
      total = total + Poly2::from_poly(a, 1) * Poly2::from_poly(b, 2);
    for (const auto& [a, b] : out.right.terms)
      total = total - Poly2::from_poly(a, 1) * Poly2::from_poly(b, 2);
    out.exact_zero = total.is_zero();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Geometric kernel identity:
// 1/(tau1-tau2) = sum_{n<M} tau2(n) tau1(-n-1) + tau2(M) / (tau1(M)(tau1-tau2))

struct GeometricKernel {
  int order = 0;
  std::vector<std::pair<KElement, KElement>> partial;  // (tau2(n), tau1(-n-1)) pairs
  bool verified = false;
};

inline GeometricKernel geometric_kernel_expand(int m) {
  if (m < 0) throw std::invalid_argument("geometric_kernel_expand: M must be >= 0");
  GeometricKernel out;
  out.order = m;
  for (int n = 0; n < m; ++n)
    out.partial.push_back({falling_factorial(n), falling_factorial(-n - 1)});
  // clear denominators: tau1(M) - sum_n tau2(n) [tau1(M)/tau1(n+1)] (tau1-tau2)
  //                   - tau2(M) == 0
  Poly2 t1 = Poly2::tau1(), t2 = Poly2::tau2();
  Poly2 lhs = Poly2::from_poly(falling_factorial(m), 1);
  for (int n = 0; n < m; ++n) {
    // tau1(M)/tau1(n+1) = (tau1 - n - 1)...(tau1 - M + 1)
    Poly2 cofactor = Poly2::constant(1);
    for (int j = n + 1; j < m; ++j)
      cofactor = cofactor * (t1 - Poly2::constant(Rational(j)));
    lhs = lhs - Poly2::from_poly(falling_factorial(n), 2) * cofactor * (t1 - t2);
  }
  lhs = lhs - Poly2::from_poly(falling_factorial(m), 2);
  out.verified = lhs.is_zero();
  return out;
}

// ---------------------------------------------------------------------------
// Finite-expansion extraction: solve for a delta expansion matching a mode
// matrix on a window.

struct ExtractionAnsatz {
  long t_lo = -2, t_hi = 2;   // T exponents of the Hopf operators
  int d_max = 1;              // max d_tau exponent
  long pole_lo = -3, pole_hi = 3;
  int pole_order_max = 2;
  int poly_deg_max = 1;       // polynomial atoms tau^d in the coefficients
};

struct ExtractionResult {
  BiDist expansion;
  bool success = false;
  Rational max_residual = 0;  // largest |difference| over the window on failure
};

struct ExtractionCandidate {
  KElement atom;
  HopfElement op;
};

inline ExtractionResult rationality_extract_with(
    const std::function<Rational(long, long)>& target, long window,
    const std::vector<ExtractionCandidate>& cands) {
  const long w = window;
  RatMat a;
  RatVec b;
  for (long m = -w; m <= w; ++m) {
    for (long n = -w; n <= w; ++n) {
      RatVec row;
      row.reserve(cands.size());
      const KElement col = falling_factorial(-m - 1);
      for (const auto& cand : cands) row.push_back(mode(cand.atom * cand.op.act(col), n));
      a.push_back(std::move(row));
      b.push_back(target(m, n));
    }
  }
  auto sol = solve_exact(a, b);
  ExtractionResult out;
  if (!sol.consistent) {
    // report the residual of the zero ansatz for diagnostics
    Rational worst = 0;
    for (const auto& v : b)
      if (abs(v) > worst) worst = abs(v);
    out.max_residual = worst;
    return out;
  }
  std::vector<BiDist::Term> terms;
  for (std::size_t i = 0; i < cands.size(); ++i)
    if (sol.x[i] != 0) terms.push_back({cands[i].atom * sol.x[i], cands[i].op});
  out.expansion = BiDist::from_terms(std::move(terms));
  // verify on the full window (solve_exact already guarantees consistency,
  // but the expansion went through term merging)
  for (long m = -w; m <= w; ++m)
    for (long n = -w; n <= w; ++n) {
      Rational r = out.expansion.entry(m, n) - target(m, n);
      if (r != 0) {
        out.max_residual = abs(r);
        return out;
      }
    }
  out.success = true;
  return out;
}

inline ExtractionResult rationality_extract(
    const std::function<Rational(long, long)>& target, long window,
    const ExtractionAnsatz& ansatz) {
  std::vector<ExtractionCandidate> cands;
  for (long t = ansatz.t_lo; t <= ansatz.t_hi; ++t) {
    for (int dm = 0; dm <= ansatz.d_max; ++dm) {
      HopfElement op = HopfElement::term(t, dm, 1);
      for (long n = ansatz.pole_lo; n <= ansatz.pole_hi; ++n)
        for (int m = 1; m <= ansatz.pole_order_max; ++m)
          cands.push_back({KElement::pole_term(n, m), op});
      for (int deg = 0; deg <= ansatz.poly_deg_max; ++deg)
        cands.push_back({KElement::monomial(deg), op});
    }
  }
  return rationality_extract_with(target, window, cands);
}

}  // namespace htv

#endif
