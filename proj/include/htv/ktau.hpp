#ifndef HTV_KTAU_HPP
#define HTV_KTAU_HPP

#include <algorithm>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rational.hpp"

namespace htv {

struct pole_evaluation_error : std::domain_error {
  using std::domain_error::domain_error;
};
struct non_integer_pole_error : std::domain_error {
  using std::domain_error::domain_error;
};

namespace detail {

// p(tau + a), dense coefficient lists
inline std::vector<Rational> shift_poly(const std::vector<Rational>& p, const Rational& a) {
  std::vector<Rational> out(p.size(), Rational(0));
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0) continue;
    Rational apow = 1;
    for (std::size_t j = i + 1; j-- > 0;) {
      out[j] += p[i] * binomial(static_cast<long>(i), static_cast<unsigned>(i - j)) * apow;
      apow *= a;
    }
  }
  return out;
}

inline void trim_poly(std::vector<Rational>& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

}  // namespace detail

// Element of K_T = M^{-1} C[tau] in canonical partial-fraction form:
// a polynomial part plus pole terms c/(tau-n)^m at integer locations n.
class KElement {
 public:
  using PoleKey = std::pair<long, int>;  // (location, order >= 1)
  using PoleMap = std::map<PoleKey, Rational>;

  KElement() = default;

  static KElement constant(const Rational& c) {
    KElement f;
    if (c != 0) f.poly_ = {c};
    return f;
  }
  static KElement variable() {
    KElement f;
    f.poly_ = {Rational(0), Rational(1)};
    return f;
  }
  static KElement monomial(int degree, const Rational& c = Rational(1)) {
    KElement f;
    if (c != 0) {
      f.poly_.assign(static_cast<std::size_t>(degree) + 1, Rational(0));
      f.poly_.back() = c;
    }
    return f;
  }
  static KElement from_poly(std::vector<Rational> coeffs) {
    KElement f;
    f.poly_ = std::move(coeffs);
    detail::trim_poly(f.poly_);
    return f;
  }
  // c / (tau - n)^m
  static KElement pole_term(long n, int m, const Rational& c = Rational(1)) {
    if (m < 1) throw std::invalid_argument("pole order must be >= 1");
    KElement f;
    if (c != 0) f.poles_[{n, m}] = c;
    return f;
  }

  const std::vector<Rational>& poly() const { return poly_; }
  const PoleMap& poles() const { return poles_; }

  bool is_zero() const { return poly_.empty() && poles_.empty(); }
  bool is_polynomial() const { return poles_.empty(); }
  bool is_singular() const { return poly_.empty(); }
  bool is_constant() const { return poles_.empty() && poly_.size() <= 1; }
  // -1 for the zero polynomial part
  int poly_degree() const { return static_cast<int>(poly_.size()) - 1; }

  Rational poly_coeff(std::size_t i) const {
    return i < poly_.size() ? poly_[i] : Rational(0);
  }

  KElement hol() const {
    KElement f;
    f.poly_ = poly_;
    return f;
  }
  KElement sing() const {
    KElement f;
    f.poles_ = poles_;
    return f;
  }

  friend KElement operator+(const KElement& a, const KElement& b) {
    KElement out = a;
    out += b;
    return out;
  }
  KElement& operator+=(const KElement& b) {
    if (poly_.size() < b.poly_.size()) poly_.resize(b.poly_.size(), Rational(0));
    for (std::size_t i = 0; i < b.poly_.size(); ++i) poly_[i] += b.poly_[i];
    detail::trim_poly(poly_);
    for (const auto& [key, c] : b.poles_) add_pole(key.first, key.second, c);
    return *this;
  }
  friend KElement operator-(const KElement& a, const KElement& b) { return a + (-b); }
  KElement operator-() const {
    KElement out;
    out.poly_ = poly_;
    for (auto& c : out.poly_) c = -c;
    out.poles_ = poles_;
    for (auto& [key, c] : out.poles_) c = -c;
    return out;
  }
  KElement& operator-=(const KElement& b) { return *this += (-b); }

  friend KElement operator*(const KElement& a, const Rational& s) {
    if (s == 0) return KElement();
    KElement out = a;
    for (auto& c : out.poly_) c *= s;
    for (auto& [key, c] : out.poles_) c *= s;
    return out;
  }
  friend KElement operator*(const Rational& s, const KElement& a) { return a * s; }

  friend KElement operator*(const KElement& a, const KElement& b) {
    KElement out;
    // polynomial x polynomial
    if (!a.poly_.empty() && !b.poly_.empty()) {
      std::vector<Rational> prod(a.poly_.size() + b.poly_.size() - 1, Rational(0));
      for (std::size_t i = 0; i < a.poly_.size(); ++i) {
        if (a.poly_[i] == 0) continue;
        for (std::size_t j = 0; j < b.poly_.size(); ++j) prod[i + j] += a.poly_[i] * b.poly_[j];
      }
      out += from_poly(std::move(prod));
    }
    // polynomial x pole terms (both orders)
    for (const auto& [key, c] : b.poles_) mul_poly_pole(out, a.poly_, key.first, key.second, c);
    for (const auto& [key, c] : a.poles_) mul_poly_pole(out, b.poly_, key.first, key.second, c);
    // pole x pole
    for (const auto& [ka, ca] : a.poles_)
      for (const auto& [kb, cb] : b.poles_) mul_pole_pole(out, ka, ca, kb, cb);
    return out;
  }
  KElement& operator*=(const KElement& b) { return *this = *this * b; }

  friend bool operator==(const KElement& a, const KElement& b) {
    return a.poly_ == b.poly_ && a.poles_ == b.poles_;
  }
  friend bool operator!=(const KElement& a, const KElement& b) { return !(a == b); }
  friend bool operator<(const KElement& a, const KElement& b) {
    if (a.poly_ != b.poly_) return a.poly_ < b.poly_;
    return std::lexicographical_compare(a.poles_.begin(), a.poles_.end(),
                                        b.poles_.begin(), b.poles_.end());
  }

  // (T^k f)(tau) = f(tau + k)
  KElement shifted(long k) const {
    if (k == 0) return *this;
    KElement out;
    out.poly_ = detail::shift_poly(poly_, Rational(k));
    detail::trim_poly(out.poly_);
    for (const auto& [key, c] : poles_) out.poles_[{key.first - k, key.second}] = c;
    return out;
  }

  KElement derivative() const {
    KElement out;
    if (poly_.size() > 1) {
      out.poly_.resize(poly_.size() - 1);
      for (std::size_t i = 1; i < poly_.size(); ++i) out.poly_[i - 1] = poly_[i] * Rational(i);
      detail::trim_poly(out.poly_);
    }
    for (const auto& [key, c] : poles_)
      out.poles_[{key.first, key.second + 1}] = -c * Rational(key.second);
    return out;
  }

  // f(-tau)
  KElement negated_argument() const {
    KElement out;
    out.poly_ = poly_;
    for (std::size_t i = 1; i < out.poly_.size(); i += 2) out.poly_[i] = -out.poly_[i];
    for (const auto& [key, c] : poles_) {
      Rational cc = (key.second % 2 == 0) ? c : -c;
      out.poles_[{-key.first, key.second}] = cc;
    }
    return out;
  }

  Rational eval(const Rational& x) const {
    for (const auto& [key, c] : poles_) {
      (void)c;
      if (Rational(key.first) == x)
        throw pole_evaluation_error("evaluation at pole tau=" + std::to_string(key.first));
    }
    Rational out = 0;
    for (std::size_t i = poly_.size(); i-- > 0;) out = out * x + poly_[i];
    for (const auto& [key, c] : poles_)
      out += c / rat_pow(x - Rational(key.first), key.second);
    return out;
  }

  // multiplicative inverse inside K_T; throws non_integer_pole_error when the
  // element is not a unit of M^{-1} C[tau]
  KElement inverse() const;

 private:
  std::vector<Rational> poly_;  // poly_[i] = coefficient of tau^i
  PoleMap poles_;

  void add_pole(long n, int m, const Rational& c) {
    if (c == 0) return;
    auto it = poles_.find({n, m});
    if (it == poles_.end()) {
      poles_[{n, m}] = c;
    } else {
      it->second += c;
      if (it->second == 0) poles_.erase(it);
    }
  }

  // out += p(tau) * c/(tau-n)^m
  static void mul_poly_pole(KElement& out, const std::vector<Rational>& p, long n, int m,
                            const Rational& c) {
    if (p.empty() || c == 0) return;
    // p(sigma + n) with sigma = tau - n
    std::vector<Rational> q = detail::shift_poly(p, Rational(n));
    for (int j = 0; j < m && j < static_cast<int>(q.size()); ++j)
      out.add_pole(n, m - j, c * q[j]);
    if (static_cast<int>(q.size()) > m) {
      std::vector<Rational> r(q.begin() + m, q.end());
      std::vector<Rational> back = detail::shift_poly(r, Rational(-n));
      for (auto& coeff : back) coeff *= c;
      out += from_poly(std::move(back));
    }
  }

  // out += ca/(tau-n1)^p * cb/(tau-n2)^q
  static void mul_pole_pole(KElement& out, const PoleKey& ka, const Rational& ca,
                            const PoleKey& kb, const Rational& cb) {
    const long n1 = ka.first, n2 = kb.first;
    const int p = ka.second, q = kb.second;
    const Rational c = ca * cb;
    if (n1 == n2) {
      out.add_pole(n1, p + q, c);
      return;
    }
    // Taylor expansion of the complementary factor at each pole
    const Rational d12 = Rational(n1 - n2);
    Rational pw = rat_pow(d12, -q);
    for (int s = 0; s < p; ++s) {
      Rational coeff = binomial(q + s - 1, static_cast<unsigned>(s)) * pw;
      if (s % 2) coeff = -coeff;
      out.add_pole(n1, p - s, c * coeff);
      pw /= d12;
    }
    const Rational d21 = Rational(n2 - n1);
    pw = rat_pow(d21, -p);
    for (int s = 0; s < q; ++s) {
      Rational coeff = binomial(p + s - 1, static_cast<unsigned>(s)) * pw;
      if (s % 2) coeff = -coeff;
      out.add_pole(n2, q - s, c * coeff);
      pw /= d21;
    }
  }
};

namespace detail {
KElement falling_factorial_uncached(long ell);
}

// tau(ell) for all integers: the falling-factorial polynomial for ell >= 0,
// the partial-fraction form of 1/tau(|ell|) for ell < 0.
inline const KElement& falling_factorial(long ell) {
  static std::map<long, KElement> cache;
  static std::recursive_mutex mutex;
  std::lock_guard<std::recursive_mutex> lock(mutex);
  auto it = cache.find(ell);
  if (it != cache.end()) return it->second;
  KElement value = detail::falling_factorial_uncached(ell);
  return cache.emplace(ell, std::move(value)).first->second;
}

namespace detail {

inline KElement falling_factorial_uncached(long ell) {
  if (ell >= 0) {
    KElement f = KElement::constant(1);
    for (long i = 0; i < ell; ++i) {
      f *= (KElement::variable() - KElement::constant(Rational(i)));
    }
    if (ell >= 1) {
      // difference system: Delta tau(ell) = ell tau(ell-1), tau(ell)|_0 = 0
      const KElement& prev = falling_factorial(ell - 1);
      KElement diff = f.shifted(1) - f;
      if (!(diff == prev * Rational(ell)) || f.eval(Rational(0)) != 0)
        throw std::logic_error("falling factorial recurrence check failed");
    }
    return f;
  }
  const long L = -ell;
  KElement f;
  for (long j = 0; j < L; ++j) {
    Rational r = Rational(1) / Rational(factorial(static_cast<unsigned>(j)) *
                                        factorial(static_cast<unsigned>(L - 1 - j)));
    if ((L - 1 - j) % 2) r = -r;
    f += KElement::pole_term(j, 1, r);
  }
  if (!(f * falling_factorial(L) == KElement::constant(1)))
    throw std::logic_error("reciprocal falling factorial check failed");
  return f;
}

}  // namespace detail

// Tr(f) = sum over n of Res_n(f dtau): the first-order pole coefficients.
inline Rational trace(const KElement& f) {
  Rational out = 0;
  for (const auto& [key, c] : f.poles())
    if (key.second == 1) out += c;
  return out;
}

// coefficient of tau(n) in the factorial-basis expansion: Tr(f * tau(-n-1))
inline Rational mode(const KElement& f, long n) { return trace(f * falling_factorial(-n - 1)); }

// pairing <f, tau(n)> = Tr(f * tau(n)); equals mode(f, -n-1)
inline Rational pair_mode(const KElement& f, long n) { return trace(f * falling_factorial(n)); }

// Provable two-sided bound on the factorial support of f: mode(f, n) == 0 for
// n outside [lo, hi].  The polynomial part contributes [0, deg].  A simple
// pole at n0 >= 0 contributes indices in [-(n0+1), -1]; any pole at a negative
// location or of order >= 2 makes the singular expansion an infinite factorial
// series (bounded_low goes false and lo is then meaningless).
struct FactorialSupport {
  long lo = 0;
  long hi = -1;  // empty by default
  bool bounded_low = true;
};

inline FactorialSupport factorial_support(const KElement& f) {
  FactorialSupport s;
  bool any = false;
  if (!f.poly().empty()) {
    s.lo = 0;
    s.hi = f.poly_degree();
    any = true;
  }
  for (const auto& [key, c] : f.poles()) {
    (void)c;
    const long n0 = key.first;
    const int m = key.second;
    if (n0 < 0 || m >= 2) s.bounded_low = false;
    long hi_neg = -1;
    long lo_neg = -(std::max(n0, 0L) + m);
    if (!any) {
      s.lo = lo_neg;
      s.hi = hi_neg;
      any = true;
    } else {
      s.lo = std::min(s.lo, lo_neg);
      s.hi = std::max(s.hi, hi_neg);
    }
  }
  if (!any) {
    s.lo = 0;
    s.hi = -1;
  }
  return s;
}

struct FactorialCoefficients {
  std::map<long, Rational> coeffs;  // n -> coefficient of tau(n)
  bool exact = false;
  long window_lo = 0;
  long window_hi = 0;
};

inline FactorialCoefficients to_factorial_basis(const KElement& f, long lo, long hi) {
  FactorialCoefficients out;
  out.window_lo = lo;
  out.window_hi = hi;
  KElement recombined;
  for (long n = lo; n <= hi; ++n) {
    Rational c = mode(f, n);
    if (c != 0) {
      out.coeffs[n] = c;
      recombined += falling_factorial(n) * c;
    }
  }
  out.exact = (recombined == f);
  return out;
}

inline KElement KElement::inverse() const {
  if (is_zero()) throw std::domain_error("division by zero in K_T");
  // assemble as N/D with D a product of integer-linear factors
  std::vector<std::pair<long, int>> dfactors;  // (location, multiplicity)
  {
    std::map<long, int> maxord;
    for (const auto& [key, c] : poles_) {
      (void)c;
      maxord[key.first] = std::max(maxord[key.first], key.second);
    }
    for (const auto& [n, m] : maxord) dfactors.push_back({n, m});
  }
  // N = poly * D + sum of pole terms * D, computed in dense coefficients
  std::vector<Rational> D = {Rational(1)};
  auto mul_linear = [](std::vector<Rational> p, long root) {
    std::vector<Rational> out(p.size() + 1, Rational(0));
    for (std::size_t i = 0; i < p.size(); ++i) {
      out[i + 1] += p[i];
      out[i] -= p[i] * Rational(root);
    }
    return out;
  };
  for (const auto& [n, m] : dfactors)
    for (int i = 0; i < m; ++i) D = mul_linear(D, n);
  auto poly_mul = [](const std::vector<Rational>& a, const std::vector<Rational>& b) {
    if (a.empty() || b.empty()) return std::vector<Rational>{};
    std::vector<Rational> out(a.size() + b.size() - 1, Rational(0));
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
  };
  std::vector<Rational> N = poly_mul(poly_, D);
  for (const auto& [key, c] : poles_) {
    // c * D / (tau - n)^m  is a polynomial
    std::vector<Rational> q = D;
    for (int i = 0; i < key.second; ++i) {
      // synthetic division by (tau - n); remainder must vanish
      std::vector<Rational> r(q.size() - 1, Rational(0));
      Rational carry = 0;
      for (std::size_t j = q.size(); j-- > 1;) {
        carry = q[j] + carry * Rational(key.first);
        r[j - 1] = carry;
      }
      q = std::move(r);
    }
    if (N.size() < q.size()) N.resize(q.size(), Rational(0));
    for (std::size_t j = 0; j < q.size(); ++j) N[j] += c * q[j];
  }
  detail::trim_poly(N);
  if (N.empty()) throw std::domain_error("division by zero in K_T");
  // factor N into integer-rooted linear factors
  std::vector<std::pair<long, int>> nroots;
  std::vector<Rational> cur = N;
  while (cur.size() > 1) {
    Rational bound = 0;
    for (std::size_t i = 0; i + 1 < cur.size(); ++i) {
      Rational q = abs(cur[i] / cur.back());
      if (q > bound) bound = q;
    }
    bound += 1;
    if (bound > 100000)
      throw non_integer_pole_error("inverse leaves K_T (root search bound exceeded)");
    long root = 0;
    bool found = false;
    for (long x = -static_cast<long>(bound); x <= static_cast<long>(bound); ++x) {
      Rational v = 0;
      for (std::size_t i = cur.size(); i-- > 0;) v = v * Rational(x) + cur[i];
      if (v == 0) {
        root = x;
        found = true;
        break;
      }
    }
    if (!found)
      throw non_integer_pole_error("inverse leaves K_T (non-integer pole would appear)");
    // divide out (tau - root)
    std::vector<Rational> r(cur.size() - 1, Rational(0));
    Rational carry = 0;
    for (std::size_t j = cur.size(); j-- > 1;) {
      carry = cur[j] + carry * Rational(root);
      r[j - 1] = carry;
    }
    cur = std::move(r);
    bool merged = false;
    for (auto& [n, m] : nroots)
      if (n == root) {
        ++m;
        merged = true;
        break;
      }
    if (!merged) nroots.push_back({root, 1});
  }
  const Rational lead = cur.empty() ? Rational(1) : cur[0];
  // inverse = D / (lead * prod (tau - r)^s)
  KElement out = KElement::constant(Rational(1) / lead);
  for (const auto& [n, m] : nroots) out *= KElement::pole_term(n, m, Rational(1));
  KElement dpoly = KElement::from_poly(D);
  return out * dpoly;
}

inline KElement operator/(const KElement& a, const KElement& b) { return a * b.inverse(); }

inline KElement kelement_pow(const KElement& base, long exp) {
  if (exp < 0) return kelement_pow(base.inverse(), -exp);
  KElement out = KElement::constant(1);
  KElement b = base;
  while (exp) {
    if (exp & 1) out *= b;
    b *= b;
    exp >>= 1;
  }
  return out;
}

}  // namespace htv

#endif
