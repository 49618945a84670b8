#ifndef HTV_HOPF_HPP
#define HTV_HOPF_HPP

#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ktau.hpp"
#include "rational.hpp"

namespace htv {

// Element of hat H_T = C[T, T^-1, d_tau]: exact-rational combination of
// T^k d^m.  Commutative (d_tau = log T).
class HopfElement {
 public:
  using Key = std::pair<long, int>;  // (T exponent, d exponent >= 0)
  using TermMap = std::map<Key, Rational>;

  HopfElement() = default;

  static HopfElement zero() { return HopfElement(); }
  static HopfElement one() { return term(0, 0, 1); }
  static HopfElement T(long k = 1) { return term(k, 0, 1); }
  static HopfElement D(int m = 1) { return term(0, m, 1); }
  static HopfElement term(long k, int m, const Rational& c) {
    if (m < 0) throw std::invalid_argument("negative d_tau exponent");
    HopfElement h;
    if (c != 0) h.terms_[{k, m}] = c;
    return h;
  }
  static HopfElement constant(const Rational& c) { return term(0, 0, c); }
  // Delta = T - 1
  static HopfElement delta_op() { return T(1) - one(); }

  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  friend HopfElement operator+(const HopfElement& a, const HopfElement& b) {
    HopfElement out = a;
    for (const auto& [key, c] : b.terms_) out.add_term(key, c);
    return out;
  }
  HopfElement& operator+=(const HopfElement& b) { return *this = *this + b; }
  friend HopfElement operator-(const HopfElement& a, const HopfElement& b) { return a + (-b); }
  HopfElement& operator-=(const HopfElement& b) { return *this = *this - b; }
  HopfElement operator-() const {
    HopfElement out = *this;
    for (auto& [key, c] : out.terms_) c = -c;
    return out;
  }
  friend HopfElement operator*(const HopfElement& a, const Rational& s) {
    if (s == 0) return HopfElement();
    HopfElement out = a;
    for (auto& [key, c] : out.terms_) c *= s;
    return out;
  }
  friend HopfElement operator*(const Rational& s, const HopfElement& a) { return a * s; }
  friend HopfElement operator*(const HopfElement& a, const HopfElement& b) {
    HopfElement out;
    for (const auto& [ka, ca] : a.terms_)
      for (const auto& [kb, cb] : b.terms_)
        out.add_term({ka.first + kb.first, ka.second + kb.second}, ca * cb);
    return out;
  }
  HopfElement& operator*=(const HopfElement& b) { return *this = *this * b; }

  friend bool operator==(const HopfElement& a, const HopfElement& b) {
    return a.terms_ == b.terms_;
  }
  friend bool operator!=(const HopfElement& a, const HopfElement& b) { return !(a == b); }

  // S(T^k d^m) = (-1)^m T^-k d^m
  HopfElement antipode() const {
    HopfElement out;
    for (const auto& [key, c] : terms_)
      out.terms_[{-key.first, key.second}] = (key.second % 2) ? -c : c;
    return out;
  }

  // eps(T^k d^m) = [m == 0]
  Rational counit() const {
    Rational out = 0;
    for (const auto& [key, c] : terms_)
      if (key.second == 0) out += c;
    return out;
  }

  // Delta(T^k) = T^k (x) T^k, Delta(d) = d (x) 1 + 1 (x) d
  std::vector<std::pair<HopfElement, HopfElement>> coproduct() const {
    std::vector<std::pair<HopfElement, HopfElement>> out;
    for (const auto& [key, c] : terms_) {
      const long k = key.first;
      const int m = key.second;
      for (int j = 0; j <= m; ++j) {
        Rational w = c * binomial(m, static_cast<unsigned>(j));
        out.push_back({term(k, j, w), term(k, m - j, 1)});
      }
    }
    return out;
  }

  // action on K_T: T^k shifts the argument by +k, d differentiates
  KElement act(const KElement& f) const {
    KElement out;
    for (const auto& [key, c] : terms_) {
      KElement g = f;
      for (int i = 0; i < key.second; ++i) g = g.derivative();
      out += g.shifted(key.first) * c;
    }
    return out;
  }

  bool is_group_part_only() const {  // no d_tau content (element of H_T proper)
    for (const auto& [key, c] : terms_) {
      (void)c;
      if (key.second != 0) return false;
    }
    return true;
  }

 private:
  TermMap terms_;

  void add_term(const Key& key, const Rational& c) {
    if (c == 0) return;
    auto it = terms_.find(key);
    if (it == terms_.end()) {
      terms_[key] = c;
    } else {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }
};

// alpha: hat H_T -> K_T^Sing, h |-> S(h).(1/tau).
inline KElement alpha(const HopfElement& h) {
  return h.antipode().act(KElement::pole_term(0, 1));
}

// inverse of alpha; input must have zero polynomial part
inline HopfElement alpha_inv(const KElement& f) {
  if (!f.is_singular())
    throw std::domain_error("alpha_inv requires an element with zero polynomial part");
  HopfElement out;
  for (const auto& [key, c] : f.poles()) {
    const long n = key.first;
    const int m = key.second;
    out += HopfElement::term(n, m - 1, c / Rational(factorial(static_cast<unsigned>(m - 1))));
  }
  return out;
}

// <T^k d^m, f> = (d^m f / dtau^m)(k); requires f polynomial when m > 0
inline Rational hopf_pair(const HopfElement& h, const KElement& f) {
  Rational out = 0;
  for (const auto& [key, c] : h.terms()) {
    KElement g = f;
    if (key.second > 0) {
      if (!f.is_polynomial())
        throw std::domain_error("d_tau pairing against a non-polynomial element");
      for (int i = 0; i < key.second; ++i) g = g.derivative();
    }
    out += c * g.eval(Rational(key.first));
  }
  return out;
}

// log(1+Delta) truncated at the given order; equals d/dtau on polynomials of
// degree <= order
inline HopfElement log_shift_series(int order) {
  HopfElement out;
  HopfElement delta_pow = HopfElement::one();
  const HopfElement delta = HopfElement::delta_op();
  for (int n = 1; n <= order; ++n) {
    delta_pow *= delta;
    Rational coeff = Rational(1, n);
    if (n % 2 == 0) coeff = -coeff;
    out += delta_pow * coeff;
  }
  return out;
}

}  // namespace htv

#endif
