#ifndef HTV_BIVARIATE_HPP
#define HTV_BIVARIATE_HPP

#include <map>
#include <utility>

#include "ktau.hpp"
#include "rational.hpp"

namespace htv {

// Sparse polynomial in two variables, used to verify two-variable rational
// identities by clearing denominators.
class Poly2 {
 public:
  using Key = std::pair<int, int>;  // (deg in tau1, deg in tau2)

  Poly2() = default;
  static Poly2 constant(const Rational& c) {
    Poly2 p;
    if (c != 0) p.coeffs_[{0, 0}] = c;
    return p;
  }
  static Poly2 tau1() {
    Poly2 p;
    p.coeffs_[{1, 0}] = 1;
    return p;
  }
  static Poly2 tau2() {
    Poly2 p;
    p.coeffs_[{0, 1}] = 1;
    return p;
  }
  // embed a polynomial KElement in the chosen variable (1 or 2)
  static Poly2 from_poly(const KElement& f, int var) {
    if (!f.is_polynomial()) throw std::invalid_argument("Poly2 embed requires a polynomial");
    Poly2 p;
    for (std::size_t i = 0; i < f.poly().size(); ++i) {
      if (f.poly()[i] == 0) continue;
      Key key = (var == 1) ? Key{static_cast<int>(i), 0} : Key{0, static_cast<int>(i)};
      p.coeffs_[key] = f.poly()[i];
    }
    return p;
  }

  bool is_zero() const { return coeffs_.empty(); }

  friend Poly2 operator+(const Poly2& a, const Poly2& b) {
    Poly2 out = a;
    for (const auto& [key, c] : b.coeffs_) out.add(key, c);
    return out;
  }
  friend Poly2 operator-(const Poly2& a, const Poly2& b) {
    Poly2 out = a;
    for (const auto& [key, c] : b.coeffs_) out.add(key, -c);
    return out;
  }
  friend Poly2 operator*(const Poly2& a, const Poly2& b) {
    Poly2 out;
    for (const auto& [ka, ca] : a.coeffs_)
      for (const auto& [kb, cb] : b.coeffs_)
        out.add({ka.first + kb.first, ka.second + kb.second}, ca * cb);
    return out;
  }
  friend Poly2 operator*(const Poly2& a, const Rational& s) {
    Poly2 out;
    for (const auto& [key, c] : a.coeffs_) out.add(key, c * s);
    return out;
  }
  friend bool operator==(const Poly2& a, const Poly2& b) { return a.coeffs_ == b.coeffs_; }
  friend bool operator!=(const Poly2& a, const Poly2& b) { return !(a == b); }

 private:
  std::map<Key, Rational> coeffs_;

  void add(const Key& key, const Rational& c) {
    if (c == 0) return;
    auto it = coeffs_.find(key);
    if (it == coeffs_.end()) {
      coeffs_[key] = c;
    } else {
      it->second += c;
      if (it->second == 0) coeffs_.erase(it);
    }
  }
};

}  // namespace htv

#endif
