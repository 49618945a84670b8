#ifndef HTV_CONFORMAL_HPP
#define HTV_CONFORMAL_HPP

#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "hopf.hpp"
#include "ktau.hpp"
#include "rational.hpp"

namespace htv {

struct algebra_mismatch_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Element of the free H_T-module over the generators.
class ConformalElement {
 public:
  using CoordMap = std::map<std::string, HopfElement>;

  ConformalElement() = default;
  static ConformalElement generator(const std::string& name) {
    ConformalElement e;
    e.coords_[name] = HopfElement::one();
    return e;
  }

  const CoordMap& coords() const { return coords_; }
  bool is_zero() const { return coords_.empty(); }

  void set_coord(const std::string& gen, const HopfElement& h) {
    if (h.is_zero())
      coords_.erase(gen);
    else
      coords_[gen] = h;
  }
  HopfElement coord(const std::string& gen) const {
    auto it = coords_.find(gen);
    return it == coords_.end() ? HopfElement::zero() : it->second;
  }

  friend ConformalElement operator+(const ConformalElement& a, const ConformalElement& b) {
    ConformalElement out = a;
    for (const auto& [gen, h] : b.coords_) out.set_coord(gen, out.coord(gen) + h);
    return out;
  }
  friend ConformalElement operator-(const ConformalElement& a, const ConformalElement& b) {
    return a + (b * Rational(-1));
  }
  friend ConformalElement operator*(const ConformalElement& a, const Rational& s) {
    ConformalElement out;
    for (const auto& [gen, h] : a.coords_) out.set_coord(gen, h * s);
    return out;
  }
  // module action of hat H_T coefficients
  friend ConformalElement operator*(const HopfElement& h, const ConformalElement& a) {
    ConformalElement out;
    for (const auto& [gen, c] : a.coords_) out.set_coord(gen, h * c);
    return out;
  }
  friend bool operator==(const ConformalElement& a, const ConformalElement& b) {
    return a.coords_ == b.coords_;
  }
  friend bool operator!=(const ConformalElement& a, const ConformalElement& b) {
    return !(a == b);
  }

  bool group_part_only() const {
    for (const auto& [gen, h] : coords_) {
      (void)gen;
      if (!h.is_group_part_only()) return false;
    }
    return true;
  }

  // image in C / m_T C: T |-> 1 coordinate-wise (the counit)
  std::map<std::string, Rational> quotient_image() const {
    std::map<std::string, Rational> out;
    for (const auto& [gen, h] : coords_) {
      Rational e = h.counit();
      if (e != 0) out[gen] = e;
    }
    return out;
  }

 private:
  CoordMap coords_;
};

// H_T-conformal algebra presented by structure constants on a free module:
// table[(f, n, g)] = f_{delta_n} g for generators f, g.
class ConformalAlgebra {
 public:
  using TableKey = std::tuple<std::string, long, std::string>;
  using Table = std::map<TableKey, ConformalElement>;

  ConformalAlgebra(std::vector<std::string> generators, Table table)
      : generators_(std::move(generators)), table_(std::move(table)) {
    std::set<std::string> names(generators_.begin(), generators_.end());
    if (names.size() != generators_.size())
      throw std::invalid_argument("duplicate generator names");
    for (const auto& [key, value] : table_) {
      if (!names.count(std::get<0>(key)) || !names.count(std::get<2>(key)))
        throw std::invalid_argument("table entry references unknown generator");
      if (!value.group_part_only())
        throw std::invalid_argument("table entries must be H_T-valued (no d_tau)");
      for (const auto& [gen, h] : value.coords()) {
        (void)h;
        if (!names.count(gen))
          throw std::invalid_argument("table value references unknown generator");
      }
    }
  }

  const std::vector<std::string>& generators() const { return generators_; }
  const Table& table() const { return table_; }

  ConformalElement table_entry(const std::string& f, long n, const std::string& g) const {
    auto it = table_.find({f, n, g});
    return it == table_.end() ? ConformalElement() : it->second;
  }

  // delta-support of the (f, g) generator pair
  std::pair<long, long> support(const std::string& f, const std::string& g) const {
    long lo = 0, hi = -1;
    bool any = false;
    for (const auto& [key, value] : table_) {
      (void)value;
      if (std::get<0>(key) == f && std::get<2>(key) == g) {
        long n = std::get<1>(key);
        if (!any) {
          lo = hi = n;
          any = true;
        } else {
          lo = std::min(lo, n);
          hi = std::max(hi, n);
        }
      }
    }
    return {lo, hi};
  }
  std::pair<long, long> support_all() const {
    long lo = 0, hi = -1;
    bool any = false;
    for (const auto& [key, value] : table_) {
      (void)value;
      long n = std::get<1>(key);
      if (!any) {
        lo = hi = n;
        any = true;
      } else {
        lo = std::min(lo, n);
        hi = std::max(hi, n);
      }
    }
    if (!any) return {0, -1};
    return {lo, hi};
  }

  // f_{delta_n} g extended from the table by
  //   R1: (T^k a)_{delta_n} b = a_{delta_{n+k}} b
  //   R2: a_{delta_n} (T^k b) = T^k (a_{delta_{n-k}} b)
  ConformalElement product_delta(const ConformalElement& f, long n,
                                 const ConformalElement& g) const {
    if (!f.group_part_only() || !g.group_part_only())
      throw std::invalid_argument("conformal products need H_T coordinates (no d_tau)");
    ConformalElement out;
    for (const auto& [gi, hf] : f.coords()) {
      for (const auto& [ka, ca] : hf.terms()) {
        for (const auto& [gj, hg] : g.coords()) {
          for (const auto& [kb, cb] : hg.terms()) {
            const long a = ka.first, b = kb.first;
            ConformalElement e = table_entry(gi, n + a - b, gj);
            if (e.is_zero()) continue;
            out = out + (HopfElement::T(b) * e) * (ca * cb);
          }
        }
      }
    }
    return out;
  }

  // f_{F} g = sum_n F(n) f_{delta_n} g for a polynomial sequence F
  ConformalElement product_poly(const ConformalElement& f, const KElement& F,
                                const ConformalElement& g) const {
    if (!F.is_polynomial())
      throw std::invalid_argument("polynomial-sequence product needs a polynomial F");
    ConformalElement out;
    auto [lo, hi] = support_all();
    // generous range: the R1/R2 shifts move support by at most the T-spans
    long span = 0;
    for (const auto& [gi, hf] : f.coords())
      for (const auto& [k, c] : hf.terms()) span = std::max(span, std::abs(k.first));
    for (const auto& [gj, hg] : g.coords())
      for (const auto& [k, c] : hg.terms()) span = std::max(span, std::abs(k.first));
    for (long n = lo - 2 * span - 1; n <= hi + 2 * span + 1; ++n) {
      ConformalElement p = product_delta(f, n, g);
      if (p.is_zero()) continue;
      out = out + p * F.eval(Rational(n));
    }
    return out;
  }

  // f_{F} g for a finite Kronecker combination F = sum F_n delta_n
  ConformalElement product_kronecker(const ConformalElement& f,
                                     const std::map<long, Rational>& F,
                                     const ConformalElement& g) const {
    ConformalElement out;
    for (const auto& [n, c] : F) {
      if (c == 0) continue;
      out = out + product_delta(f, n, g) * c;
    }
    return out;
  }

  // the distinguished 1-product (F = all-ones sequence)
  ConformalElement product_one(const ConformalElement& f, const ConformalElement& g) const {
    return product_poly(f, KElement::constant(1), g);
  }

  static std::shared_ptr<const ConformalAlgebra> toda() {
    Table t;
    ConformalElement c = ConformalElement::generator("C");
    // B_{delta_n} C = C (delta_{n,-1} - delta_{n,0})
    t[{"B", -1, "C"}] = c;
    t[{"B", 0, "C"}] = c * Rational(-1);
    // C_{delta_n} B = C delta_{n,0} - TC delta_{n,1}
    t[{"C", 0, "B"}] = c;
    t[{"C", 1, "B"}] = (HopfElement::T(1) * c) * Rational(-1);
    return std::make_shared<const ConformalAlgebra>(std::vector<std::string>{"B", "C"},
                                                    std::move(t));
  }

 private:
  std::vector<std::string> generators_;
  Table table_;
};

// The four 1-product displays and the quotient Lie structure.
struct QuotientLieReport {
  bool t_left_invariance = true;    // (Tf)_{1} g = f_{1} g
  bool t_right_covariance = true;   // f_{1}(Tg) = T(f_{1} g)
  bool antisymmetry_mod_mt = true;  // f_{1}g - g_{1}f in m_T C
  bool bracket_homomorphism = true; // [f_{1}, g_{1}] = (f_{1}g)_{1} on the quotient
  std::vector<std::string> failures;
  // quotient structure constants: bracket[(i,j)][k] = coefficient of gen_k
  std::map<std::pair<std::string, std::string>, std::map<std::string, Rational>> bracket;
};

inline QuotientLieReport quotient_lie(const ConformalAlgebra& alg) {
  QuotientLieReport rep;
  std::vector<ConformalElement> gens;
  for (const auto& name : alg.generators()) gens.push_back(ConformalElement::generator(name));
  const std::size_t n = gens.size();
  auto in_mt = [](const ConformalElement& e) { return e.quotient_image().empty(); };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const auto& f = gens[i];
      const auto& g = gens[j];
      ConformalElement one_fg = alg.product_one(f, g);
      rep.bracket[{alg.generators()[i], alg.generators()[j]}] = one_fg.quotient_image();
      if (alg.product_one(HopfElement::T(1) * f, g) != one_fg) {
        rep.t_left_invariance = false;
        rep.failures.push_back("(T " + alg.generators()[i] + ")_{1} " + alg.generators()[j]);
      }
      if (alg.product_one(f, HopfElement::T(1) * g) != HopfElement::T(1) * one_fg) {
        rep.t_right_covariance = false;
        rep.failures.push_back(alg.generators()[i] + "_{1} (T " + alg.generators()[j] + ")");
      }
      if (!in_mt(one_fg - alg.product_one(g, f))) {
        rep.antisymmetry_mod_mt = false;
        rep.failures.push_back("antisymmetry mod m_T for (" + alg.generators()[i] + "," +
                               alg.generators()[j] + ")");
      }
      for (std::size_t k = 0; k < n; ++k) {
        const auto& x = gens[k];
        ConformalElement lhs =
            alg.product_one(f, alg.product_one(g, x)) - alg.product_one(g, alg.product_one(f, x));
        ConformalElement rhs = alg.product_one(one_fg, x);
        if (!in_mt(lhs - rhs)) {
          rep.bracket_homomorphism = false;
          rep.failures.push_back("bracket homomorphism on (" + alg.generators()[i] + "," +
                                 alg.generators()[j] + "," + alg.generators()[k] + ")");
        }
      }
    }
  }
  return rep;
}

}  // namespace htv

#endif
