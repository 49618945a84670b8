#ifndef HTV_AFFINE_HPP
#define HTV_AFFINE_HPP

#include <map>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "conformal.hpp"
#include "distributions.hpp"
#include "hopf.hpp"
#include "ktau.hpp"
#include "linalg.hpp"
#include "rational.hpp"

namespace htv {

// Element of the affinization L C = (C (x) K_T) / m_T(...): canonical form
// keeps a K_T coefficient per generator, all Hopf factors pushed through the
// antipode onto the K_T slot.
class LieElement {
 public:
  using Algebra = std::shared_ptr<const ConformalAlgebra>;
  using CoordMap = std::map<std::string, KElement>;

  LieElement() = default;
  explicit LieElement(Algebra alg) : alg_(std::move(alg)) {}

  const CoordMap& coords() const { return coords_; }
  const Algebra& algebra() const { return alg_; }
  bool is_zero() const { return coords_.empty(); }

  KElement coord(const std::string& gen) const {
    auto it = coords_.find(gen);
    return it == coords_.end() ? KElement() : it->second;
  }
  void set_coord(const std::string& gen, const KElement& f) {
    if (f.is_zero())
      coords_.erase(gen);
    else
      coords_[gen] = f;
  }

  static LieElement mode(Algebra alg, const std::string& gen, const KElement& p) {
    LieElement x(std::move(alg));
    x.set_coord(gen, p);
    return x;
  }

  friend LieElement operator+(const LieElement& a, const LieElement& b) {
    if (a.alg_ && b.alg_ && a.alg_ != b.alg_)
      throw algebra_mismatch_error("Lie elements over different algebras");
    LieElement out(a.alg_ ? a.alg_ : b.alg_);
    out.coords_ = a.coords_;
    for (const auto& [gen, f] : b.coords_) out.set_coord(gen, out.coord(gen) + f);
    return out;
  }
  friend LieElement operator-(const LieElement& a, const LieElement& b) {
    return a + (b * Rational(-1));
  }
  friend LieElement operator*(const LieElement& a, const Rational& s) {
    LieElement out(a.alg_);
    for (const auto& [gen, f] : a.coords_) out.set_coord(gen, f * s);
    return out;
  }
  friend bool operator==(const LieElement& a, const LieElement& b) {
    return a.coords_ == b.coords_;
  }
  friend bool operator!=(const LieElement& a, const LieElement& b) { return !(a == b); }

 private:
  Algebra alg_;
  CoordMap coords_;
};

// canonical projection: (sum_g h_g . g) (x) p  |->  sum_g g_<S(h_g) p>
inline LieElement from_pair(LieElement::Algebra alg, const ConformalElement& f,
                            const KElement& p) {
  LieElement out(alg);
  if (p.is_zero()) return out;
  for (const auto& [gen, h] : f.coords())
    out.set_coord(gen, out.coord(gen) + h.antipode().act(p));
  return out;
}

// [f_<p>, g_<q>] = sum_i (f_{delta_i} g)_<(T^i p) q> over the table support
inline LieElement bracket(const LieElement& x, const LieElement& y) {
  if (!x.algebra() || !y.algebra())
    throw algebra_mismatch_error("bracket needs algebra-attached elements");
  if (x.algebra() != y.algebra())
    throw algebra_mismatch_error("bracket of elements over different algebras");
  const auto& alg = *x.algebra();
  LieElement out(x.algebra());
  for (const auto& [gi, p] : x.coords()) {
    for (const auto& [gj, q] : y.coords()) {
      auto [lo, hi] = alg.support(gi, gj);
      for (long i = lo; i <= hi; ++i) {
        ConformalElement e = alg.table_entry(gi, i, gj);
        if (e.is_zero()) continue;
        out = out + from_pair(x.algebra(), e, p.shifted(i) * q);
      }
    }
  }
  return out;
}

inline std::pair<LieElement, LieElement> hol_sing_split(const LieElement& x) {
  LieElement hol(x.algebra()), sing(x.algebra());
  for (const auto& [gen, f] : x.coords()) {
    hol.set_coord(gen, f.hol());
    sing.set_coord(gen, f.sing());
  }
  return {hol, sing};
}

inline LieElement current_mode(LieElement::Algebra alg, const ConformalElement& f, long n) {
  return from_pair(std::move(alg), f, falling_factorial(n));
}

// ---------------------------------------------------------------------------
// Current commutators: [f(tau1), g(tau2)] as a finite delta expansion with
// conformal-element coefficients, sum_i (f_{delta_i} g)(tau2) T_2^i delta.

struct CurrentDeltaTerm {
  ConformalElement coeff;  // a current coefficient
  HopfElement op;          // operator applied in slot 2 to delta
};

// entry(m, n) of  c(tau2) (h)_2 delta  =  c_<(h tau(-m-1)) tau(-n-1)>
inline LieElement current_delta_entry(const LieElement::Algebra& alg,
                                      const std::vector<CurrentDeltaTerm>& terms, long m,
                                      long n) {
  LieElement out(alg);
  const KElement& row = falling_factorial(-m - 1);
  const KElement& col = falling_factorial(-n - 1);
  for (const auto& t : terms) out = out + from_pair(alg, t.coeff, t.op.act(row) * col);
  return out;
}

struct CurrentCommutator {
  LieElement::Algebra algebra;
  ConformalElement f, g;
  std::vector<CurrentDeltaTerm> closed_form;
  long window = 0;
  bool window_match = false;  // bracket matrix agrees with the closed form

  LieElement entry_bracket(long m, long n) const {
    LieElement x = from_pair(algebra, f, falling_factorial(-m - 1));
    LieElement y = from_pair(algebra, g, falling_factorial(-n - 1));
    return bracket(x, y);
  }
  LieElement entry_closed(long m, long n) const {
    return current_delta_entry(algebra, closed_form, m, n);
  }
};

inline CurrentCommutator current_commutator(LieElement::Algebra alg, const ConformalElement& f,
                                            const ConformalElement& g, long window) {
  CurrentCommutator out;
  out.algebra = alg;
  out.f = f;
  out.g = g;
  out.window = window;
  const auto& a = *alg;
  auto [lo, hi] = a.support_all();
  long span = std::max(std::abs(lo), std::abs(hi)) + 1;
  if (window < span)
    throw std::invalid_argument("current_commutator window below structure-table support");
  for (long i = lo - 2; i <= hi + 2; ++i) {
    ConformalElement c = a.product_delta(f, i, g);
    if (c.is_zero()) continue;
    out.closed_form.push_back({c, HopfElement::T(i)});
  }
  out.window_match = true;
  for (long m = -window; m <= window && out.window_match; ++m)
    for (long n = -window; n <= window; ++n)
      if (out.entry_bracket(m, n) != out.entry_closed(m, n)) {
        out.window_match = false;
        break;
      }
  return out;
}

// ---------------------------------------------------------------------------
// Extraction of a current-coefficient delta expansion from a LieElement-valued
// mode matrix (the current-level instance of the finite-expansion theorem).

struct CurrentExtractionAnsatz {
  long t_lo = -2, t_hi = 2;
  int d_max = 0;  // eq-currentcomm expansions are H_T-only
};

struct CurrentExtractionResult {
  std::vector<CurrentDeltaTerm> terms;
  bool success = false;
};

inline CurrentExtractionResult current_extract(
    const LieElement::Algebra& alg,
    const std::function<LieElement(long, long)>& target, long window,
    const CurrentExtractionAnsatz& ansatz) {
  struct Cand {
    std::string gen;
    HopfElement op;
  };
  std::vector<Cand> cands;
  for (const auto& gen : alg->generators())
    for (long t = ansatz.t_lo; t <= ansatz.t_hi; ++t)
      for (int dm = 0; dm <= ansatz.d_max; ++dm)
        cands.push_back({gen, HopfElement::term(t, dm, 1)});

  // flatten LieElements over (generator, KElement-atom) pairs
  using AtomKey = std::tuple<std::string, int, long, int>;  // (gen, kind, a, b)
  auto flatten = [](const LieElement& x, std::map<AtomKey, Rational>& out) {
    for (const auto& [gen, f] : x.coords()) {
      for (std::size_t i = 0; i < f.poly().size(); ++i)
        if (f.poly()[i] != 0) out[{gen, 0, static_cast<long>(i), 0}] += f.poly()[i];
      for (const auto& [key, c] : f.poles()) out[{gen, 1, key.first, key.second}] += c;
    }
  };

  RatMat mat;
  RatVec rhs;
  for (long m = -window; m <= window; ++m) {
    for (long n = -window; n <= window; ++n) {
      std::map<AtomKey, Rational> tflat;
      flatten(target(m, n), tflat);
      std::vector<std::map<AtomKey, Rational>> cflats;
      std::map<AtomKey, char> atoms;
      for (const auto& [key, c] : tflat) {
        (void)c;
        atoms[key] = 1;
      }
      for (const auto& cand : cands) {
        std::map<AtomKey, Rational> cf;
        flatten(current_delta_entry(
                    alg, {{ConformalElement::generator(cand.gen), cand.op}}, m, n),
                cf);
        for (const auto& [key, c] : cf) {
          (void)c;
          atoms[key] = 1;
        }
        cflats.push_back(std::move(cf));
      }
      for (const auto& [key, unused] : atoms) {
        (void)unused;
        RatVec row;
        row.reserve(cands.size());
        for (const auto& cf : cflats) {
          auto it = cf.find(key);
          row.push_back(it == cf.end() ? Rational(0) : it->second);
        }
        mat.push_back(std::move(row));
        auto it = tflat.find(key);
        rhs.push_back(it == tflat.end() ? Rational(0) : it->second);
      }
    }
  }
  auto sol = solve_exact(mat, rhs);
  CurrentExtractionResult out;
  if (!sol.consistent) return out;
  for (std::size_t i = 0; i < cands.size(); ++i)
    if (sol.x[i] != 0)
      out.terms.push_back(
          {ConformalElement::generator(cands[i].gen) * sol.x[i], cands[i].op});
  out.success = true;
  return out;
}

// ---------------------------------------------------------------------------
// Randomized structural validation of a conformal algebra through its
// affinization: antisymmetry, Jacobi, and soundness of the R1/R2 extension
// rules against the canonical-form bracket.

struct RandomKConfig {
  long pole_lo = -4, pole_hi = 4;
  int order_max = 3;
  int deg_max = 3;
  int terms = 2;
};

inline KElement random_kelement(std::mt19937_64& rng, const RandomKConfig& cfg) {
  std::uniform_int_distribution<long> loc(cfg.pole_lo, cfg.pole_hi);
  std::uniform_int_distribution<int> ord(1, cfg.order_max);
  std::uniform_int_distribution<int> deg(0, cfg.deg_max);
  std::uniform_int_distribution<int> num(-5, 5);
  std::uniform_int_distribution<int> den(1, 3);
  std::uniform_int_distribution<int> kind(0, 2);
  KElement out;
  for (int t = 0; t < cfg.terms; ++t) {
    Rational c(num(rng), den(rng));
    if (c == 0) c = 1;
    if (kind(rng) == 0)
      out += KElement::monomial(deg(rng), c);
    else
      out += KElement::pole_term(loc(rng), ord(rng), c);
  }
  return out;
}

struct AlgebraValidation {
  bool antisymmetry = true;
  bool jacobi = true;
  bool extension_sound = true;
  bool hol_closed = true;
  bool sing_closed = true;
  int cases = 0;
  std::string first_failure;
};

inline AlgebraValidation validate_algebra(LieElement::Algebra alg, unsigned long seed,
                                          int samples) {
  AlgebraValidation rep;
  std::mt19937_64 rng(seed);
  RandomKConfig cfg;
  const auto& gens = alg->generators();
  std::uniform_int_distribution<std::size_t> pick(0, gens.size() - 1);
  auto rand_lie = [&] {
    LieElement x(alg);
    x.set_coord(gens[pick(rng)], random_kelement(rng, cfg));
    return x;
  };
  for (int it = 0; it < samples; ++it) {
    LieElement x = rand_lie(), y = rand_lie(), z = rand_lie();
    ++rep.cases;
    if (!(bracket(x, y) + bracket(y, x)).is_zero()) {
      rep.antisymmetry = false;
      if (rep.first_failure.empty()) rep.first_failure = "antisymmetry";
    }
    LieElement jac = bracket(x, bracket(y, z)) + bracket(y, bracket(z, x)) +
                     bracket(z, bracket(x, y));
    if (!jac.is_zero()) {
      rep.jacobi = false;
      if (rep.first_failure.empty()) rep.first_failure = "jacobi";
    }
    // extension soundness: bracketing (T^k f)_<p> must agree with the
    // canonical representative f_<T^-k p>
    std::uniform_int_distribution<long> kdist(-2, 2);
    long k = kdist(rng);
    const std::string gi = gens[pick(rng)], gj = gens[pick(rng)];
    KElement p = random_kelement(rng, cfg), q = random_kelement(rng, cfg);
    ConformalElement tf = HopfElement::T(k) * ConformalElement::generator(gi);
    LieElement lhs = bracket(from_pair(alg, tf, p), LieElement::mode(alg, gj, q));
    LieElement rhs = bracket(LieElement::mode(alg, gi, p.shifted(-k)),
                             LieElement::mode(alg, gj, q));
    if (lhs != rhs) {
      rep.extension_sound = false;
      if (rep.first_failure.empty()) rep.first_failure = "extension rules";
    }
    // Hol / Sing closure
    auto [xh, xs] = hol_sing_split(x);
    auto [yh, ys] = hol_sing_split(y);
    if (!hol_sing_split(bracket(xh, yh)).second.is_zero()) {
      rep.hol_closed = false;
      if (rep.first_failure.empty()) rep.first_failure = "Hol closure";
    }
    if (!hol_sing_split(bracket(xs, ys)).first.is_zero()) {
      rep.sing_closed = false;
      if (rep.first_failure.empty()) rep.first_failure = "Sing closure";
    }
  }
  return rep;
}

}  // namespace htv

#endif
