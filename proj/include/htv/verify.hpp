#ifndef HTV_VERIFY_HPP
#define HTV_VERIFY_HPP

#include <functional>
#include <map>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "affine.hpp"
#include "conformal.hpp"
#include "distributions.hpp"
#include "eval.hpp"
#include "hopf.hpp"
#include "ktau.hpp"
#include "linalg.hpp"
#include "vacuum.hpp"

namespace htv {

struct CheckFailure {
  std::string name;
  std::string lhs;
  std::string rhs;
};

struct SuiteReport {
  std::string suite;
  int cases = 0;
  int passed = 0;
  std::vector<CheckFailure> failures;
  std::map<std::string, std::string> verdicts;
  long window = 8;
  unsigned long seed = 0;
  bool ok() const { return failures.empty(); }

  void check(const std::string& name, bool pass, const std::string& lhs = "",
             const std::string& rhs = "") {
    ++cases;
    if (pass)
      ++passed;
    else
      failures.push_back({name, lhs, rhs});
  }
};

// ---------------------------------------------------------------------------
// duality suite: factorial-basis duality and the difference system

inline SuiteReport run_duality(long window = 12) {
  SuiteReport rep;
  rep.suite = "duality";
  rep.window = window;
  for (long m = 0; m <= window; ++m)
    for (long n = 0; n <= window; ++n) {
      Rational got = trace(falling_factorial(m) * falling_factorial(-n - 1));
      Rational expect = (m == n) ? 1 : 0;
      rep.check("Tr(ff(" + std::to_string(m) + ")*ff(" + std::to_string(-n - 1) + "))",
                got == expect, to_string(got), to_string(expect));
    }
  // two-sided mode duality
  for (long m = -8; m <= 8; ++m)
    for (long n = -8; n <= 8; ++n) {
      Rational got = mode(falling_factorial(m), n);
      rep.check("mode(ff(m),n) grid", got == ((m == n) ? Rational(1) : Rational(0)));
    }
  // difference system and initial condition
  for (long l = 1; l <= 10; ++l) {
    const KElement& f = falling_factorial(l);
    KElement diff = f.shifted(1) - f;
    rep.check("Delta ff(" + std::to_string(l) + ")", diff == falling_factorial(l - 1) * Rational(l));
    rep.check("ff(" + std::to_string(l) + ")|_0", f.eval(Rational(0)) == 0);
  }
  // uniqueness: on polynomials of degree <= l the combined map
  // q |-> (Delta q, q(0)) has trivial kernel
  for (long l = 1; l <= 10; ++l) {
    RatMat m;
    for (long r = 0; r < l; ++r) {  // coefficients of Delta q
      RatVec row;
      for (long c = 0; c <= l; ++c) {
        KElement mono = KElement::monomial(static_cast<int>(c));
        KElement d = mono.shifted(1) - mono;
        row.push_back(d.poly_coeff(static_cast<std::size_t>(r)));
      }
      m.push_back(row);
    }
    RatVec row0;
    for (long c = 0; c <= l; ++c) row0.push_back(c == 0 ? Rational(1) : Rational(0));
    m.push_back(row0);
    rep.check("difference-system uniqueness deg " + std::to_string(l),
              rank_exact(m) == static_cast<std::size_t>(l + 1));
  }
  // direct-sum split and T-equivariance on deterministic samples
  std::mt19937_64 rng(12345);
  RandomKConfig cfg;
  for (int i = 0; i < 25; ++i) {
    KElement f = random_kelement(rng, cfg);
    KElement g = random_kelement(rng, cfg);
    rep.check("hol+sing split", f.hol() + f.sing() == f);
    rep.check("T(fg)=(Tf)(Tg)", (f * g).shifted(1) == f.shifted(1) * g.shifted(1));
    rep.check("Tr(Tf)=Tr(f)", trace(f.shifted(1)) == trace(f));
    KElement h = random_kelement(rng, cfg);
    rep.check("associativity", (f * g) * h == f * (g * h));
    rep.check("distributivity", f * (g + h) == f * g + f * h);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// hopf suite: Hopf axioms, alpha isomorphism, log(1+Delta) = d/dtau

inline SuiteReport run_hopf() {
  SuiteReport rep;
  rep.suite = "hopf";
  using Key3 = std::tuple<HopfElement::Key, HopfElement::Key, HopfElement::Key>;
  for (long k = -5; k <= 5; ++k) {
    for (int m = 0; m <= 4; ++m) {
      HopfElement h = HopfElement::term(k, m, 1);
      // coassociativity
      std::map<Key3, Rational> left, right;
      for (const auto& [a, b] : h.coproduct()) {
        for (const auto& [a1, a2] : a.coproduct())
          for (const auto& [ka1, ca1] : a1.terms())
            for (const auto& [ka2, ca2] : a2.terms())
              for (const auto& [kb, cb] : b.terms()) left[{ka1, ka2, kb}] += ca1 * ca2 * cb;
        for (const auto& [b1, b2] : b.coproduct())
          for (const auto& [ka, ca] : a.terms())
            for (const auto& [kb1, cb1] : b1.terms())
              for (const auto& [kb2, cb2] : b2.terms()) right[{ka, kb1, kb2}] += ca * cb1 * cb2;
      }
      auto prune = [](std::map<Key3, Rational>& mp) {
        for (auto it = mp.begin(); it != mp.end();)
          it = (it->second == 0) ? mp.erase(it) : std::next(it);
      };
      prune(left);
      prune(right);
      rep.check("coassociativity T^" + std::to_string(k) + " D^" + std::to_string(m),
                left == right);
      // counit axiom
      HopfElement counit_side;
      for (const auto& [a, b] : h.coproduct()) counit_side += b * a.counit();
      rep.check("counit axiom", counit_side == h);
      // antipode axiom: m(S (x) id) Delta(h) = eps(h) 1
      HopfElement anti;
      for (const auto& [a, b] : h.coproduct()) anti += a.antipode() * b;
      rep.check("antipode axiom", anti == HopfElement::constant(h.counit()));
      // alpha round-trip and trace correspondence
      KElement im = alpha(h);
      rep.check("alpha_inv(alpha(h))=h", alpha_inv(im) == h);
      rep.check("Tr(alpha(h))=eps(h)", trace(im) == h.counit());
    }
  }
  // alpha on the singular side: alpha(alpha_inv(f)) = f
  std::mt19937_64 rng(777);
  RandomKConfig cfg;
  for (int i = 0; i < 20; ++i) {
    KElement f = random_kelement(rng, cfg).sing();
    rep.check("alpha(alpha_inv(f))=f", alpha(alpha_inv(f)) == f);
  }
  rep.check("alpha(1)=1/t", alpha(HopfElement::one()) == KElement::pole_term(0, 1));
  rep.check("alpha(T^2)=1/(t-2)", alpha(HopfElement::T(2)) == KElement::pole_term(2, 1));
  rep.check("alpha(Dtau)=1/t^2", alpha(HopfElement::D(1)) == KElement::pole_term(0, 2));
  rep.check("antipode T^3 -> T^-3", HopfElement::T(3).antipode() == HopfElement::T(-3));
  // log(1+Delta) equals d/dtau on monomials of degree <= 8, exactly
  HopfElement log8 = log_shift_series(8);
  for (int d = 0; d <= 8; ++d) {
    KElement mono = KElement::monomial(d);
    rep.check("log(1+Delta) on t^" + std::to_string(d),
              log8.act(mono) == mono.derivative());
  }
  // ... and the termination that makes it exact
  for (int d = 0; d <= 8; ++d) {
    KElement mono = KElement::monomial(d);
    HopfElement deltapow = HopfElement::one();
    for (int i = 0; i <= d; ++i) deltapow *= HopfElement::delta_op();
    rep.check("Delta^(d+1) kills degree d", deltapow.act(mono).is_zero());
  }
  return rep;
}

// ---------------------------------------------------------------------------
// delta suite: kernel identity, the four delta properties, extraction

inline SuiteReport run_delta(long window = 8, unsigned long seed = 42) {
  SuiteReport rep;
  rep.suite = "delta";
  rep.window = window;
  rep.seed = seed;
  for (int m = 0; m <= 8; ++m)
    rep.check("geometric kernel identity M=" + std::to_string(m),
              geometric_kernel_expand(m).verified);
  // iterated differences: (T^-1 - 1)^k (1/t) = k! ff(-k-1)
  KElement g = KElement::pole_term(0, 1);
  for (int k = 0; k <= 6; ++k) {
    rep.check("(T^-1-1)^" + std::to_string(k) + "(1/t)",
              g == falling_factorial(-k - 1) * Rational(factorial(static_cast<unsigned>(k))));
    g = g.shifted(-1) - g;
  }
  // twisted expansions of polynomials terminate and reproduce the coproduct
  {
    TwoVarSeries l = twisted_expand(KElement::variable(), Side::L, 8);
    rep.check("L_S(t) terminates", l.exact && l.terms.size() == 2);
    // t1 - t2: entries
    rep.check("L_S(t) = t1 - t2",
              series_entry(l, 1, 0) == 1 && series_entry(l, 0, 1) == -1 &&
                  series_entry(l, 0, 0) == 0);
    TwoVarSeries r = twisted_expand(KElement::pole_term(0, 1), Side::R, 9);
    // R-side coefficient of tau1(k) is -tau2(-k-1)
    bool sgood = true;
    for (long k = 0; k <= 6; ++k)
      for (long n = -7; n <= 0; ++n)
        if (series_entry(r, k, n) != ((n == -k - 1) ? Rational(-1) : Rational(0))) sgood = false;
    rep.check("R_S(1/t) signs", sgood);
  }
  // delta of polynomials vanishes identically
  rep.check("delta(ff(2)) = 0", delta_of(falling_factorial(2), 8).exact_zero);
  rep.check("delta(t^3) = 0", delta_of(KElement::monomial(3), 8).exact_zero);
  // canonical delta kernel matches the twisted-difference construction
  {
    DeltaResult d = delta_of(KElement::pole_term(0, 1), window + 2);
    BiDist canon = BiDist::delta();
    bool match = true;
    for (long m = -6; m <= 6; ++m)
      for (long n = -6; n <= 6; ++n)
        if (d.entry(m, n) != canon.entry(m, n)) match = false;
    rep.check("delta(1/t) kernel = sum ff(n) (x) ff(-n-1)", match);
  }
  // four delta properties on the window
  const BiDist dd = BiDist::delta();
  std::vector<HopfElement> hs = {HopfElement::T(1), HopfElement::T(-1), HopfElement::T(2),
                                 HopfElement::T(-2), HopfElement::D(1)};
  std::vector<std::string> hnames = {"T", "T^-1", "T^2", "T^-2", "Dtau"};
  for (std::size_t i = 0; i < hs.size(); ++i) {
    BiDist lhs = apply_hopf_slot(hs[i], 1, dd);
    BiDist rhs = apply_hopf_slot(hs[i].antipode(), 2, dd);
    rep.check("h1 delta = S(h)2 delta, h=" + hnames[i], lhs.equal_on_window(rhs, window));
  }
  std::vector<KElement> fs = {KElement::variable(), falling_factorial(2),
                              KElement::pole_term(0, 1), KElement::pole_term(1, 1)};
  std::vector<std::string> fnames = {"t", "ff(2)", "1/t", "1/(t-1)"};
  for (std::size_t i = 0; i < fs.size(); ++i) {
    BiDist lhs = multiply_function_slot(fs[i], 1, dd);
    BiDist rhs = multiply_function_slot(fs[i], 2, dd);
    rep.check("f(t1) delta = f(t2) delta, f=" + fnames[i], lhs.equal_on_window(rhs, window));
    ScalarDistribution tr = trace_slot(lhs, 1, -window, window);
    bool good = true;
    for (long n = -window; n <= window; ++n)
      if (tr.coeff(n) != mode(fs[i], n)) good = false;
    rep.check("Tr_1(f(t1) delta) = f(t2), f=" + fnames[i], good);
  }
  // distribution antipode involution on windowed kernels
  for (const auto& f : fs) {
    rep.check("antipode involution", f.negated_argument().negated_argument() == f);
  }
  // pairing examples: <D,F> with kernel 1/(t+1) against ff(n) gives (-1)^n n!
  {
    ScalarDistribution d = ScalarDistribution::from_kernel(KElement::pole_term(-1, 1), -9, 9);
    bool good = true;
    for (long n = 0; n <= 6; ++n) {
      Rational expect = Rational(factorial(static_cast<unsigned>(n)));
      if (n % 2) expect = -expect;
      if (d.pair(falling_factorial(n)) != expect) good = false;
    }
    rep.check("kernel 1/(t+1) pairs to (-1)^n n!", good);
    rep.check("pair with 0 is 0", d.pair(KElement()) == 0);
  }
  // extraction: identity case and round-trips
  {
    BiDist target = BiDist::delta();
    ExtractionAnsatz az;
    az.t_lo = -1;
    az.t_hi = 1;
    az.d_max = 1;
    az.pole_lo = -2;
    az.pole_hi = 2;
    az.pole_order_max = 2;
    az.poly_deg_max = 1;
    auto res = rationality_extract([&](long m, long n) { return target.entry(m, n); }, 6, az);
    rep.check("extract(delta) = single identity term",
              res.success && res.expansion.terms().size() == 1 &&
                  res.expansion.terms()[0].first == KElement::constant(1) &&
                  res.expansion.terms()[0].second == HopfElement::one());
  }
  {
    // forward-generate C(t2)(T^-1 - 1)delta-style scalar instance and re-extract
    BiDist target = BiDist::from_terms(
        {{KElement::pole_term(0, 1), HopfElement::T(-1)},
         {KElement::pole_term(0, 1) * Rational(-1), HopfElement::one()}});
    ExtractionAnsatz az;
    az.t_lo = -2;
    az.t_hi = 2;
    az.d_max = 1;
    az.pole_lo = -2;
    az.pole_hi = 2;
    az.pole_order_max = 1;
    az.poly_deg_max = 0;
    auto res = rationality_extract([&](long m, long n) { return target.entry(m, n); }, 7, az);
    rep.check("extract((T^-1-1) delta instance)",
              res.success && res.expansion.equal_on_window(target, 7) &&
                  res.expansion.terms().size() == 2);
  }
  // random round-trips; the ansatz is the instance support plus a margin
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<long> tdist(-2, 2);
  std::uniform_int_distribution<int> ddist(0, 2), odist(1, 2), cdist(-4, 4), pdist(-3, 3),
      kinddist(0, 3), ndist(1, 3);
  int roundtrips = 0;
  for (int it = 0; it < 50; ++it) {
    std::vector<BiDist::Term> terms;
    std::vector<ExtractionCandidate> cands;
    auto add_cand = [&](const KElement& atom, const HopfElement& op) {
      for (const auto& c : cands)
        if (c.atom == atom && c.op == op) return;
      cands.push_back({atom, op});
    };
    long span = 0;
    int nterms = ndist(rng);
    for (int j = 0; j < nterms; ++j) {
      long t = tdist(rng);
      int dm = ddist(rng);
      Rational c(cdist(rng), 1);
      if (c == 0) c = 1;
      HopfElement op = HopfElement::term(t, dm, 1);
      KElement atom, unit_atom;
      if (kinddist(rng) == 0) {
        int deg = ddist(rng) % 2;
        atom = KElement::monomial(deg, c);
        unit_atom = KElement::monomial(deg);
      } else {
        long p = pdist(rng);
        int od = odist(rng);
        atom = KElement::pole_term(p, od, c);
        unit_atom = KElement::pole_term(p, od);
        span = std::max(span, std::abs(p) + od);
      }
      span = std::max(span, std::abs(t) + dm);
      terms.push_back({atom, op});
      add_cand(unit_atom, op);
      // margin candidates around the instance support
      add_cand(unit_atom, HopfElement::term(t + 1, dm, 1));
      add_cand(unit_atom, HopfElement::one());
    }
    BiDist target = BiDist::from_terms(terms);
    long w = span + 3;
    auto res = rationality_extract_with(
        [&](long m, long n) { return target.entry(m, n); }, w, cands);
    bool good = res.success && res.expansion.equal_on_window(target, w);
    if (good) ++roundtrips;
    rep.check("extraction round-trip " + std::to_string(it), good);
  }
  rep.verdicts["extraction_roundtrips"] = std::to_string(roundtrips) + "/50";
  return rep;
}

// ---------------------------------------------------------------------------
// jacobi suite: Lie structure of the Toda affinization + the section-6 quotient

inline SuiteReport run_jacobi(unsigned long seed = 42, int samples = 100) {
  SuiteReport rep;
  rep.suite = "jacobi";
  rep.seed = seed;
  auto toda = ConformalAlgebra::toda();
  std::mt19937_64 rng(seed);
  RandomKConfig cfg;
  const auto& gens = toda->generators();
  std::uniform_int_distribution<std::size_t> pick(0, gens.size() - 1);
  auto rand_lie = [&] {
    LieElement x(toda);
    x.set_coord(gens[pick(rng)], random_kelement(rng, cfg));
    return x;
  };
  for (int it = 0; it < samples; ++it) {
    LieElement x = rand_lie(), y = rand_lie(), z = rand_lie();
    rep.check("antisymmetry " + std::to_string(it), (bracket(x, y) + bracket(y, x)).is_zero());
    LieElement jac =
        bracket(x, bracket(y, z)) + bracket(y, bracket(z, x)) + bracket(z, bracket(x, y));
    rep.check("jacobi " + std::to_string(it), jac.is_zero());
  }
  for (int it = 0; it < 50; ++it) {
    LieElement x = rand_lie(), y = rand_lie();
    auto [xh, xs] = hol_sing_split(x);
    auto [yh, ys] = hol_sing_split(y);
    rep.check("Hol closed " + std::to_string(it),
              hol_sing_split(bracket(xh, yh)).second.is_zero());
    rep.check("Sing closed " + std::to_string(it),
              hol_sing_split(bracket(xs, ys)).first.is_zero());
    rep.check("split sums back", xh + xs == x);
  }
  // representative-independence of the bracket
  for (int it = 0; it < 30; ++it) {
    std::uniform_int_distribution<long> kd(-2, 2);
    long k = kd(rng);
    KElement p = random_kelement(rng, cfg), q = random_kelement(rng, cfg);
    ConformalElement tf = HopfElement::T(k) * ConformalElement::generator(gens[pick(rng)]);
    LieElement y = LieElement::mode(toda, gens[pick(rng)], q);
    rep.check("well-definedness " + std::to_string(it),
              bracket(from_pair(toda, tf, p), y) ==
                  bracket(from_pair(toda, ConformalElement::generator(
                                              tf.coords().begin()->first),
                                    p.shifted(-k)),
                          y));
  }
  // the four 1-product displays and the quotient Lie algebra
  auto q = quotient_lie(*toda);
  rep.check("(Tf)_{1}g = f_{1}g", q.t_left_invariance);
  rep.check("f_{1}(Tg) = T(f_{1}g)", q.t_right_covariance);
  rep.check("f_{1}g - g_{1}f in m_T C", q.antisymmetry_mod_mt);
  rep.check("[f_{1},g_{1}] = (f_{1}g)_{1}", q.bracket_homomorphism);
  bool abelian = true;
  for (const auto& [key, br] : q.bracket)
    if (!br.empty()) abelian = false;
  rep.check("Toda quotient is 2-dimensional abelian", abelian && gens.size() == 2);
  // explicit m_T witness: C_{1}B = -Delta C
  ConformalElement C = ConformalElement::generator("C");
  ConformalElement B = ConformalElement::generator("B");
  rep.check("C_{1}B = -Delta C",
            toda->product_one(C, B) == (HopfElement::delta_op() * C) * Rational(-1));
  rep.check("B_{1}C = 0", toda->product_one(B, C).is_zero());
  // B_{F}B = C_{F}C = 0 for random finite F
  for (int it = 0; it < 10; ++it) {
    std::map<long, Rational> F;
    std::uniform_int_distribution<long> nd(-3, 3);
    std::uniform_int_distribution<int> cd(-4, 4);
    for (int j = 0; j < 3; ++j) F[nd(rng)] = Rational(cd(rng));
    rep.check("B_{F}B = 0", toda->product_kronecker(B, F, B).is_zero());
    rep.check("C_{F}C = 0", toda->product_kronecker(C, F, C).is_zero());
  }
  return rep;
}

// ---------------------------------------------------------------------------
// currents suite: the Toda current commutator and its finite expansion

inline SuiteReport run_currents(long window = 6) {
  SuiteReport rep;
  rep.suite = "currents";
  rep.window = window;
  auto toda = ConformalAlgebra::toda();
  ConformalElement B = ConformalElement::generator("B");
  ConformalElement C = ConformalElement::generator("C");
  auto cc = current_commutator(toda, B, C, window);
  rep.check("[B(t1),C(t2)] matches closed form on window", cc.window_match);
  // closed form must be exactly C(t2)(T2^-1 - 1)delta
  std::vector<CurrentDeltaTerm> expect = {{C, HopfElement::T(-1)},
                                          {C * Rational(-1), HopfElement::one()}};
  bool two_terms = cc.closed_form.size() == 2;
  rep.check("closed form has two terms", two_terms);
  {
    bool same = true;
    for (long m = -window; m <= window; ++m)
      for (long n = -window; n <= window; ++n)
        if (current_delta_entry(toda, cc.closed_form, m, n) !=
            current_delta_entry(toda, expect, m, n))
          same = false;
    rep.check("closed form = C(t2)(T2^-1 - 1)delta", same);
  }
  // the (T2 - 1) alternative from the section-8 display must fail
  {
    std::vector<CurrentDeltaTerm> alt = {{C, HopfElement::T(1)},
                                         {C * Rational(-1), HopfElement::one()}};
    bool differs = false;
    for (long m = -window; m <= window && !differs; ++m)
      for (long n = -window; n <= window; ++n)
        if (cc.entry_bracket(m, n) != current_delta_entry(toda, alt, m, n)) {
          differs = true;
          break;
        }
    rep.check("(T2-1) alternative is rejected", differs);
    rep.verdicts["commutator_sign"] = differs ? "T^-1-1" : "T-1";
  }
  // extraction recovers exactly the two-term expansion
  {
    CurrentExtractionAnsatz az;
    auto res = current_extract(
        toda, [&](long m, long n) { return cc.entry_bracket(m, n); }, window, az);
    bool good = res.success && res.terms.size() == 2;
    if (good) {
      for (const auto& t : res.terms) {
        bool is_tminus = (t.op == HopfElement::T(-1)) && (t.coeff == C);
        bool is_one = (t.op == HopfElement::one()) && (t.coeff == C * Rational(-1));
        if (!is_tminus && !is_one) good = false;
      }
    }
    rep.check("extraction recovers {(C,T^-1):1,(C,1):-1}", good);
  }
  // [B(t1),B(t2)] = 0 and current-mode instances
  {
    auto bb = current_commutator(toda, B, B, window);
    bool zero = bb.closed_form.empty();
    for (long m = -2; m <= 2 && zero; ++m)
      for (long n = -2; n <= 2; ++n)
        if (!bb.entry_bracket(m, n).is_zero()) zero = false;
    rep.check("[B(t1),B(t2)] = 0", zero);
  }
  {
    LieElement lhs = bracket(current_mode(toda, B, 1), current_mode(toda, C, 0));
    rep.check("[B_<ff(1)>, C_<ff(0)>] = -C_<1>",
              lhs == LieElement::mode(toda, "C", KElement::constant(-1)));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// vacuum suite: representation, vacuum axioms, compatibility, certificates,
// ad-covariance, the module-level commutator verdict, truncated skew-symmetry

inline SuiteReport run_vacuum(long window = 8, unsigned long seed = 42) {
  SuiteReport rep;
  rep.suite = "vacuum";
  rep.window = window;
  rep.seed = seed;
  auto toda = ConformalAlgebra::toda();
  VacuumModule V(toda);
  const State vac = State::vacuum();
  auto lie = [&](const std::string& g, const KElement& p) {
    LieElement x(toda);
    x.set_coord(g, p);
    return x;
  };

  // representation property on random elements and states
  std::mt19937_64 rng(seed);
  RandomKConfig cfg;
  cfg.pole_lo = -2;
  cfg.pole_hi = 2;
  cfg.order_max = 2;
  cfg.deg_max = 2;
  const auto& gens = toda->generators();
  std::uniform_int_distribution<std::size_t> pick(0, gens.size() - 1);
  std::uniform_int_distribution<long> nd(-2, 2);
  std::uniform_int_distribution<int> md(1, 2), gd(0, 1), depthd(0, 2);
  for (int it = 0; it < 100; ++it) {
    LieElement x = lie(gens[pick(rng)], random_kelement(rng, cfg));
    LieElement y = lie(gens[pick(rng)], random_kelement(rng, cfg));
    State s = vac;
    int depth = depthd(rng);
    for (int j = 0; j < depth; ++j) s = V.act(lie(gens[gd(rng)], KElement::pole_term(nd(rng), md(rng))), s);
    if (s.is_zero()) s = vac;
    State lhs = V.act(bracket(x, y), s);
    State rhs = V.act(x, V.act(y, s)) - V.act(y, V.act(x, s));
    rep.check("representation " + std::to_string(it), lhs == rhs);
  }

  // vacuum axioms
  {
    KElement f1 = KElement::pole_term(2, 1, Rational(3)) + KElement::monomial(1);
    State s = V.single(1, 0, 1);
    rep.check("Y(1,t) = Tr-weighted identity", V.vertex_pair(vac, f1, s) == s * trace(f1));
    rep.check("B_<1>|0> = 0", V.act(lie("B", KElement::constant(1)), vac).is_zero());
    for (int g = 0; g < 2; ++g) {
      State a = V.single(g, 0, 1);
      bool hol = true;
      for (long q = 0; q <= window; ++q)
        if (!V.vertex_pair(a, falling_factorial(q), vac).is_zero()) hol = false;
      rep.check("Y(f,t)|0> holomorphic, f=" + gens[static_cast<std::size_t>(g)], hol);
      rep.check("constant term recovers f",
                V.vertex_pair(a, falling_factorial(-1), vac) == a);
    }
    // and for a depth-2 state
    State bc = V.vertex_pair(V.single(0, 0, 1), KElement::pole_term(0, 1), V.single(1, 0, 1));
    bool hol = true;
    for (long q = 0; q <= 4; ++q)
      if (!V.vertex_pair(bc, falling_factorial(q), vac).is_zero()) hol = false;
    rep.check("Y(BC|0>,t)|0> holomorphic", hol);
    rep.check("constant term recovers BC|0>",
              V.vertex_pair(bc, falling_factorial(-1), vac) == bc);
  }

  // compatibility for h in {1, T, T^2, T^3} on single-mode states, exact
  {
    std::vector<HopfElement> hs = {HopfElement::one(), HopfElement::T(1), HopfElement::T(2),
                                   HopfElement::T(3)};
    std::vector<std::string> hn = {"1", "T", "T^2", "T^3"};
    for (std::size_t hi = 0; hi < hs.size(); ++hi)
      for (int g = 0; g < 2; ++g)
        for (long n = -3; n <= 3; ++n)
          for (int m = 1; m <= 2; ++m) {
            auto r = V.compatibility_check(hs[hi], V.single(g, n, m));
            rep.check("compatibility h=" + hn[hi] + " gen=" + std::to_string(g) +
                          " pole=" + std::to_string(n) + " ord=" + std::to_string(m),
                      r.exact && r.equal);
          }
    // epsilon-consistency and invertibility of the label action
    State s = V.single(0, 1, 2);
    rep.check("1.s = s", V.module_action(HopfElement::one(), s) == s);
    rep.check("T T^-1 s = s",
              V.module_action(HopfElement::T(1), V.module_action(HopfElement::T(-1), s)) == s);
    // orientation verdict: the opposite label action fails compatibility
    State f = V.single(0, 0, 1);
    State flipped = V.module_action(HopfElement::T(-1), f);
    auto r = V.compatibility_check(HopfElement::T(1), f);
    bool opposite_fails = (flipped != r.rhs);
    rep.check("T_V orientation is forced", opposite_fails && r.equal);
    rep.verdicts["Tv_orientation"] = "pole n -> n+k under T^k";
  }

  // field-axiom certificates for all generator pairs, poles in [-3,3],
  // orders <= 2
  {
    int solved = 0, total = 0;
    for (int ga = 0; ga < 2; ++ga)
      for (int gs = 0; gs < 2; ++gs)
        for (long na = -3; na <= 3; ++na)
          for (int ma = 1; ma <= 2; ++ma) {
            // one representative creation state per (gs); full pole range on a
            State a = V.single(ga, na, ma);
            State s = V.single(gs, (na + 1 <= 3) ? na + 1 : na - 1, 1);
            auto cert = V.singular_part_certificate(a, s, {}, -4, 4, 1);
            ++total;
            if (cert.success) ++solved;
            rep.check("certificate gen" + std::to_string(ga) + " pole " + std::to_string(na) +
                          " ord " + std::to_string(ma) + " on gen" + std::to_string(gs),
                      cert.success, cert.failure);
          }
    rep.verdicts["certificates_solved"] = std::to_string(solved) + "/" + std::to_string(total);
    // the closed-form case: phi for (B_<1/t>|0>, C_<1/t>|0>) is
    // C_<1/t>|0> (x) (1/(t+1) - 1/t): the 1/(t+1) tail with the n=0 term
    // corrected (B_<1>C_<1/t>|0> = 0)
    State a = V.single(0, 0, 1);
    State c0 = V.single(1, 0, 1);
    auto cert = V.singular_part_certificate(a, c0, {}, -1, 1, 0);
    bool good = cert.success && cert.atoms.size() == 2;
    if (good)
      for (const auto& at : cert.atoms) {
        if (at.loc == -1 && at.ord == 1)
          good = good && (at.state == c0);
        else if (at.loc == 0 && at.ord == 1)
          good = good && (at.state == c0 * Rational(-1));
        else
          good = false;
      }
    rep.check("closed-form certificate (1/(t+1) - 1/t) (x) C_<1/t>|0>", good);
    bool modes_good = true;
    for (long n = 1; n <= window; ++n) {
      Rational e = Rational(factorial(static_cast<unsigned>(n)));
      if (n % 2) e = -e;
      if (V.vertex_pair(a, falling_factorial(n), c0) != c0 * e) modes_good = false;
    }
    rep.check("modes (-1)^n n! for n >= 1", modes_good);
    rep.check("mode 0 vanishes (B_<1> kills)", V.vertex_pair(a, falling_factorial(0), c0).is_zero());
    // phi = 0 cases
    auto cert0 = V.singular_part_certificate(vac, c0);
    rep.check("phi = 0 for the identity field", cert0.success && cert0.atoms.empty());
    auto certv = V.singular_part_certificate(a, vac);
    rep.check("phi = 0 on the vacuum", certv.success && certv.atoms.empty());
  }

  // ad-covariance for h = T^{+-1} on generator fields, mode-matched
  {
    for (long hk : {1L, -1L}) {
      bool good = true;
      for (int g = 0; g < 2; ++g) {
        State f = V.single(g, 0, 1);
        for (const State& s :
             {vac, V.single(0, 1, 1), V.single(1, 0, 1), V.single(1, -1, 2)}) {
          for (long q = -3; q <= 3; ++q) {
            State lhs = V.module_action(
                HopfElement::T(hk),
                V.vertex_pair(f, falling_factorial(q), V.module_action(HopfElement::T(-hk), s)));
            State rhs = V.vertex_pair(f, falling_factorial(q).shifted(-hk), s);
            if (lhs != rhs) good = false;
          }
        }
      }
      rep.check("ad-covariance h=T^" + std::to_string(hk), good);
    }
    // covariance instance from the spec: F = ff(2) on depth <= 2 states
    State f = V.single(0, 0, 1);
    KElement F = falling_factorial(2);
    for (const State& s : {vac, V.single(1, 0, 1)}) {
      State lhs = V.module_action(HopfElement::T(1),
                                  V.act(lie("B", F), V.module_action(HopfElement::T(-1), s)));
      State rhs = V.act(lie("B", F.shifted(-1)), s);
      rep.check("T_V B_<F> T_V^-1 = B_<shifted F>", lhs == rhs);
    }
  }

  // module-level commutator verdict: [Y(B,t1),Y(C,t2)] as operators matches
  // the (T2^-1 - 1) pattern, not (T2 - 1)
  {
    ConformalElement B = ConformalElement::generator("B");
    ConformalElement C = ConformalElement::generator("C");
    std::vector<CurrentDeltaTerm> minus = {{C, HopfElement::T(-1)},
                                           {C * Rational(-1), HopfElement::one()}};
    std::vector<CurrentDeltaTerm> plus = {{C, HopfElement::T(1)},
                                          {C * Rational(-1), HopfElement::one()}};
    bool minus_ok = true, plus_ok = true;
    for (const State& s : {vac, V.single(0, 0, 1), V.single(1, 0, 1)}) {
      for (long m = -3; m <= 3; ++m)
        for (long n = -3; n <= 3; ++n) {
          State lhs = V.act(bracket(lie("B", falling_factorial(-m - 1)),
                                    lie("C", falling_factorial(-n - 1))),
                            s);
          if (lhs != V.act(current_delta_entry(toda, minus, m, n), s)) minus_ok = false;
          if (lhs != V.act(current_delta_entry(toda, plus, m, n), s)) plus_ok = false;
        }
    }
    rep.check("module commutator matches (T2^-1 - 1) delta", minus_ok);
    rep.check("module commutator rejects (T2 - 1) delta", !plus_ok);
    rep.verdicts["commutator_sign_module"] = minus_ok && !plus_ok ? "T^-1-1" : "ambiguous";
  }

  // skew-symmetry with the truncated factorial exponential (experimental)
  {
    bool holds = true;
    long trunc = window;
    for (int gf = 0; gf < 2; ++gf) {
      int gg = 1 - gf;
      State f = V.single(gf, 0, 1);
      State g = V.single(gg, 0, 1);
      for (long q = 0; q <= 3; ++q) {
        State lhs = V.vertex_pair(f, falling_factorial(q), g);
        // R_V(t) Y^S(g,t) f, mode q: sum_k Delta_V^k <Y(g) f, S(tau(k) tau(q))>/k!
        State rhs;
        for (long k = 0; k <= trunc; ++k) {
          KElement probe = (falling_factorial(k) * falling_factorial(q)).negated_argument() *
                           (Rational(1) / Rational(factorial(static_cast<unsigned>(k))));
          State inner = V.vertex_pair(g, probe, f);
          for (long j = 0; j < k; ++j)
            inner = V.module_action(HopfElement::T(1), inner) - inner;
          rhs += inner;
        }
        if (lhs != rhs) holds = false;
      }
    }
    rep.verdicts["skew_symmetry_truncated"] =
        holds ? "holds at truncation " + std::to_string(trunc) : "fails (experimental)";
  }
  return rep;
}

// ---------------------------------------------------------------------------
// homomorphism suite: Y(f_{F}g, tau) = f(tau)_{F} g(tau), resolving the
// normal-ordering sign convention

inline SuiteReport run_homomorphism(long window = 6) {
  SuiteReport rep;
  rep.suite = "homomorphism";
  rep.window = window;
  auto toda = ConformalAlgebra::toda();
  VacuumModule V(toda);
  const State vac = State::vacuum();

  struct Combo {
    int gf, gg;
    std::vector<State> test_states;
  };
  std::vector<Combo> combos = {
      {0, 1, {vac, V.single(0, 0, 1), V.single(0, 1, 1)}},
      {1, 0, {vac, V.single(0, 0, 1), V.single(1, 0, 1)}},
  };
  std::vector<KElement> Fs = {
      KElement::pole_term(0, 1),                                      // 1/t (delta_0 transport)
      KElement::pole_term(1, 1),                                      // delta_1 transport
      KElement::pole_term(-1, 1),                                     // delta_-1 transport
      KElement::pole_term(0, 1) + KElement::pole_term(1, 1) * Rational(2),  // combination
  };
  std::vector<std::string> Fnames = {"1/t", "1/(t-1)", "1/(t+1)", "1/t + 2/(t-1)"};

  int checked[2] = {0, 0}, mismatched[2] = {0, 0}, skipped = 0;
  for (int si = 0; si < 2; ++si) {
    VertexConfig cfgv;
    cfgv.sign = (si == 0) ? -1 : +1;
    for (const auto& combo : combos) {
      State f = V.single(combo.gf, 0, 1);
      State g = V.single(combo.gg, 0, 1);
      for (std::size_t fi = 0; fi < Fs.size(); ++fi) {
        State h = V.state_product(f, Fs[fi], g, cfgv);  // single-mode fast path
        for (const State& s : combo.test_states) {
          for (long q = -window; q <= window; ++q) {
            State lhs, rhs;
            try {
              lhs = V.field_mode(h, q, s, cfgv);
              rhs = V.field_product_pair(PBWMode{combo.gf, 0, 1}, Fs[fi], g,
                                         falling_factorial(q), s, cfgv);
            } catch (const untraceable_error&) {
              if (si == 0) ++skipped;
              continue;
            }
            ++checked[si];
            if (lhs != rhs) ++mismatched[si];
          }
        }
      }
    }
  }
  rep.check("minus convention matches on all traceable modes",
            checked[0] > 100 && mismatched[0] == 0,
            std::to_string(mismatched[0]) + " mismatches of " + std::to_string(checked[0]));
  rep.check("plus convention fails somewhere", mismatched[1] > 0,
            "plus convention also matched everywhere");
  rep.verdicts["nop_sign"] = (mismatched[0] == 0 && mismatched[1] > 0) ? "minus" : "unresolved";
  rep.verdicts["homomorphism_modes_checked"] = std::to_string(checked[0]);
  rep.verdicts["homomorphism_modes_skipped_untraceable"] = std::to_string(skipped);

  // normal ordered product: pure-creation case agrees under both conventions
  {
    State b = V.single(1, 0, 1);
    VertexConfig minus, plus;
    minus.sign = -1;
    plus.sign = +1;
    State nm = V.normal_ordered_product(V.single(0, 0, 1), b, minus);
    State np = V.normal_ordered_product(V.single(0, 0, 1), b, plus);
    State expect = State::monomial({PBWMode{0, 0, 1}, PBWMode{1, 0, 1}});
    rep.check("pure-creation nop agrees under both conventions", nm == np && nm == expect);
    rep.check("1-product with vacuum state is identity",
              V.vertex_pair(vac, KElement::pole_term(0, 1), b) == b);
  }
  return rep;
}

inline std::vector<SuiteReport> run_all(long window = 8, unsigned long seed = 42) {
  std::vector<SuiteReport> out;
  out.push_back(run_duality(12));
  out.push_back(run_hopf());
  out.push_back(run_delta(window, seed));
  out.push_back(run_jacobi(seed, 100));
  out.push_back(run_currents(std::min<long>(window, 6)));
  out.push_back(run_vacuum(window, seed));
  out.push_back(run_homomorphism(std::min<long>(window, 6)));
  return out;
}

}  // namespace htv

#endif
