#ifndef HTV_VACUUM_HPP
#define HTV_VACUUM_HPP

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "affine.hpp"
#include "conformal.hpp"
#include "distributions.hpp"
#include "hopf.hpp"
#include "ktau.hpp"
#include "linalg.hpp"
#include "rational.hpp"

namespace htv {

struct depth_limit_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// creation mode X_<1/(tau-n)^m>
struct PBWMode {
  int gen = 0;  // generator index; lower index block comes first
  long n = 0;
  int m = 1;
  friend bool operator<(const PBWMode& a, const PBWMode& b) {
    return std::tie(a.gen, a.n, a.m) < std::tie(b.gen, b.n, b.m);
  }
  friend bool operator==(const PBWMode& a, const PBWMode& b) {
    return a.gen == b.gen && a.n == b.n && a.m == b.m;
  }
  KElement label() const { return KElement::pole_term(n, m); }
};

using PBWMonomial = std::vector<PBWMode>;  // sorted; vacuum = empty

// element of the vacuum module
class State {
 public:
  using TermMap = std::map<PBWMonomial, Rational>;

  State() = default;
  static State vacuum(const Rational& c = Rational(1)) {
    State s;
    if (c != 0) s.terms_[{}] = c;
    return s;
  }
  static State monomial(PBWMonomial m, const Rational& c = Rational(1)) {
    State s;
    if (c != 0) s.terms_[std::move(m)] = c;
    return s;
  }

  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int depth() const {
    std::size_t d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, m.size());
    return static_cast<int>(d);
  }

  void add(const PBWMonomial& m, const Rational& c) {
    if (c == 0) return;
    auto it = terms_.find(m);
    if (it == terms_.end()) {
      terms_[m] = c;
    } else {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  friend State operator+(const State& a, const State& b) {
    State out = a;
    for (const auto& [m, c] : b.terms_) out.add(m, c);
    return out;
  }
  State& operator+=(const State& b) {
    for (const auto& [m, c] : b.terms_) add(m, c);
    return *this;
  }
  friend State operator-(const State& a, const State& b) { return a + b * Rational(-1); }
  friend State operator*(const State& a, const Rational& s) {
    State out;
    if (s == 0) return out;
    for (const auto& [m, c] : a.terms_) out.terms_[m] = c * s;
    return out;
  }
  friend bool operator==(const State& a, const State& b) { return a.terms_ == b.terms_; }
  friend bool operator!=(const State& a, const State& b) { return !(a == b); }
  friend bool operator<(const State& a, const State& b) { return a.terms_ < b.terms_; }

 private:
  TermMap terms_;
};

struct VertexConfig {
  int depth_max = 3;
  int sign = -1;  // resolved normal-ordering convention; +1 for the alternative
  long window = 8;
};

// rational certificate for the singular modes of a field on a state:
// modes[k] = Tr(phi tau(k)) for all k >= 0
struct SingularCertificate {
  // phi = sum_j states[j] (x) 1/(tau - loc[j])^ord[j]
  struct Atom {
    long loc;
    int ord;
    State state;
  };
  std::vector<Atom> atoms;
  bool success = false;
  bool finite_support = false;  // all atoms have ord == 1 and loc >= 0
  long support_hi = -1;         // modes vanish beyond this index when finite
  std::string failure;

  State eval(long k) const {
    State out;
    for (const auto& a : atoms)
      out += a.state * trace(falling_factorial(k) * KElement::pole_term(a.loc, a.ord));
    return out;
  }
};

// Vacuum module of the Toda conformal algebra: PBW monomials of singular
// creation modes acting on |0>, with the first generator's block ordered
// before the second ([B,B] = [C,C] = 0 and [B,C] lands in C-modes).
class VacuumModule {
 public:
  explicit VacuumModule(LieElement::Algebra alg) : alg_(std::move(alg)) {
    const auto& gens = alg_->generators();
    if (gens.size() != 2)
      throw std::invalid_argument("vacuum module needs a two-generator algebra");
    for (const auto& f : gens)
      for (const auto& g : gens) {
        auto [lo, hi] = alg_->support(f, g);
        if (f == g && lo <= hi)
          throw std::invalid_argument("vacuum module needs zero self-products");
      }
    // cross products must land in the second generator's span so that PBW
    // reordering only needs first-past-second commutations
    for (const auto& [key, value] : alg_->table()) {
      (void)key;
      if (value.coords().count(gens[0]))
        throw std::invalid_argument("vacuum module needs commutators in the top block");
    }
  }

  const LieElement::Algebra& algebra() const { return alg_; }
  const std::string& gen_name(int i) const { return alg_->generators()[static_cast<std::size_t>(i)]; }
  int gen_index(const std::string& name) const {
    for (std::size_t i = 0; i < alg_->generators().size(); ++i)
      if (alg_->generators()[i] == name) return static_cast<int>(i);
    throw std::invalid_argument("unknown generator " + name);
  }

  State single(int gen, long n, int m, const Rational& c = Rational(1)) const {
    return State::monomial({PBWMode{gen, n, m}}, c);
  }

  // ----- module structure -------------------------------------------------

  State act(const LieElement& x, const State& s) const {
    State out;
    for (const auto& [gname, f] : x.coords()) {
      const int gi = gen_index(gname);
      for (const auto& [mono, c] : s.terms()) {
        for (const auto& [key, pc] : f.poles())
          out += create(gi, PBWMode{gi, key.first, key.second}, mono) * (pc * c);
        KElement hol = f.hol();
        if (!hol.is_zero()) out += annihilate(gi, hol, mono) * c;
      }
    }
    return out;
  }

  // hat H_T action: T^k moves every pole n -> n+k, d_tau acts as a derivation
  // with single-mode rule 1/(tau-n)^m -> m/(tau-n)^{m+1}
  State module_action(const HopfElement& h, const State& s) const {
    State out;
    for (const auto& [key, c] : h.terms()) {
      State cur = s;
      for (int i = 0; i < key.second; ++i) cur = derivation_step(cur);
      if (key.first != 0) {
        State shifted;
        for (const auto& [mono, mc] : cur.terms()) {
          PBWMonomial m2 = mono;
          for (auto& mode : m2) mode.n += key.first;
          shifted.add(m2, mc);
        }
        cur = shifted;
      }
      out += cur * c;
    }
    return out;
  }

  // ----- vertex operators ---------------------------------------------------

  // <Y(a, tau), F> s  (the smeared vertex operator)
  State vertex_pair(const State& a, const KElement& F, const State& s,
                    const VertexConfig& cfg = {}) const {
    State out;
    for (const auto& [mono, c] : a.terms()) {
      if (static_cast<int>(mono.size()) > cfg.depth_max)
        throw depth_limit_error("state depth exceeds the configured bound");
      if (mono.empty()) {
        out += s * (c * trace(F));
        continue;
      }
      if (mono.size() == 1) {
        // Y((h_f)_V X_<1/tau>|0>, tau) = (h_f)_{K_T} X(tau):
        // <., F> = X_<S(h_f) F>
        out += act(smear(mono[0], F), s) * c;
        continue;
      }
      PBWMode lead = mono[0];
      PBWMonomial rest(mono.begin() + 1, mono.end());
      out += field_product_pair(PBWMode{lead.gen, 0, 1}, lead.label(),
                                State::monomial(rest), F, s, cfg) *
             c;
    }
    return out;
  }

  // mode <Y(a, tau) s, tau(q)>
  State field_mode(const State& a, long q, const State& s, const VertexConfig& cfg = {}) const {
    return vertex_pair(a, falling_factorial(q), s, cfg);
  }

  // <f(tau)_{F} g(tau), probe> s for a single-mode f (the field F-product)
  State field_product_pair(const PBWMode& fmode, const KElement& F, const State& g,
                           const KElement& probe, const State& s,
                           const VertexConfig& cfg = {}) const {
    // probes must stay inside the terminating class at this level
    require_simple_nonneg(probe, "probe");
    SingularCertificate cert_g = singular_part_certificate(g, s, cfg);
    if (!cert_g.success)
      throw untraceable_error("no singular certificate for the inner field: " + cert_g.failure);
    // Tail of the L_S sum: for k past the polynomialization threshold,
    // inner_k = sum_j w_j Tr((atom_j * probe) tau(k)); each product must have
    // simple nonnegative poles for the traces to vanish eventually.
    long k1 = probe_span(probe);
    for (const auto& atom : cert_g.atoms) {
      KElement h = KElement::pole_term(atom.loc, atom.ord) * probe;
      require_simple_nonneg(h, "certificate-probe product");
      k1 = std::max(k1, probe_span(h));
    }

    SingularCertificate cert_f = singular_part_certificate(
        State::monomial({fmode}), s, cfg);
    if (!cert_f.success)
      throw untraceable_error("no singular certificate for the outer field: " + cert_f.failure);
    if (!cert_f.finite_support)
      throw untraceable_error(
          "outer-field annihilator tail does not terminate on this state (trace <Y(f)s, tau(k)>)");
    const long k2 = cert_f.support_hi;

    const HopfElement sh = mode_hopf(fmode).antipode();
    State term1, term2;
    KElement ck = F;  // (T^-1 - 1)^k F
    for (long k = 0; k <= k1; ++k) {
      const Rational invfact = Rational(1) / Rational(factorial(static_cast<unsigned>(k)));
      State inner = vertex_pair(g, falling_factorial(k) * probe * invfact, s, cfg);
      if (!inner.is_zero()) {
        LieElement op(alg_);
        op.set_coord(gen_name(fmode.gen), sh.act(ck));
        term1 += act(op, inner);
      }
      ck = ck.shifted(-1) - ck;
    }
    KElement dk = F;  // Delta^k F
    for (long k = 0; k <= k2; ++k) {
      const Rational invfact = Rational(1) / Rational(factorial(static_cast<unsigned>(k)));
      LieElement op(alg_);
      op.set_coord(gen_name(fmode.gen), sh.act(falling_factorial(k)));
      State w = act(op, s);
      if (!w.is_zero())
        term2 += vertex_pair(g, dk.negated_argument() * probe * invfact, w, cfg);
      dk = dk.shifted(1) - dk;
    }
    return term1 + term2 * Rational(cfg.sign);
  }

  // a_{F} b as states (normal ordered product at F = 1/tau)
  State state_product(const State& a, const KElement& F, const State& b,
                      const VertexConfig& cfg = {}) const {
    return vertex_pair(a, F, b, cfg);
  }
  State normal_ordered_product(const State& a, const State& b,
                               const VertexConfig& cfg = {}) const {
    return vertex_pair(a, KElement::pole_term(0, 1), b, cfg);
  }

  // ----- certificates -------------------------------------------------------

  // rational singular part phi with <Y(a,tau)s, tau(k)> = Tr(phi tau(k)),
  // fitted by exact linear solve over a structural pole ansatz and verified
  // on extra rows
  SingularCertificate singular_part_certificate(const State& a, const State& s,
                                                const VertexConfig& cfg = {},
                                                long pole_lo_hint = 0, long pole_hi_hint = 0,
                                                int order_hint = 0) const {
    const auto cache_key = std::make_tuple(a, s, pole_lo_hint, pole_hi_hint, order_hint);
    {
      std::lock_guard<std::mutex> lock(cert_mutex_);
      auto it = cert_cache_.find(cache_key);
      if (it != cert_cache_.end()) return it->second;
    }
    SingularCertificate out =
        compute_certificate(a, s, cfg, pole_lo_hint, pole_hi_hint, order_hint);
    {
      std::lock_guard<std::mutex> lock(cert_mutex_);
      cert_cache_.emplace(cache_key, out);
    }
    return out;
  }

 private:
  SingularCertificate compute_certificate(const State& a, const State& s,
                                          const VertexConfig& cfg, long pole_lo_hint,
                                          long pole_hi_hint, int order_hint) const {
    SingularCertificate out;
    long lo = 0, hi = 0;
    int maxord = 1;
    bool any = false;
    auto scan = [&](const State& st) {
      for (const auto& [mono, c] : st.terms()) {
        (void)c;
        for (const auto& mode : mono) {
          if (!any) {
            lo = hi = mode.n;
            any = true;
          } else {
            lo = std::min(lo, mode.n);
            hi = std::max(hi, mode.n);
          }
          maxord = std::max(maxord, mode.m);
        }
      }
    };
    scan(a);
    scan(s);
    if (!any) {
      lo = 0;
      hi = 0;
    }
    long depth = a.depth() + s.depth();
    lo = std::min(lo, pole_lo_hint);
    hi = std::max(hi, pole_hi_hint + depth + 1);
    hi += 1;
    maxord = std::max(maxord + order_hint, 1);

    std::vector<std::pair<long, int>> atoms;
    for (long n = lo; n <= hi; ++n)
      for (int m = 1; m <= maxord; ++m) atoms.push_back({n, m});

    const long fit_rows = static_cast<long>(atoms.size()) + 2;
    const long verify_rows = 4;
    std::vector<State> modes;
    for (long k = 0; k < fit_rows + verify_rows; ++k)
      modes.push_back(vertex_pair(a, falling_factorial(k), s, cfg));

    RatMat mat;
    std::vector<State> rhs;
    for (long k = 0; k < fit_rows; ++k) {
      RatVec row;
      row.reserve(atoms.size());
      for (const auto& [n, m] : atoms)
        row.push_back(trace(falling_factorial(k) * KElement::pole_term(n, m)));
      mat.push_back(std::move(row));
      rhs.push_back(modes[static_cast<std::size_t>(k)]);
    }
    auto sol = solve_exact_valued<State>(mat, rhs);
    if (!sol.consistent) {
      out.failure = "inconsistent certificate system (field axiom violation or ansatz too small)";
      return out;
    }
    for (std::size_t i = 0; i < atoms.size(); ++i)
      if (!sol.x[i].is_zero()) out.atoms.push_back({atoms[i].first, atoms[i].second, sol.x[i]});
    for (long k = fit_rows; k < fit_rows + verify_rows; ++k) {
      if (out.eval(k) != modes[static_cast<std::size_t>(k)]) {
        out.failure = "certificate fails verification rows (ansatz too small)";
        out.atoms.clear();
        return out;
      }
    }
    out.success = true;
    out.finite_support = true;
    for (const auto& atom : out.atoms) {
      if (atom.loc < 0 || atom.ord != 1) out.finite_support = false;
      out.support_hi = std::max(out.support_hi, atom.loc);
    }
    if (!out.finite_support) out.support_hi = -1;
    return out;
  }

 public:
  // ----- compatibility (eq. for h_V) ---------------------------------------

  struct CompatibilityReport {
    bool exact = false;     // the defining sum terminated
    bool equal = false;
    long terms_used = 0;
    State lhs, rhs;
  };

  // compare module_action(h, f) with h_V f = <h, f_Hol(tau)> 1 computed from
  // vertex modes on the vacuum
  CompatibilityReport compatibility_check(const HopfElement& h, const State& f,
                                          const VertexConfig& cfg = {}) const {
    CompatibilityReport rep;
    rep.lhs = module_action(h, f);
    // kernel of Y(f,tau)|0> = sum_k K_k tau(k), K_k = <Y(f)|0>, tau(-k-1)>
    // <T^j d^m, kernel> = sum_k K_k (tau(k))^(m)(j)
    bool exact = true;
    long kmax = 0;
    for (const auto& [key, c] : h.terms()) {
      (void)c;
      if (key.second > 0 || key.first < 0) exact = false;
      kmax = std::max(kmax, key.first);
    }
    if (!exact) kmax = cfg.window + 2;
    State rhs;
    for (long k = 0; k <= kmax; ++k) {
      State kk = vertex_pair(f, falling_factorial(-k - 1), State::vacuum(), cfg);
      if (kk.is_zero()) continue;
      Rational w = 0;
      for (const auto& [key, c] : h.terms()) {
        KElement g = falling_factorial(k);
        for (int i = 0; i < key.second; ++i) g = g.derivative();
        w += c * g.eval(Rational(key.first));
      }
      rhs += kk * w;
      ++rep.terms_used;
    }
    rep.rhs = rhs;
    rep.exact = exact;
    rep.equal = (rep.lhs == rhs);
    return rep;
  }

 private:
  LieElement::Algebra alg_;
  mutable std::map<std::tuple<State, State, long, long, int>, SingularCertificate> cert_cache_;
  mutable std::mutex cert_mutex_;

  static void require_simple_nonneg(const KElement& f, const std::string& what) {
    for (const auto& [key, c] : f.poles()) {
      (void)c;
      if (key.first < 0 || key.second > 1)
        throw untraceable_error(what +
                                " has a pole outside the terminating class "
                                "(negative location or order >= 2)");
    }
  }
  static long probe_span(const KElement& f) {
    long span = 0;
    for (const auto& [key, c] : f.poles()) {
      (void)c;
      span = std::max(span, key.first + key.second);
    }
    return span;
  }

  static HopfElement mode_hopf(const PBWMode& mode) {
    // alpha(T^n d^{m-1}/(m-1)!) = 1/(tau-n)^m
    return HopfElement::term(mode.n, mode.m - 1,
                             Rational(1) / Rational(factorial(static_cast<unsigned>(mode.m - 1))));
  }

  // smearing operator of the single-mode state: <Y(f,tau), F> = X_<S(h_f) F>
  LieElement smear(const PBWMode& mode, const KElement& F) const {
    LieElement op(alg_);
    op.set_coord(gen_name(mode.gen), mode_hopf(mode).antipode().act(F));
    return op;
  }

  LieElement mode_lie(const PBWMode& mode) const {
    LieElement x(alg_);
    x.set_coord(gen_name(mode.gen), mode.label());
    return x;
  }

  State derivation_step(const State& s) const {
    State out;
    for (const auto& [mono, c] : s.terms()) {
      for (std::size_t i = 0; i < mono.size(); ++i) {
        PBWMonomial m2 = mono;
        Rational w = c * Rational(mono[i].m);
        m2[i].m += 1;
        std::sort(m2.begin(), m2.end());
        out.add(m2, w);
      }
    }
    return out;
  }

  // insert a creation mode; commuting past the first block generates
  // bracket terms
  State create(int gi, const PBWMode& mode, const PBWMonomial& mono) const {
    if (gi == 0) {
      PBWMonomial m2 = mono;
      m2.insert(std::upper_bound(m2.begin(), m2.end(), mode), mode);
      return State::monomial(std::move(m2));
    }
    // second-block mode crossing the first block
    if (mono.empty() || mono[0].gen != 0) {
      PBWMonomial m2 = mono;
      m2.insert(std::upper_bound(m2.begin(), m2.end(), mode), mode);
      return State::monomial(std::move(m2));
    }
    PBWMode b1 = mono[0];
    PBWMonomial rest(mono.begin() + 1, mono.end());
    State out = prepend(b1, create(gi, mode, rest));
    LieElement z = bracket(mode_lie(mode), mode_lie(b1));
    out += act(z, State::monomial(rest));
    return out;
  }

  // prepend an existing mode to every monomial of a normal-ordered state;
  // by construction this never needs commutators (same-species modes commute
  // and a second-block mode is only prepended to second-block monomials)
  State prepend(const PBWMode& mode, const State& s) const {
    State out;
    for (const auto& [mono, c] : s.terms()) {
      if (mode.gen != 0 && !mono.empty() && mono[0].gen == 0)
        throw std::logic_error("prepend would need a commutator");
      PBWMonomial m2 = mono;
      m2.insert(std::upper_bound(m2.begin(), m2.end(), mode), mode);
      out.add(m2, c);
    }
    return out;
  }

  // annihilator X_<P> (P polynomial) moving right through the monomial
  State annihilate(int gi, const KElement& p, const PBWMonomial& mono) const {
    if (mono.empty()) return State();
    PBWMode m1 = mono[0];
    PBWMonomial rest(mono.begin() + 1, mono.end());
    LieElement x(alg_);
    x.set_coord(gen_name(gi), p);
    State out = act(bracket(x, mode_lie(m1)), State::monomial(rest));
    State tail = annihilate(gi, p, rest);
    if (!tail.is_zero()) out += prepend(m1, tail);
    return out;
  }
};

}  // namespace htv

#endif
