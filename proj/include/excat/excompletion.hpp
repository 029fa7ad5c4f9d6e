#pragma once

// Morphisms of the exact completion between two congruences, computed three
// independent ways:
//   bimodule  map bimodules Ψ: Φ → Θ, found by lattice search;
//   ana       spans X ⇐ P W ⇒ F Y with P covering, up to local equality;
//   sheaf     natural transformations between sheafified colimits.
//
// Relational composition is diagrammatic throughout (a ; b is "a then b").

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "excat/congruence.hpp"
#include "excat/fincat.hpp"
#include "excat/prelimits.hpp"
#include "excat/relalleg.hpp"
#include "excat/sheaf.hpp"
#include "excat/topology.hpp"

namespace excat {

class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExBounds {
  std::size_t max_nodes = 5'000'000;  // search nodes per engine call
};

// ---------------------------------------------------------------------------
// Bimodules

inline void check_families(const Congruence& phi, const Congruence& theta, const RelMatrix& psi) {
  if (psi.source != phi.family() || psi.target != theta.family()) throw std::invalid_argument("bimodule: family mismatch");
}

/// Φ ; Ψ ≤ Ψ and Ψ ; Θ ≤ Ψ.
inline bool is_bimodule(const Allegory& al, const Congruence& phi, const Congruence& theta, const RelMatrix& psi) {
  check_families(phi, theta, psi);
  return al.matrix_leq(al.matrix_compose(phi.matrix, psi), psi) && al.matrix_leq(al.matrix_compose(psi, theta.matrix), psi);
}

/// Φ ≤ Ψ ; Ψᵒ and Ψᵒ ; Ψ ≤ Θ.
inline bool is_mod_map(const Allegory& al, const Congruence& phi, const Congruence& theta, const RelMatrix& psi) {
  check_families(phi, theta, psi);
  const auto inv = al.matrix_inv(psi);
  return al.matrix_leq(phi.matrix, al.matrix_compose(psi, inv)) && al.matrix_leq(al.matrix_compose(inv, psi), theta.matrix);
}

inline RelMatrix bimodule_compose(const Allegory& al, const RelMatrix& psi, const RelMatrix& psi2) { return al.matrix_compose(psi, psi2); }

inline RelMatrix bimodule_id(const Congruence& phi) { return phi.matrix; }

/// The Ex morphism of an object of the site: f ↦ loose f on singletons.
inline RelMatrix yoneda_morphism(const Allegory& al, MorId f) {
  const auto& c = al.category();
  return RelMatrix{Family{{c.dom(f)}}, Family{{c.cod(f)}}, {al.loose(f)}};
}

/// G is tight Φ → Θ when Φ ≤ G*Θ.
inline bool is_tight(const Allegory& al, const FunctionalArray& g, const Congruence& phi, const Congruence& theta) {
  if (g.source != phi.family() || g.target != theta.family()) return false;
  return al.matrix_leq(phi.matrix, pullback_congruence(al, g, theta).matrix);
}

/// Ψ = G_• ; Θ.
inline RelMatrix tight_bimodule(const Allegory& al, const FunctionalArray& g, const Congruence& phi, const Congruence& theta) {
  if (!is_tight(al, g, phi, theta)) throw std::invalid_argument("tight_bimodule: array is not a tight map");
  return al.matrix_compose(al.matrix_loose(g), theta.matrix);
}

inline bool is_weak_equivalence(const Allegory& al, const FunctionalArray& g, const Congruence& phi, const Congruence& theta) {
  if (!is_tight(al, g, phi, theta) || pullback_congruence(al, g, theta) != phi) return false;
  const auto tg = al.matrix_compose(theta.matrix, al.matrix_inv(al.matrix_loose(g)));
  const auto round = al.matrix_compose(tg, al.matrix_inv(tg));  // Θ ; G^• ; G_• ; Θ
  for (std::size_t j = 0; j < theta.size(); ++j)
    if (!al.leq(al.identity(theta.family()[j]), round.at(j, j))) return false;
  return true;
}

/// Legs of a functional array landing on each target index.
inline std::vector<Cocone> fibres(const FunctionalArray& g) {
  std::vector<Cocone> out(g.target.size());
  for (std::size_t j = 0; j < g.target.size(); ++j) out[j].apex = g.target[j];
  for (std::size_t i = 0; i < g.size(); ++i) out[g.index[i]].legs.push_back(g.legs[i]);
  return out;
}

inline bool is_covering_array(const SaturatedTopology& t, const FunctionalArray& g) {
  for (const auto& p : fibres(g))
    if (!is_covering_family(t, p)) return false;
  return true;
}

inline bool is_surjective_equivalence(const Allegory& al, const FunctionalArray& g, const Congruence& phi, const Congruence& theta) {
  if (g.source != phi.family() || g.target != theta.family()) return false;
  return pullback_congruence(al, g, theta) == phi && is_covering_array(al.topology(), g);
}

/// A weak equivalence G: Φ → Θ as a span of surjective equivalences
/// Φ ← H Ψ F → Θ, with Ψ = H*Φ and Z tabulating G_• ; Θ.
struct WeqFactorization {
  Congruence psi;
  FunctionalArray h;  // Z ⇒ X
  FunctionalArray f;  // Z ⇒ Y
};

inline WeqFactorization factor_weak_equivalence(const Allegory& al, const FunctionalArray& g, const Congruence& phi,
                                                const Congruence& theta) {
  const auto& c = al.category();
  const auto tg = al.matrix_compose(al.matrix_loose(g), theta.matrix);
  WeqFactorization out{{}, {{}, phi.family(), {}, {}}, {{}, theta.family(), {}, {}}};
  for (std::size_t i = 0; i < tg.source.size(); ++i)
    for (std::size_t j = 0; j < tg.target.size(); ++j)
      for (const auto& [l, r] : al.generating_spans(tg.at(i, j))) {
        out.h.source.objects.push_back(c.dom(l));
        out.h.index.push_back(i);
        out.h.legs.push_back(l);
        out.f.index.push_back(j);
        out.f.legs.push_back(r);
      }
  out.f.source = out.h.source;
  out.psi = pullback_congruence(al, out.h, phi);
  return out;
}

// ---------------------------------------------------------------------------
// Ana spans

struct AnaSpan {
  FunctionalArray p;  // W ⇒ X, covering
  FunctionalArray f;  // W ⇒ Y
  friend bool operator==(const AnaSpan&, const AnaSpan&) = default;
};

namespace detail {

// loose(a) ; r ; loose(b)ᵒ
inline RelHom conjugate(const Allegory& al, MorId a, const RelHom& r, MorId b) {
  return al.compose(al.compose(al.loose(a), r), al.inv(al.loose(b)));
}

}  // namespace detail

/// Empty when the span is a valid representative Φ → Θ.
inline std::string ana_violation(const Allegory& al, const Congruence& phi, const Congruence& theta, const AnaSpan& s) {
  const auto& c = al.category();
  if (s.p.target != phi.family() || s.f.target != theta.family() || s.p.source != s.f.source) return "shape";
  for (std::size_t w = 0; w < s.p.size(); ++w)
    if (c.dom(s.p.legs[w]) != s.p.source[w] || c.cod(s.p.legs[w]) != phi.family()[s.p.index[w]] ||
        c.dom(s.f.legs[w]) != s.f.source[w] || c.cod(s.f.legs[w]) != theta.family()[s.f.index[w]])
      return "leg " + std::to_string(w) + " is mistyped";
  if (!is_covering_array(al.topology(), s.p)) return "P is not covering";
  for (std::size_t a = 0; a < s.p.size(); ++a)
    for (std::size_t b = 0; b < s.p.size(); ++b) {
      const auto lhs = detail::conjugate(al, s.p.legs[a], phi.at(s.p.index[a], s.p.index[b]), s.p.legs[b]);
      const auto rhs = detail::conjugate(al, s.f.legs[a], theta.at(s.f.index[a], s.f.index[b]), s.f.legs[b]);
      if (!al.leq(lhs, rhs)) return "P*Φ is not below F*Θ at (" + std::to_string(a) + ", " + std::to_string(b) + ")";
    }
  return {};
}

/// Equal as morphisms into Θ: for each x_i, the sieve of r that factor as
/// p_w h = r = q_v k with (f_w h, g_v k) ∈ Θ must cover.
inline bool ana_equal(const Allegory& al, const Congruence& theta, const AnaSpan& s1, const AnaSpan& s2) {
  const auto& c = al.category();
  const auto& t = al.topology();
  const auto& x = s1.p.target;
  if (x != s2.p.target) throw std::invalid_argument("ana_equal: different sources");
  const auto& y = theta.family();
  for (std::size_t i = 0; i < x.size(); ++i) {
    Bitset sieve(c.morphism_count());
    for (MorId r : c.into(x[i])) {
      const ObjId u = c.dom(r);
      bool hit = false;
      for (std::size_t w = 0; w < s1.p.size() && !hit; ++w) {
        if (s1.p.index[w] != i) continue;
        for (MorId h : c.hom(u, s1.p.source[w])) {
          if (c.compose(s1.p.legs[w], h) != r) continue;
          for (std::size_t v = 0; v < s2.p.size() && !hit; ++v) {
            if (s2.p.index[v] != i) continue;
            for (MorId k : c.hom(u, s2.p.source[v])) {
              if (c.compose(s2.p.legs[v], k) != r) continue;
              const auto j1 = s1.f.index[w], j2 = s2.f.index[v];
              if (theta.at(j1, j2).spans.test(al.span_index(y[j1], y[j2], c.compose(s1.f.legs[w], h), c.compose(s2.f.legs[v], k)))) {
                hit = true;
                break;
              }
            }
          }
          if (hit) break;
        }
      }
      if (hit) sieve.set(r);
    }
    if (!t.covers(sieve, x[i])) return false;
  }
  return true;
}

/// Ψ(i, j) = ⋁_w Φ(i, i_w) ; p_wᵒ ; f_w ; Θ(j_w, j).
inline RelMatrix ana_to_bimodule(const Allegory& al, const Congruence& phi, const Congruence& theta, const AnaSpan& s) {
  RelMatrix m = al.matrix_bottom(phi.family(), theta.family());
  for (std::size_t w = 0; w < s.p.size(); ++w) {
    const auto mid = al.compose(al.inv(al.loose(s.p.legs[w])), al.loose(s.f.legs[w]));
    for (std::size_t i = 0; i < phi.size(); ++i) {
      const auto left = al.compose(phi.at(i, s.p.index[w]), mid);
      for (std::size_t j = 0; j < theta.size(); ++j) m.at(i, j) = al.join(m.at(i, j), al.compose(left, theta.at(s.f.index[w], j)));
    }
  }
  return m;
}

/// Least-cover generators of each x_i, disjoint-unioned.
inline FunctionalArray canonical_cover(const SaturatedTopology& t, const Family& x) {
  const auto& c = t.category();
  FunctionalArray p{{}, x, {}, {}};
  for (std::size_t i = 0; i < x.size(); ++i)
    for (MorId g : t.least_cover_generators(x[i])) {
      p.source.objects.push_back(c.dom(g));
      p.index.push_back(i);
      p.legs.push_back(g);
    }
  return p;
}

/// Composite by pre-pullback of the second cover along the first span's legs.
inline AnaSpan ana_compose(const Allegory& al, const AnaSpan& s1, const AnaSpan& s2) {
  const auto& c = al.category();
  const auto& t = al.topology();
  if (s1.f.target != s2.p.target) throw std::invalid_argument("ana_compose: family mismatch");
  AnaSpan out{{{}, s1.p.target, {}, {}}, {{}, s2.f.target, {}, {}}};
  const auto covers = fibres(s2.p);
  for (std::size_t w = 0; w < s1.p.size(); ++w) {
    const auto j = s1.f.index[w];
    const auto fw = s1.f.legs[w];
    const auto r = pre_pullback(t, covers[j], fw, t.arity());
    for (MorId leg : r.legs) {
      const auto target = c.compose(fw, leg);
      bool found = false;
      for (std::size_t v = 0; v < s2.p.size() && !found; ++v) {
        if (s2.p.index[v] != j) continue;
        for (MorId k : c.hom(c.dom(leg), s2.p.source[v]))
          if (c.compose(s2.p.legs[v], k) == target) {
            out.p.source.objects.push_back(c.dom(leg));
            out.p.index.push_back(s1.p.index[w]);
            out.p.legs.push_back(c.compose(s1.p.legs[w], leg));
            out.f.index.push_back(s2.f.index[v]);
            out.f.legs.push_back(c.compose(s2.f.legs[v], k));
            found = true;
            break;
          }
      }
      if (!found) throw std::logic_error("ana_compose: pre-pullback leg does not factor");
    }
  }
  out.f.source = out.p.source;
  return out;
}

/// Every valid span over the canonical cover, before quotienting.
inline std::vector<AnaSpan> ana_spans(const Allegory& al, const Congruence& phi, const Congruence& theta, const ExBounds& bounds = {}) {
  const auto& c = al.category();
  const auto p = canonical_cover(al.topology(), phi.family());
  const auto& y = theta.family();
  const auto n = p.size();

  // the left side of the condition for every pair of legs
  std::vector<RelHom> lhs;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) lhs.push_back(detail::conjugate(al, p.legs[a], phi.at(p.index[a], p.index[b]), p.legs[b]));

  std::vector<std::vector<std::pair<std::size_t, MorId>>> options(n);
  for (std::size_t w = 0; w < n; ++w)
    for (std::size_t j = 0; j < y.size(); ++j)
      for (MorId f : c.hom(p.source[w], y[j])) options[w].emplace_back(j, f);

  AnaSpan cur{p, FunctionalArray{p.source, y, std::vector<std::size_t>(n), std::vector<MorId>(n)}};
  std::vector<AnaSpan> out;
  std::size_t nodes = 0;
  std::function<void(std::size_t)> go = [&](std::size_t w) {
    if (++nodes > bounds.max_nodes) throw ResourceError("ana engine: node bound exceeded");
    if (w == n) {
      out.push_back(cur);
      return;
    }
    for (const auto& [j, f] : options[w]) {
      cur.f.index[w] = j;
      cur.f.legs[w] = f;
      bool ok = true;
      for (std::size_t b = 0; b <= w && ok; ++b) {
        const auto rhs = detail::conjugate(al, f, theta.at(j, cur.f.index[b]), cur.f.legs[b]);
        ok = al.leq(lhs[w * n + b], rhs);
      }
      if (ok) go(w + 1);
    }
  };
  go(0);
  return out;
}

/// One representative per class of ana_equal.
inline std::vector<AnaSpan> ana_hom(const Allegory& al, const Congruence& phi, const Congruence& theta, const ExBounds& bounds = {}) {
  std::vector<AnaSpan> reps;
  for (auto& s : ana_spans(al, phi, theta, bounds)) {
    bool seen = false;
    for (const auto& r : reps)
      if (ana_equal(al, theta, r, s)) {
        seen = true;
        break;
      }
    if (!seen) reps.push_back(std::move(s));
  }
  return reps;
}

// ---------------------------------------------------------------------------
// Bimodule engine: an unseeded search over closed-relation matrices.

inline std::vector<RelMatrix> bimodule_hom(const Allegory& al, const Congruence& phi, const Congruence& theta,
                                           const ExBounds& bounds = {}) {
  const auto& x = phi.family();
  const auto& y = theta.family();
  const auto m = x.size(), n = y.size();

  std::vector<std::vector<RelHom>> options(m * n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (const auto& r : al.all_relhoms(x[i], y[j]))
        if (al.compose(phi.at(i, i), r) == r && al.compose(r, theta.at(j, j)) == r && al.leq(al.compose(al.inv(r), r), theta.at(j, j)))
          options[i * n + j].push_back(r);

  RelMatrix psi = al.matrix_bottom(x, y);
  std::vector<RelMatrix> out;
  std::size_t nodes = 0;

  auto pairwise_ok = [&](std::size_t i, std::size_t j) {
    const auto& r = psi.at(i, j);
    for (std::size_t j2 = 0; j2 < j; ++j2) {
      const auto& s = psi.at(i, j2);
      if (!al.leq(al.compose(al.inv(s), r), theta.at(j2, j))) return false;
      if (!al.leq(al.compose(r, theta.at(j, j2)), s) || !al.leq(al.compose(s, theta.at(j2, j)), r)) return false;
    }
    for (std::size_t i2 = 0; i2 < i; ++i2) {
      const auto& s = psi.at(i2, j);
      if (!al.leq(al.compose(phi.at(i, i2), s), r) || !al.leq(al.compose(phi.at(i2, i), r), s)) return false;
    }
    return true;
  };
  // unit on the rows finished so far: Φ(i, i2) ≤ ⋁_j Ψ(i, j) ; Ψ(i2, j)ᵒ
  auto unit_ok = [&](std::size_t i) {
    for (std::size_t i2 = 0; i2 <= i; ++i2) {
      RelHom acc = al.bottom(x[i], x[i2]);
      for (std::size_t j = 0; j < n; ++j) acc = al.join(acc, al.compose(psi.at(i, j), al.inv(psi.at(i2, j))));
      if (!al.leq(phi.at(i, i2), acc)) return false;
    }
    return true;
  };

  std::function<void(std::size_t)> go = [&](std::size_t cell) {
    if (++nodes > bounds.max_nodes) throw ResourceError("bimodule engine: node bound exceeded");
    if (cell == m * n) {
      if (is_bimodule(al, phi, theta, psi) && is_mod_map(al, phi, theta, psi)) out.push_back(psi);
      return;
    }
    const auto i = cell / n, j = cell % n;
    for (const auto& r : options[cell]) {
      psi.at(i, j) = r;
      if (!pairwise_ok(i, j)) continue;
      if (j + 1 == n && !unit_ok(i)) continue;
      go(cell + 1);
    }
  };
  if (n == 0) {
    // only the empty matrix, which is a map iff X is empty or Φ vanishes
    if (is_mod_map(al, phi, theta, psi)) out.push_back(psi);
    return out;
  }
  go(0);
  return out;
}

// ---------------------------------------------------------------------------
// Sheaf engine

struct SheafModel {
  CongruenceColimit colim;
  UnitPresheaf sheaf;
  Family family;

  const Presheaf& value() const { return sheaf.value; }
  /// Image of (i, α) in the sheafification.
  std::size_t element(const FinCategory& c, std::size_t i, MorId alpha) const { return sheaf.unit[c.dom(alpha)][colim.of(i, alpha)]; }
  std::size_t generator(const FinCategory& c, std::size_t i) const { return element(c, i, c.identity(family[i])); }
};

inline SheafModel sheaf_model(const Allegory& al, const Congruence& phi) {
  auto colim = colim_congruence(al, phi);
  auto sh = sheafify(al.topology(), colim.presheaf);
  return SheafModel{std::move(colim), std::move(sh), phi.family()};
}

/// A hom out of a sheafified colimit is determined by its values on the
/// generators η[1_{x_i}].
inline std::vector<std::size_t> sheaf_signature(const FinCategory& c, const SheafModel& src, const NatTrans& a) {
  std::vector<std::size_t> sig;
  for (std::size_t i = 0; i < src.family.size(); ++i) sig.push_back(a[src.family[i]][src.generator(c, i)]);
  return sig;
}

/// The same tuple for a span: amalgamate η[f_w] over the legs p_w.
inline std::vector<std::size_t> ana_signature(const FinCategory& c, const SheafModel& tgt, const AnaSpan& s) {
  std::vector<std::size_t> sig;
  for (std::size_t i = 0; i < s.p.target.size(); ++i) {
    std::vector<std::pair<MorId, std::size_t>> fam;
    for (std::size_t w = 0; w < s.p.size(); ++w)
      if (s.p.index[w] == i) fam.emplace_back(s.p.legs[w], tgt.element(c, s.f.index[w], s.f.legs[w]));
    const auto a = amalgamate(tgt.value(), s.p.target[i], fam);
    if (!a) throw std::logic_error("ana_signature: family has no unique amalgamation");
    sig.push_back(*a);
  }
  return sig;
}

inline std::vector<NatTrans> sheaf_hom(const Allegory& al, const SheafModel& a, const SheafModel& b, const ExBounds& bounds = {}) {
  return natural_transformations(al.category(), a.value(), b.value(), bounds.max_nodes);
}

// ---------------------------------------------------------------------------
// Engine comparison

enum class Engine { ana, bimodule, sheaf };

inline Engine parse_engine(const std::string& s) {
  if (s == "ana") return Engine::ana;
  if (s == "bimodule") return Engine::bimodule;
  if (s == "sheaf") return Engine::sheaf;
  throw std::invalid_argument("unknown engine '" + s + "'");
}

inline std::size_t ex_hom_count(const Allegory& al, const Congruence& phi, const Congruence& theta, Engine e, const ExBounds& bounds = {}) {
  switch (e) {
    case Engine::ana: return ana_hom(al, phi, theta, bounds).size();
    case Engine::bimodule: return bimodule_hom(al, phi, theta, bounds).size();
    case Engine::sheaf: return sheaf_hom(al, sheaf_model(al, phi), sheaf_model(al, theta), bounds).size();
  }
  return 0;
}

struct EngineReport {
  std::size_t ana = 0, bimodule = 0, sheaf = 0;
  bool ana_to_bimodule_bijective = false;
  bool ana_to_sheaf_bijective = false;

  bool agree() const { return ana == bimodule && ana == sheaf && ana_to_bimodule_bijective && ana_to_sheaf_bijective; }
};

inline EngineReport compare_engines(const Allegory& al, const Congruence& phi, const Congruence& theta, const ExBounds& bounds = {}) {
  const auto& c = al.category();
  EngineReport r;
  const auto spans = ana_hom(al, phi, theta, bounds);
  const auto mods = bimodule_hom(al, phi, theta, bounds);
  const auto sphi = sheaf_model(al, phi), stheta = sheaf_model(al, theta);
  const auto nats = sheaf_hom(al, sphi, stheta, bounds);
  r.ana = spans.size();
  r.bimodule = mods.size();
  r.sheaf = nats.size();

  std::set<std::vector<RelHom>> via_ana, direct;
  std::set<std::vector<std::size_t>> sig_ana, sig_sheaf;
  for (const auto& s : spans) {
    via_ana.insert(ana_to_bimodule(al, phi, theta, s).entries);
    sig_ana.insert(ana_signature(c, stheta, s));
  }
  for (const auto& m : mods) direct.insert(m.entries);
  for (const auto& a : nats) sig_sheaf.insert(sheaf_signature(c, sphi, a));
  r.ana_to_bimodule_bijective = via_ana.size() == spans.size() && via_ana == direct && direct.size() == mods.size();
  r.ana_to_sheaf_bijective = sig_ana.size() == spans.size() && sig_ana == sig_sheaf && sig_sheaf.size() == nats.size();
  return r;
}

}  // namespace excat
