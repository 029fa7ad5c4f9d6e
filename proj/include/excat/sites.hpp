#pragma once

// Functors between sites: morphisms of sites (two criteria), dense functors,
// and the maps a functor induces on relations, congruences and ex-homs.

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "excat/congruence.hpp"
#include "excat/excompletion.hpp"
#include "excat/fincat.hpp"
#include "excat/prelimits.hpp"
#include "excat/relalleg.hpp"
#include "excat/topology.hpp"

namespace excat {

inline Family map_family(const Functor& f, const Family& x) {
  Family out;
  for (ObjId o : x.objects) out.objects.push_back(f.objects[o]);
  return out;
}

inline Cocone map_cocone(const Functor& f, const Cocone& p) { return Cocone{f.objects[p.apex], image(f, p.legs)}; }

inline Array map_array(const Functor& f, const Array& a) {
  return Array{map_family(f, a.source), map_family(f, a.target), image(f, a.legs)};
}

inline FunctionalArray map_functional(const Functor& f, const FunctionalArray& a) {
  return FunctionalArray{map_family(f, a.source), map_family(f, a.target), a.index, image(f, a.legs)};
}

inline Diagram map_diagram(const Functor& f, const Diagram& d) {
  Functor m;
  for (ObjId o : d.map.objects) m.objects.push_back(f.objects[o]);
  m.morphisms = image(f, d.map.morphisms);
  return Diagram{d.shape, std::move(m)};
}

namespace detail {

inline void require_functor(const SaturatedTopology& tc, const SaturatedTopology& td, const Functor& f) {
  if (auto v = functor_violation(tc.category(), td.category(), f)) throw std::invalid_argument("not a functor: " + *v);
}

}  // namespace detail

/// First κ-ary covering family of the source whose image does not cover.
inline std::optional<std::string> cover_preservation_failure(const SaturatedTopology& tc, const SaturatedTopology& td,
                                                             const Functor& f) {
  const auto& c = tc.category();
  for (ObjId u = 0; u < c.object_count(); ++u)
    for (const auto& p : leg_sets(c, u, tc.arity()))
      if (is_covering_family(tc, p) && !is_covering_family(td, map_cocone(f, p)))
        return "image of " + describe(c, p.legs) + " on " + c.object_name(u) + " does not cover";
  return std::nullopt;
}

/// Preservation of local pre-terminal objects, binary pre-products and
/// pre-equalizers. One local prelimit per diagram suffices once covers are
/// preserved, since any two are locally equivalent.
inline std::optional<std::string> checklist_failure(const SaturatedTopology& tc, const SaturatedTopology& td, const Functor& f) {
  const auto& c = tc.category();
  std::vector<std::pair<std::string, Diagram>> diagrams{{"terminal", empty_diagram()}};
  for (ObjId x = 0; x < c.object_count(); ++x)
    for (ObjId y = 0; y < c.object_count(); ++y)
      diagrams.emplace_back("product of " + c.object_name(x) + " and " + c.object_name(y), pair_diagram(c, x, y));
  for (MorId g = 0; g < c.morphism_count(); ++g)
    for (MorId h : c.hom(c.dom(g), c.cod(g)))
      diagrams.emplace_back("equalizer of " + c.morphism_name(g) + " and " + c.morphism_name(h), parallel_diagram(c, g, h));
  for (const auto& [what, d] : diagrams) {
    const auto lp = local_prelimit(tc, d, tc.arity(), Strategy::minimize);
    if (!lp) throw std::invalid_argument("source site has no local " + what);
    if (!is_local_prelimit(td, map_diagram(f, d), map_array(f, lp->cones))) return "local pre-" + what + " is not preserved";
  }
  return std::nullopt;
}

/// For a diagram g and a cone T over f∘g with vertex u, the sieve of h with
/// T h factoring through the image of some cone over g.
inline Bitset flatness_sieve(const SaturatedTopology& tc, const SaturatedTopology& td, const Functor& f, const Diagram& g,
                             const Cone& t) {
  const auto& c = tc.category();
  const auto& d = td.category();
  std::vector<Cone> images;
  for (const auto& s : cones_over(c, g)) images.push_back(Cone{f.objects[s.vertex], image(f, s.legs)});
  Bitset sieve(d.morphism_count());
  for (MorId h : d.into(t.vertex)) {
    std::vector<MorId> th;
    for (MorId m : t.legs) th.push_back(d.compose(m, h));
    for (const auto& s : images)
      if (!factorizations(d, d.dom(h), th, s.vertex, s.legs).empty()) {
        sieve.set(h);
        break;
      }
  }
  return sieve;
}

/// Covering-flatness in sieve form, over every diagram of the catalog shapes.
inline std::optional<std::string> flatness_failure(const SaturatedTopology& tc, const SaturatedTopology& td, const Functor& f) {
  const auto& c = tc.category();
  const auto& d = td.category();
  for (const auto& [name, shape] : shape_catalog())
    for (const auto& g : diagrams_of_shape(c, shape)) {
      const auto fg = map_diagram(f, g);
      for (const auto& t : cones_over(d, fg))
        if (!td.covers(flatness_sieve(tc, td, f, g, t), t.vertex))
          return "cone " + describe(d, t.legs) + " over the image of a " + name + " diagram does not factor locally";
    }
  return std::nullopt;
}

struct SiteMorphismReport {
  bool preserves_covers = true;
  bool checklist = true;      // local pre-terminals, pre-products, pre-equalizers
  bool covering_flat = true;  // sieve form
  std::string failure;

  bool by_checklist() const { return preserves_covers && checklist; }
  bool by_sieves() const { return preserves_covers && covering_flat; }
  bool ok() const { return by_checklist(); }
};

/// Evaluates both criteria; a disagreement is a hard error.
inline SiteMorphismReport morphism_of_sites_check(const SaturatedTopology& tc, const SaturatedTopology& td, const Functor& f) {
  detail::require_functor(tc, td, f);
  SiteMorphismReport r;
  std::vector<std::string> fails;
  if (auto e = cover_preservation_failure(tc, td, f)) {
    r.preserves_covers = false;
    fails.push_back(*e);
  }
  if (auto e = checklist_failure(tc, td, f)) {
    r.checklist = false;
    fails.push_back(*e);
  }
  if (auto e = flatness_failure(tc, td, f)) {
    r.covering_flat = false;
    fails.push_back(*e);
  }
  if (!fails.empty()) r.failure = fails.front();
  if (r.by_checklist() != r.by_sieves())
    throw std::logic_error("morphism-of-sites criteria disagree: checklist " + std::to_string(r.checklist) + ", sieves " +
                           std::to_string(r.covering_flat));
  return r;
}

struct DenseReport {
  std::array<bool, 4> conditions{true, true, true, true};
  std::array<std::string, 4> failures;

  bool ok() const { return conditions[0] && conditions[1] && conditions[2] && conditions[3]; }
};

/// The four density conditions, each checked exhaustively.
inline DenseReport dense_check(const SaturatedTopology& tc, const SaturatedTopology& td, const Functor& f) {
  detail::require_functor(tc, td, f);
  const auto& c = tc.category();
  const auto& d = td.category();
  DenseReport r;
  auto fail = [&](int i, std::string why) {
    if (r.conditions[i]) r.failures[i] = std::move(why);
    r.conditions[i] = false;
  };

  // 1. covers are reflected as well as preserved
  for (ObjId u = 0; u < c.object_count(); ++u)
    for (const auto& p : leg_sets(c, u, tc.arity()))
      if (is_covering_family(tc, p) != is_covering_family(td, map_cocone(f, p)))
        fail(0, describe(c, p.legs) + " on " + c.object_name(u));

  // 2. every object is covered from the image
  std::vector<bool> in_image(d.object_count(), false);
  for (ObjId o : f.objects) in_image[o] = true;
  for (ObjId u = 0; u < d.object_count(); ++u) {
    Bitset s(d.morphism_count());
    for (MorId h : d.into(u))
      if (in_image[d.dom(h)]) s.set(h);
    if (!td.covers(s, u)) fail(1, d.object_name(u) + " has no cover from the image");
  }

  // 3. morphisms between images lift locally
  for (ObjId x = 0; x < c.object_count(); ++x)
    for (ObjId y = 0; y < c.object_count(); ++y)
      for (MorId g : d.hom(f.objects[x], f.objects[y])) {
        Bitset s(c.morphism_count());
        for (MorId p : c.into(x)) {
          const MorId gp = d.compose(g, f.morphisms[p]);
          for (MorId h : c.hom(c.dom(p), y))
            if (f.morphisms[h] == gp) {
              s.set(p);
              break;
            }
        }
        if (!tc.covers(s, x)) fail(2, d.morphism_name(g) + " does not lift locally");
      }

  // 4. morphisms identified by f are locally equal
  for (MorId h = 0; h < c.morphism_count(); ++h)
    for (MorId k : c.hom(c.dom(h), c.cod(h))) {
      if (h == k || f.morphisms[h] != f.morphisms[k]) continue;
      Bitset s(c.morphism_count());
      for (MorId p : c.into(c.dom(h)))
        if (c.compose(h, p) == c.compose(k, p)) s.set(p);
      if (!tc.covers(s, c.dom(h))) fail(3, c.morphism_name(h) + " and " + c.morphism_name(k) + " are not locally equal");
    }
  return r;
}

/// Image of a relation: the closure of its spans' images.
inline RelHom map_relation(const Allegory& from, const Allegory& to, const Functor& f, const RelHom& a) {
  std::vector<std::pair<MorId, MorId>> spans;
  for (const auto& [l, r] : from.spans_of(a)) spans.emplace_back(f.morphisms[l], f.morphisms[r]);
  return to.from_spans(f.objects[a.x], f.objects[a.y], spans);
}

inline Congruence map_congruence(const Allegory& from, const Allegory& to, const Functor& f, const Congruence& phi) {
  const auto x = map_family(f, phi.family());
  RelMatrix m{x, x, {}};
  for (const auto& e : phi.matrix.entries) m.entries.push_back(map_relation(from, to, f, e));
  return Congruence{m};
}

inline AnaSpan map_span(const Functor& f, const AnaSpan& s) { return AnaSpan{map_functional(f, s.p), map_functional(f, s.f)}; }

struct InducedHomMap {
  std::size_t source = 0, target = 0;
  bool injective = true, surjective = true;
  bool bijective() const { return injective && surjective; }
};

/// The map ex(C)(Φ, Θ) → ex(D)(fΦ, fΘ), compared class by class.
inline InducedHomMap induced_ex_hom(const Allegory& from, const Allegory& to, const Functor& f, const Congruence& phi,
                                    const Congruence& theta, const ExBounds& bounds = {}) {
  const auto fphi = map_congruence(from, to, f, phi);
  const auto ftheta = map_congruence(from, to, f, theta);
  const auto src = ana_hom(from, phi, theta, bounds);
  const auto tgt = ana_hom(to, fphi, ftheta, bounds);
  InducedHomMap r{src.size(), tgt.size()};
  std::vector<std::size_t> hits(tgt.size(), 0);
  for (const auto& s : src) {
    const auto fs = map_span(f, s);
    if (!ana_violation(to, fphi, ftheta, fs).empty()) throw std::logic_error("induced span is not a morphism");
    for (std::size_t k = 0; k < tgt.size(); ++k)
      if (ana_equal(to, ftheta, fs, tgt[k])) {
        ++hits[k];
        break;
      }
  }
  for (auto h : hits) {
    if (h > 1) r.injective = false;
    if (h == 0) r.surjective = false;
  }
  return r;
}

}  // namespace excat
