#pragma once

// Decision procedures for subcanonical, regular and exact sites, plus the
// regular-completion membership test and realizations of colimit presheaves.

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "excat/congruence.hpp"
#include "excat/fincat.hpp"
#include "excat/prelimits.hpp"
#include "excat/relalleg.hpp"
#include "excat/sheaf.hpp"
#include "excat/topology.hpp"

namespace excat {

struct Check {
  bool ok = true;
  std::string detail;  // counterexample or witness when relevant
};

/// One generating family per covering sieve must be effective-epic.
inline Check check_subcanonical(const SaturatedTopology& t) {
  const auto& c = t.category();
  for (ObjId u = 0; u < c.object_count(); ++u)
    for (const auto& s : t.covering_sieves(u)) {
      const Cocone p{u, minimal_generators(c, u, s)};
      if (!is_effective_epic(c, p)) return {false, describe(c, p.legs) + " on " + c.object_name(u)};
    }
  return {};
}

/// The same property checked on every covering leg set.
inline Check check_subcanonical_exhaustive(const SaturatedTopology& t) {
  const auto& c = t.category();
  for (ObjId u = 0; u < c.object_count(); ++u)
    for (const auto& p : leg_sets(c, u, Arity::FINITARY))
      if (is_covering_family(t, p) && !is_effective_epic(c, p)) return {false, describe(c, p.legs) + " on " + c.object_name(u)};
  return {};
}

/// Saturation of the universally effective-epic κ-ary cocones.
inline SaturatedTopology canonical_topology(const FinCategory& c, Arity k) {
  return saturate(c, universally_effective_class(c, k).all(), k);
}

/// R = Q P with P: V ⇒ u covering and Q: u ⇒ W a monic cone.
struct ImageFactorization {
  Cocone p;
  Cone q;
};

inline std::optional<ImageFactorization> image_factorization(const SaturatedTopology& t, const Array& r) {
  const auto& c = t.category();
  const auto& v = r.source;
  const auto& w = r.target;
  auto attempt = [&](ObjId u, const std::vector<MorId>& q) -> std::optional<ImageFactorization> {
    if (!is_monic_cone(c, u, q)) return std::nullopt;
    Cocone p{u, {}};
    for (std::size_t i = 0; i < v.size(); ++i) {
      const auto fs = factorizations(c, v[i], r.row(i), u, q);
      if (fs.empty()) return std::nullopt;
      p.legs.push_back(fs.front());  // unique since Q is monic
    }
    if (!is_covering_family(t, p)) return std::nullopt;
    return ImageFactorization{p, Cone{u, q}};
  };
  // a single monic row factors through itself
  if (v.size() == 1) {
    if (auto f = attempt(v[0], r.row(0))) return f;
  }
  for (ObjId u = 0; u < c.object_count(); ++u) {
    std::vector<std::vector<MorId>> options;
    for (ObjId y : w.objects) options.push_back(c.hom(u, y));
    std::optional<ImageFactorization> hit;
    for_each_choice(options, [&](const std::vector<MorId>& q) {
      if (!hit) hit = attempt(u, q);
    });
    if (hit) return hit;
  }
  return std::nullopt;
}

namespace detail {

inline std::vector<Family> families_of_size(const FinCategory& c, std::size_t n) {
  std::vector<Family> out{{}};
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<Family> next;
    for (const auto& f : out)
      for (ObjId o = 0; o < c.object_count(); ++o) {
        auto g = f;
        g.objects.push_back(o);
        next.push_back(std::move(g));
      }
    out = std::move(next);
  }
  return out;
}

template <typename Fn>
void for_each_array(const FinCategory& c, const Family& v, const Family& w, Fn&& fn) {
  std::vector<std::vector<MorId>> options;
  for (ObjId x : v.objects)
    for (ObjId y : w.objects) options.push_back(c.hom(x, y));
  for_each_choice(options, [&](const std::vector<MorId>& legs) { fn(Array{v, w, legs}); });
}

}  // namespace detail

/// κ-ary, strong-epic covers, and image factorizations of every array
/// V ⇒ W with |V| admissible and |V|, |W| ≤ bound.
inline Check check_regular(const SaturatedTopology& t, std::size_t bound = 2) {
  const auto& c = t.category();
  const auto k = t.arity();
  const auto ka = check_k_ary(t, k);
  if (!ka.k_ary) return {false, "not " + arity_name(k) + "-ary: " + ka.failure};
  for (ObjId u = 0; u < c.object_count(); ++u)
    for (const auto& s : t.covering_sieves(u)) {
      const Cocone p{u, minimal_generators(c, u, s)};
      if (!is_strong_epic(c, p)) return {false, "cover " + describe(c, p.legs) + " is not strong-epic"};
    }
  for (std::size_t nv = 0; nv <= bound; ++nv) {
    if (!admits(k, nv)) continue;
    for (std::size_t nw = 0; nw <= bound; ++nw)
      for (const auto& v : detail::families_of_size(c, nv))
        for (const auto& w : detail::families_of_size(c, nw)) {
          std::optional<std::string> bad;
          detail::for_each_array(c, v, w, [&](const Array& r) {
            if (!bad && !image_factorization(t, r)) {
              std::string s = "no image factorization of [";
              for (std::size_t i = 0; i < r.source.size(); ++i) s += (i ? "; " : "") + describe(c, r.row(i));
              bad = s + "]";
            }
          });
          if (bad) return {false, *bad};
        }
  }
  return {};
}

/// A cone over d through which every cone factors uniquely.
inline std::optional<Cone> limit_cone(const FinCategory& c, const Diagram& d) {
  const auto cones = cones_over(c, d);
  for (const auto& l : cones) {
    bool universal = true;
    for (const auto& other : cones)
      if (factorizations(c, other.vertex, other.legs, l.vertex, l.legs).size() != 1) {
        universal = false;
        break;
      }
    if (universal) return l;
  }
  return std::nullopt;
}

inline bool has_limit(const FinCategory& c, const Diagram& d) { return limit_cone(c, d).has_value(); }

/// Terminal object, binary products and equalizers.
inline bool has_finite_limits(const FinCategory& c) {
  if (!has_limit(c, empty_diagram())) return false;
  for (ObjId x = 0; x < c.object_count(); ++x)
    for (ObjId y = 0; y < c.object_count(); ++y)
      if (!has_limit(c, pair_diagram(c, x, y))) return false;
  for (MorId f = 0; f < c.morphism_count(); ++f)
    for (MorId g : c.hom(c.dom(f), c.cod(f)))
      if (!has_limit(c, parallel_diagram(c, f, g))) return false;
  return true;
}

/// Finite limits, and every κ-ary cocone factors as a monic after a
/// universally extremal-epic cocone. Topology-free form of regularity.
inline Check check_regular_limits_form(const FinCategory& c, Arity k) {
  if (!has_finite_limits(c)) return {false, "missing finite limits"};
  const auto univ = universally_extremal_class(c, k);
  for (ObjId w = 0; w < c.object_count(); ++w)
    for (const auto& r : leg_sets(c, w, k)) {
      bool found = false;
      for (ObjId u = 0; u < c.object_count() && !found; ++u)
        for (MorId q : c.hom(u, w)) {
          if (!is_monic(c, q)) continue;
          Cocone p{u, {}};
          bool ok = true;
          for (MorId leg : r.legs) {
            const auto fs = factorizations(c, c.dom(leg), {leg}, u, {q});
            if (fs.empty()) {
              ok = false;
              break;
            }
            p.legs.push_back(fs.front());
          }
          if (ok && univ.contains(p)) {
            found = true;
            break;
          }
        }
      if (!found) return {false, "cocone " + describe(c, r.legs) + " has no image"};
    }
  return {};
}

/// Coequalizer of its kernel pair (assumes the kernel pair exists).
inline bool is_regular_epic(const FinCategory& c, MorId e) {
  const auto kp = limit_cone(c, cospan_diagram(c, e, e));
  if (!kp) return false;
  const MorId f = kp->legs[0], g = kp->legs[1];
  for (ObjId z = 0; z < c.object_count(); ++z)
    for (MorId h : c.hom(c.dom(e), z)) {
      if (c.compose(h, f) != c.compose(h, g)) continue;
      std::size_t n = 0;
      for (MorId k : c.hom(c.cod(e), z)) n += c.compose(k, e) == h;
      if (n != 1) return false;
    }
  return true;
}

namespace detail {

// Projection onto dom(g) of the pullback of m along g.
inline std::optional<MorId> pullback_along(const FinCategory& c, MorId g, MorId m) {
  const auto l = limit_cone(c, cospan_diagram(c, g, m));
  if (!l) return std::nullopt;
  return l->legs[0];
}

inline bool sub_leq(const FinCategory& c, MorId m, MorId n) {
  return !factorizations(c, c.dom(m), {m}, c.dom(n), {n}).empty();
}

// Least upper bound of the subobjects ms among all monos into w.
inline std::optional<MorId> sub_join(const FinCategory& c, ObjId w, const std::vector<MorId>& ms) {
  std::vector<MorId> upper;
  for (ObjId u = 0; u < c.object_count(); ++u)
    for (MorId n : c.hom(u, w))
      if (is_monic(c, n) && std::all_of(ms.begin(), ms.end(), [&](MorId m) { return sub_leq(c, m, n); })) upper.push_back(n);
  for (MorId n : upper)
    if (std::all_of(upper.begin(), upper.end(), [&](MorId o) { return sub_leq(c, n, o); })) return n;
  return std::nullopt;
}

}  // namespace detail

/// Ordinary regularity plus pullback-stable unions of κ-small families of
/// subobjects. Stable binary and empty unions give all finite ones.
inline Check check_regular_category_form(const FinCategory& c, Arity k) {
  if (!has_finite_limits(c)) return {false, "missing finite limits"};
  for (MorId f = 0; f < c.morphism_count(); ++f) {
    bool found = false;
    for (ObjId u = 0; u < c.object_count() && !found; ++u)
      for (MorId e : c.hom(c.dom(f), u)) {
        if (!is_regular_epic(c, e)) continue;
        for (MorId m : c.hom(u, c.cod(f)))
          if (c.compose(m, e) == f && is_monic(c, m)) found = true;
        if (found) break;
      }
    if (!found) return {false, c.morphism_name(f) + " has no regular image"};
  }
  for (MorId e = 0; e < c.morphism_count(); ++e) {
    if (!is_regular_epic(c, e)) continue;
    for (MorId g : c.into(c.cod(e))) {
      const auto p = detail::pullback_along(c, g, e);
      if (!p || !is_regular_epic(c, *p))
        return {false, "regular epi " + c.morphism_name(e) + " not stable along " + c.morphism_name(g)};
    }
  }
  std::vector<std::size_t> sizes;
  if (admits(k, 0)) sizes.push_back(0);
  if (admits(k, 2)) sizes.push_back(2);
  for (ObjId w = 0; w < c.object_count(); ++w) {
    std::vector<MorId> subs;
    for (ObjId u = 0; u < c.object_count(); ++u)
      for (MorId m : c.hom(u, w))
        if (is_monic(c, m)) subs.push_back(m);
    for (std::size_t n : sizes) {
      std::vector<std::vector<MorId>> options(n, subs);
      std::optional<std::string> bad;
      for_each_choice(options, [&](const std::vector<MorId>& ms) {
        if (bad) return;
        const auto j = detail::sub_join(c, w, ms);
        if (!j) {
          bad = "no union of " + describe(c, ms);
          return;
        }
        for (MorId g : c.into(w)) {
          std::vector<MorId> pulled;
          for (MorId m : ms) pulled.push_back(*detail::pullback_along(c, g, m));
          const auto pj = detail::sub_join(c, c.dom(g), pulled);
          const auto pu = *detail::pullback_along(c, g, *j);
          if (!pj || !detail::sub_leq(c, pu, *pj) || !detail::sub_leq(c, *pj, pu)) {
            bad = "union of " + describe(c, ms) + " not stable along " + c.morphism_name(g);
            return;
          }
        }
      });
      if (bad) return {false, *bad};
    }
  }
  return {};
}

/// Regular, subcanonical, and every congruence on at most `bound` objects
/// (of admissible size) has a collage.
inline Check check_exact(const SaturatedTopology& t, std::size_t bound = 2) {
  const auto reg = check_regular(t, bound);
  if (!reg.ok) return {false, "not regular: " + reg.detail};
  const auto sub = check_subcanonical(t);
  if (!sub.ok) return {false, "not subcanonical: " + sub.detail};
  const Allegory al(t);
  const auto& c = t.category();
  for (std::size_t n = 0; n <= bound; ++n) {
    if (!admits(t.arity(), n)) continue;
    for (const auto& x : detail::families_of_size(c, n))
      for (const auto& phi : enumerate_congruences(al, x))
        if (!find_collage(al, phi)) return {false, "no collage of " + describe(al, phi)};
  }
  return {};
}

struct SiteReport {
  Check weakly_k_ary, k_ary, subcanonical, regular, exact;
};

inline SiteReport site_report(const SaturatedTopology& t, std::size_t bound = 2) {
  SiteReport r;
  r.weakly_k_ary = {check_weakly_k_ary(t, t.arity()), ""};
  const auto ka = check_k_ary(t, t.arity());
  r.k_ary = {ka.k_ary, ka.failure};
  r.subcanonical = check_subcanonical(t);
  r.regular = check_regular(t, bound);
  r.exact = check_exact(t, bound);
  return r;
}

/// Φ is the kernel of an array into objects of the site iff it equals the
/// meet of all single-column kernels above it; returns that array.
inline std::optional<Array> regular_membership(const Allegory& al, const Congruence& phi) {
  const auto& c = al.category();
  const auto& x = phi.family();
  Array acc{x, Family{}, {}};
  std::vector<std::vector<MorId>> columns;
  for (ObjId u = 0; u < c.object_count(); ++u) {
    std::vector<std::vector<MorId>> options;
    for (ObjId o : x.objects) options.push_back(c.hom(o, u));
    for_each_choice(options, [&](const std::vector<MorId>& col) {
      if (al.matrix_leq(phi.matrix, make_kernel(al, Array{x, Family{{u}}, col}).matrix)) {
        acc.target.objects.push_back(u);
        columns.push_back(col);
      }
    });
  }
  for (std::size_t i = 0; i < x.size(); ++i)
    for (const auto& col : columns) acc.legs.push_back(col[i]);
  if (make_kernel(al, acc) == phi) return acc;
  return std::nullopt;
}

/// α: J → y(z) is a realization when every map J → y(z') factors uniquely
/// through it.
inline bool is_realization(const FinCategory& c, const Presheaf& j, ObjId z, const NatTrans& alpha) {
  for (ObjId z2 = 0; z2 < c.object_count(); ++z2) {
    const auto hz2 = c.hom(z, z2);
    const auto rep = representable(c, z2);
    for (const auto& beta : natural_transformations(c, j, rep)) {
      std::size_t n = 0;
      for (MorId g : hz2) {
        bool same = true;
        for (ObjId u = 0; u < c.object_count() && same; ++u) {
          const auto& from = c.hom(u, z);
          const auto& to = c.hom(u, z2);
          for (std::size_t s = 0; s < j.size(u) && same; ++s) {
            const MorId a = from[alpha[u][s]];
            same = to[beta[u][s]] == c.compose(g, a);
          }
        }
        if (same) ++n;
      }
      if (n != 1) return false;
    }
  }
  return true;
}

/// The map colim(Φ) → y(z) induced by a cocone F: X ⇒ z, when well defined.
inline std::optional<NatTrans> cocone_map(const Allegory& al, const CongruenceColimit& col, const Congruence& phi, const Cocone& f) {
  const auto& c = al.category();
  NatTrans out(c.object_count());
  for (ObjId u = 0; u < c.object_count(); ++u) out[u].assign(col.presheaf.size(u), SIZE_MAX);
  for (std::size_t i = 0; i < phi.size(); ++i)
    for (ObjId u = 0; u < c.object_count(); ++u) {
      const auto& hz = c.hom(u, f.apex);
      for (MorId a : c.hom(u, phi.family()[i])) {
        const auto img = static_cast<std::size_t>(std::find(hz.begin(), hz.end(), c.compose(f.legs[i], a)) - hz.begin());
        auto& slot = out[u][col.of(i, a)];
        if (slot != SIZE_MAX && slot != img) return std::nullopt;
        slot = img;
      }
    }
  return out;
}

}  // namespace excat
