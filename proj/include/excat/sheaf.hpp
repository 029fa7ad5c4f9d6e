#pragma once

// Finite set-valued presheaves on a finite site, sheafification by the plus
// construction, and the presheaf colimit of a congruence.
//
// Elements of F(u) are 0..size(u)-1. For f: u → v, restriction[f][s] is the
// image in F(u) of s ∈ F(v).

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "excat/congruence.hpp"
#include "excat/fincat.hpp"
#include "excat/topology.hpp"

namespace excat {

struct Presheaf {
  std::vector<std::size_t> sizes;                   // per object
  std::vector<std::vector<std::size_t>> restriction;  // per morphism

  std::size_t size(ObjId u) const { return sizes[u]; }
  std::size_t restrict(MorId f, std::size_t s) const { return restriction[f][s]; }
  friend bool operator==(const Presheaf&, const Presheaf&) = default;
};

inline std::string presheaf_violation(const FinCategory& c, const Presheaf& p) {
  if (p.sizes.size() != c.object_count() || p.restriction.size() != c.morphism_count()) return "shape";
  for (MorId f = 0; f < c.morphism_count(); ++f) {
    if (p.restriction[f].size() != p.size(c.cod(f))) return "restriction along " + c.morphism_name(f) + " has the wrong domain";
    for (std::size_t s : p.restriction[f])
      if (s >= p.size(c.dom(f))) return "restriction along " + c.morphism_name(f) + " leaves its codomain";
  }
  for (ObjId u = 0; u < c.object_count(); ++u)
    for (std::size_t s = 0; s < p.size(u); ++s)
      if (p.restrict(c.identity(u), s) != s) return "identity at " + c.object_name(u);
  for (MorId f = 0; f < c.morphism_count(); ++f)
    for (MorId g : c.out_of(c.cod(f)))
      for (std::size_t s = 0; s < p.size(c.cod(g)); ++s)
        if (p.restrict(c.compose(g, f), s) != p.restrict(f, p.restrict(g, s)))
          return "composition at " + c.morphism_name(g) + "." + c.morphism_name(f);
  return {};
}

/// y(x): elements of F(u) are hom(u, x) in hom order.
inline Presheaf representable(const FinCategory& c, ObjId x) {
  Presheaf p;
  for (ObjId u = 0; u < c.object_count(); ++u) p.sizes.push_back(c.hom(u, x).size());
  p.restriction.resize(c.morphism_count());
  for (MorId f = 0; f < c.morphism_count(); ++f) {
    const auto& src = c.hom(c.dom(f), x);
    for (MorId a : c.hom(c.cod(f), x))
      p.restriction[f].push_back(static_cast<std::size_t>(std::find(src.begin(), src.end(), c.compose(a, f)) - src.begin()));
  }
  return p;
}

/// Constant presheaf on an n-element set.
inline Presheaf constant_presheaf(const FinCategory& c, std::size_t n) {
  Presheaf p{std::vector<std::size_t>(c.object_count(), n), {}};
  std::vector<std::size_t> id(n);
  std::iota(id.begin(), id.end(), 0);
  p.restriction.assign(c.morphism_count(), id);
  return p;
}

/// A matching family on a sieve: one element per sieve member, in member order.
using MatchingFamily = std::vector<std::size_t>;

/// All matching families of F on a sieve R on u.
inline std::vector<MatchingFamily> matching_families(const FinCategory& c, const Presheaf& f, ObjId u, const Bitset& sieve) {
  const auto members = sieve_members(sieve);
  const auto gens = minimal_generators(c, u, sieve);
  std::vector<std::size_t> pos(c.morphism_count(), SIZE_MAX);
  for (std::size_t i = 0; i < members.size(); ++i) pos[members[i]] = i;

  // each member h written as g_k ∘ m for some generator
  std::vector<std::pair<std::size_t, MorId>> via(members.size(), {SIZE_MAX, 0});
  for (std::size_t gi = 0; gi < gens.size(); ++gi)
    for (MorId m : c.into(c.dom(gens[gi]))) {
      const auto h = c.compose(gens[gi], m);
      if (via[pos[h]].first == SIZE_MAX) via[pos[h]] = {gi, m};
    }

  std::vector<std::size_t> value(gens.size());
  std::vector<MatchingFamily> out;
  auto compatible = [&](std::size_t upto) {
    for (std::size_t a = 0; a <= upto; ++a) {
      const std::size_t b = upto;
      for (ObjId v = 0; v < c.object_count(); ++v)
        for (MorId k1 : c.hom(v, c.dom(gens[a])))
          for (MorId k2 : c.hom(v, c.dom(gens[b])))
            if (c.compose(gens[a], k1) == c.compose(gens[b], k2) && f.restrict(k1, value[a]) != f.restrict(k2, value[b]))
              return false;
    }
    return true;
  };
  std::function<void(std::size_t)> go = [&](std::size_t i) {
    if (i == gens.size()) {
      MatchingFamily fam(members.size());
      for (std::size_t h = 0; h < members.size(); ++h) fam[h] = f.restrict(via[h].second, value[via[h].first]);
      out.push_back(std::move(fam));
      return;
    }
    for (std::size_t s = 0; s < f.size(c.dom(gens[i])); ++s) {
      value[i] = s;
      if (compatible(i)) go(i + 1);
    }
  };
  go(0);
  return out;
}

struct SheafFailure {
  ObjId object = 0;
  Bitset sieve;
  MatchingFamily family;
  std::size_t amalgamations = 0;
};

/// Unique amalgamation for every covering sieve and matching family;
/// returns the first failure otherwise.
inline std::optional<SheafFailure> sheaf_failure(const SaturatedTopology& t, const Presheaf& f) {
  const auto& c = t.category();
  for (ObjId u = 0; u < c.object_count(); ++u)
    for (const auto& sieve : t.covering_sieves(u)) {
      const auto members = sieve_members(sieve);
      for (const auto& fam : matching_families(c, f, u, sieve)) {
        std::size_t n = 0;
        for (std::size_t s = 0; s < f.size(u); ++s) {
          bool ok = true;
          for (std::size_t h = 0; h < members.size() && ok; ++h) ok = f.restrict(members[h], s) == fam[h];
          if (ok) ++n;
        }
        if (n != 1) return SheafFailure{u, sieve, fam, n};
      }
    }
  return std::nullopt;
}

inline bool is_sheaf(const SaturatedTopology& t, const Presheaf& f) { return !sheaf_failure(t, f).has_value(); }

/// A presheaf with a natural map from the one it was built from.
struct UnitPresheaf {
  Presheaf value;
  std::vector<std::vector<std::size_t>> unit;  // unit[u][s] for s in the source F(u)
};

/// F⁺(u) is the set of matching families on the least covering sieve of u,
/// which is cofinal among covering sieves.
inline UnitPresheaf plus_construction(const SaturatedTopology& t, const Presheaf& f) {
  const auto& c = t.category();
  const auto n = c.object_count();
  std::vector<std::vector<MorId>> members(n);
  std::vector<std::vector<MatchingFamily>> fams(n);
  std::vector<std::map<MatchingFamily, std::size_t>> index(n);
  for (ObjId u = 0; u < n; ++u) {
    members[u] = sieve_members(t.least_cover(u));
    fams[u] = matching_families(c, f, u, t.least_cover(u));
    for (std::size_t k = 0; k < fams[u].size(); ++k) index[u].emplace(fams[u][k], k);
  }
  UnitPresheaf out;
  for (ObjId u = 0; u < n; ++u) out.value.sizes.push_back(fams[u].size());
  out.value.restriction.resize(c.morphism_count());
  for (MorId g = 0; g < c.morphism_count(); ++g) {
    const ObjId v = c.dom(g), u = c.cod(g);
    const auto& mu = members[u];
    for (const auto& fam : fams[u]) {
      MatchingFamily r;
      for (MorId h : members[v]) {
        const auto gh = c.compose(g, h);
        const auto it = std::find(mu.begin(), mu.end(), gh);
        if (it == mu.end()) throw std::logic_error("least cover not pullback-stable");
        r.push_back(fam[static_cast<std::size_t>(it - mu.begin())]);
      }
      out.value.restriction[g].push_back(index[v].at(r));
    }
  }
  out.unit.resize(n);
  for (ObjId u = 0; u < n; ++u)
    for (std::size_t s = 0; s < f.size(u); ++s) {
      MatchingFamily fam;
      for (MorId h : members[u]) fam.push_back(f.restrict(h, s));
      out.unit[u].push_back(index[u].at(fam));
    }
  return out;
}

/// Plus construction twice, with the composite unit.
inline UnitPresheaf sheafify(const SaturatedTopology& t, const Presheaf& f) {
  const auto once = plus_construction(t, f);
  const auto twice = plus_construction(t, once.value);
  UnitPresheaf out{twice.value, {}};
  out.unit.resize(once.unit.size());
  for (ObjId u = 0; u < once.unit.size(); ++u)
    for (std::size_t s : once.unit[u]) out.unit[u].push_back(twice.unit[u][s]);
  return out;
}

/// Presheaf colimit of a congruence: F(w) is the set of pairs (i, α: w → x_i)
/// modulo the equivalence generated by α₁ ∼ α₂ when (α₁, α₂) ∈ Φ(i₁, i₂).
struct CongruenceColimit {
  Presheaf presheaf;
  std::vector<std::vector<std::size_t>> element;  // element[i][α] for α: w → x_i

  std::size_t of(std::size_t i, MorId alpha) const { return element[i][alpha]; }
};

inline CongruenceColimit colim_congruence(const Allegory& al, const Congruence& phi) {
  const auto& c = al.category();
  const auto& x = phi.family();
  CongruenceColimit out;
  out.element.assign(x.size(), std::vector<std::size_t>(c.morphism_count(), SIZE_MAX));
  out.presheaf.sizes.assign(c.object_count(), 0);
  for (ObjId w = 0; w < c.object_count(); ++w) {
    std::vector<std::pair<std::size_t, MorId>> elems;
    for (std::size_t i = 0; i < x.size(); ++i)
      for (MorId a : c.hom(w, x[i])) elems.emplace_back(i, a);
    std::vector<std::size_t> parent(elems.size());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<std::size_t(std::size_t)> find = [&](std::size_t k) { return parent[k] == k ? k : parent[k] = find(parent[k]); };
    for (std::size_t p = 0; p < elems.size(); ++p)
      for (std::size_t q = p + 1; q < elems.size(); ++q) {
        const auto [i1, a1] = elems[p];
        const auto [i2, a2] = elems[q];
        if (phi.at(i1, i2).spans.test(al.span_index(x[i1], x[i2], a1, a2))) {
          const auto rp = find(p), rq = find(q);
          parent[std::max(rp, rq)] = std::min(rp, rq);
        }
      }
    std::map<std::size_t, std::size_t> number;
    for (std::size_t k = 0; k < elems.size(); ++k) {
      const auto r = find(k);
      auto it = number.find(r);
      if (it == number.end()) it = number.emplace(r, number.size()).first;
      out.element[elems[k].first][elems[k].second] = it->second;
    }
    out.presheaf.sizes[w] = number.size();
  }
  out.presheaf.restriction.resize(c.morphism_count());
  for (MorId h = 0; h < c.morphism_count(); ++h) {
    auto& r = out.presheaf.restriction[h];
    r.assign(out.presheaf.sizes[c.cod(h)], SIZE_MAX);
    for (std::size_t i = 0; i < x.size(); ++i)
      for (MorId a : c.hom(c.cod(h), x[i])) {
        const auto img = out.element[i][c.compose(a, h)];
        auto& slot = r[out.element[i][a]];
        if (slot != SIZE_MAX && slot != img) throw std::logic_error("colim_congruence: restriction not well defined");
        slot = img;
      }
  }
  return out;
}

/// Natural transformations F → G, each as one function per object.
using NatTrans = std::vector<std::vector<std::size_t>>;

/// Every natural transformation, by assignment with downward propagation
/// along restrictions. Throws past `limit` results.
inline std::vector<NatTrans> natural_transformations(const FinCategory& c, const Presheaf& f, const Presheaf& g,
                                                     std::size_t limit = 1000000) {
  const auto n = c.object_count();
  NatTrans alpha(n);
  for (ObjId u = 0; u < n; ++u) alpha[u].assign(f.size(u), SIZE_MAX);
  std::vector<std::pair<ObjId, std::size_t>> trail;

  std::function<bool(ObjId, std::size_t, std::size_t)> assign = [&](ObjId u, std::size_t s, std::size_t val) {
    if (alpha[u][s] != SIZE_MAX) return alpha[u][s] == val;
    alpha[u][s] = val;
    trail.emplace_back(u, s);
    for (MorId h : c.into(u))
      if (!assign(c.dom(h), f.restrict(h, s), g.restrict(h, val))) return false;
    return true;
  };
  auto undo = [&](std::size_t mark) {
    while (trail.size() > mark) {
      alpha[trail.back().first][trail.back().second] = SIZE_MAX;
      trail.pop_back();
    }
  };

  std::vector<NatTrans> out;
  std::function<void()> go = [&]() {
    for (ObjId u = 0; u < n; ++u)
      for (std::size_t s = 0; s < f.size(u); ++s)
        if (alpha[u][s] == SIZE_MAX) {
          for (std::size_t val = 0; val < g.size(u); ++val) {
            const auto mark = trail.size();
            if (assign(u, s, val)) go();
            undo(mark);
          }
          return;
        }
    if (out.size() >= limit) throw std::runtime_error("natural_transformations: bound exceeded");
    out.push_back(alpha);
  };
  go();
  return out;
}

inline bool is_bijective(const NatTrans& a, const Presheaf& g) {
  for (std::size_t u = 0; u < a.size(); ++u) {
    std::vector<bool> hit(g.size(static_cast<ObjId>(u)), false);
    if (a[u].size() != hit.size()) return false;
    for (std::size_t v : a[u]) {
      if (hit[v]) return false;
      hit[v] = true;
    }
  }
  return true;
}

inline bool isomorphic(const FinCategory& c, const Presheaf& f, const Presheaf& g) {
  if (f.sizes != g.sizes) return false;
  for (const auto& a : natural_transformations(c, f, g))
    if (is_bijective(a, g)) return true;
  return false;
}

/// The element of a sheaf at u whose restrictions along the given legs are
/// the given elements, if there is exactly one.
inline std::optional<std::size_t> amalgamate(const Presheaf& g, ObjId u, const std::vector<std::pair<MorId, std::size_t>>& family) {
  std::optional<std::size_t> hit;
  for (std::size_t s = 0; s < g.size(u); ++s) {
    bool ok = true;
    for (const auto& [leg, e] : family) ok = ok && g.restrict(leg, s) == e;
    if (!ok) continue;
    if (hit) return std::nullopt;
    hit = s;
  }
  return hit;
}

}  // namespace excat
