#pragma once

// Grothendieck topologies on finite categories, stored fully saturated, and
// the taxonomy of epimorphic cocones.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "excat/bitset.hpp"
#include "excat/fincat.hpp"

namespace excat {

enum class Arity { ONE, ZERO_ONE, FINITARY };

inline bool admits(Arity k, std::size_t n) {
  switch (k) {
    case Arity::ONE: return n == 1;
    case Arity::ZERO_ONE: return n <= 1;
    case Arity::FINITARY: return true;
  }
  return false;
}

inline std::string arity_name(Arity k) {
  switch (k) {
    case Arity::ONE: return "one";
    case Arity::ZERO_ONE: return "zero_one";
    case Arity::FINITARY: return "finitary";
  }
  return "?";
}

inline std::optional<Arity> parse_arity(std::string_view s) {
  if (s == "one") return Arity::ONE;
  if (s == "zero_one") return Arity::ZERO_ONE;
  if (s == "finitary") return Arity::FINITARY;
  return std::nullopt;
}

class TopologyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Sieves are bitsets over all morphisms of the category; a sieve on u only has
// bits for morphisms with codomain u.

inline Bitset empty_sieve(const FinCategory& c) { return Bitset(c.morphism_count()); }

inline Bitset maximal_sieve(const FinCategory& c, ObjId u) {
  Bitset s(c.morphism_count());
  for (MorId f : c.into(u)) s.set(f);
  return s;
}

inline Bitset principal_sieve(const FinCategory& c, MorId f) {
  Bitset s(c.morphism_count());
  for (MorId g : c.into(c.dom(f))) s.set(c.compose(f, g));
  return s;
}

inline Bitset generated_sieve(const FinCategory& c, ObjId u, const std::vector<MorId>& legs) {
  Bitset s(c.morphism_count());
  for (MorId p : legs) {
    if (c.cod(p) != u) throw std::invalid_argument("cocone leg " + c.morphism_name(p) + " does not land in " + c.object_name(u));
    s |= principal_sieve(c, p);
  }
  return s;
}

inline Bitset generated_sieve(const FinCategory& c, const Cocone& p) { return generated_sieve(c, p.apex, p.legs); }

/// f⁻¹R = { g | f∘g ∈ R } for f: x → u.
inline Bitset pullback_sieve(const FinCategory& c, MorId f, const Bitset& r) {
  Bitset s(c.morphism_count());
  for (MorId g : c.into(c.dom(f)))
    if (r.test(c.compose(f, g))) s.set(g);
  return s;
}

inline bool is_sieve(const FinCategory& c, ObjId u, const Bitset& s) {
  for (auto f : s.indices()) {
    if (c.cod(static_cast<MorId>(f)) != u) return false;
    for (MorId g : c.into(c.dom(static_cast<MorId>(f))))
      if (!s.test(c.compose(static_cast<MorId>(f), g))) return false;
  }
  return true;
}

/// Every sieve on u, in Bitset order.
inline std::vector<Bitset> all_sieves(const FinCategory& c, ObjId u) {
  const auto& in = c.into(u);
  if (in.size() > 24) throw TopologyError("too many morphisms into " + c.object_name(u) + " to enumerate sieves");
  std::set<Bitset> seen{empty_sieve(c)};
  std::vector<Bitset> frontier{empty_sieve(c)};
  while (!frontier.empty()) {
    std::vector<Bitset> next;
    for (const auto& s : frontier)
      for (MorId f : in) {
        if (s.test(f)) continue;
        Bitset t = s | principal_sieve(c, f);
        if (seen.insert(t).second) next.push_back(t);
      }
    frontier = std::move(next);
  }
  return {seen.begin(), seen.end()};
}

inline std::vector<MorId> sieve_members(const Bitset& s) {
  std::vector<MorId> out;
  s.for_each([&](std::size_t i) { out.push_back(static_cast<MorId>(i)); });
  return out;
}

/// Greedy irredundant generating family of a sieve, in morphism order.
inline std::vector<MorId> minimal_generators(const FinCategory& c, ObjId u, const Bitset& s) {
  auto gens = sieve_members(s);
  for (std::size_t i = 0; i < gens.size();) {
    auto without = gens;
    without.erase(without.begin() + static_cast<std::ptrdiff_t>(i));
    if (generated_sieve(c, u, without) == s) gens = std::move(without);
    else ++i;
  }
  return gens;
}

// ---------------------------------------------------------------------------

class SaturatedTopology {
 public:
  SaturatedTopology() = default;

  const FinCategory& category() const { return cat_; }
  Arity arity() const { return arity_; }

  const std::vector<Bitset>& covering_sieves(ObjId u) const { return covers_[u]; }
  /// Covering sieves are closed under finite intersection, so each object has
  /// a least one and a sieve covers exactly when it contains it.
  const Bitset& least_cover(ObjId u) const { return least_[u]; }
  /// Irredundant generating family of least_cover(u).
  const std::vector<MorId>& least_cover_generators(ObjId u) const { return least_gens_[u]; }

  bool covers(const Bitset& sieve, ObjId u) const { return least_[u].is_subset_of(sieve); }

  const std::vector<Cocone>& generators() const { return generators_; }

  /// κ-small family inside a covering sieve generating a covering sieve,
  /// recorded at saturation time for the topology's own arity.
  const std::optional<std::vector<MorId>>& witness(ObjId u, std::size_t index) const { return witnesses_[u][index]; }

  std::size_t covering_sieve_count() const {
    std::size_t n = 0;
    for (const auto& v : covers_) n += v.size();
    return n;
  }

  friend bool operator==(const SaturatedTopology& a, const SaturatedTopology& b) {
    return a.cat_ == b.cat_ && a.covers_ == b.covers_;
  }

  friend SaturatedTopology saturate(const FinCategory&, const std::vector<Cocone>&, Arity);

 private:
  FinCategory cat_;
  Arity arity_ = Arity::FINITARY;
  std::vector<Cocone> generators_;
  std::vector<std::vector<Bitset>> covers_;
  std::vector<Bitset> least_;
  std::vector<std::vector<MorId>> least_gens_;
  std::vector<std::vector<std::optional<std::vector<MorId>>>> witnesses_;
};

/// A κ-small subfamily of a covering sieve that already generates a covering
/// sieve, or none if κ forbids every such family.
inline std::optional<std::vector<MorId>> arity_witness(const SaturatedTopology& t, ObjId u, const Bitset& sieve, Arity k) {
  const auto& c = t.category();
  switch (k) {
    case Arity::FINITARY: return minimal_generators(c, u, sieve);
    case Arity::ZERO_ONE:
      if (t.covers(empty_sieve(c), u)) return std::vector<MorId>{};
      [[fallthrough]];
    case Arity::ONE:
      for (MorId f : sieve_members(sieve))
        if (t.covers(principal_sieve(c, f), u)) return std::vector<MorId>{f};
      return std::nullopt;
  }
  return std::nullopt;
}

/// Least saturated topology containing the sieves generated by the given
/// cocones: closed under pullback, local character and upward closure.
inline SaturatedTopology saturate(const FinCategory& c, const std::vector<Cocone>& generators, Arity k) {
  for (const auto& g : generators)
    if (!admits(k, g.legs.size()))
      throw TopologyError(g.legs.empty() ? "empty cover not " + std::string(k == Arity::ONE ? "1" : arity_name(k)) + "-admissible"
                                         : "cover of " + c.object_name(g.apex) + " with " + std::to_string(g.legs.size()) +
                                               " legs is not " + arity_name(k) + "-admissible");

  const auto n = c.object_count();
  std::vector<std::vector<Bitset>> sieves(n);
  std::vector<std::unordered_set<Bitset, BitsetHash>> cov(n);
  for (ObjId u = 0; u < n; ++u) {
    sieves[u] = all_sieves(c, u);
    cov[u].insert(maximal_sieve(c, u));
  }
  for (const auto& g : generators) cov[g.apex].insert(generated_sieve(c, g));

  auto is_cov = [&](ObjId u, const Bitset& s) { return cov[u].count(s) > 0; };

  bool changed = true;
  while (changed) {
    changed = false;
    // pullback stability
    for (ObjId u = 0; u < n; ++u) {
      std::vector<Bitset> current(cov[u].begin(), cov[u].end());
      for (const auto& r : current)
        for (MorId f : c.into(u)) {
          const ObjId x = c.dom(f);
          if (cov[x].insert(pullback_sieve(c, f, r)).second) changed = true;
        }
    }
    // upward closure and local character
    for (ObjId u = 0; u < n; ++u) {
      for (const auto& s : sieves[u]) {
        if (is_cov(u, s)) continue;
        bool add = false;
        for (const auto& r : cov[u]) {
          if (r.is_subset_of(s)) {
            add = true;
            break;
          }
          bool local = true;
          r.for_each([&](std::size_t f) {
            if (local && !is_cov(c.dom(static_cast<MorId>(f)), pullback_sieve(c, static_cast<MorId>(f), s))) local = false;
          });
          if (local) {
            add = true;
            break;
          }
        }
        if (add) {
          cov[u].insert(s);
          changed = true;
        }
      }
    }
  }

  SaturatedTopology t;
  t.cat_ = c;
  t.arity_ = k;
  t.generators_ = generators;
  t.covers_.resize(n);
  t.least_.resize(n);
  t.least_gens_.resize(n);
  for (ObjId u = 0; u < n; ++u) {
    t.covers_[u].assign(cov[u].begin(), cov[u].end());
    std::sort(t.covers_[u].begin(), t.covers_[u].end());
    Bitset least = maximal_sieve(c, u);
    for (const auto& s : t.covers_[u]) least &= s;
    if (!cov[u].count(least)) throw TopologyError("internal: covering sieves not closed under intersection");
    t.least_[u] = least;
    t.least_gens_[u] = minimal_generators(c, u, least);
  }
  t.witnesses_.resize(n);
  for (ObjId u = 0; u < n; ++u)
    for (const auto& s : t.covers_[u]) t.witnesses_[u].push_back(arity_witness(t, u, s, k));
  return t;
}

inline SaturatedTopology trivial_topology(const FinCategory& c, Arity k = Arity::FINITARY) { return saturate(c, {}, k); }

inline bool is_covering_family(const SaturatedTopology& t, const Cocone& p) {
  return t.covers(generated_sieve(t.category(), p), p.apex);
}

/// True when every covering sieve contains a κ-small family that generates a
/// covering sieve.
inline bool check_weakly_k_ary(const SaturatedTopology& t, Arity k) {
  for (ObjId u = 0; u < t.category().object_count(); ++u)
    for (const auto& s : t.covering_sieves(u))
      if (!arity_witness(t, u, s, k)) return false;
  return true;
}

struct PullbackCover {
  Cocone cover;            // all members of f⁻¹(P̄)
  FunctionalArray witness;  // f∘Q = P H
};

/// The family of all members of f⁻¹(P̄), which covers dom f, with a witness
/// that f∘Q refines P.
inline PullbackCover pullback_cover(const SaturatedTopology& t, const Cocone& p, MorId f) {
  const auto& c = t.category();
  if (c.cod(f) != p.apex) throw TopologyError("pullback_cover: morphism does not land in the cocone's apex");
  if (!is_covering_family(t, p)) throw TopologyError("pullback_cover: cocone is not covering");
  const Bitset s = pullback_sieve(c, f, generated_sieve(c, p));
  PullbackCover out;
  out.cover = {c.dom(f), sieve_members(s)};
  Array fq{family_of_domains(c, out.cover.legs), Family{{p.apex}}, {}};
  for (MorId q : out.cover.legs) fq.legs.push_back(c.compose(f, q));
  auto h = refines_witness(c, fq, as_array(c, p));
  if (!h) throw TopologyError("internal: pullback sieve member does not factor");
  out.witness = *h;
  return out;
}

// ---------------------------------------------------------------------------
// Epimorphism classes. Cocones are given as an apex with legs.

inline bool is_iso(const FinCategory& c, MorId f) {
  for (MorId g : c.hom(c.cod(f), c.dom(f)))
    if (c.compose(g, f) == c.identity(c.dom(f)) && c.compose(f, g) == c.identity(c.cod(f))) return true;
  return false;
}

/// Cone legs from z are jointly monic.
inline bool is_monic_cone(const FinCategory& c, ObjId z, const std::vector<MorId>& legs) {
  for (ObjId t = 0; t < c.object_count(); ++t) {
    const auto& h = c.hom(t, z);
    for (std::size_t i = 0; i < h.size(); ++i)
      for (std::size_t j = i + 1; j < h.size(); ++j) {
        bool same = true;
        for (MorId q : legs)
          if (c.compose(q, h[i]) != c.compose(q, h[j])) {
            same = false;
            break;
          }
        if (same) return false;
      }
  }
  return true;
}

inline bool is_monic(const FinCategory& c, MorId f) { return is_monic_cone(c, c.dom(f), {f}); }

inline bool is_epic(const FinCategory& c, const Cocone& r) {
  for (ObjId x = 0; x < c.object_count(); ++x) {
    const auto& h = c.hom(r.apex, x);
    for (std::size_t i = 0; i < h.size(); ++i)
      for (std::size_t j = i + 1; j < h.size(); ++j) {
        bool same = true;
        for (MorId p : r.legs)
          if (c.compose(h[i], p) != c.compose(h[j], p)) {
            same = false;
            break;
          }
        if (same) return false;
      }
  }
  return true;
}

/// Calls fn(legs) for every cocone with the given leg domains into x.
template <typename Fn>
void for_each_cocone(const FinCategory& c, const std::vector<ObjId>& domains, ObjId x, Fn&& fn) {
  std::vector<MorId> legs(domains.size());
  auto rec = [&](auto&& self, std::size_t k) -> void {
    if (k == domains.size()) {
      fn(legs);
      return;
    }
    for (MorId m : c.hom(domains[k], x)) {
      legs[k] = m;
      self(self, k + 1);
    }
  };
  rec(rec, 0);
}

/// Every product of choices: calls fn(choice) with choice[k] drawn from options[k].
template <typename T, typename Fn>
void for_each_choice(const std::vector<std::vector<T>>& options, Fn&& fn) {
  std::vector<T> pick(options.size());
  auto rec = [&](auto&& self, std::size_t k) -> void {
    if (k == options.size()) {
      fn(pick);
      return;
    }
    for (const auto& o : options[k]) {
      pick[k] = o;
      self(self, k + 1);
    }
  };
  rec(rec, 0);
}

inline bool is_extremal_epic(const FinCategory& c, const Cocone& r) {
  if (!is_epic(c, r)) return false;
  for (MorId q : c.into(r.apex)) {
    if (!is_monic(c, q)) continue;
    bool all_factor = true;
    for (MorId p : r.legs) {
      bool f = false;
      for (MorId k : c.hom(c.dom(p), c.dom(q)))
        if (c.compose(q, k) == p) {
          f = true;
          break;
        }
      if (!f) {
        all_factor = false;
        break;
      }
    }
    if (all_factor && !is_iso(c, q)) return false;
  }
  return true;
}

/// Orthogonality against finite monic cones. For each cocone P from the same
/// domains into z, all pairs (q: z → w, f: u → w) with f R = q P form the
/// largest candidate; smaller monic cones inherit its diagonal.
inline bool is_strong_epic(const FinCategory& c, const Cocone& r) {
  if (!is_epic(c, r)) return false;
  const auto domains = family_of_domains(c, r.legs).objects;
  for (ObjId z = 0; z < c.object_count(); ++z) {
    bool ok = true;
    for_each_cocone(c, domains, z, [&](const std::vector<MorId>& p) {
      if (!ok) return;
      std::vector<std::pair<MorId, MorId>> pairs;
      for (ObjId w = 0; w < c.object_count(); ++w)
        for (MorId q : c.hom(z, w))
          for (MorId f : c.hom(r.apex, w)) {
            bool compat = true;
            for (std::size_t v = 0; v < p.size() && compat; ++v) compat = c.compose(f, r.legs[v]) == c.compose(q, p[v]);
            if (compat) pairs.emplace_back(q, f);
          }
      std::vector<MorId> qs;
      for (const auto& pr : pairs) qs.push_back(pr.first);
      if (!is_monic_cone(c, z, qs)) return;
      for (MorId h : c.hom(r.apex, z)) {
        bool good = true;
        for (std::size_t v = 0; v < p.size() && good; ++v) good = c.compose(h, r.legs[v]) == p[v];
        for (std::size_t k = 0; k < pairs.size() && good; ++k) good = c.compose(pairs[k].first, h) == pairs[k].second;
        if (good) return;
      }
      ok = false;
    });
    if (!ok) return false;
  }
  return true;
}

/// Pairs (v1, v2, a, b) with r_{v1} a = r_{v2} b.
inline std::vector<std::tuple<std::size_t, std::size_t, MorId, MorId>> kernel_pairs(const FinCategory& c, const Cocone& r) {
  std::vector<std::tuple<std::size_t, std::size_t, MorId, MorId>> out;
  for (std::size_t v1 = 0; v1 < r.legs.size(); ++v1)
    for (std::size_t v2 = 0; v2 < r.legs.size(); ++v2)
      for (ObjId t = 0; t < c.object_count(); ++t)
        for (MorId a : c.hom(t, c.dom(r.legs[v1])))
          for (MorId b : c.hom(t, c.dom(r.legs[v2])))
            if (c.compose(r.legs[v1], a) == c.compose(r.legs[v2], b)) out.emplace_back(v1, v2, a, b);
  return out;
}

inline bool is_effective_epic(const FinCategory& c, const Cocone& r) {
  const auto kp = kernel_pairs(c, r);
  const auto domains = family_of_domains(c, r.legs).objects;
  for (ObjId x = 0; x < c.object_count(); ++x) {
    bool ok = true;
    for_each_cocone(c, domains, x, [&](const std::vector<MorId>& q) {
      if (!ok) return;
      for (const auto& [v1, v2, a, b] : kp)
        if (c.compose(q[v1], a) != c.compose(q[v2], b)) return;
      std::size_t factorizations = 0;
      for (MorId h : c.hom(r.apex, x)) {
        bool good = true;
        for (std::size_t v = 0; v < q.size() && good; ++v) good = c.compose(h, r.legs[v]) == q[v];
        factorizations += good;
      }
      if (factorizations != 1) ok = false;
    });
    if (!ok) return false;
  }
  return true;
}

/// Cocones identified with their sets of legs; duplicated legs never change
/// any of the epi classes.
inline Cocone normalize(const Cocone& p) {
  Cocone q = p;
  std::sort(q.legs.begin(), q.legs.end());
  q.legs.erase(std::unique(q.legs.begin(), q.legs.end()), q.legs.end());
  return q;
}

/// All κ-admissible leg sets on u, in lexicographic order of the sorted legs.
inline std::vector<Cocone> leg_sets(const FinCategory& c, ObjId u, Arity k) {
  const auto& in = c.into(u);
  if (in.size() > 20) throw TopologyError("too many morphisms into " + c.object_name(u) + " to enumerate cocones");
  std::vector<Cocone> out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << in.size()); ++mask) {
    Cocone p{u, {}};
    for (std::size_t i = 0; i < in.size(); ++i)
      if (mask >> i & 1U) p.legs.push_back(in[i]);
    if (admits(k, p.legs.size())) out.push_back(std::move(p));
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Greatest fixed point of the universal closure over a class of κ-ary
/// cocones (represented by leg sets).
class UniversalClass {
 public:
  template <typename Pred>
  UniversalClass(const FinCategory& c, Arity k, Pred&& pred) : arity_(k) {
    members_.resize(c.object_count());
    for (ObjId u = 0; u < c.object_count(); ++u)
      for (auto& p : leg_sets(c, u, k))
        if (pred(p)) members_[u].insert(p);
    bool changed = true;
    while (changed) {
      changed = false;
      for (ObjId u = 0; u < c.object_count(); ++u) {
        for (auto it = members_[u].begin(); it != members_[u].end();) {
          const Bitset gen = generated_sieve(c, *it);
          bool stable = true;
          for (MorId f : c.into(u)) {
            const Bitset pulled = pullback_sieve(c, f, gen);
            bool found = false;
            for (const auto& q : members_[c.dom(f)]) {
              if (std::all_of(q.legs.begin(), q.legs.end(), [&](MorId m) { return pulled.test(m); })) {
                found = true;
                break;
              }
            }
            if (!found) {
              stable = false;
              break;
            }
          }
          if (stable) ++it;
          else {
            it = members_[u].erase(it);
            changed = true;
          }
        }
      }
    }
  }

  bool contains(const Cocone& p) const {
    const auto q = normalize(p);
    return admits(arity_, q.legs.size()) && members_[q.apex].count(q) > 0;
  }

  std::vector<Cocone> all() const {
    std::vector<Cocone> out;
    for (const auto& m : members_) out.insert(out.end(), m.begin(), m.end());
    return out;
  }

 private:
  Arity arity_;
  std::vector<std::set<Cocone>> members_;
};

inline UniversalClass universally_effective_class(const FinCategory& c, Arity k) {
  return UniversalClass(c, k, [&](const Cocone& p) { return is_effective_epic(c, p); });
}

inline UniversalClass universally_extremal_class(const FinCategory& c, Arity k) {
  return UniversalClass(c, k, [&](const Cocone& p) { return is_extremal_epic(c, p); });
}

struct EpiFlags {
  bool epic = false;
  bool extremal = false;
  bool strong = false;
  bool effective = false;
  bool universally_effective = false;
  friend bool operator==(const EpiFlags&, const EpiFlags&) = default;
};

inline EpiFlags classify_cocone(const FinCategory& c, const Cocone& p, const UniversalClass& univ_effective) {
  EpiFlags f;
  f.epic = is_epic(c, p);
  f.extremal = f.epic && is_extremal_epic(c, p);
  f.strong = f.epic && is_strong_epic(c, p);
  f.effective = is_effective_epic(c, p);
  f.universally_effective = univ_effective.contains(p);
  return f;
}

/// Universal effectivity is judged for the topology's arity class.
inline EpiFlags classify_cocone(const SaturatedTopology& t, const Cocone& p) {
  return classify_cocone(t.category(), p, universally_effective_class(t.category(), t.arity()));
}

}  // namespace excat
