#pragma once

// Local refinement, local κ-prelimits and the two constructive pipelines
// (products then equalizers; pullbacks then equalizers for connected shapes).

#include <deque>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "excat/fincat.hpp"
#include "excat/topology.hpp"

namespace excat {

/// For each row of F, the sieve of h with F|ˣ∘h ≤ G.
inline std::vector<Bitset> refinement_sieves(const SaturatedTopology& t, const Array& f, const Array& g) {
  if (f.target != g.target) throw std::invalid_argument("locally_refines: arrays have different targets");
  const auto& c = t.category();
  std::vector<Bitset> out;
  for (std::size_t i = 0; i < f.source.size(); ++i) {
    const auto row = f.row(i);
    Bitset s(c.morphism_count());
    for (MorId h : c.into(f.source[i])) {
      std::vector<MorId> fh;
      for (MorId m : row) fh.push_back(c.compose(m, h));
      for (std::size_t j = 0; j < g.source.size(); ++j)
        if (!factorizations(c, c.dom(h), fh, g.source[j], g.row(j)).empty()) {
          s.set(h);
          break;
        }
    }
    out.push_back(std::move(s));
  }
  return out;
}

struct LocalRefinement {
  bool holds = false;
  std::vector<Bitset> sieves;  // one per row of F
};

inline LocalRefinement locally_refines(const SaturatedTopology& t, const Array& f, const Array& g) {
  LocalRefinement r{true, refinement_sieves(t, f, g)};
  for (std::size_t i = 0; i < f.source.size(); ++i)
    if (!t.covers(r.sieves[i], f.source[i])) r.holds = false;
  return r;
}

/// Replayable evidence that a cone factors locally through the prelimit.
struct LocalCertificate {
  Cone cone;
  Bitset sieve;
  std::vector<std::tuple<MorId, std::size_t, MorId>> factorizations;  // (h, row, k) with T_row k = cone h
};

struct LocalPrelimit {
  Diagram diagram;
  Array cones;
  std::vector<LocalCertificate> certificates;
};

enum class Strategy { all_cones, prod_eq, pb_eq_connected, minimize };

inline std::optional<Strategy> parse_strategy(std::string_view s) {
  if (s == "all_cones") return Strategy::all_cones;
  if (s == "prod_eq") return Strategy::prod_eq;
  if (s == "pb_eq_connected") return Strategy::pb_eq_connected;
  if (s == "minimize") return Strategy::minimize;
  return std::nullopt;
}

namespace detail {

inline bool cones_refine(const SaturatedTopology& t, const std::vector<Cone>& all, const Array& tarr) {
  if (all.empty()) return true;
  return locally_refines(t, cones_to_array(tarr.target, all), tarr).holds;
}

}  // namespace detail

/// Every cone over the diagram factors locally through the array.
inline bool is_local_prelimit(const SaturatedTopology& t, const Diagram& d, const Array& tarr) {
  if (!is_array_over(t.category(), d, tarr)) throw std::invalid_argument("array is not over the diagram");
  return detail::cones_refine(t, cones_over(t.category(), d), tarr);
}

inline std::vector<LocalCertificate> certify(const SaturatedTopology& t, const Diagram& d, const Array& tarr) {
  const auto& c = t.category();
  std::vector<LocalCertificate> out;
  for (const auto& cone : cones_over(c, d)) {
    LocalCertificate cert{cone, Bitset(c.morphism_count()), {}};
    for (MorId h : c.into(cone.vertex)) {
      std::vector<MorId> ch;
      for (MorId m : cone.legs) ch.push_back(c.compose(m, h));
      for (std::size_t j = 0; j < tarr.source.size(); ++j) {
        auto ks = factorizations(c, c.dom(h), ch, tarr.source[j], tarr.row(j));
        if (!ks.empty()) {
          cert.sieve.set(h);
          cert.factorizations.emplace_back(h, j, ks.front());
          break;
        }
      }
    }
    out.push_back(std::move(cert));
  }
  return out;
}

/// Greedy deletion in canonical order, then fitting to κ by trying the empty
/// family and single cones when the greedy result is too large.
inline std::optional<Array> minimized_prelimit(const SaturatedTopology& t, const Diagram& d, Arity k) {
  const auto& c = t.category();
  const auto all = cones_over(c, d);
  const Family target = d.family();
  std::vector<Cone> keep = all;
  for (std::size_t i = 0; i < keep.size();) {
    auto trial = keep;
    trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(i));
    if (detail::cones_refine(t, all, cones_to_array(target, trial))) keep = std::move(trial);
    else ++i;
  }
  if (admits(k, keep.size())) return cones_to_array(target, keep);
  if (admits(k, 0) && detail::cones_refine(t, all, cones_to_array(target, {}))) return cones_to_array(target, {});
  for (const auto& cone : all)
    if (detail::cones_refine(t, all, cones_to_array(target, {cone}))) return cones_to_array(target, {cone});
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Small shapes

/// Diagram on a free shape: objects d0.., arrows (source index, target index, image).
inline Diagram free_diagram(const FinCategory& c, const std::vector<ObjId>& objects,
                            const std::vector<std::tuple<std::size_t, std::size_t, MorId>> arrows) {
  std::vector<std::pair<std::string, std::string>> objs;
  for (std::size_t i = 0; i < objects.size(); ++i) objs.emplace_back("d" + std::to_string(i), c.object_name(objects[i]));
  std::vector<std::tuple<std::string, std::string, std::string, std::string>> arr;
  for (std::size_t i = 0; i < arrows.size(); ++i) {
    const auto& [s, tt, m] = arrows[i];
    arr.emplace_back("g" + std::to_string(i), "d" + std::to_string(s), "d" + std::to_string(tt), c.morphism_name(m));
  }
  return make_diagram(c, objs, arr);
}

inline Diagram empty_diagram() { return Diagram{free_category({}, {}), {}}; }

inline Diagram pair_diagram(const FinCategory& c, ObjId x, ObjId y) { return free_diagram(c, {x, y}, {}); }

inline Diagram parallel_diagram(const FinCategory& c, MorId f, MorId g) {
  return free_diagram(c, {c.dom(f), c.cod(f)}, {{0, 1, f}, {0, 1, g}});
}

inline Diagram cospan_diagram(const FinCategory& c, MorId f, MorId g) {
  return free_diagram(c, {c.dom(f), c.dom(g), c.cod(f)}, {{0, 2, f}, {1, 2, g}});
}

struct NamedShape {
  std::string name;
  FinCategory shape;
};

/// Shapes with at most three objects used for exhaustive diagram sweeps.
inline std::vector<NamedShape> shape_catalog() {
  std::vector<NamedShape> out;
  out.push_back({"empty", free_category({}, {})});
  out.push_back({"point", free_category({"d0"}, {})});
  out.push_back({"discrete2", free_category({"d0", "d1"}, {})});
  out.push_back({"arrow", free_category({"d0", "d1"}, {{"g", "d0", "d1"}})});
  out.push_back({"parallel", free_category({"d0", "d1"}, {{"g", "d0", "d1"}, {"h", "d0", "d1"}})});
  out.push_back({"discrete3", free_category({"d0", "d1", "d2"}, {})});
  out.push_back({"cospan", free_category({"d0", "d1", "d2"}, {{"g", "d0", "d2"}, {"h", "d1", "d2"}})});
  out.push_back({"span", free_category({"d0", "d1", "d2"}, {{"g", "d2", "d0"}, {"h", "d2", "d1"}})});
  out.push_back({"chain", free_category({"d0", "d1", "d2"}, {{"g", "d0", "d1"}, {"h", "d1", "d2"}})});
  out.push_back({"arrow+point", free_category({"d0", "d1", "d2"}, {{"g", "d0", "d1"}})});
  out.push_back({"fork", free_category({"d0", "d1", "d2"}, {{"g", "d0", "d1"}, {"h", "d0", "d1"}, {"k", "d1", "d2"}})});
  out.push_back({"triangle", free_category({"d0", "d1", "d2"}, {{"g", "d0", "d1"}, {"h", "d1", "d2"}, {"k", "d0", "d2"}})});
  {
    FinCategory::Builder b;
    b.add_object("d0").add_morphism("i", "d0", "d0").set_composite("i", "i", "i");
    out.push_back({"idempotent", b.build()});
  }
  return out;
}

/// Every diagram of the given shape in c.
inline std::vector<Diagram> diagrams_of_shape(const FinCategory& c, const FinCategory& shape) {
  std::vector<Diagram> out;
  for (auto& f : enumerate_functors(shape, c)) out.push_back(Diagram{shape, std::move(f)});
  return out;
}

// ---------------------------------------------------------------------------
// Pipelines

namespace detail {

struct Partial {
  ObjId vertex;
  std::vector<MorId> legs;  // kNoMorphism where not yet assigned
};

inline std::optional<std::vector<Partial>> equalize_all(const SaturatedTopology& t, const Diagram& d, Arity k,
                                                        std::vector<Partial> family) {
  const auto& c = t.category();
  for (MorId delta = 0; delta < d.shape.morphism_count(); ++delta) {
    if (d.shape.is_identity(delta)) continue;
    const auto s = d.shape.dom(delta), tt = d.shape.cod(delta);
    std::vector<Partial> next;
    for (const auto& p : family) {
      const MorId lhs = c.compose(d.map.morphisms[delta], p.legs[s]);
      const auto eq = minimized_prelimit(t, parallel_diagram(c, lhs, p.legs[tt]), k);
      if (!eq) return std::nullopt;
      for (std::size_t r = 0; r < eq->source.size(); ++r) {
        const MorId e = eq->at(r, 0);
        Partial q{eq->source[r], {}};
        for (MorId l : p.legs) q.legs.push_back(c.compose(l, e));
        next.push_back(std::move(q));
      }
    }
    family = std::move(next);
  }
  return family;
}

inline Array partials_to_array(const Diagram& d, const std::vector<Partial>& family) {
  std::vector<Cone> cones;
  for (const auto& p : family) cones.push_back({p.vertex, p.legs});
  return cones_to_array(d.family(), cones);
}

inline std::optional<Array> prod_eq(const SaturatedTopology& t, const Diagram& d, Arity k) {
  const auto& c = t.category();
  const auto n = d.shape.object_count();
  if (n == 0) return minimized_prelimit(t, d, k);
  std::vector<Partial> family{{d.map.objects[0], std::vector<MorId>(n, kNoMorphism)}};
  family[0].legs[0] = c.identity(d.map.objects[0]);
  for (std::size_t i = 1; i < n; ++i) {
    std::vector<Partial> next;
    for (const auto& p : family) {
      const auto prod = minimized_prelimit(t, pair_diagram(c, p.vertex, d.map.objects[i]), k);
      if (!prod) return std::nullopt;
      for (std::size_t r = 0; r < prod->source.size(); ++r) {
        Partial q{prod->source[r], std::vector<MorId>(n, kNoMorphism)};
        for (std::size_t j = 0; j < i; ++j) q.legs[j] = c.compose(p.legs[j], prod->at(r, 0));
        q.legs[i] = prod->at(r, 1);
        next.push_back(std::move(q));
      }
    }
    family = std::move(next);
  }
  auto eq = equalize_all(t, d, k, std::move(family));
  if (!eq) return std::nullopt;
  return partials_to_array(d, *eq);
}

inline std::optional<Array> pb_eq_connected(const SaturatedTopology& t, const Diagram& d, Arity k) {
  if (!is_connected(d.shape)) throw std::invalid_argument("pb_eq_connected needs a connected shape");
  const auto& c = t.category();
  const auto n = d.shape.object_count();
  std::vector<Partial> family{{d.map.objects[0], std::vector<MorId>(n, kNoMorphism)}};
  family[0].legs[0] = c.identity(d.map.objects[0]);
  std::vector<bool> seen(n, false);
  seen[0] = true;
  // spanning tree over non-identity arrows, in arrow order
  bool grew = true;
  while (grew) {
    grew = false;
    for (MorId delta = 0; delta < d.shape.morphism_count(); ++delta) {
      if (d.shape.is_identity(delta)) continue;
      const auto s = d.shape.dom(delta), tt = d.shape.cod(delta);
      if (seen[s] == seen[tt]) continue;
      std::vector<Partial> next;
      if (seen[s]) {
        for (auto p : family) {
          p.legs[tt] = c.compose(d.map.morphisms[delta], p.legs[s]);
          next.push_back(std::move(p));
        }
        seen[tt] = true;
      } else {
        for (const auto& p : family) {
          const auto pb = minimized_prelimit(t, cospan_diagram(c, p.legs[tt], d.map.morphisms[delta]), k);
          if (!pb) return std::nullopt;
          for (std::size_t r = 0; r < pb->source.size(); ++r) {
            Partial q{pb->source[r], std::vector<MorId>(n, kNoMorphism)};
            for (std::size_t j = 0; j < n; ++j)
              if (p.legs[j] != kNoMorphism) q.legs[j] = c.compose(p.legs[j], pb->at(r, 0));
            q.legs[s] = pb->at(r, 1);
            next.push_back(std::move(q));
          }
        }
        seen[s] = true;
      }
      family = std::move(next);
      grew = true;
    }
  }
  auto eq = equalize_all(t, d, k, std::move(family));
  if (!eq) return std::nullopt;
  return partials_to_array(d, *eq);
}

}  // namespace detail

inline std::optional<LocalPrelimit> local_prelimit(const SaturatedTopology& t, const Diagram& d, Arity k, Strategy s) {
  const auto& c = t.category();
  std::optional<Array> arr;
  switch (s) {
    case Strategy::all_cones: {
      auto all = cones_over(c, d);
      if (admits(k, all.size())) arr = cones_to_array(d.family(), all);
      break;
    }
    case Strategy::minimize: arr = minimized_prelimit(t, d, k); break;
    case Strategy::prod_eq: arr = detail::prod_eq(t, d, k); break;
    case Strategy::pb_eq_connected: arr = detail::pb_eq_connected(t, d, k); break;
  }
  if (!arr || !admits(k, arr->source.size())) return std::nullopt;
  return LocalPrelimit{d, *arr, certify(t, d, *arr)};
}

/// κ-pre-pullback f*P: for each leg, a local prelimit of x → u ← v, legs to x.
inline Cocone pre_pullback(const SaturatedTopology& t, const Cocone& p, MorId f, Arity k) {
  const auto& c = t.category();
  if (c.cod(f) != p.apex) throw std::invalid_argument("pre_pullback: morphism does not land in the cocone's apex");
  Cocone out{c.dom(f), {}};
  for (MorId leg : p.legs) {
    const auto pb = minimized_prelimit(t, cospan_diagram(c, f, leg), k);
    if (!pb) throw TopologyError("no local " + arity_name(k) + " pre-pullback of " + c.morphism_name(f) + " and " + c.morphism_name(leg));
    for (std::size_t r = 0; r < pb->source.size(); ++r) out.legs.push_back(pb->at(r, 0));
  }
  return out;
}

struct KaryReport {
  bool weakly_k_ary = false;
  bool k_ary = false;
  std::string failure;
};

/// Weak arity plus local κ-prelimits for the empty, binary-product and
/// parallel-pair shapes, which generate all finite ones.
inline KaryReport check_k_ary(const SaturatedTopology& t, Arity k) {
  const auto& c = t.category();
  KaryReport r;
  r.weakly_k_ary = check_weakly_k_ary(t, k);
  if (!r.weakly_k_ary) {
    r.failure = "some covering sieve has no " + arity_name(k) + "-small generating subfamily";
    return r;
  }
  if (!minimized_prelimit(t, empty_diagram(), k)) {
    r.failure = "no local pre-terminal family";
    return r;
  }
  for (ObjId x = 0; x < c.object_count(); ++x)
    for (ObjId y = 0; y < c.object_count(); ++y)
      if (!minimized_prelimit(t, pair_diagram(c, x, y), k)) {
        r.failure = "no local pre-product of " + c.object_name(x) + " and " + c.object_name(y);
        return r;
      }
  for (ObjId x = 0; x < c.object_count(); ++x)
    for (ObjId y = 0; y < c.object_count(); ++y)
      for (MorId f : c.hom(x, y))
        for (MorId g : c.hom(x, y))
          if (f <= g && !minimized_prelimit(t, parallel_diagram(c, f, g), k)) {
            r.failure = "no local pre-equalizer of " + c.morphism_name(f) + " and " + c.morphism_name(g);
            return r;
          }
  r.k_ary = true;
  return r;
}

}  // namespace excat
