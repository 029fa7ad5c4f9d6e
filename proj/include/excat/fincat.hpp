#pragma once

// Finite categories with explicit composition tables, plus the calculus of
// families, matrices, arrays and functional arrays built on top of them.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace excat {

using ObjId = std::uint32_t;
using MorId = std::uint32_t;

inline constexpr MorId kNoMorphism = std::numeric_limits<MorId>::max();

class CategoryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FinCategory {
 public:
  class Builder;

  FinCategory() = default;

  std::size_t object_count() const { return object_names_.size(); }
  std::size_t morphism_count() const { return morphism_names_.size(); }

  const std::string& object_name(ObjId x) const { return object_names_.at(x); }
  const std::string& morphism_name(MorId f) const { return morphism_names_.at(f); }

  ObjId dom(MorId f) const { return dom_[f]; }
  ObjId cod(MorId f) const { return cod_[f]; }
  MorId identity(ObjId x) const { return identity_[x]; }
  bool is_identity(MorId f) const { return identity_[dom_[f]] == f; }

  /// g∘f, or kNoMorphism when the table has no entry for the pair.
  MorId compose(MorId g, MorId f) const { return table_[g * morphism_count() + f]; }

  /// Composite of a chain listed outermost first: compose({h, g, f}) = h∘g∘f.
  MorId compose(std::initializer_list<MorId> chain) const {
    MorId acc = kNoMorphism;
    for (auto it = std::rbegin(chain); it != std::rend(chain); ++it)
      acc = acc == kNoMorphism ? *it : compose(*it, acc);
    return acc;
  }

  const std::vector<MorId>& hom(ObjId x, ObjId y) const { return hom_[x * object_count() + y]; }
  /// All morphisms with codomain u, ascending.
  const std::vector<MorId>& into(ObjId u) const { return into_[u]; }
  /// All morphisms with domain x, ascending.
  const std::vector<MorId>& out_of(ObjId x) const { return out_of_[x]; }

  std::optional<ObjId> find_object(std::string_view name) const {
    for (ObjId i = 0; i < object_count(); ++i)
      if (object_names_[i] == name) return i;
    return std::nullopt;
  }
  std::optional<MorId> find_morphism(std::string_view name) const {
    for (MorId i = 0; i < morphism_count(); ++i)
      if (morphism_names_[i] == name) return i;
    return std::nullopt;
  }
  ObjId object(std::string_view name) const {
    if (auto id = find_object(name)) return *id;
    throw CategoryError("unknown object '" + std::string(name) + "'");
  }
  MorId morphism(std::string_view name) const {
    if (auto id = find_morphism(name)) return *id;
    throw CategoryError("unknown morphism '" + std::string(name) + "'");
  }

  std::vector<ObjId> objects() const {
    std::vector<ObjId> out(object_count());
    for (ObjId i = 0; i < out.size(); ++i) out[i] = i;
    return out;
  }

  friend bool operator==(const FinCategory&, const FinCategory&) = default;

 private:
  void index() {
    const auto n = object_count();
    hom_.assign(n * n, {});
    into_.assign(n, {});
    out_of_.assign(n, {});
    for (MorId f = 0; f < morphism_count(); ++f) {
      hom_[dom_[f] * n + cod_[f]].push_back(f);
      into_[cod_[f]].push_back(f);
      out_of_[dom_[f]].push_back(f);
    }
  }

  std::vector<std::string> object_names_;
  std::vector<std::string> morphism_names_;
  std::vector<ObjId> dom_, cod_;
  std::vector<MorId> identity_;
  std::vector<MorId> table_;
  std::vector<std::vector<MorId>> hom_, into_, out_of_;
};

/// Collects objects, morphisms and composites by name. Identities are created
/// automatically as "1_<object>" and their composites are implicit.
class FinCategory::Builder {
 public:
  Builder& add_object(std::string name) {
    if (std::find(objects_.begin(), objects_.end(), name) != objects_.end())
      throw CategoryError("duplicate object '" + name + "'");
    objects_.push_back(std::move(name));
    return *this;
  }

  Builder& add_morphism(std::string name, std::string dom, std::string cod) {
    for (const auto& m : morphisms_)
      if (m.name == name) throw CategoryError("duplicate morphism '" + name + "'");
    morphisms_.push_back({std::move(name), std::move(dom), std::move(cod)});
    return *this;
  }

  /// Records g∘f = h.
  Builder& set_composite(std::string g, std::string f, std::string h) {
    composites_[{std::move(g), std::move(f)}] = std::move(h);
    return *this;
  }

  const std::vector<std::string>& object_names() const { return objects_; }

  /// Builds and checks that every composable pair of non-identity morphisms
  /// has a composite. Laws are not checked here; see validate_category.
  FinCategory build() const { return assemble(true); }

  /// Builds without requiring completeness; missing entries stay empty.
  FinCategory build_unchecked() const { return assemble(false); }

 private:
  struct MorphismDecl {
    std::string name, dom, cod;
  };

  FinCategory assemble(bool require_complete) const {
    FinCategory c;
    c.object_names_ = objects_;
    std::sort(c.object_names_.begin(), c.object_names_.end());

    std::vector<MorphismDecl> all;
    for (const auto& o : objects_) all.push_back({"1_" + o, o, o});
    for (const auto& m : morphisms_) {
      if (m.name.rfind("1_", 0) == 0) throw CategoryError("morphism name '" + m.name + "' is reserved");
      all.push_back(m);
    }
    std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.name < b.name; });

    auto obj_id = [&](const std::string& n) -> ObjId {
      auto it = std::lower_bound(c.object_names_.begin(), c.object_names_.end(), n);
      if (it == c.object_names_.end() || *it != n) throw CategoryError("unknown object '" + n + "'");
      return static_cast<ObjId>(it - c.object_names_.begin());
    };

    for (const auto& m : all) {
      c.morphism_names_.push_back(m.name);
      c.dom_.push_back(obj_id(m.dom));
      c.cod_.push_back(obj_id(m.cod));
    }
    auto mor_id = [&](const std::string& n) -> MorId {
      for (MorId i = 0; i < c.morphism_names_.size(); ++i)
        if (c.morphism_names_[i] == n) return i;
      throw CategoryError("unknown morphism '" + n + "'");
    };

    c.identity_.resize(c.object_count());
    for (ObjId x = 0; x < c.object_count(); ++x) c.identity_[x] = mor_id("1_" + c.object_names_[x]);

    const auto m = c.morphism_count();
    c.table_.assign(m * m, kNoMorphism);
    for (MorId f = 0; f < m; ++f) {
      c.table_[c.identity_[c.cod_[f]] * m + f] = f;
      c.table_[f * m + c.identity_[c.dom_[f]]] = f;
    }
    for (const auto& [key, h] : composites_) {
      const MorId g = mor_id(key.first), f = mor_id(key.second), gf = mor_id(h);
      if (c.cod_[f] != c.dom_[g])
        throw CategoryError("composite " + key.first + "." + key.second + " of non-composable pair");
      c.table_[g * m + f] = gf;
    }
    if (require_complete) {
      for (MorId g = 0; g < m; ++g)
        for (MorId f = 0; f < m; ++f)
          if (c.cod_[f] == c.dom_[g] && c.table_[g * m + f] == kNoMorphism)
            throw CategoryError("missing composite " + c.morphism_names_[g] + "." + c.morphism_names_[f]);
    }
    c.index();
    return c;
  }

  std::vector<std::string> objects_;
  std::vector<MorphismDecl> morphisms_;
  std::map<std::pair<std::string, std::string>, std::string> composites_;
};

struct CategoryReport {
  bool ok = true;
  std::string message;
};

/// Exhaustively checks typing, unit laws and associativity of the table.
inline CategoryReport validate_category(const FinCategory& c) {
  const auto& name = [&](MorId f) -> const std::string& { return c.morphism_name(f); };
  for (MorId g = 0; g < c.morphism_count(); ++g) {
    for (MorId f = 0; f < c.morphism_count(); ++f) {
      const MorId gf = c.compose(g, f);
      if (c.cod(f) != c.dom(g)) {
        if (gf != kNoMorphism) return {false, "composite " + name(g) + "." + name(f) + " defined for a non-composable pair"};
        continue;
      }
      if (gf == kNoMorphism) return {false, "missing composite " + name(g) + "." + name(f)};
      if (c.dom(gf) != c.dom(f) || c.cod(gf) != c.cod(g))
        return {false, "composite " + name(g) + "." + name(f) + " = " + name(gf) + " has the wrong domain or codomain"};
    }
  }
  for (ObjId x = 0; x < c.object_count(); ++x) {
    const MorId id = c.identity(x);
    for (MorId f : c.into(x))
      if (c.compose(id, f) != f) return {false, "identity law at " + c.object_name(x)};
    for (MorId f : c.out_of(x))
      if (c.compose(f, id) != f) return {false, "identity law at " + c.object_name(x)};
  }
  for (MorId f = 0; f < c.morphism_count(); ++f)
    for (MorId g : c.out_of(c.cod(f)))
      for (MorId h : c.out_of(c.cod(g)))
        if (c.compose(h, c.compose(g, f)) != c.compose(c.compose(h, g), f))
          return {false, "associativity fails at (" + name(h) + ", " + name(g) + ", " + name(f) + ")"};
  return {};
}

/// A finite indexed family of objects; duplicates stay distinct by index.
struct Family {
  std::vector<ObjId> objects;

  std::size_t size() const { return objects.size(); }
  ObjId operator[](std::size_t i) const { return objects[i]; }
  friend auto operator<=>(const Family&, const Family&) = default;
};

/// Matrix X ⇒ Y: entry (i, j) is a finite set of morphisms x_i → y_j.
struct Matrix {
  Family source, target;
  std::vector<std::vector<MorId>> entries;  // row-major, each entry sorted

  const std::vector<MorId>& at(std::size_t i, std::size_t j) const { return entries[i * target.size() + j]; }
  friend bool operator==(const Matrix&, const Matrix&) = default;
};

/// Array X ⇒ Y: exactly one morphism x_i → y_j for every pair.
struct Array {
  Family source, target;
  std::vector<MorId> legs;  // row-major

  MorId at(std::size_t i, std::size_t j) const { return legs[i * target.size() + j]; }
  std::vector<MorId> row(std::size_t i) const {
    return {legs.begin() + static_cast<std::ptrdiff_t>(i * target.size()),
            legs.begin() + static_cast<std::ptrdiff_t>((i + 1) * target.size())};
  }
  friend bool operator==(const Array&, const Array&) = default;
};

/// Functional array X ⇒ Y: each x_i has a single leg x_i → y_{index[i]}.
struct FunctionalArray {
  Family source, target;
  std::vector<std::size_t> index;
  std::vector<MorId> legs;

  std::size_t size() const { return legs.size(); }
  friend bool operator==(const FunctionalArray&, const FunctionalArray&) = default;
};

/// Cocone V ⇒ u, the sources being the domains of the legs.
struct Cocone {
  ObjId apex = 0;
  std::vector<MorId> legs;
  friend auto operator<=>(const Cocone&, const Cocone&) = default;
};

/// Cone from a single vertex to a target family.
struct Cone {
  ObjId vertex = 0;
  std::vector<MorId> legs;
  friend auto operator<=>(const Cone&, const Cone&) = default;
};

inline Family family_of_domains(const FinCategory& c, const std::vector<MorId>& legs) {
  Family f;
  for (MorId m : legs) f.objects.push_back(c.dom(m));
  return f;
}

inline Array as_array(const FinCategory& c, const Cocone& p) {
  return {family_of_domains(c, p.legs), Family{{p.apex}}, p.legs};
}

inline FunctionalArray as_functional(const FinCategory& c, const Cocone& p) {
  return {family_of_domains(c, p.legs), Family{{p.apex}}, std::vector<std::size_t>(p.legs.size(), 0), p.legs};
}

inline Array cones_to_array(const Family& target, const std::vector<Cone>& cones) {
  Array a;
  a.target = target;
  for (const auto& c : cones) {
    a.source.objects.push_back(c.vertex);
    a.legs.insert(a.legs.end(), c.legs.begin(), c.legs.end());
  }
  return a;
}

inline std::vector<Cone> array_rows(const Array& a) {
  std::vector<Cone> out;
  for (std::size_t i = 0; i < a.source.size(); ++i) out.push_back({a.source[i], a.row(i)});
  return out;
}

inline Matrix to_matrix(const Array& a) {
  Matrix m{a.source, a.target, {}};
  for (MorId f : a.legs) m.entries.push_back({f});
  return m;
}

inline Matrix to_matrix(const FunctionalArray& a) {
  Matrix m{a.source, a.target, std::vector<std::vector<MorId>>(a.source.size() * a.target.size())};
  for (std::size_t i = 0; i < a.size(); ++i) m.entries[i * a.target.size() + a.index[i]] = {a.legs[i]};
  return m;
}

inline FunctionalArray identity_array(const FinCategory& c, const Family& x) {
  FunctionalArray id{x, x, {}, {}};
  for (std::size_t i = 0; i < x.size(); ++i) {
    id.index.push_back(i);
    id.legs.push_back(c.identity(x[i]));
  }
  return id;
}

/// Composite G F of matrices F: X ⇒ Y and G: Y ⇒ Z (duplicates collapse).
inline Matrix matrix_compose(const FinCategory& c, const Matrix& f, const Matrix& g) {
  if (f.target != g.source) throw std::invalid_argument("matrix_compose: family mismatch");
  Matrix out{f.source, g.target, std::vector<std::vector<MorId>>(f.source.size() * g.target.size())};
  for (std::size_t i = 0; i < f.source.size(); ++i)
    for (std::size_t k = 0; k < g.target.size(); ++k) {
      auto& cell = out.entries[i * g.target.size() + k];
      for (std::size_t j = 0; j < f.target.size(); ++j)
        for (MorId a : f.at(i, j))
          for (MorId b : g.at(j, k)) cell.push_back(c.compose(b, a));
      std::sort(cell.begin(), cell.end());
      cell.erase(std::unique(cell.begin(), cell.end()), cell.end());
    }
  return out;
}

inline bool is_functional(const Matrix& m) {
  for (std::size_t i = 0; i < m.source.size(); ++i) {
    std::size_t nonempty = 0;
    for (std::size_t j = 0; j < m.target.size(); ++j) {
      if (m.at(i, j).size() > 1) return false;
      nonempty += m.at(i, j).size();
    }
    if (nonempty != 1) return false;
  }
  return true;
}

/// G H for H: X ⇒ Y functional and G: Y ⇒ Z an array.
inline Array compose(const FinCategory& c, const Array& g, const FunctionalArray& h) {
  if (h.target != g.source) throw std::invalid_argument("compose: family mismatch");
  Array out{h.source, g.target, {}};
  for (std::size_t i = 0; i < h.size(); ++i)
    for (std::size_t k = 0; k < g.target.size(); ++k) out.legs.push_back(c.compose(g.at(h.index[i], k), h.legs[i]));
  return out;
}

/// G H for functional arrays H: X ⇒ Y and G: Y ⇒ Z.
inline FunctionalArray compose(const FinCategory& c, const FunctionalArray& g, const FunctionalArray& h) {
  if (h.target != g.source) throw std::invalid_argument("compose: family mismatch");
  FunctionalArray out{h.source, g.target, {}, {}};
  for (std::size_t i = 0; i < h.size(); ++i) {
    out.index.push_back(g.index[h.index[i]]);
    out.legs.push_back(c.compose(g.legs[h.index[i]], h.legs[i]));
  }
  return out;
}

/// Disjoint union of functional arrays over a common target.
inline FunctionalArray disjoint_union(const Family& target, const std::vector<FunctionalArray>& parts) {
  FunctionalArray out{{}, target, {}, {}};
  for (const auto& p : parts) {
    if (p.target != target) throw std::invalid_argument("disjoint_union: target mismatch");
    out.source.objects.insert(out.source.objects.end(), p.source.objects.begin(), p.source.objects.end());
    out.index.insert(out.index.end(), p.index.begin(), p.index.end());
    out.legs.insert(out.legs.end(), p.legs.begin(), p.legs.end());
  }
  return out;
}

/// Morphisms h: x → y with g∘h = f for every pair in the row, i.e. the
/// factorizations of the cone f through the cone g.
inline std::vector<MorId> factorizations(const FinCategory& c, ObjId x, const std::vector<MorId>& f, ObjId y,
                                         const std::vector<MorId>& g) {
  std::vector<MorId> out;
  for (MorId h : c.hom(x, y)) {
    bool ok = true;
    for (std::size_t k = 0; k < f.size() && ok; ++k) ok = c.compose(g[k], h) == f[k];
    if (ok) out.push_back(h);
  }
  return out;
}

/// Witness H with F = G H when F ≤ G, searched exhaustively in canonical order.
inline std::optional<FunctionalArray> refines_witness(const FinCategory& c, const Array& f, const Array& g) {
  if (f.target != g.target) throw std::invalid_argument("refines_witness: arrays have different targets");
  FunctionalArray h{f.source, g.source, {}, {}};
  for (std::size_t i = 0; i < f.source.size(); ++i) {
    const auto row = f.row(i);
    bool found = false;
    for (std::size_t j = 0; j < g.source.size() && !found; ++j) {
      auto hs = factorizations(c, f.source[i], row, g.source[j], g.row(j));
      if (!hs.empty()) {
        h.index.push_back(j);
        h.legs.push_back(hs.front());
        found = true;
      }
    }
    if (!found) return std::nullopt;
  }
  return h;
}

inline bool refines(const FinCategory& c, const Array& f, const Array& g) { return refines_witness(c, f, g).has_value(); }

/// Object and morphism assignment of a functor between finite categories.
struct Functor {
  std::vector<ObjId> objects;
  std::vector<MorId> morphisms;
  friend auto operator<=>(const Functor&, const Functor&) = default;
};

inline std::optional<std::string> functor_violation(const FinCategory& src, const FinCategory& dst, const Functor& f) {
  if (f.objects.size() != src.object_count() || f.morphisms.size() != src.morphism_count())
    return "functor data has the wrong size";
  for (MorId m = 0; m < src.morphism_count(); ++m) {
    const MorId fm = f.morphisms[m];
    if (fm >= dst.morphism_count()) return "morphism " + src.morphism_name(m) + " has no image";
    if (dst.dom(fm) != f.objects[src.dom(m)] || dst.cod(fm) != f.objects[src.cod(m)])
      return "image of " + src.morphism_name(m) + " has the wrong endpoints";
  }
  for (ObjId x = 0; x < src.object_count(); ++x)
    if (f.morphisms[src.identity(x)] != dst.identity(f.objects[x]))
      return "identity of " + src.object_name(x) + " not preserved";
  for (MorId a = 0; a < src.morphism_count(); ++a)
    for (MorId b : src.out_of(src.cod(a)))
      if (f.morphisms[src.compose(b, a)] != dst.compose(f.morphisms[b], f.morphisms[a]))
        return "composite " + src.morphism_name(b) + "." + src.morphism_name(a) + " not preserved";
  return std::nullopt;
}

inline Functor identity_functor(const FinCategory& c) {
  Functor f;
  for (ObjId x = 0; x < c.object_count(); ++x) f.objects.push_back(x);
  for (MorId m = 0; m < c.morphism_count(); ++m) f.morphisms.push_back(m);
  return f;
}

/// All functors src → dst, in lexicographic order of (object map, morphism map).
inline std::vector<Functor> enumerate_functors(const FinCategory& src, const FinCategory& dst) {
  std::vector<Functor> out;
  const auto n = src.object_count(), m = src.morphism_count();
  Functor f;
  f.objects.assign(n, 0);
  f.morphisms.assign(m, kNoMorphism);

  auto consistent_upto = [&](MorId upto) {
    for (MorId a = 0; a <= upto; ++a)
      for (MorId b = 0; b <= upto; ++b) {
        if (src.cod(a) != src.dom(b)) continue;
        const MorId ba = src.compose(b, a);
        if (ba > upto) continue;
        if (f.morphisms[ba] != dst.compose(f.morphisms[b], f.morphisms[a])) return false;
      }
    return true;
  };

  auto assign_morphisms = [&](auto&& self, MorId k) -> void {
    if (k == m) {
      out.push_back(f);
      return;
    }
    if (src.is_identity(k)) {
      f.morphisms[k] = dst.identity(f.objects[src.dom(k)]);
      if (consistent_upto(k)) self(self, k + 1);
      return;
    }
    for (MorId cand : dst.hom(f.objects[src.dom(k)], f.objects[src.cod(k)])) {
      f.morphisms[k] = cand;
      if (consistent_upto(k)) self(self, k + 1);
    }
    f.morphisms[k] = kNoMorphism;
  };

  auto assign_objects = [&](auto&& self, std::size_t k) -> void {
    if (k == n) {
      assign_morphisms(assign_morphisms, 0);
      return;
    }
    for (ObjId y = 0; y < dst.object_count(); ++y) {
      f.objects[k] = static_cast<ObjId>(y);
      self(self, k + 1);
    }
  };
  if (dst.object_count() == 0 && n > 0) return out;
  assign_objects(assign_objects, 0);
  return out;
}

/// A finite diagram: a shape category with a functor into the ambient category.
struct Diagram {
  FinCategory shape;
  Functor map;

  Family family() const { return Family{map.objects}; }
};

inline std::vector<MorId> image(const Functor& f, const std::vector<MorId>& legs) {
  std::vector<MorId> out;
  for (MorId m : legs) out.push_back(f.morphisms[m]);
  return out;
}

/// Checks the cone condition g(δ)∘leg_d = leg_{d'} for every shape morphism δ.
inline bool is_cone_over(const FinCategory& c, const Diagram& d, const std::vector<MorId>& legs) {
  if (legs.size() != d.shape.object_count()) return false;
  for (MorId delta = 0; delta < d.shape.morphism_count(); ++delta) {
    const auto s = d.shape.dom(delta), t = d.shape.cod(delta);
    if (c.compose(d.map.morphisms[delta], legs[s]) != legs[t]) return false;
  }
  return true;
}

inline bool is_array_over(const FinCategory& c, const Diagram& d, const Array& a) {
  if (a.target != d.family()) return false;
  for (std::size_t i = 0; i < a.source.size(); ++i) {
    const auto row = a.row(i);
    for (std::size_t k = 0; k < row.size(); ++k)
      if (c.dom(row[k]) != a.source[i] || c.cod(row[k]) != a.target[k]) return false;
    if (!is_cone_over(c, d, row)) return false;
  }
  return true;
}

/// All cones over the diagram, ordered by vertex and then legs.
inline std::vector<Cone> cones_over(const FinCategory& c, const Diagram& d) {
  std::vector<Cone> out;
  const auto n = d.shape.object_count();
  for (ObjId v = 0; v < c.object_count(); ++v) {
    std::vector<MorId> legs(n, kNoMorphism);
    auto rec = [&](auto&& self, std::size_t k) -> void {
      if (k == n) {
        if (is_cone_over(c, d, legs)) out.push_back({v, legs});
        return;
      }
      for (MorId m : c.hom(v, d.map.objects[k])) {
        legs[k] = m;
        bool ok = true;
        // prune using shape morphisms between already-assigned objects
        for (MorId delta = 0; delta < d.shape.morphism_count() && ok; ++delta) {
          const auto s = d.shape.dom(delta), t = d.shape.cod(delta);
          if (s <= k && t <= k) ok = c.compose(d.map.morphisms[delta], legs[s]) == legs[t];
        }
        if (ok) self(self, k + 1);
      }
      legs[k] = kNoMorphism;
    };
    rec(rec, 0);
  }
  return out;
}

/// Builds the free category on a finite acyclic graph; composite paths are
/// named by joining arrow names with '.', outermost first.
inline FinCategory free_category(const std::vector<std::string>& objects,
                                 const std::vector<std::tuple<std::string, std::string, std::string>>& arrows) {
  struct Path {
    std::string name, dom, cod;
    std::vector<std::size_t> steps;
  };
  std::vector<Path> paths;
  for (std::size_t i = 0; i < arrows.size(); ++i) {
    const auto& [name, s, t] = arrows[i];
    paths.push_back({name, s, t, {i}});
  }
  // extend paths until no new ones; a path longer than the arrow count means a cycle
  for (std::size_t frontier = 0; frontier < paths.size(); ++frontier) {
    if (paths[frontier].steps.size() > arrows.size()) throw CategoryError("free_category: graph has a cycle");
    for (std::size_t i = 0; i < arrows.size(); ++i) {
      const auto& [name, s, t] = arrows[i];
      if (s != paths[frontier].cod) continue;
      Path p = paths[frontier];
      p.name = name + "." + p.name;
      p.cod = t;
      p.steps.push_back(i);
      paths.push_back(std::move(p));
    }
  }
  FinCategory::Builder b;
  for (const auto& o : objects) b.add_object(o);
  for (const auto& p : paths) b.add_morphism(p.name, p.dom, p.cod);
  auto find_path = [&](const std::vector<std::size_t>& steps) -> const Path& {
    for (const auto& p : paths)
      if (p.steps == steps) return p;
    throw CategoryError("free_category: internal path lookup failed");
  };
  for (const auto& f : paths)
    for (const auto& g : paths) {
      if (f.cod != g.dom) continue;
      auto steps = f.steps;
      steps.insert(steps.end(), g.steps.begin(), g.steps.end());
      b.set_composite(g.name, f.name, find_path(steps).name);
    }
  return b.build();
}

/// Builds a diagram whose shape is free on the given arrows, mapping shape
/// objects and arrows to objects and morphisms of c by name.
inline Diagram make_diagram(const FinCategory& c, const std::vector<std::pair<std::string, std::string>>& objects,
                            const std::vector<std::tuple<std::string, std::string, std::string, std::string>>& arrows) {
  std::vector<std::string> names;
  std::map<std::string, std::string> obj_image;
  for (const auto& [shape_obj, target] : objects) {
    names.push_back(shape_obj);
    obj_image[shape_obj] = target;
  }
  std::vector<std::tuple<std::string, std::string, std::string>> shape_arrows;
  std::map<std::string, std::string> arrow_image;
  for (const auto& [name, s, t, target] : arrows) {
    shape_arrows.emplace_back(name, s, t);
    arrow_image[name] = target;
  }
  Diagram d{free_category(names, shape_arrows), {}};
  for (ObjId x = 0; x < d.shape.object_count(); ++x) d.map.objects.push_back(c.object(obj_image.at(d.shape.object_name(x))));
  for (MorId m = 0; m < d.shape.morphism_count(); ++m) {
    const auto& name = d.shape.morphism_name(m);
    if (d.shape.is_identity(m)) {
      d.map.morphisms.push_back(c.identity(d.map.objects[d.shape.dom(m)]));
      continue;
    }
    // composite path "h.g.f" maps to the composite of the images
    MorId acc = kNoMorphism;
    std::string rest = name;
    std::vector<std::string> parts;
    std::size_t pos;
    while ((pos = rest.find('.')) != std::string::npos) {
      parts.push_back(rest.substr(0, pos));
      rest = rest.substr(pos + 1);
    }
    parts.push_back(rest);
    for (auto it = parts.rbegin(); it != parts.rend(); ++it) {
      const MorId img = c.morphism(arrow_image.at(*it));
      acc = acc == kNoMorphism ? img : c.compose(img, acc);
      if (acc == kNoMorphism) throw CategoryError("diagram arrow images are not composable along " + name);
    }
    d.map.morphisms.push_back(acc);
  }
  if (auto v = functor_violation(d.shape, c, d.map)) throw CategoryError("invalid diagram: " + *v);
  return d;
}

/// Diagram given directly by a shape category and functor data.
inline Diagram make_diagram(const FinCategory& c, FinCategory shape, Functor map) {
  if (auto v = functor_violation(shape, c, map)) throw CategoryError("invalid diagram: " + *v);
  return Diagram{std::move(shape), std::move(map)};
}

/// Whether the shape is connected under zigzags (the empty shape is not).
inline bool is_connected(const FinCategory& shape) {
  const auto n = shape.object_count();
  if (n == 0) return false;
  std::vector<bool> seen(n, false);
  std::vector<ObjId> stack{0};
  seen[0] = true;
  while (!stack.empty()) {
    const ObjId x = stack.back();
    stack.pop_back();
    for (MorId m = 0; m < shape.morphism_count(); ++m) {
      ObjId other;
      if (shape.dom(m) == x) other = shape.cod(m);
      else if (shape.cod(m) == x) other = shape.dom(m);
      else continue;
      if (!seen[other]) {
        seen[other] = true;
        stack.push_back(other);
      }
    }
  }
  return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
}

inline std::string describe(const FinCategory& c, const std::vector<MorId>& legs) {
  std::ostringstream os;
  os << "{";
  for (std::size_t i = 0; i < legs.size(); ++i) os << (i ? ", " : "") << c.morphism_name(legs[i]);
  os << "}";
  return os.str();
}

}  // namespace excat
