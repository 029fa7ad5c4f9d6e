#pragma once

// The allegory of relations of a finite site. A morphism x ⇝ y is stored as a
// closed set of spans x ← w → y: downward closed under precomposition and
// containing every span that locally factors through it. Locally equivalent
// span-sets then have the same closed form, so hom-posets are finite lattices
// with decidable equality.

#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "excat/bitset.hpp"
#include "excat/fincat.hpp"
#include "excat/topology.hpp"

namespace excat {

struct RelHom {
  ObjId x = 0, y = 0;
  Bitset spans;  // over the span universe of (x, y)

  friend bool operator==(const RelHom&, const RelHom&) = default;
  friend auto operator<=>(const RelHom&, const RelHom&) = default;
};

/// Matrix of relations X ⇝ Y.
struct RelMatrix {
  Family source, target;
  std::vector<RelHom> entries;  // row-major

  const RelHom& at(std::size_t i, std::size_t j) const { return entries[i * target.size() + j]; }
  RelHom& at(std::size_t i, std::size_t j) { return entries[i * target.size() + j]; }
  friend bool operator==(const RelMatrix&, const RelMatrix&) = default;
  friend auto operator<=>(const RelMatrix&, const RelMatrix&) = default;
};

class Allegory {
 public:
  explicit Allegory(SaturatedTopology t) : top_(std::move(t)), cache_(std::make_shared<Cache>()) {
    const auto& c = top_.category();
    const auto n = c.object_count(), m = c.morphism_count();
    universes_.resize(n * n);
    for (ObjId x = 0; x < n; ++x)
      for (ObjId y = 0; y < n; ++y) {
        auto& u = universes_[x * n + y];
        u.index.assign(m * m, kNone);
        for (ObjId w = 0; w < n; ++w)
          for (MorId l : c.hom(w, x))
            for (MorId r : c.hom(w, y)) {
              u.index[l * m + r] = static_cast<std::uint32_t>(u.spans.size());
              u.spans.emplace_back(l, r);
            }
      }
  }

  const SaturatedTopology& topology() const { return top_; }
  const FinCategory& category() const { return top_.category(); }

  const std::vector<std::pair<MorId, MorId>>& universe(ObjId x, ObjId y) const { return uni(x, y).spans; }

  std::uint32_t span_index(ObjId x, ObjId y, MorId l, MorId r) const {
    const auto i = uni(x, y).index[l * category().morphism_count() + r];
    if (i == kNone) throw std::invalid_argument("span legs do not match the endpoints");
    return i;
  }

  RelHom raw(ObjId x, ObjId y) const { return {x, y, Bitset(universe(x, y).size())}; }

  /// Least closed superset.
  RelHom closure(RelHom s) const {
    const auto& c = category();
    const auto& u = uni(s.x, s.y);
    const auto m = c.morphism_count();
    // downward closure
    for (auto i : s.spans.indices()) {
      const auto [l, r] = u.spans[i];
      for (MorId h : c.into(c.dom(l))) s.spans.set(u.index[c.compose(l, h) * m + c.compose(r, h)]);
    }
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t i = 0; i < u.spans.size(); ++i) {
        if (s.spans.test(i)) continue;
        const auto [l, r] = u.spans[i];
        const ObjId w = c.dom(l);
        Bitset sieve(m);
        for (MorId h : c.into(w))
          if (s.spans.test(u.index[c.compose(l, h) * m + c.compose(r, h)])) sieve.set(h);
        if (top_.covers(sieve, w)) {
          s.spans.set(i);
          changed = true;
        }
      }
    }
    return s;
  }

  RelHom from_spans(ObjId x, ObjId y, const std::vector<std::pair<MorId, MorId>>& spans) const {
    RelHom s = raw(x, y);
    for (const auto& [l, r] : spans) s.spans.set(span_index(x, y, l, r));
    return closure(std::move(s));
  }

  RelHom bottom(ObjId x, ObjId y) const { return closure(raw(x, y)); }

  RelHom top(ObjId x, ObjId y) const {
    RelHom s = raw(x, y);
    s.spans.set_all();
    return s;
  }

  RelHom identity(ObjId x) const { return loose(category().identity(x)); }

  /// The relation x ⇝ y given by f: x → y, i.e. the closure of (1_x, f).
  RelHom loose(MorId f) const {
    const auto& c = category();
    return from_spans(c.dom(f), c.cod(f), {{c.identity(c.dom(f)), f}});
  }

  RelHom inv(const RelHom& a) const {
    RelHom b = raw(a.y, a.x);
    const auto& u = uni(a.x, a.y);
    a.spans.for_each([&](std::size_t i) { b.spans.set(span_index(a.y, a.x, u.spans[i].second, u.spans[i].first)); });
    return b;
  }

  /// Diagrammatic composite a;b : x ⇝ z of a: x ⇝ y and b: y ⇝ z. Because
  /// closed sets are downward closed, pairing spans along a shared middle leg
  /// already yields every commuting span pair up to closure.
  RelHom compose(const RelHom& a, const RelHom& b) const {
    if (a.y != b.x) throw std::invalid_argument("rel_compose: endpoint mismatch");
    const auto& ua = uni(a.x, a.y);
    const auto& ub = uni(b.x, b.y);
    std::map<MorId, std::vector<MorId>> by_left;
    b.spans.for_each([&](std::size_t i) { by_left[ub.spans[i].first].push_back(ub.spans[i].second); });
    RelHom out = raw(a.x, b.y);
    a.spans.for_each([&](std::size_t i) {
      const auto [l, mid] = ua.spans[i];
      auto it = by_left.find(mid);
      if (it == by_left.end()) return;
      for (MorId r : it->second) out.spans.set(span_index(a.x, b.y, l, r));
    });
    return closure(std::move(out));
  }

  RelHom meet(const RelHom& a, const RelHom& b) const {
    check_same(a, b);
    return {a.x, a.y, a.spans & b.spans};
  }

  RelHom join(const RelHom& a, const RelHom& b) const {
    check_same(a, b);
    return closure({a.x, a.y, a.spans | b.spans});
  }

  bool leq(const RelHom& a, const RelHom& b) const {
    check_same(a, b);
    return a.spans.is_subset_of(b.spans);
  }

  bool is_closed(const RelHom& a) const { return closure(a) == a; }

  /// Left adjoint test: 1 ≤ φ;φᵒ and φᵒ;φ ≤ 1.
  bool is_map(const RelHom& a) const {
    const auto ai = inv(a);
    return leq(identity(a.x), compose(a, ai)) && leq(compose(ai, a), identity(a.y));
  }

  /// ⋁_v p_vᵒ ; p_v equals 1_u.
  bool covering_via_allegory(const Cocone& p) const {
    RelHom acc = bottom(p.apex, p.apex);
    for (MorId leg : p.legs) {
      const auto l = loose(leg);
      acc = join(acc, compose(inv(l), l));
    }
    return acc == identity(p.apex);
  }

  /// Every closed relation x ⇝ y, in Bitset order.
  const std::vector<RelHom>& all_relhoms(ObjId x, ObjId y) const {
    std::lock_guard<std::mutex> lock(cache_->mutex);
    const auto key = std::make_pair(x, y);
    auto it = cache_->relhoms.find(key);
    if (it != cache_->relhoms.end()) return it->second;
    const auto n = universe(x, y).size();
    std::set<RelHom> seen{bottom(x, y)};
    std::vector<RelHom> frontier{bottom(x, y)};
    while (!frontier.empty()) {
      std::vector<RelHom> next;
      for (const auto& s : frontier)
        for (std::size_t i = 0; i < n; ++i) {
          if (s.spans.test(i)) continue;
          RelHom t = s;
          t.spans.set(i);
          t = closure(std::move(t));
          if (seen.insert(t).second) next.push_back(std::move(t));
        }
      frontier = std::move(next);
    }
    return cache_->relhoms.emplace(key, std::vector<RelHom>(seen.begin(), seen.end())).first->second;
  }

  std::vector<std::pair<MorId, MorId>> spans_of(const RelHom& a) const {
    std::vector<std::pair<MorId, MorId>> out;
    const auto& u = uni(a.x, a.y);
    a.spans.for_each([&](std::size_t i) { out.push_back(u.spans[i]); });
    return out;
  }

  /// Spans not obtained from another member by precomposition with a
  /// non-invertible morphism; they generate the set under closure.
  std::vector<std::pair<MorId, MorId>> generating_spans(const RelHom& a) const {
    const auto& c = category();
    auto all = spans_of(a);
    std::vector<std::pair<MorId, MorId>> out;
    for (const auto& [l, r] : all) {
      bool below = false;
      for (const auto& [l2, r2] : all) {
        if (l2 == l && r2 == r) continue;
        for (MorId h : c.hom(c.dom(l), c.dom(l2)))
          if (c.compose(l2, h) == l && c.compose(r2, h) == r && !is_iso(c, h)) {
            // skip only if the other span is not itself below this one
            bool mutual = false;
            for (MorId k : c.hom(c.dom(l2), c.dom(l)))
              if (c.compose(l, k) == l2 && c.compose(r, k) == r2) mutual = true;
            if (!mutual) below = true;
          }
        if (below) break;
      }
      if (!below) out.emplace_back(l, r);
    }
    return out;
  }

  std::string describe(const RelHom& a) const {
    const auto& c = category();
    std::ostringstream os;
    os << "{";
    bool first = true;
    for (const auto& [l, r] : spans_of(a)) {
      os << (first ? "" : ", ") << "(" << c.morphism_name(l) << ", " << c.morphism_name(r) << ")";
      first = false;
    }
    os << "}";
    return os.str();
  }

  // -------------------------------------------------------------------------
  // Matrices

  RelMatrix matrix_bottom(const Family& x, const Family& y) const {
    RelMatrix m{x, y, {}};
    for (std::size_t i = 0; i < x.size(); ++i)
      for (std::size_t j = 0; j < y.size(); ++j) m.entries.push_back(bottom(x[i], y[j]));
    return m;
  }

  /// Identity matrix on a family: identities on the diagonal, bottom elsewhere.
  RelMatrix matrix_identity(const Family& x) const {
    RelMatrix m = matrix_bottom(x, x);
    for (std::size_t i = 0; i < x.size(); ++i) m.at(i, i) = identity(x[i]);
    return m;
  }

  /// Loose relations of a functional array.
  RelMatrix matrix_loose(const FunctionalArray& f) const {
    RelMatrix m = matrix_bottom(f.source, f.target);
    for (std::size_t i = 0; i < f.size(); ++i) m.at(i, f.index[i]) = loose(f.legs[i]);
    return m;
  }

  RelMatrix matrix_compose(const RelMatrix& a, const RelMatrix& b) const {
    if (a.target != b.source) throw std::invalid_argument("matrix compose: family mismatch");
    RelMatrix out{a.source, b.target, {}};
    for (std::size_t i = 0; i < a.source.size(); ++i)
      for (std::size_t k = 0; k < b.target.size(); ++k) {
        RelHom acc = raw(a.source[i], b.target[k]);
        for (std::size_t j = 0; j < a.target.size(); ++j) acc.spans |= compose(a.at(i, j), b.at(j, k)).spans;
        out.entries.push_back(closure(std::move(acc)));
      }
    return out;
  }

  RelMatrix matrix_inv(const RelMatrix& a) const {
    RelMatrix out{a.target, a.source, {}};
    for (std::size_t j = 0; j < a.target.size(); ++j)
      for (std::size_t i = 0; i < a.source.size(); ++i) out.entries.push_back(inv(a.at(i, j)));
    return out;
  }

  RelMatrix matrix_meet(const RelMatrix& a, const RelMatrix& b) const {
    check_same(a, b);
    RelMatrix out{a.source, a.target, {}};
    for (std::size_t k = 0; k < a.entries.size(); ++k) out.entries.push_back(meet(a.entries[k], b.entries[k]));
    return out;
  }

  RelMatrix matrix_join(const RelMatrix& a, const RelMatrix& b) const {
    check_same(a, b);
    RelMatrix out{a.source, a.target, {}};
    for (std::size_t k = 0; k < a.entries.size(); ++k) out.entries.push_back(join(a.entries[k], b.entries[k]));
    return out;
  }

  bool matrix_leq(const RelMatrix& a, const RelMatrix& b) const {
    check_same(a, b);
    for (std::size_t k = 0; k < a.entries.size(); ++k)
      if (!leq(a.entries[k], b.entries[k])) return false;
    return true;
  }

 private:
  static constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

  struct Universe {
    std::vector<std::pair<MorId, MorId>> spans;
    std::vector<std::uint32_t> index;  // l * |mor| + r
  };

  struct Cache {
    std::mutex mutex;
    std::map<std::pair<ObjId, ObjId>, std::vector<RelHom>> relhoms;
  };

  const Universe& uni(ObjId x, ObjId y) const { return universes_[x * category().object_count() + y]; }

  static void check_same(const RelHom& a, const RelHom& b) {
    if (a.x != b.x || a.y != b.y) throw std::invalid_argument("relations have different endpoints");
  }
  static void check_same(const RelMatrix& a, const RelMatrix& b) {
    if (a.source != b.source || a.target != b.target) throw std::invalid_argument("relation matrices have different families");
  }

  SaturatedTopology top_;
  std::vector<Universe> universes_;
  std::shared_ptr<Cache> cache_;
};

}  // namespace excat
