#pragma once

// Congruences on finite families: matrices of closed relations that are
// reflexive, symmetric and transitive. Kernels of arrays and collages.

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "excat/fincat.hpp"
#include "excat/relalleg.hpp"
#include "excat/topology.hpp"

namespace excat {

struct Congruence {
  RelMatrix matrix;  // square, entry (i, j) : x_i ⇝ x_j

  const Family& family() const { return matrix.source; }
  std::size_t size() const { return matrix.source.size(); }
  const RelHom& at(std::size_t i, std::size_t j) const { return matrix.at(i, j); }
  friend bool operator==(const Congruence& a, const Congruence& b) {
    return a.matrix.source == b.matrix.source && a.matrix.entries == b.matrix.entries;
  }
};

/// Empty string when Φ is a congruence, otherwise the first violated axiom.
inline std::string validate_congruence(const Allegory& al, const RelMatrix& m) {
  const auto n = m.source.size();
  if (m.target != m.source || m.entries.size() != n * n) return "shape";
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const auto& e = m.at(i, j);
      if (e.x != m.source[i] || e.y != m.source[j] || !al.is_closed(e)) return "entry (" + std::to_string(i) + ", " + std::to_string(j) + ")";
    }
  for (std::size_t i = 0; i < n; ++i)
    if (!al.leq(al.identity(m.source[i]), m.at(i, i))) return "reflexivity at " + std::to_string(i);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (al.inv(m.at(i, j)) != m.at(j, i)) return "symmetry at (" + std::to_string(i) + ", " + std::to_string(j) + ")";
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        if (!al.leq(al.compose(m.at(i, j), m.at(j, k)), m.at(i, k)))
          return "transitivity at (" + std::to_string(i) + ", " + std::to_string(j) + ", " + std::to_string(k) + ")";
  return {};
}

inline std::string validate_congruence(const Allegory& al, const Congruence& c) { return validate_congruence(al, c.matrix); }

/// Checked construction.
inline Congruence make_congruence(const Allegory& al, RelMatrix m) {
  const auto err = validate_congruence(al, m);
  if (!err.empty()) throw std::invalid_argument("not a congruence: " + err);
  return Congruence{std::move(m)};
}

/// Δ_X.
inline Congruence discrete_congruence(const Allegory& al, const Family& x) { return Congruence{al.matrix_identity(x)}; }

/// F*Θ: entry (i, j) is f_i ; Θ(f(i), f(j)) ; f_jᵒ.
inline Congruence pullback_congruence(const Allegory& al, const FunctionalArray& f, const Congruence& theta) {
  if (f.target != theta.family()) throw std::invalid_argument("pullback: family mismatch");
  RelMatrix m{f.source, f.source, {}};
  for (std::size_t i = 0; i < f.size(); ++i)
    for (std::size_t j = 0; j < f.size(); ++j)
      m.entries.push_back(al.compose(al.compose(al.loose(f.legs[i]), theta.at(f.index[i], f.index[j])), al.inv(al.loose(f.legs[j]))));
  return Congruence{std::move(m)};
}

inline Congruence meet_congruence(const Allegory& al, const std::vector<Congruence>& list) {
  if (list.empty()) throw std::invalid_argument("meet of no congruences");
  RelMatrix m = list.front().matrix;
  for (std::size_t k = 1; k < list.size(); ++k) {
    if (list[k].family() != list.front().family()) throw std::invalid_argument("meet: family mismatch");
    m = al.matrix_meet(m, list[k].matrix);
  }
  return Congruence{std::move(m)};
}

/// Kernel of an array X ⇒ U: the closure of the span pairs equalized by
/// every column.
inline Congruence make_kernel(const Allegory& al, const Array& p) {
  const auto& c = al.category();
  const auto& x = p.source;
  RelMatrix m{x, x, {}};
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j) {
      RelHom r = al.raw(x[i], x[j]);
      const auto& uni = al.universe(x[i], x[j]);
      for (std::size_t s = 0; s < uni.size(); ++s) {
        bool eq = true;
        for (std::size_t u = 0; u < p.target.size() && eq; ++u)
          eq = c.compose(p.at(i, u), uni[s].first) == c.compose(p.at(j, u), uni[s].second);
        if (eq) r.spans.set(s);
      }
      m.entries.push_back(al.closure(std::move(r)));
    }
  return Congruence{std::move(m)};
}

/// Kernel of a functional array: p_i ; p_jᵒ on equal indices, bottom elsewhere.
inline Congruence make_kernel(const Allegory& al, const FunctionalArray& p) {
  RelMatrix m{p.source, p.source, {}};
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < p.size(); ++j)
      m.entries.push_back(p.index[i] == p.index[j] ? al.compose(al.loose(p.legs[i]), al.inv(al.loose(p.legs[j])))
                                                   : al.bottom(p.source[i], p.source[j]));
  return Congruence{std::move(m)};
}

inline Congruence make_kernel(const Allegory& al, const Cocone& p) { return make_kernel(al, as_array(al.category(), p)); }

/// F is a collage of Φ when Φ = F_• ; F^• and ⋁ F^• ; F_• = 1_w.
inline bool is_collage(const Allegory& al, const Cocone& f, const Congruence& phi) {
  const auto& c = al.category();
  if (f.legs.size() != phi.size()) return false;
  for (std::size_t i = 0; i < f.legs.size(); ++i)
    if (c.dom(f.legs[i]) != phi.family()[i] || c.cod(f.legs[i]) != f.apex) return false;
  return al.covering_via_allegory(f) && make_kernel(al, f) == phi;
}

/// First collage in object order, then lexicographic leg order.
inline std::optional<Cocone> find_collage(const Allegory& al, const Congruence& phi) {
  const auto& c = al.category();
  for (ObjId w = 0; w < c.object_count(); ++w) {
    std::vector<std::vector<MorId>> options;
    for (ObjId x : phi.family().objects) options.push_back(c.hom(x, w));
    std::optional<Cocone> hit;
    for_each_choice(options, [&](const std::vector<MorId>& legs) {
      if (hit) return;
      Cocone f{w, legs};
      if (is_collage(al, f, phi)) hit = std::move(f);
    });
    if (hit) return hit;
  }
  return std::nullopt;
}

/// Every congruence on a family, by backtracking over the upper triangle.
/// Throws once more than `limit` congruences have been found.
inline std::vector<Congruence> enumerate_congruences(const Allegory& al, const Family& x, std::size_t limit = 100000) {
  const auto n = x.size();
  std::vector<std::pair<std::size_t, std::size_t>> cells;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) cells.emplace_back(i, j);

  std::vector<std::vector<RelHom>> options;
  for (const auto& [i, j] : cells) {
    std::vector<RelHom> opts;
    for (const auto& r : al.all_relhoms(x[i], x[j])) {
      if (i == j && (!al.leq(al.identity(x[i]), r) || al.inv(r) != r)) continue;
      opts.push_back(r);
    }
    options.push_back(std::move(opts));
  }

  RelMatrix m = al.matrix_bottom(x, x);
  std::vector<bool> set(n * n, false);
  std::vector<Congruence> out;
  // checks every transitivity triple whose three cells are all assigned
  auto consistent = [&](std::size_t a, std::size_t b) {
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = 0; q < n; ++q) {
          if (!(p == a || p == b || q == a || q == b || k == a || k == b)) continue;
          if (!set[p * n + k] || !set[k * n + q] || !set[p * n + q]) continue;
          if (!al.leq(al.compose(m.at(p, k), m.at(k, q)), m.at(p, q))) return false;
        }
    return true;
  };
  std::function<void(std::size_t)> go = [&](std::size_t idx) {
    if (idx == cells.size()) {
      if (out.size() >= limit) throw std::runtime_error("enumerate_congruences: bound exceeded");
      out.push_back(Congruence{m});
      return;
    }
    const auto [i, j] = cells[idx];
    for (const auto& r : options[idx]) {
      m.at(i, j) = r;
      m.at(j, i) = al.inv(r);
      set[i * n + j] = set[j * n + i] = true;
      if (consistent(i, j)) go(idx + 1);
      set[i * n + j] = set[j * n + i] = false;
    }
  };
  go(0);
  return out;
}

inline std::string describe(const Allegory& al, const Congruence& phi) {
  std::string s = "[";
  for (std::size_t i = 0; i < phi.size(); ++i) {
    if (i) s += "; ";
    for (std::size_t j = 0; j < phi.size(); ++j) s += (j ? " " : "") + al.describe(phi.at(i, j));
  }
  return s + "]";
}

}  // namespace excat
