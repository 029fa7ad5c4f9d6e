#pragma once

// Brute-force reference computations written independently of the library
// algorithms. They work on plain std::set data and are only meant for the
// tiny fixture categories.

#include <map>
#include <set>
#include <vector>

#include "excat/fincat.hpp"

namespace oracle {

using excat::FinCategory;
using excat::MorId;
using excat::ObjId;

using Sieve = std::set<MorId>;
using SieveSets = std::vector<std::set<Sieve>>;  // per object

/// Subsets of morphisms into u that are closed under precomposition, by
/// filtering every subset.
inline std::vector<Sieve> sieves_on(const FinCategory& c, ObjId u) {
  const auto& in = c.into(u);
  std::vector<Sieve> out;
  for (unsigned mask = 0; mask < (1U << in.size()); ++mask) {
    Sieve s;
    for (std::size_t i = 0; i < in.size(); ++i)
      if (mask >> i & 1U) s.insert(in[i]);
    bool closed = true;
    for (MorId f : s)
      for (MorId g : c.into(c.dom(f)))
        if (!s.count(c.compose(f, g))) closed = false;
    if (closed) out.push_back(s);
  }
  return out;
}

inline Sieve pull(const FinCategory& c, MorId f, const Sieve& r) {
  Sieve s;
  for (MorId g : c.into(c.dom(f)))
    if (r.count(c.compose(f, g))) s.insert(g);
  return s;
}

inline Sieve generate(const FinCategory& c, const std::vector<MorId>& legs) {
  Sieve s;
  for (MorId p : legs)
    for (MorId g : c.into(c.dom(p))) s.insert(c.compose(p, g));
  return s;
}

inline bool subset(const Sieve& a, const Sieve& b) {
  for (MorId m : a)
    if (!b.count(m)) return false;
  return true;
}

/// Which axiom (if any) a per-object collection of sieves violates.
inline std::string axiom_violation(const FinCategory& c, const SieveSets& cov) {
  for (ObjId u = 0; u < c.object_count(); ++u) {
    Sieve max(c.into(u).begin(), c.into(u).end());
    if (!cov[u].count(max)) return "maximal";
    for (const auto& r : cov[u])
      for (MorId f : c.into(u))
        if (!cov[c.dom(f)].count(pull(c, f, r))) return "pullback";
    for (const auto& s : sieves_on(c, u)) {
      if (cov[u].count(s)) continue;
      for (const auto& r : cov[u]) {
        if (subset(r, s)) return "upward";
        bool local = true;
        for (MorId f : r)
          if (!cov[c.dom(f)].count(pull(c, f, s))) local = false;
        if (local) return "local character";
      }
    }
  }
  return "";
}

/// Least collection satisfying the axioms: iterate the rules as monotone
/// operators on the full powerset of sieves.
inline SieveSets saturate(const FinCategory& c, const std::vector<std::pair<ObjId, std::vector<MorId>>>& gens) {
  SieveSets cov(c.object_count());
  for (ObjId u = 0; u < c.object_count(); ++u) cov[u].insert(Sieve(c.into(u).begin(), c.into(u).end()));
  for (const auto& [u, legs] : gens) cov[u].insert(generate(c, legs));
  for (;;) {
    SieveSets next = cov;
    for (ObjId u = 0; u < c.object_count(); ++u) {
      for (const auto& r : cov[u])
        for (MorId f : c.into(u)) next[c.dom(f)].insert(pull(c, f, r));
      for (const auto& s : sieves_on(c, u))
        for (const auto& r : cov[u]) {
          bool local = true;
          for (MorId f : r)
            if (!cov[c.dom(f)].count(pull(c, f, s))) local = false;
          if (local || subset(r, s)) next[u].insert(s);
        }
    }
    if (next == cov) return cov;
    cov = std::move(next);
  }
}

}  // namespace oracle
