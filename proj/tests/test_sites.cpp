#include <catch_amalgamated.hpp>

#include "excat/exactchecks.hpp"
#include "excat/fixtures.hpp"
#include "excat/sites.hpp"

using namespace excat;
namespace fx = excat::fixtures;

namespace {

std::vector<fx::Named> sites_with_empty() {
  auto all = fx::all();
  all.push_back({"F1_empty", fx::F1_empty()});
  return all;
}

// The full subcategory of the arrow on one object, with its trivial topology.
SaturatedTopology point_named(const std::string& name) {
  FinCategory::Builder b;
  b.add_object(name);
  return trivial_topology(b.build());
}

Functor inclusion(const FinCategory& d, const std::string& name) {
  const ObjId o = d.object(name);
  return Functor{{o}, {d.identity(o)}};
}

std::vector<Congruence> congruences_upto(const Allegory& al, std::size_t n) {
  std::vector<Congruence> out;
  for (std::size_t k = 1; k <= n; ++k)
    for (const auto& x : detail::families_of_size(al.category(), k))
      if (admits(al.topology().arity(), k))
        for (auto& phi : enumerate_congruences(al, x)) out.push_back(std::move(phi));
  return out;
}

// Preservation of local prelimits, with every cone over the diagram taken as
// the prelimit instead of a minimized one.
bool checklist_all_cones(const SaturatedTopology& tc, const SaturatedTopology& td, const Functor& f) {
  const auto& c = tc.category();
  std::vector<Diagram> ds{empty_diagram()};
  for (ObjId x = 0; x < c.object_count(); ++x)
    for (ObjId y = 0; y < c.object_count(); ++y) ds.push_back(pair_diagram(c, x, y));
  for (MorId g = 0; g < c.morphism_count(); ++g)
    for (MorId h : c.hom(c.dom(g), c.cod(g))) ds.push_back(parallel_diagram(c, g, h));
  for (const auto& d : ds) {
    const auto all = cones_over(c, d);
    if (!is_local_prelimit(td, map_diagram(f, d), map_array(f, cones_to_array(d.family(), all)))) return false;
  }
  return true;
}

// Every element of the sheaf model is locally an image of some (i, α).
bool generators_cover(const SaturatedTopology& t, const SheafModel& m) {
  const auto& c = t.category();
  for (ObjId u = 0; u < c.object_count(); ++u)
    for (std::size_t s = 0; s < m.value().size(u); ++s) {
      Bitset sieve(c.morphism_count());
      for (MorId h : c.into(u)) {
        const auto e = m.value().restrict(h, s);
        for (std::size_t i = 0; i < m.family.size() && !sieve.test(h); ++i)
          for (MorId a : c.hom(c.dom(h), m.family[i]))
            if (m.element(c, i, a) == e) {
              sieve.set(h);
              break;
            }
      }
      if (!t.covers(sieve, u)) return false;
    }
  return true;
}

}  // namespace

TEST_CASE("identity functors") {
  for (const auto& [name, t] : sites_with_empty()) {
    INFO(name);
    const auto id = identity_functor(t.category());
    const auto r = morphism_of_sites_check(t, t, id);
    CHECK(r.ok());
    CHECK(r.failure.empty());
    CHECK(dense_check(t, t, id).ok());
  }
}

TEST_CASE("inclusions into the forcing fixture") {
  const auto ff = fx::FFORCE();
  const auto& d = ff.category();

  const auto pa = point_named("a");
  const auto ia = inclusion(d, "a");
  CHECK(morphism_of_sites_check(pa, ff, ia).ok());
  const auto da = dense_check(pa, ff, ia);
  CHECK(da.ok());

  const auto pb = point_named("b");
  const auto ib = inclusion(d, "b");
  const auto db = dense_check(pb, ff, ib);
  CHECK_FALSE(db.ok());
  CHECK(db.conditions[0]);
  CHECK_FALSE(db.conditions[1]);
  CHECK(db.failures[1] == "a has no cover from the image");
  CHECK(db.conditions[2]);
  CHECK(db.conditions[3]);
}

TEST_CASE("constant functor onto the point with an empty cover") {
  const auto fa = fx::FARROW();
  const auto pe = fx::F1_empty();
  const auto fs = enumerate_functors(fa.category(), pe.category());
  REQUIRE(fs.size() == 1);
  const auto r = morphism_of_sites_check(fa, pe, fs.front());
  CHECK(r.preserves_covers);
  CHECK(r.covering_flat);
  CHECK(r.ok());
  CHECK_FALSE(dense_check(fa, pe, fs.front()).ok());
}

TEST_CASE("non-functors are rejected") {
  const auto fa = fx::FARROW();
  const auto& c = fa.category();
  Functor bad = identity_functor(c);
  bad.morphisms[c.morphism("f")] = c.identity(c.object("a"));
  CHECK_THROWS_AS(morphism_of_sites_check(fa, fa, bad), std::invalid_argument);
  CHECK_THROWS_AS(dense_check(fa, fa, bad), std::invalid_argument);
}

TEST_CASE("morphism criteria agree on all functors between fixtures") {
  std::size_t functors = 0, morphisms = 0, dense = 0;
  for (const auto& [n1, t1] : sites_with_empty())
    for (const auto& [n2, t2] : sites_with_empty())
      for (const auto& f : enumerate_functors(t1.category(), t2.category())) {
        INFO(n1 << " -> " << n2);
        ++functors;
        SiteMorphismReport r;
        REQUIRE_NOTHROW(r = morphism_of_sites_check(t1, t2, f));
        CHECK(r.by_checklist() == r.by_sieves());
        // the choice of prelimit only matters once covers are preserved
        if (r.preserves_covers) CHECK(r.checklist == checklist_all_cones(t1, t2, f));
        morphisms += r.ok();
        const auto dr = dense_check(t1, t2, f);
        dense += dr.ok();
        // dense functors are morphisms of sites between κ-ary sites
        if (dr.ok()) {
          CHECK(r.ok());
          CHECK(check_k_ary(t1, t1.arity()).k_ary);
        }
      }
  CHECK(functors == 261);
  CHECK(morphisms == 81);
  CHECK(dense == 12);
}

TEST_CASE("morphisms of sites carry congruences to congruences") {
  for (const auto& [n1, t1] : sites_with_empty())
    for (const auto& [n2, t2] : sites_with_empty()) {
      const Allegory a1(t1), a2(t2);
      for (const auto& f : enumerate_functors(t1.category(), t2.category())) {
        if (!morphism_of_sites_check(t1, t2, f).ok()) continue;
        INFO(n1 << " -> " << n2);
        for (const auto& phi : congruences_upto(a1, 2)) CHECK(validate_congruence(a2, map_congruence(a1, a2, f, phi)).empty());
      }
    }
}

TEST_CASE("dense inclusion induces bijections on ex-homs") {
  const auto ff = fx::FFORCE();
  const auto pa = point_named("a");
  const auto ia = inclusion(ff.category(), "a");
  const Allegory ac(pa), ad(ff);
  const auto congs = congruences_upto(ac, 2);
  CHECK(congs.size() == 3);
  for (const auto& phi : congs)
    for (const auto& theta : congs) {
      const auto m = induced_ex_hom(ac, ad, ia, phi, theta);
      CHECK(m.bijective());
      CHECK(m.source == m.target);
    }
}

TEST_CASE("dense functors between fixtures induce bijections on ex-homs") {
  for (const auto& [n1, t1] : sites_with_empty())
    for (const auto& [n2, t2] : sites_with_empty()) {
      const Allegory a1(t1), a2(t2);
      for (const auto& f : enumerate_functors(t1.category(), t2.category())) {
        if (!dense_check(t1, t2, f).ok()) continue;
        INFO(n1 << " -> " << n2);
        const auto congs = congruences_upto(a1, 2);
        for (const auto& phi : congs)
          for (const auto& theta : congs) CHECK(induced_ex_hom(a1, a2, f, phi, theta).bijective());
      }
    }
}

TEST_CASE("congruences are covered by representables in the sheaf model") {
  for (const auto& [name, t] : sites_with_empty()) {
    INFO(name);
    const Allegory al(t);
    for (const auto& phi : congruences_upto(al, 2)) CHECK(generators_cover(t, sheaf_model(al, phi)));
  }
}
