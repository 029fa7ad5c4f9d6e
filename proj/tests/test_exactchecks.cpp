#include <catch_amalgamated.hpp>

#include "excat/excompletion.hpp"
#include "excat/exactchecks.hpp"
#include "excat/fixtures.hpp"

using namespace excat;
namespace fx = excat::fixtures;

namespace {

// A poset from its strict order relation (must be transitively closed).
FinCategory poset(const std::vector<std::string>& objs, const std::vector<std::pair<std::string, std::string>>& lt) {
  FinCategory::Builder b;
  for (const auto& o : objs) b.add_object(o);
  for (const auto& [x, y] : lt) b.add_morphism(x + y, x, y);
  for (const auto& [x, y] : lt)
    for (const auto& [y2, z] : lt)
      if (y == y2) b.set_composite(y + z, x + y, x + z);
  return b.build();
}

// The diamond with three atoms, and the pentagon. Neither is distributive.
FinCategory diamond() {
  return poset({"0", "p", "q", "r", "1"}, {{"0", "p"}, {"0", "q"}, {"0", "r"}, {"0", "1"}, {"p", "1"}, {"q", "1"}, {"r", "1"}});
}
FinCategory pentagon() {
  return poset({"0", "a", "b", "c", "1"},
               {{"0", "a"}, {"0", "b"}, {"0", "c"}, {"0", "1"}, {"a", "b"}, {"a", "1"}, {"b", "1"}, {"c", "1"}});
}

std::vector<fx::Named> sites_with_empty() {
  auto all = fx::all();
  all.push_back({"F1_empty", fx::F1_empty()});
  return all;
}

std::vector<Family> families_upto(const FinCategory& c, std::size_t n) {
  std::vector<Family> out;
  for (std::size_t k = 1; k <= n; ++k)
    for (auto& f : detail::families_of_size(c, k)) out.push_back(f);
  return out;
}

}  // namespace

TEST_CASE("subcanonical examples") {
  CHECK(check_subcanonical(fx::FSPLIT()).ok);
  const auto ff = check_subcanonical(fx::FFORCE());
  CHECK_FALSE(ff.ok);
  CHECK(ff.detail == "{f} on b");
  for (const auto& [name, t] : fx::all()) {
    INFO(name);
    CHECK(check_subcanonical(trivial_topology(t.category())).ok);
  }
}

TEST_CASE("generator subcanonicity agrees with the exhaustive check") {
  for (const auto& [name, t] : sites_with_empty()) {
    INFO(name);
    CHECK(check_subcanonical(t).ok == check_subcanonical_exhaustive(t).ok);
    for (auto k : {Arity::ONE, Arity::ZERO_ONE, Arity::FINITARY}) {
      const auto can = canonical_topology(t.category(), k);
      CHECK(check_subcanonical(can).ok);
      CHECK(check_subcanonical_exhaustive(can).ok);
    }
  }
}

TEST_CASE("canonical topology examples") {
  const auto f1 = canonical_topology(fx::terminal(), Arity::FINITARY);
  CHECK(f1.covers(empty_sieve(f1.category()), 0));
  CHECK(f1 == fx::F1_empty());

  const auto arrow = fx::arrow();
  CHECK(canonical_topology(arrow, Arity::ONE) == trivial_topology(arrow, Arity::ONE));

  const auto fs = canonical_topology(fx::split(), Arity::ONE);
  const auto& c = fs.category();
  CHECK(is_covering_family(fs, Cocone{c.object("b"), {c.morphism("e")}}));
}

TEST_CASE("image factorization examples") {
  const auto fs = fx::FSPLIT();
  const auto& c = fs.category();
  const auto a = c.object("a"), b = c.object("b");
  const auto f = image_factorization(fs, Array{Family{{a}}, Family{{b}}, {c.morphism("e")}});
  REQUIRE(f);
  CHECK(f->p == Cocone{b, {c.morphism("e")}});
  CHECK(f->q == Cone{b, {c.identity(b)}});

  // a monic row is its own image
  const auto id = image_factorization(fs, Array{Family{{b}}, Family{{a}}, {c.morphism("s")}});
  REQUIRE(id);
  CHECK(id->p == Cocone{b, {c.identity(b)}});
  CHECK(id->q == Cone{b, {c.morphism("s")}});

  const auto fa = fx::FARROW();
  const auto& ac = fa.category();
  const auto ab = ac.object("b");
  const auto g = image_factorization(fa, Array{Family{{ac.object("a"), ab}}, Family{{ab}}, {ac.morphism("f"), ac.identity(ab)}});
  REQUIRE(g);
  CHECK(g->q == Cone{ab, {ac.identity(ab)}});
  CHECK(g->p == Cocone{ab, {ac.morphism("f"), ac.identity(ab)}});

  // factorizations recompose to the array
  for (const auto& [name, t] : fx::all()) {
    const auto& tc = t.category();
    for (const auto& v : families_upto(tc, 2))
      for (const auto& w : families_upto(tc, 2))
        detail::for_each_array(tc, v, w, [&](const Array& r) {
          const auto h = image_factorization(t, r);
          if (!h) return;
          CHECK(is_covering_family(t, h->p));
          CHECK(is_monic_cone(tc, h->q.vertex, h->q.legs));
          for (std::size_t i = 0; i < v.size(); ++i)
            for (std::size_t j = 0; j < w.size(); ++j) CHECK(tc.compose(h->q.legs[j], h->p.legs[i]) == r.at(i, j));
        });
  }
}

TEST_CASE("regular and exact fixtures") {
  const auto m3 = fx::FM3();
  CHECK(check_regular(m3).ok);
  CHECK(check_exact(m3).ok);
  CHECK(check_exact(fx::F1_empty()).ok);

  const auto ff = check_exact(fx::FFORCE());
  CHECK_FALSE(ff.ok);
  CHECK_FALSE(check_subcanonical(fx::FFORCE()).ok);

  // the point without an empty cover: the empty array has no covering image
  const auto f1 = fx::F1();
  CHECK_FALSE(check_regular(f1).ok);
  CHECK_FALSE(check_exact(f1, 2).ok);
  const Allegory al(f1);
  CHECK_FALSE(find_collage(al, discrete_congruence(al, Family{{0, 0}})));

  for (const auto& [name, t] : sites_with_empty()) {
    INFO(name);
    const auto r = site_report(t);
    if (r.exact.ok) CHECK(r.regular.ok);
    if (r.regular.ok) {
      CHECK(r.subcanonical.ok);
      CHECK(r.k_ary.ok);
      // the topology of a regular site is the canonical one
      CHECK(t == canonical_topology(t.category(), t.arity()));
    }
    if (r.k_ary.ok) CHECK(r.weakly_k_ary.ok);
  }
}

TEST_CASE("three characterizations of regularity agree") {
  std::vector<std::pair<std::string, FinCategory>> cats;
  for (const auto& [name, t] : fx::all()) cats.emplace_back(name, t.category());
  cats.emplace_back("diamond", diamond());
  cats.emplace_back("pentagon", pentagon());
  for (const auto& [name, c] : cats)
    for (auto k : {Arity::ONE, Arity::ZERO_ONE, Arity::FINITARY}) {
      INFO(name << " " << arity_name(k));
      const bool i = check_regular(canonical_topology(c, k), 2).ok;
      const bool iii = check_regular_limits_form(c, k).ok;
      const bool v = check_regular_category_form(c, k).ok;
      CHECK(i == iii);
      CHECK(iii == v);
    }
  // non-distributive lattices are regular but lack stable binary unions
  for (const auto& c : {diamond(), pentagon()}) {
    CHECK(check_regular_category_form(c, Arity::ONE).ok);
    CHECK(check_regular_category_form(c, Arity::ZERO_ONE).ok);
    CHECK_FALSE(check_regular_category_form(c, Arity::FINITARY).ok);
  }
  CHECK(check_regular_category_form(diamond(), Arity::FINITARY).detail == "union of {p1, q1} not stable along r1");
  CHECK_FALSE(check_regular_limits_form(fx::split(), Arity::ONE).ok);
}

TEST_CASE("regular completion membership") {
  for (const auto& [name, t] : fx::all()) {
    INFO(name);
    const Allegory al(t);
    const auto& c = t.category();
    for (ObjId o = 0; o < c.object_count(); ++o) {
      const Family x{{o}};
      const auto d = regular_membership(al, discrete_congruence(al, x));
      REQUIRE(d);
      CHECK(make_kernel(al, *d) == discrete_congruence(al, x));
    }
    for (const auto& x : families_upto(c, 2)) {
      for (const auto& w : families_upto(c, 1))
        detail::for_each_array(c, x, w, [&](const Array& r) { CHECK(regular_membership(al, make_kernel(al, r))); });
    }
  }
  const Allegory f1(fx::F1());
  CHECK_FALSE(regular_membership(f1, discrete_congruence(f1, Family{{0, 0}})));
  // with the empty cover the two points are identified, so the congruence is a kernel again
  const Allegory f1e(fx::F1_empty());
  CHECK(regular_membership(f1e, discrete_congruence(f1e, Family{{0, 0}})));
}

TEST_CASE("membership agrees with a brute-force kernel search") {
  for (const auto& [name, t] : fx::all()) {
    INFO(name);
    const Allegory al(t);
    const auto& c = t.category();
    for (const auto& x : families_upto(c, 2)) {
      std::vector<Congruence> kernels;
      for (const auto& w : families_upto(c, 2))
        detail::for_each_array(c, x, w, [&](const Array& r) { kernels.push_back(make_kernel(al, r)); });
      for (const auto& phi : enumerate_congruences(al, x)) {
        const bool brute = std::find(kernels.begin(), kernels.end(), phi) != kernels.end();
        CHECK(regular_membership(al, phi).has_value() == brute);
      }
    }
  }
}

TEST_CASE("postulated morphisms are realizations") {
  for (const auto& [name, t] : sites_with_empty()) {
    if (!check_subcanonical(t).ok) continue;
    INFO(name);
    const Allegory al(t);
    const auto& c = t.category();
    for (const auto& x : families_upto(c, 2))
      for (const auto& phi : enumerate_congruences(al, x)) {
        const auto col = colim_congruence(al, phi);
        for (ObjId z = 0; z < c.object_count(); ++z) {
          std::vector<std::vector<MorId>> options;
          for (ObjId o : x.objects) options.push_back(c.hom(o, z));
          for_each_choice(options, [&](const std::vector<MorId>& legs) {
            const Cocone f{z, legs};
            const auto alpha = cocone_map(al, col, phi, f);
            if (!alpha) return;
            if (is_collage(al, f, phi)) CHECK(is_realization(c, col.presheaf, z, *alpha));
          });
        }
      }
  }
}

TEST_CASE("yoneda is essentially surjective on exact fixtures") {
  for (const auto& t : {fx::FM3(), fx::F1_empty()}) {
    const Allegory al(t);
    const auto& c = t.category();
    for (const auto& x : families_upto(c, 2)) {
      if (!admits(t.arity(), x.size())) continue;
      for (const auto& phi : enumerate_congruences(al, x)) {
        const auto m = sheaf_model(al, phi);
        bool hit = false;
        for (ObjId z = 0; z < c.object_count() && !hit; ++z)
          hit = isomorphic(c, m.value(), sheaf_model(al, discrete_congruence(al, Family{{z}})).value());
        CHECK(hit);
        CHECK(find_collage(al, phi).has_value());
      }
    }
  }
}
