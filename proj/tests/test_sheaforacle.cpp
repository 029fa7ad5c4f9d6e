#include <catch_amalgamated.hpp>

#include "excat/fixtures.hpp"
#include "excat/sheaf.hpp"

using namespace excat;
namespace fx = excat::fixtures;

namespace {

std::vector<fx::Named> sites() {
  auto v = fx::all();
  v.push_back({"F1_empty", fx::F1_empty()});
  return v;
}

// A stock of presheaves: representables, constants, and colimits of the
// congruences on one- and two-object families.
std::vector<Presheaf> stock(const SaturatedTopology& t) {
  const auto& c = t.category();
  const Allegory al(t);
  std::vector<Presheaf> out;
  for (ObjId x = 0; x < c.object_count(); ++x) out.push_back(representable(c, x));
  for (std::size_t n = 0; n <= 2; ++n) out.push_back(constant_presheaf(c, n));
  for (ObjId x = 0; x < c.object_count(); ++x)
    for (ObjId y = x; y < c.object_count(); ++y)
      for (const auto& phi : enumerate_congruences(al, Family{{x, y}})) out.push_back(colim_congruence(al, phi).presheaf);
  return out;
}

bool unit_natural(const FinCategory& c, const Presheaf& f, const UnitPresheaf& u) {
  for (MorId h = 0; h < c.morphism_count(); ++h)
    for (std::size_t s = 0; s < f.size(c.cod(h)); ++s)
      if (u.unit[c.dom(h)][f.restrict(h, s)] != u.value.restrict(h, u.unit[c.cod(h)][s])) return false;
  return true;
}

}  // namespace

TEST_CASE("representables on subcanonical fixtures are sheaves") {
  for (const auto& name : {"F1", "FARROW", "FSPLIT", "FVEE", "FM3"})
    for (const auto& [n, t] : fx::all()) {
      if (n != name) continue;
      for (ObjId x = 0; x < t.category().object_count(); ++x) CHECK(is_sheaf(t, representable(t.category(), x)));
    }
}

TEST_CASE("sheaf examples on the forcing fixture") {
  const auto ff = fx::FFORCE();
  const auto& c = ff.category();
  const auto a = c.object("a"), b = c.object("b");
  // y(a) has no element over b to amalgamate the family on {f}
  const auto fail = sheaf_failure(ff, representable(c, a));
  REQUIRE(fail);
  CHECK(fail->object == b);
  CHECK(fail->amalgamations == 0);
  CHECK(is_sheaf(ff, representable(c, b)));
  CHECK(is_sheaf(ff, constant_presheaf(c, 2)));

  Presheaf two_one{{0, 0}, {}};
  two_one.sizes[a] = 1;
  two_one.sizes[b] = 2;
  two_one.restriction.resize(c.morphism_count());
  two_one.restriction[c.identity(a)] = {0};
  two_one.restriction[c.identity(b)] = {0, 1};
  two_one.restriction[c.morphism("f")] = {0, 0};
  REQUIRE(presheaf_violation(c, two_one).empty());
  const auto f2 = sheaf_failure(ff, two_one);
  REQUIRE(f2);
  CHECK(f2->amalgamations == 2);

  const auto sa = sheafify(ff, representable(c, a)).value;
  const auto sb = sheafify(ff, representable(c, b)).value;
  CHECK(sa.sizes == std::vector<std::size_t>{1, 1});
  CHECK(isomorphic(c, sa, sb));
  CHECK(natural_transformations(c, sa, sb).size() == 1);
}

TEST_CASE("the empty cover forces singletons") {
  const auto pe = fx::F1_empty();
  for (const auto& f : stock(pe)) CHECK(sheafify(pe, f).value.sizes == std::vector<std::size_t>{1});
  CHECK(sheafify(pe, constant_presheaf(pe.category(), 0)).value.sizes == std::vector<std::size_t>{1});
}

TEST_CASE("sheafification") {
  for (const auto& [name, t] : sites()) {
    INFO(name);
    const auto& c = t.category();
    for (const auto& f : stock(t)) {
      REQUIRE(presheaf_violation(c, f).empty());
      const auto once = plus_construction(t, f);
      CHECK(presheaf_violation(c, once.value).empty());
      CHECK(unit_natural(c, f, once));
      const auto s = sheafify(t, f);
      CHECK(presheaf_violation(c, s.value).empty());
      CHECK(is_sheaf(t, s.value));
      CHECK(unit_natural(c, f, s));
      // idempotent, with a bijective unit on sheaves
      const auto again = sheafify(t, s.value);
      CHECK(again.value == s.value);
      for (ObjId u = 0; u < c.object_count(); ++u) {
        auto img = again.unit[u];
        std::sort(img.begin(), img.end());
        CHECK(std::adjacent_find(img.begin(), img.end()) == img.end());
        CHECK(img.size() == s.value.size(u));
      }
      if (is_sheaf(t, f)) CHECK(isomorphic(c, f, s.value));
    }
  }
}

TEST_CASE("sheafification is universal") {
  for (const auto& [name, t] : sites()) {
    const auto& c = t.category();
    std::vector<Presheaf> sheaves;
    for (const auto& f : stock(t))
      if (is_sheaf(t, f)) sheaves.push_back(f);
    for (const auto& f : stock(t)) {
      const auto s = sheafify(t, f);
      for (const auto& g : sheaves) {
        // maps F → G correspond to maps aF → G by precomposing the unit
        const auto direct = natural_transformations(c, f, g);
        std::set<NatTrans> restricted;
        for (const auto& a : natural_transformations(c, s.value, g)) {
          NatTrans r(c.object_count());
          for (ObjId u = 0; u < c.object_count(); ++u)
            for (std::size_t e = 0; e < f.size(u); ++e) r[u].push_back(a[u][s.unit[u][e]]);
          restricted.insert(r);
        }
        CHECK(restricted == std::set<NatTrans>(direct.begin(), direct.end()));
      }
    }
  }
}

TEST_CASE("colimits of congruences") {
  for (const auto& [name, t] : sites()) {
    const Allegory al(t);
    const auto& c = t.category();
    for (ObjId x = 0; x < c.object_count(); ++x)
      CHECK(colim_congruence(al, discrete_congruence(al, Family{{x}})).presheaf == representable(c, x));
  }
  const Allegory p(fx::F1());
  CHECK(colim_congruence(p, discrete_congruence(p, Family{{0, 0}})).presheaf == constant_presheaf(p.category(), 2));

  const auto fs = fx::FSPLIT();
  const Allegory al(fs);
  const auto& c = al.category();
  const auto k = make_kernel(al, Cocone{c.object("b"), {c.morphism("e")}});
  const auto col = colim_congruence(al, k);
  CHECK(col.of(0, c.identity(c.object("a"))) == col.of(0, c.morphism("t")));
  CHECK(isomorphic(c, sheafify(fs, col.presheaf).value, representable(c, c.object("b"))));
}

TEST_CASE("the relation of a closed congruence is already an equivalence") {
  // the colimit uses the generated equivalence; with closed entries the
  // literal relation is transitive, so nothing is added
  for (const auto& [name, t] : sites()) {
    const Allegory al(t);
    const auto& c = t.category();
    for (ObjId x = 0; x < c.object_count(); ++x)
      for (ObjId y = x; y < c.object_count(); ++y)
        for (const auto& phi : enumerate_congruences(al, Family{{x, y}})) {
          const auto col = colim_congruence(al, phi);
          for (ObjId w = 0; w < c.object_count(); ++w)
            for (std::size_t i1 = 0; i1 < 2; ++i1)
              for (std::size_t i2 = 0; i2 < 2; ++i2)
                for (MorId a1 : c.hom(w, phi.family()[i1]))
                  for (MorId a2 : c.hom(w, phi.family()[i2])) {
                    const bool lit = phi.at(i1, i2).spans.test(al.span_index(phi.family()[i1], phi.family()[i2], a1, a2));
                    CHECK(lit == (col.of(i1, a1) == col.of(i2, a2)));
                  }
        }
  }
}

TEST_CASE("natural transformations") {
  const auto p = fx::F1();
  const auto& c = p.category();
  CHECK(natural_transformations(c, constant_presheaf(c, 2), constant_presheaf(c, 3)).size() == 9);
  CHECK(natural_transformations(c, constant_presheaf(c, 0), constant_presheaf(c, 3)).size() == 1);
  CHECK(natural_transformations(c, constant_presheaf(c, 2), constant_presheaf(c, 0)).empty());
  for (const auto& [name, t] : sites())
    for (const auto& f : stock(t)) {
      const auto all = natural_transformations(t.category(), f, f);
      NatTrans id(t.category().object_count());
      for (ObjId u = 0; u < id.size(); ++u)
        for (std::size_t s = 0; s < f.size(u); ++s) id[u].push_back(s);
      CHECK(std::find(all.begin(), all.end(), id) != all.end());
    }
  // yoneda: maps out of a representable are elements at its object
  for (const auto& [name, t] : sites()) {
    const auto& cc = t.category();
    for (ObjId x = 0; x < cc.object_count(); ++x)
      for (const auto& f : stock(t)) CHECK(natural_transformations(cc, representable(cc, x), f).size() == f.size(x));
  }
}
