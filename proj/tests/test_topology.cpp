#include <catch_amalgamated.hpp>

#include "excat/fixtures.hpp"
#include "excat/topology.hpp"
#include "oracles.hpp"

using namespace excat;
namespace fx = excat::fixtures;

namespace {

oracle::Sieve to_set(const Bitset& b) {
  oracle::Sieve s;
  b.for_each([&](std::size_t i) { s.insert(static_cast<MorId>(i)); });
  return s;
}

oracle::SieveSets as_sets(const SaturatedTopology& t) {
  oracle::SieveSets out(t.category().object_count());
  for (ObjId u = 0; u < out.size(); ++u)
    for (const auto& s : t.covering_sieves(u)) out[u].insert(to_set(s));
  return out;
}

std::vector<fx::Named> sites_with_empty_cover() {
  auto v = fx::all();
  v.push_back({"F1_empty", fx::F1_empty()});
  return v;
}

}  // namespace

TEST_CASE("saturation matches the powerset oracle") {
  for (const auto& [name, t] : sites_with_empty_cover()) {
    INFO(name);
    std::vector<std::pair<ObjId, std::vector<MorId>>> gens;
    for (const auto& g : t.generators()) gens.emplace_back(g.apex, g.legs);
    CHECK(as_sets(t) == oracle::saturate(t.category(), gens));
    CHECK(oracle::axiom_violation(t.category(), as_sets(t)).empty());
  }
}

TEST_CASE("saturation is minimal") {
  for (const auto& [name, t] : sites_with_empty_cover()) {
    INFO(name);
    const auto& c = t.category();
    const auto full = as_sets(t);
    for (ObjId u = 0; u < c.object_count(); ++u)
      for (const auto& s : full[u]) {
        bool forced = s == oracle::Sieve(c.into(u).begin(), c.into(u).end());
        for (const auto& g : t.generators())
          if (g.apex == u && oracle::generate(c, g.legs) == s) forced = true;
        if (forced) continue;
        auto smaller = full;
        smaller[u].erase(s);
        CHECK_FALSE(oracle::axiom_violation(c, smaller).empty());
      }
  }
}

TEST_CASE("saturate examples") {
  const auto farrow = fx::FARROW();
  for (ObjId u = 0; u < 2; ++u) {
    REQUIRE(farrow.covering_sieves(u).size() == 1);
    CHECK(farrow.covering_sieves(u)[0] == maximal_sieve(farrow.category(), u));
  }

  const auto ff = fx::FFORCE();
  const auto& c = ff.category();
  const auto a = c.object("a"), b = c.object("b");
  std::set<oracle::Sieve> on_b;
  for (const auto& s : ff.covering_sieves(b)) on_b.insert(to_set(s));
  CHECK(on_b == std::set<oracle::Sieve>{{c.morphism("f")}, {c.morphism("f"), c.identity(b)}});
  CHECK(ff.covering_sieves(a).size() == 1);

  const auto pt = fx::F1_empty();
  CHECK(pt.covering_sieves(0).size() == 2);
  CHECK(pt.covers(empty_sieve(pt.category()), 0));

  CHECK_THROWS_WITH(saturate(fx::terminal(), {Cocone{0, {}}}, Arity::ONE),
                    Catch::Matchers::ContainsSubstring("empty cover not 1-admissible"));
  CHECK_NOTHROW(saturate(fx::terminal(), {Cocone{0, {}}}, Arity::ZERO_ONE));
}

TEST_CASE("covering families") {
  for (const auto& [name, t] : fx::all())
    for (ObjId u = 0; u < t.category().object_count(); ++u)
      CHECK(is_covering_family(t, Cocone{u, {t.category().identity(u)}}));

  const auto ff = fx::FFORCE();
  CHECK(is_covering_family(ff, Cocone{ff.category().object("b"), {ff.category().morphism("f")}}));
  const auto fa = fx::FARROW();
  CHECK_FALSE(is_covering_family(fa, Cocone{fa.category().object("b"), {fa.category().morphism("f")}}));
}

TEST_CASE("covering sieves are closed under intersection") {
  for (const auto& [name, t] : sites_with_empty_cover())
    for (ObjId u = 0; u < t.category().object_count(); ++u)
      for (const auto& r : t.covering_sieves(u))
        for (const auto& s : t.covering_sieves(u)) CHECK(t.covers(r & s, u));
}

TEST_CASE("covering is monotone under refinement") {
  for (const auto& [name, t] : sites_with_empty_cover()) {
    const auto& c = t.category();
    for (ObjId u = 0; u < c.object_count(); ++u) {
      const auto cocones = leg_sets(c, u, Arity::FINITARY);
      for (const auto& p : cocones)
        for (const auto& q : cocones)
          if (is_covering_family(t, p) && refines(c, as_array(c, p), as_array(c, q))) CHECK(is_covering_family(t, q));
    }
  }
}

TEST_CASE("pullback covers") {
  const auto ff = fx::FFORCE();
  const auto& c = ff.category();
  const Cocone p{c.object("b"), {c.morphism("f")}};
  const auto q = pullback_cover(ff, p, c.morphism("f"));
  CHECK(q.cover.legs == std::vector<MorId>{c.identity(c.object("a"))});
  CHECK(is_covering_family(ff, q.cover));

  const auto same = pullback_cover(ff, p, c.identity(c.object("b")));
  CHECK(generated_sieve(c, same.cover) == generated_sieve(c, p));

  const auto fs = fx::FSPLIT();
  const auto& s = fs.category();
  const auto pe = pullback_cover(fs, Cocone{s.object("b"), {s.morphism("e")}}, s.identity(s.object("b")));
  CHECK(std::count(pe.cover.legs.begin(), pe.cover.legs.end(), s.identity(s.object("b"))) == 1);

  CHECK_THROWS_AS(pullback_cover(fx::FARROW(), Cocone{1, {fx::arrow().morphism("f")}}, fx::arrow().identity(1)), TopologyError);
}

TEST_CASE("epi classes of example cocones") {
  for (const auto& [name, t] : fx::all())
    for (ObjId u = 0; u < t.category().object_count(); ++u) {
      const auto f = classify_cocone(t, Cocone{u, {t.category().identity(u)}});
      CHECK(f == EpiFlags{true, true, true, true, true});
    }

  const auto fs = fx::FSPLIT();
  const auto e = classify_cocone(fs, Cocone{fs.category().object("b"), {fs.category().morphism("e")}});
  CHECK(e.effective);
  CHECK(e.universally_effective);

  const auto ff = fx::FFORCE();
  const auto f = classify_cocone(ff, Cocone{ff.category().object("b"), {ff.category().morphism("f")}});
  CHECK(f.epic);
  CHECK_FALSE(f.effective);
}

TEST_CASE("effective implies strong implies extremal implies epic") {
  for (const auto& [name, t] : fx::all()) {
    const auto& c = t.category();
    const auto univ = universally_effective_class(c, Arity::FINITARY);
    for (ObjId u = 0; u < c.object_count(); ++u)
      for (const auto& p : leg_sets(c, u, Arity::FINITARY)) {
        INFO(name << " " << describe(c, p.legs));
        const auto fl = classify_cocone(c, p, univ);
        if (fl.universally_effective) CHECK(fl.effective);
        if (fl.effective) CHECK(fl.strong);
        if (fl.strong) CHECK(fl.extremal);
        if (fl.extremal) CHECK(fl.epic);
      }
  }
}

TEST_CASE("weak arity witnesses") {
  for (const auto& [name, t] : fx::all()) CHECK(check_weakly_k_ary(t, Arity::FINITARY));
  CHECK(check_weakly_k_ary(fx::FFORCE(), Arity::ONE));
  CHECK_FALSE(check_weakly_k_ary(fx::F1_empty(), Arity::ONE));
  CHECK(check_weakly_k_ary(fx::F1_empty(), Arity::ZERO_ONE));
  const auto ff = fx::FFORCE();
  for (ObjId u = 0; u < 2; ++u)
    for (std::size_t i = 0; i < ff.covering_sieves(u).size(); ++i) CHECK(ff.witness(u, i).has_value());
}

TEST_CASE("least covers") {
  const auto ff = fx::FFORCE();
  const auto& c = ff.category();
  CHECK(ff.least_cover_generators(c.object("b")) == std::vector<MorId>{c.morphism("f")});
  const auto fs = fx::FSPLIT();
  // {e} generates the maximal sieve on b
  CHECK(fs.least_cover(fs.category().object("b")) == maximal_sieve(fs.category(), fs.category().object("b")));
}
