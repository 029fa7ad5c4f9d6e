#pragma once

// Small sites used throughout the tests, the acceptance suite and the CLI.

#include <string>
#include <vector>

#include "excat/fincat.hpp"
#include "excat/topology.hpp"

namespace excat::fixtures {

inline FinCategory terminal() {
  FinCategory::Builder b;
  b.add_object("star");
  return b.build();
}

inline FinCategory arrow() {
  FinCategory::Builder b;
  b.add_object("a").add_object("b").add_morphism("f", "a", "b");
  return b.build();
}

inline FinCategory split() {
  FinCategory::Builder b;
  b.add_object("a").add_object("b");
  b.add_morphism("e", "a", "b").add_morphism("s", "b", "a").add_morphism("t", "a", "a");
  b.set_composite("e", "s", "1_b").set_composite("s", "e", "t").set_composite("t", "t", "t");
  b.set_composite("e", "t", "e").set_composite("t", "s", "s");
  return b.build();
}

inline FinCategory vee() {
  FinCategory::Builder b;
  b.add_object("x").add_object("y").add_object("z");
  b.add_morphism("xz", "x", "z").add_morphism("yz", "y", "z");
  return b.build();
}

inline FinCategory m3() {
  FinCategory::Builder b;
  b.add_object("bot").add_object("p").add_object("q").add_object("top");
  b.add_morphism("bp", "bot", "p").add_morphism("bq", "bot", "q").add_morphism("bt", "bot", "top");
  b.add_morphism("pt", "p", "top").add_morphism("qt", "q", "top");
  b.set_composite("pt", "bp", "bt").set_composite("qt", "bq", "bt");
  return b.build();
}

inline SaturatedTopology F1() { return trivial_topology(terminal()); }

/// The point with the empty family declared covering.
inline SaturatedTopology F1_empty() {
  const auto c = terminal();
  return saturate(c, {Cocone{c.object("star"), {}}}, Arity::FINITARY);
}

inline SaturatedTopology FARROW() { return trivial_topology(arrow()); }

inline SaturatedTopology FFORCE() {
  const auto c = arrow();
  return saturate(c, {Cocone{c.object("b"), {c.morphism("f")}}}, Arity::FINITARY);
}

inline SaturatedTopology FSPLIT() {
  const auto c = split();
  return saturate(c, {Cocone{c.object("b"), {c.morphism("e")}}}, Arity::FINITARY);
}

inline SaturatedTopology FVEE() { return trivial_topology(vee()); }

inline SaturatedTopology FM3() { return trivial_topology(m3(), Arity::ONE); }

struct Named {
  std::string name;
  SaturatedTopology site;
};

inline std::vector<Named> all() {
  return {{"F1", F1()}, {"FARROW", FARROW()}, {"FFORCE", FFORCE()},
          {"FSPLIT", FSPLIT()}, {"FVEE", FVEE()}, {"FM3", FM3()}};
}

}  // namespace excat::fixtures
