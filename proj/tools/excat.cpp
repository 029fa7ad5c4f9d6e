// Command-line front end: reads a site file, runs one command, prints a JSON
// report on stdout. Exit codes: 0 success, 1 property false, 2 input error,
// 3 engine disagreement.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "excat/congruence.hpp"
#include "excat/exactchecks.hpp"
#include "excat/excompletion.hpp"
#include "excat/prelimits.hpp"
#include "excat/relalleg.hpp"
#include "excat/sheaf.hpp"
#include "excat/siteio.hpp"
#include "excat/sites.hpp"

using json = nlohmann::ordered_json;
using namespace excat;

namespace {

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Loaded {
  SiteFile file;
  SaturatedTopology topology;
};

Loaded load(const std::string& path) {
  auto f = load_site(path);
  auto t = f.topology();
  return {std::move(f), std::move(t)};
}

json read_json_arg(const std::string& arg) {
  std::string text = arg;
  if (!arg.empty() && arg.front() == '@') {
    std::ifstream in(arg.substr(1));
    if (!in) throw InputError("cannot open " + arg.substr(1));
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError("bad JSON argument: " + std::string(e.what()));
  }
}

ObjId object_of(const FinCategory& c, const json& j) {
  if (!j.is_string()) throw InputError("expected an object name, got " + j.dump());
  const auto name = j.get<std::string>();
  for (ObjId o = 0; o < c.object_count(); ++o)
    if (c.object_name(o) == name) return o;
  throw InputError("unknown object '" + name + "'");
}

MorId morphism_of(const FinCategory& c, const json& j) {
  if (!j.is_string()) throw InputError("expected a morphism name, got " + j.dump());
  const auto name = j.get<std::string>();
  for (MorId m = 0; m < c.morphism_count(); ++m)
    if (c.morphism_name(m) == name) return m;
  throw InputError("unknown morphism '" + name + "'");
}

Family family_of(const FinCategory& c, const json& j) {
  if (!j.is_array()) throw InputError("expected a list of objects");
  Family x;
  for (const auto& o : j) x.objects.push_back(object_of(c, o));
  return x;
}

json names(const FinCategory& c, const std::vector<MorId>& ms) {
  json out = json::array();
  for (MorId m : ms) out.push_back(c.morphism_name(m));
  return out;
}

json family_json(const FinCategory& c, const Family& x) {
  json out = json::array();
  for (ObjId o : x.objects) out.push_back(c.object_name(o));
  return out;
}

json relation_json(const Allegory& al, const RelHom& r) {
  const auto& c = al.category();
  json out = json::array();
  for (const auto& [l, rr] : al.generating_spans(r)) out.push_back({c.morphism_name(l), c.morphism_name(rr)});
  return out;
}

json matrix_json(const Allegory& al, const RelMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.source.size(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.target.size(); ++j) row.push_back(relation_json(al, m.at(i, j)));
    rows.push_back(row);
  }
  return rows;
}

// deltaN, delta:a,b, or a JSON literal {"family": [...], "entries": [[spans]]}.
Congruence congruence_of(const Allegory& al, const std::string& arg) {
  const auto& c = al.category();
  if (arg.rfind("delta:", 0) == 0) {
    Family x;
    std::stringstream ss(arg.substr(6));
    std::string o;
    while (std::getline(ss, o, ',')) x.objects.push_back(object_of(c, o));
    return discrete_congruence(al, x);
  }
  if (arg.rfind("delta", 0) == 0 && arg.size() > 5 && arg.find_first_not_of("0123456789", 5) == std::string::npos) {
    if (c.object_count() == 0) throw InputError("site has no objects");
    return discrete_congruence(al, Family{std::vector<ObjId>(std::stoul(arg.substr(5)), 0)});
  }
  const auto j = read_json_arg(arg);
  if (!j.is_object() || !j.contains("family") || !j.contains("entries")) throw InputError("congruence argument needs 'family' and 'entries'");
  const auto x = family_of(c, j["family"]);
  const auto& e = j["entries"];
  if (!e.is_array() || e.size() != x.size()) throw InputError("entries must be a square matrix over the family");
  RelMatrix m{x, x, {}};
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!e[i].is_array() || e[i].size() != x.size()) throw InputError("entries must be a square matrix over the family");
    for (std::size_t k = 0; k < x.size(); ++k) {
      std::vector<std::pair<MorId, MorId>> spans;
      for (const auto& s : e[i][k]) {
        if (!s.is_array() || s.size() != 2) throw InputError("a span is a pair [left, right]");
        const MorId l = morphism_of(c, s[0]), r = morphism_of(c, s[1]);
        if (c.cod(l) != x[i] || c.cod(r) != x[k] || c.dom(l) != c.dom(r))
          throw InputError("span [" + c.morphism_name(l) + ", " + c.morphism_name(r) + "] is mistyped");
        spans.emplace_back(l, r);
      }
      m.entries.push_back(al.from_spans(x[i], x[k], spans));
    }
  }
  if (auto v = validate_congruence(al, m); !v.empty()) throw InputError("not a congruence: " + v);
  return Congruence{m};
}

Array array_of(const FinCategory& c, const json& j) {
  if (!j.is_object() || !j.contains("source") || !j.contains("target") || !j.contains("legs"))
    throw InputError("array argument needs 'source', 'target' and 'legs'");
  Array a{family_of(c, j["source"]), family_of(c, j["target"]), {}};
  const auto& rows = j["legs"];
  if (!rows.is_array() || rows.size() != a.source.size()) throw InputError("one row of legs per source object");
  for (std::size_t i = 0; i < a.source.size(); ++i) {
    if (!rows[i].is_array() || rows[i].size() != a.target.size()) throw InputError("one leg per target object");
    for (std::size_t k = 0; k < a.target.size(); ++k) {
      const MorId m = morphism_of(c, rows[i][k]);
      if (c.dom(m) != a.source[i] || c.cod(m) != a.target[k]) throw InputError(c.morphism_name(m) + " is mistyped in the array");
      a.legs.push_back(m);
    }
  }
  return a;
}

Diagram diagram_of(const FinCategory& c, const json& j) {
  if (!j.is_object() || !j.contains("objects")) throw InputError("diagram argument needs 'objects'");
  std::vector<ObjId> objs;
  for (const auto& o : j["objects"]) objs.push_back(object_of(c, o));
  std::vector<std::tuple<std::size_t, std::size_t, MorId>> arrows;
  if (j.contains("arrows"))
    for (const auto& a : j["arrows"]) {
      if (!a.is_array() || a.size() != 3 || !a[0].is_number_unsigned() || !a[1].is_number_unsigned())
        throw InputError("an arrow is [source index, target index, morphism]");
      const auto s = a[0].get<std::size_t>(), t = a[1].get<std::size_t>();
      if (s >= objs.size() || t >= objs.size()) throw InputError("arrow index out of range");
      const MorId m = morphism_of(c, a[2]);
      if (c.dom(m) != objs[s] || c.cod(m) != objs[t]) throw InputError(c.morphism_name(m) + " is mistyped in the diagram");
      if (s >= t) throw InputError("diagram arrows must go from lower to higher index");
      arrows.emplace_back(s, t, m);
    }
  return free_diagram(c, objs, arrows);
}

Presheaf presheaf_of(const FinCategory& c, const json& j) {
  if (!j.is_object() || !j.contains("sizes")) throw InputError("presheaf argument needs 'sizes'");
  Presheaf p;
  p.sizes.assign(c.object_count(), 0);
  for (ObjId o = 0; o < c.object_count(); ++o) {
    if (!j["sizes"].contains(c.object_name(o))) throw InputError("no size for object '" + c.object_name(o) + "'");
    p.sizes[o] = j["sizes"][c.object_name(o)].get<std::size_t>();
  }
  p.restriction.resize(c.morphism_count());
  const json none = json::object();
  const auto& r = j.contains("restrict") ? j["restrict"] : none;
  for (MorId m = 0; m < c.morphism_count(); ++m) {
    if (c.identity(c.dom(m)) == m) {
      for (std::size_t s = 0; s < p.size(c.cod(m)); ++s) p.restriction[m].push_back(s);
      continue;
    }
    if (!r.contains(c.morphism_name(m))) throw InputError("no restriction along '" + c.morphism_name(m) + "'");
    p.restriction[m] = r[c.morphism_name(m)].get<std::vector<std::size_t>>();
  }
  if (auto v = presheaf_violation(c, p); !v.empty()) throw InputError("not a presheaf: " + v);
  return p;
}

Functor functor_of(const FinCategory& c, const FinCategory& d, const json& j) {
  if (!j.is_object() || !j.contains("objects")) throw InputError("functor argument needs 'objects'");
  Functor f;
  for (ObjId o = 0; o < c.object_count(); ++o) {
    if (!j["objects"].contains(c.object_name(o))) throw InputError("no image for object '" + c.object_name(o) + "'");
    f.objects.push_back(object_of(d, j["objects"][c.object_name(o)]));
  }
  const json none = json::object();
  const auto& ms = j.contains("morphisms") ? j["morphisms"] : none;
  for (MorId m = 0; m < c.morphism_count(); ++m) {
    if (c.identity(c.dom(m)) == m) {
      f.morphisms.push_back(d.identity(f.objects[c.dom(m)]));
      continue;
    }
    if (!ms.contains(c.morphism_name(m))) throw InputError("no image for morphism '" + c.morphism_name(m) + "'");
    f.morphisms.push_back(morphism_of(d, ms[c.morphism_name(m)]));
  }
  if (auto v = functor_violation(c, d, f)) throw InputError("not a functor: " + *v);
  return f;
}

json presheaf_json(const FinCategory& c, const Presheaf& p) {
  json sizes = json::object(), restr = json::object();
  for (ObjId o = 0; o < c.object_count(); ++o) sizes[c.object_name(o)] = p.size(o);
  for (MorId m = 0; m < c.morphism_count(); ++m)
    if (c.identity(c.dom(m)) != m) restr[c.morphism_name(m)] = p.restriction[m];
  return {{"sizes", sizes}, {"restrict", restr}};
}

std::size_t default_bound() {
  if (const char* b = std::getenv("EXCAT_BOUND")) {
    try {
      return std::stoul(b);
    } catch (const std::exception&) {
      throw InputError("EXCAT_BOUND must be a non-negative integer");
    }
  }
  return 2;
}

int emit(const json& j, int code) {
  std::cout << j.dump() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact completions of finite sites"};
  app.require_subcommand(1);

  std::string site, site2, arg1, arg2, kind, engine = "all", strategy = "minimize";
  std::size_t bound = 0;

  auto* validate = app.add_subcommand("validate", "parse and validate a site file");
  validate->add_option("site", site)->required();

  auto* saturate_cmd = app.add_subcommand("saturate", "list the covering sieves of each object");
  saturate_cmd->add_option("site", site)->required();

  auto* prelimit = app.add_subcommand("prelimit", "local prelimit of a diagram");
  prelimit->add_option("site", site)->required();
  prelimit->add_option("diagram", arg1, "JSON {objects, arrows} or @file")->required();
  prelimit->add_option("--strategy", strategy, "all_cones|prod_eq|pb_eq_connected|minimize");

  auto* relhom = app.add_subcommand("relhom", "closed relations x -> y");
  relhom->add_option("site", site)->required();
  relhom->add_option("x", arg1)->required();
  relhom->add_option("y", arg2)->required();

  auto* kernel = app.add_subcommand("kernel", "kernel congruence of an array");
  kernel->add_option("site", site)->required();
  kernel->add_option("array", arg1, "JSON {source, target, legs} or @file")->required();

  auto* collage = app.add_subcommand("collage", "search for a collage of a congruence");
  collage->add_option("site", site)->required();
  collage->add_option("congruence", arg1)->required();

  auto* exhom = app.add_subcommand("exhom", "morphisms between congruences in the exact completion");
  exhom->add_option("site", site)->required();
  exhom->add_option("source", arg1)->required();
  exhom->add_option("target", arg2)->required();
  exhom->add_option("--engine", engine, "ana|bimodule|sheaf|all")->check(CLI::IsMember({"ana", "bimodule", "sheaf", "all"}));

  auto* check = app.add_subcommand("check", "site property check");
  check->add_option("property", kind, "regular|exact|subcanonical|kary")->required()->check(
      CLI::IsMember({"regular", "exact", "subcanonical", "kary"}));
  check->add_option("site", site)->required();
  check->add_option("--bound", bound, "family-size bound (default EXCAT_BOUND or 2)");

  auto* sheafify_cmd = app.add_subcommand("sheafify", "sheafify a presheaf");
  sheafify_cmd->add_option("site", site)->required();
  sheafify_cmd->add_option("presheaf", arg1, "JSON {sizes, restrict} or @file")->required();

  auto* morphism = app.add_subcommand("morphism", "is a functor a morphism of sites");
  morphism->add_option("site", site)->required();
  morphism->add_option("site2", site2)->required();
  morphism->add_option("functor", arg1, "JSON {objects, morphisms} or @file")->required();

  auto* dense = app.add_subcommand("dense", "density conditions for a functor");
  dense->add_option("site", site)->required();
  dense->add_option("site2", site2)->required();
  dense->add_option("functor", arg1, "JSON {objects, morphisms} or @file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    const auto l = load(site);
    const auto& t = l.topology;
    const auto& c = t.category();

    if (*validate) {
      std::size_t sieves = 0;
      for (ObjId u = 0; u < c.object_count(); ++u) sieves += t.covering_sieves(u).size();
      return emit({{"valid", true},
                   {"objects", c.object_count()},
                   {"morphisms", c.morphism_count()},
                   {"arity", arity_name(t.arity())},
                   {"covering_sieves", sieves}},
                  0);
    }

    if (*saturate_cmd) {
      json covers = json::object();
      for (ObjId u = 0; u < c.object_count(); ++u) {
        json list = json::array();
        for (const auto& s : t.covering_sieves(u)) list.push_back(names(c, minimal_generators(c, u, s)));
        covers[c.object_name(u)] = {{"least", names(c, t.least_cover_generators(u))}, {"sieves", list}};
      }
      return emit({{"arity", arity_name(t.arity())}, {"covers", covers}}, 0);
    }

    if (*prelimit) {
      const auto s = parse_strategy(strategy);
      if (!s) throw InputError("unknown strategy '" + strategy + "'");
      const auto d = diagram_of(c, read_json_arg(arg1));
      const auto lp = local_prelimit(t, d, t.arity(), *s);
      if (!lp) return emit({{"strategy", strategy}, {"exists", false}}, 1);
      json cones = json::array();
      for (const auto& row : array_rows(lp->cones)) cones.push_back({{"vertex", c.object_name(row.vertex)}, {"legs", names(c, row.legs)}});
      return emit({{"strategy", strategy}, {"exists", true}, {"cones", cones}, {"local_prelimit", is_local_prelimit(t, d, lp->cones)}}, 0);
    }

    const Allegory al(t);

    if (*relhom) {
      const ObjId x = object_of(c, json(arg1)), y = object_of(c, json(arg2));
      json rels = json::array();
      for (const auto& r : al.all_relhoms(x, y)) rels.push_back(relation_json(al, r));
      return emit({{"count", rels.size()}, {"relations", rels}}, 0);
    }

    if (*kernel) {
      const auto a = array_of(c, read_json_arg(arg1));
      const auto k = make_kernel(al, a);
      return emit({{"family", family_json(c, k.family())}, {"entries", matrix_json(al, k.matrix)}}, 0);
    }

    if (*collage) {
      const auto phi = congruence_of(al, arg1);
      const auto col = find_collage(al, phi);
      if (!col) return emit({{"collage", false}}, 1);
      return emit({{"collage", true}, {"apex", c.object_name(col->apex)}, {"legs", names(c, col->legs)}}, 0);
    }

    if (*exhom) {
      const auto phi = congruence_of(al, arg1);
      const auto theta = congruence_of(al, arg2);
      if (engine == "all") {
        const auto r = compare_engines(al, phi, theta);
        const bool agree = r.agree();
        return emit({{"count", r.ana},
                     {"agreement", agree},
                     {"engines", {{"ana", r.ana}, {"bimodule", r.bimodule}, {"sheaf", r.sheaf}}}},
                    agree ? 0 : 3);
      }
      return emit({{"engine", engine}, {"count", ex_hom_count(al, phi, theta, parse_engine(engine))}}, 0);
    }

    if (*check) {
      const std::size_t b = check->count("--bound") ? bound : default_bound();
      if (kind == "subcanonical") {
        const auto r = check_subcanonical(t);
        json j{{"subcanonical", r.ok}};
        if (!r.ok) j["counterexample"] = r.detail;
        return emit(j, r.ok ? 0 : 1);
      }
      if (kind == "kary") {
        const auto r = check_k_ary(t, t.arity());
        json j{{"arity", arity_name(t.arity())}, {"weakly_k_ary", r.weakly_k_ary}, {"k_ary", r.k_ary}};
        if (!r.k_ary) j["failure"] = r.failure;
        return emit(j, r.k_ary ? 0 : 1);
      }
      const auto r = kind == "regular" ? check_regular(t, b) : check_exact(t, b);
      json j{{kind, r.ok}, {"bound", b}};
      if (!r.ok) j["counterexample"] = r.detail;
      return emit(j, r.ok ? 0 : 1);
    }

    if (*sheafify_cmd) {
      const auto p = presheaf_of(c, read_json_arg(arg1));
      const auto sh = sheafify(t, p);
      json unit = json::object();
      for (ObjId o = 0; o < c.object_count(); ++o) unit[c.object_name(o)] = sh.unit[o];
      return emit({{"input_is_sheaf", is_sheaf(t, p)}, {"sheaf", presheaf_json(c, sh.value)}, {"unit", unit}}, 0);
    }

    if (*morphism || *dense) {
      const auto l2 = load(site2);
      const auto f = functor_of(c, l2.topology.category(), read_json_arg(arg1));
      if (*morphism) {
        const auto r = morphism_of_sites_check(t, l2.topology, f);
        json j{{"morphism", r.ok()}, {"preserves_covers", r.preserves_covers}, {"checklist", r.checklist}, {"covering_flat", r.covering_flat}};
        if (!r.failure.empty()) j["failure"] = r.failure;
        return emit(j, r.ok() ? 0 : 1);
      }
      const auto r = dense_check(t, l2.topology, f);
      json failures = json::array();
      for (const auto& s : r.failures) failures.push_back(s);
      return emit({{"dense", r.ok()}, {"conditions", r.conditions}, {"failures", failures}}, r.ok() ? 0 : 1);
    }
  } catch (const ResourceError& e) {
    return emit({{"error", std::string("resource bound exceeded: ") + e.what()}}, 2);
  } catch (const std::exception& e) {
    return emit({{"error", e.what()}}, 2);
  }
  return 2;
}
