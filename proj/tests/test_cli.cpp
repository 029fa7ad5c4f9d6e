#include <catch_amalgamated.hpp>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <string>

#include "excat/fixtures.hpp"
#include "excat/siteio.hpp"

using namespace excat;
namespace fx = excat::fixtures;

namespace {

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + EXCAT_BINARY + std::string(" ") + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p);
  std::string out;
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), buf.size(), p)) out += buf.data();
  const int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string site(const std::string& name) { return std::string(EXCAT_SITES) + "/" + name + ".site"; }

std::string parse_error(const std::string& text) {
  try {
    parse_site(text);
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("site files match the fixtures") {
  const std::vector<std::pair<std::string, SaturatedTopology>> pairs{
      {"f1", fx::F1()},       {"f1_empty", fx::F1_empty()}, {"farrow", fx::FARROW()}, {"fforce", fx::FFORCE()},
      {"fsplit", fx::FSPLIT()}, {"fvee", fx::FVEE()},       {"fm3", fx::FM3()}};
  for (const auto& [name, t] : pairs) {
    INFO(name);
    const auto f = load_site(site(name));
    CHECK(f.category == t.category());
    CHECK(f.topology() == t);
  }
}

TEST_CASE("parse and serialize round-trip") {
  for (const auto* name : {"f1", "f1_empty", "farrow", "fforce", "fsplit", "fvee", "fm3"}) {
    INFO(name);
    const auto f = load_site(site(name));
    const auto text = serialize_site(f);
    const auto g = parse_site(text);
    CHECK(g == f);
    CHECK(serialize_site(g) == text);
  }
}

TEST_CASE("parse errors carry line numbers") {
  CHECK(parse_error("[category]\nobjects = a, b\nmor f: a -> c\n") == "line 3: unknown object 'c'");
  CHECK(parse_error("[category]\nobjects = a\n[topology]\narity = one\ncover a = { }\n") == "line 5: empty cover not 1-admissible");
  CHECK(parse_error("[category]\nobjects = a\nfoo = 1\n") == "line 3: unknown key 'foo'");
  CHECK(parse_error("objects = a\n") == "line 1: content outside a section");
  CHECK(parse_error("[category]\nobjects = a\n[topology]\narity = two\n") == "line 4: unknown arity 'two'");
  CHECK(parse_error("[category]\nobjects = a, b\nmor f: a -> b\n[topology]\ncover a = { f }\n") == "line 5: f does not end at a");
  CHECK(parse_error("[category]\nobjects = a\nmor g: a -> a\ncompose g.h = g\n") == "line 4: unknown morphism 'h'");
  // the missing composite names the pair
  CHECK(parse_error("[category]\nobjects = a\nmor g: a -> a\n") == "missing composite g.g");
  // a table that is not associative
  CHECK(parse_error("[category]\nobjects = a\nmor g: a -> a\nmor h: a -> a\n"
                    "compose g.g = h\ncompose g.h = g\ncompose h.g = h\ncompose h.h = h\n")
            .rfind("not a category: associativity", 0) == 0);
}

TEST_CASE("comments and blank lines are ignored") {
  const auto f = parse_site("# header\n\n[category]  # here\nobjects = a, b # two\nmor f: a -> b\n\n[topology]\narity = finitary\ncover b = { f } # forcing\n");
  CHECK(f.topology() == fx::FFORCE());
}

TEST_CASE("cli examples") {
  auto r = run("check subcanonical " + site("fsplit"));
  CHECK(r.code == 0);
  CHECK(r.out == "{\"subcanonical\":true}\n");

  r = run("exhom " + site("f1") + " delta2 delta3 --engine=all");
  CHECK(r.code == 0);
  CHECK(r.out.rfind("{\"count\":9,\"agreement\":true", 0) == 0);

  r = run("validate /nonexistent.site");
  CHECK(r.code == 2);

  FILE* f = std::fopen("broken_cli.site", "w");
  std::fputs("[category]\nobjects = a, b\nmor f: a -> c\n", f);
  std::fclose(f);
  r = run("validate broken_cli.site");
  CHECK(r.code == 2);
  CHECK(r.out == "{\"error\":\"line 3: unknown object 'c'\"}\n");
  std::remove("broken_cli.site");
}

TEST_CASE("cli exit codes") {
  CHECK(run("check subcanonical " + site("fforce")).code == 1);
  CHECK(run("check kary " + site("fvee")).code == 0);
  CHECK(run("check exact " + site("fm3")).code == 0);
  CHECK(run("check exact " + site("f1")).code == 1);
  CHECK(run("check regular " + site("fsplit")).code == 1);
  CHECK(run("check bogus " + site("f1")).code == 2);
  CHECK(run("").code == 2);
  CHECK(run("exhom " + site("f1") + " delta2 delta3 --engine=warp").code == 2);
  CHECK(run("collage " + site("farrow") + " delta:a,b").code == 1);
  CHECK(run("collage " + site("farrow") + " delta:a,q").code == 2);
}

TEST_CASE("cli commands") {
  auto r = run("collage " + site("fsplit") + " '{\"family\":[\"a\"],\"entries\":[[[[\"1_a\",\"1_a\"],[\"1_a\",\"t\"],[\"t\",\"1_a\"]]]]}'");
  CHECK(r.code == 0);
  CHECK(r.out == "{\"collage\":true,\"apex\":\"b\",\"legs\":[\"e\"]}\n");

  r = run("kernel " + site("fsplit") + " '{\"source\":[\"a\"],\"target\":[\"b\"],\"legs\":[[\"e\"]]}'");
  CHECK(r.code == 0);
  CHECK(r.out == "{\"family\":[\"a\"],\"entries\":[[[[\"1_a\",\"1_a\"],[\"1_a\",\"t\"],[\"t\",\"1_a\"]]]]}\n");

  r = run("relhom " + site("farrow") + " a b");
  CHECK(r.out == "{\"count\":2,\"relations\":[[[\"1_a\",\"f\"]],[]]}\n");

  r = run("saturate " + site("fforce"));
  CHECK(r.out == "{\"arity\":\"finitary\",\"covers\":{\"a\":{\"least\":[\"1_a\"],\"sieves\":[[\"1_a\"]]},"
                 "\"b\":{\"least\":[\"f\"],\"sieves\":[[\"1_b\"],[\"f\"]]}}}\n");

  r = run("sheafify " + site("fforce") + " '{\"sizes\":{\"a\":1,\"b\":2},\"restrict\":{\"f\":[0,0]}}'");
  CHECK(r.code == 0);
  CHECK(r.out.find("\"input_is_sheaf\":false") != std::string::npos);
  CHECK(r.out.find("\"sizes\":{\"a\":1,\"b\":1}") != std::string::npos);

  r = run("prelimit " + site("fvee") + " '{\"objects\":[\"x\",\"y\"]}' --strategy=prod_eq");
  CHECK(r.code == 0);
  CHECK(r.out == "{\"strategy\":\"prod_eq\",\"exists\":true,\"cones\":[],\"local_prelimit\":true}\n");

  r = run("morphism " + site("farrow") + " " + site("f1_empty") + " '{\"objects\":{\"a\":\"star\",\"b\":\"star\"},\"morphisms\":{\"f\":\"1_star\"}}'");
  CHECK(r.code == 0);

  r = run("dense " + site("f1") + " " + site("fforce") + " '{\"objects\":{\"star\":\"b\"}}'");
  CHECK(r.code == 1);
  CHECK(r.out == "{\"dense\":false,\"conditions\":[true,false,true,true],\"failures\":[\"\",\"a has no cover from the image\",\"\",\"\"]}\n");

  r = run("dense " + site("f1") + " " + site("fforce") + " '{\"objects\":{\"star\":\"a\"}}'");
  CHECK(r.code == 0);

  for (const auto* e : {"ana", "bimodule", "sheaf"}) {
    r = run("exhom " + site("fforce") + " delta:a delta:b --engine=" + e);
    CHECK(r.out == "{\"engine\":\"" + std::string(e) + "\",\"count\":1}\n");
  }
}

TEST_CASE("bound from the environment") {
  auto r = run("check exact " + site("fm3"), "EXCAT_BOUND=1");
  CHECK(r.out == "{\"exact\":true,\"bound\":1}\n");
  r = run("check exact " + site("fm3") + " --bound=2", "EXCAT_BOUND=1");
  CHECK(r.out == "{\"exact\":true,\"bound\":2}\n");
  CHECK(run("check exact " + site("fm3"), "EXCAT_BOUND=x").code == 2);
}

TEST_CASE("reports are byte-stable") {
  for (const auto& args : {"saturate " + site("fm3"), "exhom " + site("fsplit") + " delta:a delta:b", "check regular " + site("fm3")})
    CHECK(run(args).out == run(args).out);
}
