#pragma once

// Text format for finite sites.
//
//   [category]
//   objects = a, b
//   mor f: a -> b
//   compose g.f = h
//   [topology]
//   arity = one | zero_one | finitary
//   cover b = { f, g }
//
// Identities are implicit and named 1_<object>. Every composable pair of
// non-identity morphisms needs a compose line. '#' starts a comment.

#include <algorithm>
#include <cctype>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "excat/fincat.hpp"
#include "excat/topology.hpp"

namespace excat {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct SiteFile {
  FinCategory category;
  Arity arity = Arity::FINITARY;
  std::vector<Cocone> covers;

  SaturatedTopology topology() const { return saturate(category, covers, arity); }
  friend bool operator==(const SiteFile&, const SiteFile&) = default;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    out.emplace_back(trim(s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  for (char ch : s)
    if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '\'')) return false;
  return true;
}

}  // namespace detail

inline SiteFile parse_site(std::string_view text) {
  using detail::trim;
  enum class Section { none, category, topology } section = Section::none;

  struct Mor {
    std::string name, dom, cod;
  };
  struct Comp {
    std::string g, f, h;
    std::size_t line;
  };
  struct Cov {
    std::string apex;
    std::vector<std::string> legs;
    std::size_t line;
  };
  std::vector<std::string> objects;
  std::vector<Mor> mors;
  std::vector<Comp> comps;
  std::vector<Cov> covs;
  std::optional<Arity> arity;
  bool saw_objects = false;

  auto has_object = [&](const std::string& o) { return std::find(objects.begin(), objects.end(), o) != objects.end(); };
  auto find_mor = [&](const std::string& m) -> const Mor* {
    for (const auto& x : mors)
      if (x.name == m) return &x;
    return nullptr;
  };

  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++lineno;
    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    const auto line = trim(raw);
    if (line.empty()) continue;

    if (line == "[category]") {
      section = Section::category;
      continue;
    }
    if (line == "[topology]") {
      section = Section::topology;
      continue;
    }
    if (line.front() == '[') throw ParseError(lineno, "unknown section " + std::string(line));
    if (section == Section::none) throw ParseError(lineno, "content outside a section");

    const auto sp = line.find_first_of(" \t=");
    const std::string key(line.substr(0, sp));
    const auto rest = sp == std::string_view::npos ? std::string_view{} : trim(line.substr(sp));

    if (section == Section::category && key == "objects") {
      if (saw_objects) throw ParseError(lineno, "objects declared twice");
      if (rest.empty() || rest.front() != '=') throw ParseError(lineno, "expected 'objects = ...'");
      saw_objects = true;
      for (auto& o : detail::split_list(rest.substr(1))) {
        if (!detail::is_identifier(o)) throw ParseError(lineno, "bad object name '" + o + "'");
        if (has_object(o)) throw ParseError(lineno, "duplicate object '" + o + "'");
        objects.push_back(std::move(o));
      }
    } else if (section == Section::category && key == "mor") {
      const auto colon = rest.find(':');
      const auto arrow = rest.find("->");
      if (colon == std::string_view::npos || arrow == std::string_view::npos || arrow < colon)
        throw ParseError(lineno, "expected 'mor f: a -> b'");
      Mor m{std::string(trim(rest.substr(0, colon))), std::string(trim(rest.substr(colon + 1, arrow - colon - 1))),
            std::string(trim(rest.substr(arrow + 2)))};
      if (!detail::is_identifier(m.name)) throw ParseError(lineno, "bad morphism name '" + m.name + "'");
      if (m.name.rfind("1_", 0) == 0) throw ParseError(lineno, "morphism name '" + m.name + "' is reserved for identities");
      if (find_mor(m.name)) throw ParseError(lineno, "duplicate morphism '" + m.name + "'");
      for (const auto* o : {&m.dom, &m.cod})
        if (!has_object(*o)) throw ParseError(lineno, "unknown object '" + *o + "'");
      mors.push_back(std::move(m));
    } else if (section == Section::category && key == "compose") {
      const auto eq = rest.find('=');
      const auto lhs = eq == std::string_view::npos ? std::string_view{} : trim(rest.substr(0, eq));
      const auto dot = lhs.find('.');
      if (eq == std::string_view::npos || dot == std::string_view::npos) throw ParseError(lineno, "expected 'compose g.f = h'");
      Comp c{std::string(trim(lhs.substr(0, dot))), std::string(trim(lhs.substr(dot + 1))), std::string(trim(rest.substr(eq + 1))),
             lineno};
      for (const auto* m : {&c.g, &c.f}) {
        if (m->rfind("1_", 0) == 0) throw ParseError(lineno, "composites with identities are implicit");
        if (!find_mor(*m)) throw ParseError(lineno, "unknown morphism '" + *m + "'");
      }
      const auto* g = find_mor(c.g);
      const auto* f = find_mor(c.f);
      if (f->cod != g->dom) throw ParseError(lineno, c.g + "." + c.f + " is not composable");
      if (c.h.rfind("1_", 0) == 0) {
        if (c.h != "1_" + f->dom || f->dom != g->cod) throw ParseError(lineno, "composite " + c.h + " has the wrong type");
      } else {
        const auto* h = find_mor(c.h);
        if (!h) throw ParseError(lineno, "unknown morphism '" + c.h + "'");
        if (h->dom != f->dom || h->cod != g->cod) throw ParseError(lineno, "composite " + c.h + " has the wrong type");
      }
      for (const auto& o : comps)
        if (o.g == c.g && o.f == c.f) throw ParseError(lineno, "composite " + c.g + "." + c.f + " given twice");
      comps.push_back(std::move(c));
    } else if (section == Section::topology && key == "arity") {
      if (rest.empty() || rest.front() != '=') throw ParseError(lineno, "expected 'arity = ...'");
      if (arity) throw ParseError(lineno, "arity declared twice");
      const auto k = parse_arity(trim(rest.substr(1)));
      if (!k) throw ParseError(lineno, "unknown arity '" + std::string(trim(rest.substr(1))) + "'");
      arity = *k;
    } else if (section == Section::topology && key == "cover") {
      const auto eq = rest.find('=');
      const auto open = rest.find('{');
      const auto close = rest.rfind('}');
      if (eq == std::string_view::npos || open == std::string_view::npos || close == std::string_view::npos || close < open)
        throw ParseError(lineno, "expected 'cover u = { f, g }'");
      Cov c{std::string(trim(rest.substr(0, eq))), detail::split_list(rest.substr(open + 1, close - open - 1)), lineno};
      if (!has_object(c.apex)) throw ParseError(lineno, "unknown object '" + c.apex + "'");
      for (const auto& l : c.legs) {
        std::string cod;
        if (l.rfind("1_", 0) == 0) {
          cod = l.substr(2);
          if (!has_object(cod)) throw ParseError(lineno, "unknown morphism '" + l + "'");
        } else {
          const auto* m = find_mor(l);
          if (!m) throw ParseError(lineno, "unknown morphism '" + l + "'");
          cod = m->cod;
        }
        if (cod != c.apex) throw ParseError(lineno, l + " does not end at " + c.apex);
      }
      covs.push_back(std::move(c));
    } else {
      throw ParseError(lineno, "unknown key '" + key + "'");
    }
  }
  if (!saw_objects) throw ParseError(0, "missing 'objects' line");

  const Arity k = arity.value_or(Arity::FINITARY);
  for (const auto& c : covs)
    if (!admits(k, c.legs.size()))
      throw ParseError(c.line, c.legs.empty() ? "empty cover not " + std::string(k == Arity::ONE ? "1" : arity_name(k)) + "-admissible"
                                              : "cover with " + std::to_string(c.legs.size()) + " legs not " + arity_name(k) + "-admissible");

  FinCategory::Builder b;
  for (const auto& o : objects) b.add_object(o);
  for (const auto& m : mors) b.add_morphism(m.name, m.dom, m.cod);
  for (const auto& c : comps) b.set_composite(c.g, c.f, c.h);
  SiteFile out;
  try {
    out.category = b.build();
  } catch (const CategoryError& e) {
    throw ParseError(0, e.what());
  }
  const auto report = validate_category(out.category);
  if (!report.ok) throw ParseError(0, "not a category: " + report.message);
  out.arity = k;
  for (const auto& c : covs) {
    Cocone p{out.category.object(c.apex), {}};
    for (const auto& l : c.legs) p.legs.push_back(out.category.morphism(l));
    out.covers.push_back(std::move(p));
  }
  return out;
}

inline SiteFile load_site(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_site(ss.str());
}

/// Canonical text: objects and morphisms in id order, every composite of
/// non-identity morphisms, covers as given.
inline std::string serialize_site(const SiteFile& s) {
  const auto& c = s.category;
  auto is_id = [&](MorId m) { return c.identity(c.dom(m)) == m; };
  std::ostringstream out;
  out << "[category]\nobjects = ";
  for (ObjId o = 0; o < c.object_count(); ++o) out << (o ? ", " : "") << c.object_name(o);
  out << "\n";
  for (MorId m = 0; m < c.morphism_count(); ++m)
    if (!is_id(m)) out << "mor " << c.morphism_name(m) << ": " << c.object_name(c.dom(m)) << " -> " << c.object_name(c.cod(m)) << "\n";
  for (MorId g = 0; g < c.morphism_count(); ++g)
    for (MorId f = 0; f < c.morphism_count(); ++f)
      if (!is_id(g) && !is_id(f) && c.cod(f) == c.dom(g))
        out << "compose " << c.morphism_name(g) << "." << c.morphism_name(f) << " = " << c.morphism_name(c.compose(g, f)) << "\n";
  out << "\n[topology]\narity = " << arity_name(s.arity) << "\n";
  for (const auto& p : s.covers) {
    out << "cover " << c.object_name(p.apex) << " = {";
    for (std::size_t i = 0; i < p.legs.size(); ++i) out << (i ? ", " : " ") << c.morphism_name(p.legs[i]);
    out << (p.legs.empty() ? "}" : " }") << "\n";
  }
  return out.str();
}

}  // namespace excat
