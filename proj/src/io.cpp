#include "tlsurf/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include <fmt/core.h>
#include <json.hpp>

#include "tlsurf/error.hpp"
#include "tlsurf/expr.hpp"

namespace tlsurf {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    if (line[k] == '"') quoted = !quoted;
    if (line[k] == '#' && !quoted) return line.substr(0, k);
  }
  return line;
}

[[noreturn]] void fail(std::size_t line, const std::string& msg) {
  throw Error(ErrorCode::InvalidInput, fmt::format("line {}: {}", line, msg));
}

double constant_value(const std::string& text, std::size_t line) {
  Expr e;
  try {
    e = parse(text);
  } catch (const ParseError& pe) {
    throw ParseError(pe.code(), fmt::format("line {}: {}", line, pe.what()), pe.position());
  }
  if (e.depends_on_parameters()) fail(line, fmt::format("'{}' must be a constant", text));
  return eval(e, 0.0, 0.0);
}

std::vector<double> list_value(const std::string& text, std::size_t line, std::size_t count) {
  if (text.size() < 2 || text.front() != '[' || text.back() != ']') {
    fail(line, fmt::format("expected a list [..] but got '{}'", text));
  }
  std::vector<double> out;
  std::stringstream ss(text.substr(1, text.size() - 2));
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(constant_value(trim(item), line));
  if (out.size() != count) fail(line, fmt::format("expected {} values in '{}'", count, text));
  return out;
}

std::size_t node_count(double x, std::size_t line) {
  if (!(x >= 2.0) || x != std::floor(x) || x > 1e7) {
    fail(line, fmt::format("grid size {} must be an integer >= 2", x));
  }
  return static_cast<std::size_t>(x);
}

}  // namespace

SurfaceFile parse_surface_text(std::string_view text) {
  SurfaceFile out;
  std::map<std::string, std::pair<std::string, std::size_t>> entries;  // "section.key"
  std::string section;
  std::istringstream is{std::string(text)};
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(is, raw)) {
    ++lineno;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']' && line.find('=') == std::string::npos) {
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (section != "surface" && section != "domain" && section != "base") {
        fail(lineno, fmt::format("unknown section [{}]", section));
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(lineno, fmt::format("expected key = value, got '{}'", line));
    if (section.empty()) fail(lineno, "key outside of a section");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    entries[section + "." + key] = {value, lineno};
  }

  static const std::vector<std::string> known = {"surface.x", "surface.y", "surface.z",
                                                 "domain.u",  "domain.v",  "domain.grid",
                                                 "base.u0",   "base.v0"};
  for (const auto& [k, v] : entries) {
    if (std::find(known.begin(), known.end(), k) == known.end()) {
      fail(v.second, fmt::format("unknown key '{}'", k));
    }
  }

  const char* names[] = {"x", "y", "z"};
  for (std::size_t c = 0; c < 3; ++c) {
    auto it = entries.find(std::string("surface.") + names[c]);
    if (it == entries.end()) {
      throw Error(ErrorCode::InvalidInput,
                  fmt::format("missing coordinate '{}' in [surface]", names[c]));
    }
    std::string v = it->second.first;
    const std::size_t line = it->second.second;
    if (v.size() < 2 || v.front() != '"' || v.back() != '"') {
      fail(line, fmt::format("coordinate '{}' must be a quoted expression", names[c]));
    }
    v = v.substr(1, v.size() - 2);
    try {
      out.def.coords[c] = parse(v);
    } catch (const ParseError& pe) {
      throw ParseError(pe.code(),
                       fmt::format("line {}: coordinate '{}': {}", line, names[c], pe.what()),
                       pe.position());
    }
  }

  GridSpec& g = out.def.grid;
  g.u_min = g.v_min = -0.5;
  g.u_max = g.v_max = 0.5;
  g.nu = g.nv = 101;
  const bool has_domain = entries.count("domain.u") || entries.count("domain.v") ||
                          entries.count("domain.grid");
  if (!has_domain) out.warnings.push_back("no [domain] section; using u, v in [-0.5, 0.5]");
  if (auto it = entries.find("domain.u"); it != entries.end()) {
    const auto r = list_value(it->second.first, it->second.second, 2);
    g.u_min = r[0];
    g.u_max = r[1];
  } else if (has_domain) {
    out.warnings.push_back("no u range; using [-0.5, 0.5]");
  }
  if (auto it = entries.find("domain.v"); it != entries.end()) {
    const auto r = list_value(it->second.first, it->second.second, 2);
    g.v_min = r[0];
    g.v_max = r[1];
  } else if (has_domain) {
    out.warnings.push_back("no v range; using [-0.5, 0.5]");
  }
  if (auto it = entries.find("domain.grid"); it != entries.end()) {
    const auto r = list_value(it->second.first, it->second.second, 2);
    g.nu = node_count(r[0], it->second.second);
    g.nv = node_count(r[1], it->second.second);
  } else {
    out.warnings.push_back("no grid size; using 101 x 101");
  }
  g.validate(2);

  double u0 = 0.5 * (g.u_min + g.u_max), v0 = 0.5 * (g.v_min + g.v_max);
  auto bu = entries.find("base.u0");
  auto bv = entries.find("base.v0");
  if (bu != entries.end()) u0 = constant_value(bu->second.first, bu->second.second);
  if (bv != entries.end()) v0 = constant_value(bv->second.first, bv->second.second);
  if (bu == entries.end() || bv == entries.end()) {
    out.warnings.push_back("base point not fully given; using the domain center");
  }
  if (u0 < g.u_min || u0 > g.u_max || v0 < g.v_min || v0 > g.v_max) {
    throw Error(ErrorCode::InvalidInput, fmt::format("base ({}, {}) outside the domain", u0, v0));
  }
  if (!g.u_node(u0)) {
    const double s = g.u(g.nearest_u_node(u0));
    out.warnings.push_back(fmt::format("base u0 = {} moved to the nearest grid node {}", u0, s));
    u0 = s;
  }
  if (!g.v_node(v0)) {
    const double s = g.v(g.nearest_v_node(v0));
    out.warnings.push_back(fmt::format("base v0 = {} moved to the nearest grid node {}", v0, s));
    v0 = s;
  }
  out.def.u0 = u0;
  out.def.v0 = v0;
  return out;
}

SurfaceFile read_surface_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidInput, fmt::format("cannot open '{}'", path));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_surface_text(ss.str());
}

std::string format_number(double x) { return fmt::format("{:.17g}", x); }

void write_grid_csv(std::ostream& os, const GridSpec& g, const std::vector<std::string>& names,
                    const std::vector<const ScalarGrid*>& columns) {
  os << "u,v";
  for (const auto& n : names) os << ',' << n;
  os << '\n';
  for (std::size_t j = 0; j < g.nv; ++j)
    for (std::size_t i = 0; i < g.nu; ++i) {
      os << format_number(g.u(i)) << ',' << format_number(g.v(j));
      for (const ScalarGrid* c : columns) os << ',' << format_number((*c)(i, j));
      os << '\n';
    }
}

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t k = 0; k < header.size(); ++k)
    if (header[k] == name) return k;
  throw Error(ErrorCode::InvalidInput, fmt::format("CSV column '{}' missing", name));
}

CsvTable read_csv(std::istream& is) {
  CsvTable t;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty()) {
      if (t.header.empty()) continue;
      break;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
    if (t.header.empty()) {
      t.header = cells;
      continue;
    }
    if (cells.size() != t.header.size()) {
      fail(lineno, fmt::format("expected {} fields, got {}", t.header.size(), cells.size()));
    }
    std::vector<double> row;
    for (const auto& c : cells) {
      std::size_t used = 0;
      double x = 0.0;
      try {
        x = std::stod(c, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != c.size() || c.empty()) fail(lineno, fmt::format("'{}' is not a number", c));
      row.push_back(x);
    }
    t.rows.push_back(std::move(row));
  }
  if (t.header.empty()) throw Error(ErrorCode::InvalidInput, "CSV has no header row");
  return t;
}

namespace {

std::vector<double> unique_sorted(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  std::vector<double> out;
  const double span = xs.empty() ? 0.0 : xs.back() - xs.front();
  for (double x : xs) {
    if (out.empty() || x - out.back() > 1e-9 * std::max(span, 1e-300)) out.push_back(x);
  }
  return out;
}

}  // namespace

GriddedColumns grid_columns(const CsvTable& t, const std::vector<std::string>& names) {
  const std::size_t cu = t.column("u"), cv = t.column("v");
  std::vector<double> us, vs;
  for (const auto& r : t.rows) {
    us.push_back(r[cu]);
    vs.push_back(r[cv]);
  }
  const std::vector<double> U = unique_sorted(us), V = unique_sorted(vs);
  if (U.size() < 2 || V.size() < 2 || U.size() * V.size() != t.rows.size()) {
    throw Error(ErrorCode::InvalidInput, "CSV rows do not form a full (u, v) lattice");
  }
  GriddedColumns out;
  out.grid = {U.front(), U.back(), V.front(), V.back(), U.size(), V.size()};
  const GridSpec& g = out.grid;
  for (std::size_t k = 0; k < U.size(); ++k)
    if (std::abs(U[k] - g.u(k)) > 1e-6 * g.hu()) {
      throw Error(ErrorCode::InvalidInput, "u values are not uniformly spaced");
    }
  for (std::size_t k = 0; k < V.size(); ++k)
    if (std::abs(V[k] - g.v(k)) > 1e-6 * g.hv()) {
      throw Error(ErrorCode::InvalidInput, "v values are not uniformly spaced");
    }
  std::vector<std::size_t> idx;
  for (const auto& n : names) idx.push_back(t.column(n));
  out.columns.assign(names.size(), ScalarGrid(g));
  std::vector<std::uint8_t> seen(g.size(), 0);
  for (const auto& r : t.rows) {
    const std::size_t i = g.nearest_u_node(r[cu]), j = g.nearest_v_node(r[cv]);
    if (seen[g.index(i, j)]++) throw Error(ErrorCode::InvalidInput, "duplicate (u, v) row in CSV");
    for (std::size_t c = 0; c < idx.size(); ++c) out.columns[c](i, j) = r[idx[c]];
  }
  return out;
}

void write_invariants_csv(std::ostream& os, const InvariantField& fld) {
  const ScalarGrid a = fld.component(&InvariantPoint::a);
  const ScalarGrid alpha = fld.component(&InvariantPoint::alpha);
  const ScalarGrid f = fld.component(&InvariantPoint::f);
  const ScalarGrid g1 = fld.component(&InvariantPoint::gamma1);
  const ScalarGrid g2 = fld.component(&InvariantPoint::gamma2);
  const ScalarGrid sE = fld.component(&InvariantPoint::sqrtE);
  const ScalarGrid sG = fld.component(&InvariantPoint::sqrtMinusG);
  write_grid_csv(os, fld.grid(), {"a", "alpha", "f", "gamma1", "gamma2", "sqrtE", "sqrtMinusG"},
                 {&a, &alpha, &f, &g1, &g2, &sE, &sG});
}

InvariantField read_invariants_csv(std::istream& is) {
  const GriddedColumns gc = grid_columns(
      read_csv(is), {"a", "alpha", "gamma1", "gamma2", "sqrtE", "sqrtMinusG"});
  const auto& c = gc.columns;
  return InvariantField::from_samples(c[0], c[1], c[2], c[3], c[4], c[5]);
}

void write_kh_csv(std::ostream& os, const ScalarGrid& K, const ScalarGrid& H) {
  write_grid_csv(os, K.spec(), {"K", "H"}, {&K, &H});
}

std::pair<ScalarGrid, ScalarGrid> read_kh_csv(std::istream& is) {
  GriddedColumns gc = grid_columns(read_csv(is), {"K", "H"});
  return {std::move(gc.columns[0]), std::move(gc.columns[1])};
}

void write_omega_csv(std::ostream& os, const ScalarGrid& omega) {
  write_grid_csv(os, omega.spec(), {"omega"}, {&omega});
}

void write_reparam_csv(std::ostream& os, const ReparamMap& m) {
  os << "u,ubar\n";
  for (std::size_t k = 0; k < m.u.size(); ++k) {
    os << format_number(m.u[k]) << ',' << format_number(m.ubar[k]) << '\n';
  }
  os << "\nv,vbar\n";
  for (std::size_t k = 0; k < m.v.size(); ++k) {
    os << format_number(m.v[k]) << ',' << format_number(m.vbar[k]) << '\n';
  }
}

void write_obj(std::ostream& os, const Grid<MVec3>& z) {
  const GridSpec& g = z.spec();
  for (const MVec3& p : z.data()) {
    os << "v " << format_number(p.x1) << ' ' << format_number(p.x2) << ' ' << format_number(p.x3)
       << '\n';
  }
  for (std::size_t j = 0; j + 1 < g.nv; ++j)
    for (std::size_t i = 0; i + 1 < g.nu; ++i) {
      const std::size_t a = g.index(i, j) + 1, b = g.index(i + 1, j) + 1;
      const std::size_t c = g.index(i + 1, j + 1) + 1, d = g.index(i, j + 1) + 1;
      os << "f " << a << ' ' << b << ' ' << c << '\n';
      os << "f " << a << ' ' << c << ' ' << d << '\n';
    }
}

std::vector<MVec3> read_obj_vertices(std::istream& is) {
  std::vector<MVec3> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.size() < 2 || line[0] != 'v' || line[1] != ' ') continue;
    std::istringstream ss(line.substr(2));
    MVec3 p;
    if (!(ss >> p.x1 >> p.x2 >> p.x3)) fail(lineno, "malformed OBJ vertex");
    out.push_back(p);
  }
  return out;
}

namespace {

nlohmann::json vec_json(const MVec3& v) { return nlohmann::json::array({v.x1, v.x2, v.x3}); }

MVec3 json_vec(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array() || j[key].size() != 3) {
    throw Error(ErrorCode::InvalidInput, fmt::format("frame JSON: '{}' must be a 3-vector", key));
  }
  return {j[key][0].get<double>(), j[key][1].get<double>(), j[key][2].get<double>()};
}

}  // namespace

void write_frame_json(std::ostream& os, const FrameRecord& r) {
  nlohmann::ordered_json j;
  j["base_vertex"] = r.base_vertex;
  j["z0"] = vec_json(r.z0);
  j["x"] = vec_json(r.frame.x);
  j["y"] = vec_json(r.frame.y);
  j["n"] = vec_json(r.frame.n);
  os << j.dump(2) << '\n';
}

FrameRecord read_frame_json(std::istream& is) {
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidInput, fmt::format("frame JSON: {}", e.what()));
  }
  FrameRecord r;
  if (!j.contains("base_vertex") || !j["base_vertex"].is_number_unsigned()) {
    throw Error(ErrorCode::InvalidInput, "frame JSON: 'base_vertex' must be a vertex index");
  }
  r.base_vertex = j["base_vertex"].get<std::size_t>();
  r.z0 = json_vec(j, "z0");
  r.frame = {json_vec(j, "x"), json_vec(j, "y"), json_vec(j, "n")};
  return r;
}

}  // namespace tlsurf
