#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tlsurf/canonical.hpp"
#include "tlsurf/grid.hpp"
#include "tlsurf/invariants.hpp"
#include "tlsurf/minkowski.hpp"
#include "tlsurf/surface.hpp"

namespace tlsurf {

struct SurfaceFile {
  SurfaceDef def;
  std::vector<std::string> warnings;
};

/// Sections [surface] (x, y, z as quoted expressions), [domain] (u = [a, b],
/// v = [c, d], grid = [Nu, Nv]) and [base] (u0, v0). Missing [domain] gives
/// [-0.5, 0.5]^2, missing grid 101 x 101, missing base the domain center. A
/// base off the grid is moved to the nearest node. Every default or snap
/// adds a warning.
SurfaceFile parse_surface_text(std::string_view text);
SurfaceFile read_surface_file(const std::string& path);

std::string format_number(double x);  // 17 significant digits

/// CSV with header; rows v-outer, u-inner.
void write_grid_csv(std::ostream& os, const GridSpec& g, const std::vector<std::string>& names,
                    const std::vector<const ScalarGrid*>& columns);

/// Columns by name from a CSV with a header row, in file order.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::size_t column(std::string_view name) const;  // throws InvalidInput
};
CsvTable read_csv(std::istream& is);

/// Grid and per-node columns from a table with u, v columns. The (u, v)
/// pairs must form a full uniform lattice.
struct GriddedColumns {
  GridSpec grid;
  std::vector<ScalarGrid> columns;
};
GriddedColumns grid_columns(const CsvTable& t, const std::vector<std::string>& names);

void write_invariants_csv(std::ostream& os, const InvariantField& fld);
InvariantField read_invariants_csv(std::istream& is);

void write_kh_csv(std::ostream& os, const ScalarGrid& K, const ScalarGrid& H);
std::pair<ScalarGrid, ScalarGrid> read_kh_csv(std::istream& is);

void write_omega_csv(std::ostream& os, const ScalarGrid& omega);

/// Two tables: "u,ubar" rows, a blank line, then "v,vbar" rows.
void write_reparam_csv(std::ostream& os, const ReparamMap& m);

/// Vertices in grid order (v outer), two triangles per cell.
void write_obj(std::ostream& os, const Grid<MVec3>& z);
std::vector<MVec3> read_obj_vertices(std::istream& is);

struct FrameRecord {
  std::size_t base_vertex = 0;
  MVec3 z0;
  Frame frame;
};
void write_frame_json(std::ostream& os, const FrameRecord& r);
FrameRecord read_frame_json(std::istream& is);

}  // namespace tlsurf
