#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "rtagg/mesh.hpp"

namespace rtagg {

namespace {

[[noreturn]] void parse_fail(const std::string& path, int line, const std::string& what) {
  throw std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

struct LineReader {
  std::ifstream in;
  std::string path;
  int line_no = 0;
  explicit LineReader(const std::string& p) : in(p), path(p) {
    if (!in) throw std::runtime_error("cannot open " + p);
  }
  bool next(std::string& out) {
    while (std::getline(in, out)) {
      ++line_no;
      if (!out.empty() && out.back() == '\r') out.pop_back();
      if (!out.empty()) return true;
    }
    return false;
  }
  std::string expect() {
    std::string s;
    if (!next(s)) parse_fail(path, line_no, "unexpected end of file");
    return s;
  }
};

std::string fmt_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

BackgroundMesh read_msh(const std::string& path) {
  LineReader r(path);
  BackgroundMesh mesh;
  std::unordered_map<long, int> node_index;
  bool saw_nodes = false, saw_elements = false;
  bool any_tag = false;
  std::vector<int> tags;  // first tag per imported cell (-1 when absent)

  std::string line;
  while (r.next(line)) {
    if (line == "$MeshFormat") {
      std::istringstream is(r.expect());
      std::string version;
      int file_type = -1, data_size = 0;
      is >> version >> file_type >> data_size;
      if (version.rfind("2.2", 0) != 0)
        parse_fail(path, r.line_no, "unsupported format version '" + version + "' (need 2.2)");
      if (file_type != 0) parse_fail(path, r.line_no, "binary files are not supported");
      if (r.expect() != "$EndMeshFormat") parse_fail(path, r.line_no, "missing $EndMeshFormat");
    } else if (line == "$Nodes") {
      saw_nodes = true;
      long n = -1;
      {
        std::istringstream is(r.expect());
        if (!(is >> n) || n < 0) parse_fail(path, r.line_no, "bad node count");
      }
      mesh.vertices.reserve(n);
      for (long i = 0; i < n; ++i) {
        std::istringstream is(r.expect());
        long id;
        double x, y, z;
        if (!(is >> id >> x >> y >> z)) parse_fail(path, r.line_no, "bad node line");
        if (!node_index.emplace(id, int(mesh.vertices.size())).second)
          parse_fail(path, r.line_no, "duplicate node id " + std::to_string(id));
        mesh.vertices.push_back({x, y, z});
      }
      if (r.expect() != "$EndNodes") parse_fail(path, r.line_no, "missing $EndNodes");
    } else if (line == "$Elements") {
      saw_elements = true;
      long n = -1;
      {
        std::istringstream is(r.expect());
        if (!(is >> n) || n < 0) parse_fail(path, r.line_no, "bad element count");
      }
      for (long i = 0; i < n; ++i) {
        std::istringstream is(r.expect());
        long id;
        int type, ntags;
        if (!(is >> id >> type >> ntags)) parse_fail(path, r.line_no, "bad element line");
        int first_tag = -1;
        for (int t = 0; t < ntags; ++t) {
          int tag;
          if (!(is >> tag)) parse_fail(path, r.line_no, "bad element tags");
          if (t == 0) first_tag = tag;
        }
        CellKind kind;
        switch (type) {
          case 2: kind = CellKind::Tri; break;
          case 3: kind = CellKind::Quad; break;
          case 4: kind = CellKind::Tet; break;
          case 5: kind = CellKind::Hex; break;
          default: continue;  // points, lines, higher-order: not volume cells here
        }
        Cell c;
        c.kind = kind;
        for (int k = 0; k < c.nv(); ++k) {
          long node;
          if (!(is >> node)) parse_fail(path, r.line_no, "element has too few nodes");
          auto it = node_index.find(node);
          if (it == node_index.end())
            parse_fail(path, r.line_no, "element references unknown node " + std::to_string(node));
          c.v[k] = it->second;
        }
        mesh.cells.push_back(c);
        tags.push_back(first_tag);
        if (first_tag >= 0 && ntags > 0) any_tag = true;
      }
      if (r.expect() != "$EndElements") parse_fail(path, r.line_no, "missing $EndElements");
    }
    // Other sections ($PhysicalNames, ...) are skipped line by line.
  }
  if (!saw_nodes || !saw_elements) parse_fail(path, r.line_no, "missing $Nodes or $Elements");
  if (mesh.cells.empty()) parse_fail(path, r.line_no, "file contains no volume cells");

  bool any3d = false;
  for (const Cell& c : mesh.cells) any3d |= (cell_dim(c.kind) == 3);
  mesh.dim = any3d ? 3 : 2;
  if (mesh.dim == 2) {
    double span = 0.0, zmax = 0.0;
    Aabb box;
    for (const Vec& v : mesh.vertices) box.extend(v);
    for (int k = 0; k < 2; ++k) span = std::max(span, box.hi[k] - box.lo[k]);
    for (const Vec& v : mesh.vertices) zmax = std::max(zmax, std::abs(v[2]));
    if (zmax > 1e-9 * std::max(span, 1.0))
      throw std::runtime_error(path + ": two-dimensional mesh has non-zero z coordinates");
  }
  if (any_tag) {
    mesh.material.resize(mesh.cells.size());
    for (std::size_t i = 0; i < tags.size(); ++i) mesh.material[i] = std::max(tags[i], 0);
  }
  mesh.finalize();
  return mesh;
}

void write_msh(const BackgroundMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n";
  out << "$Nodes\n" << mesh.n_vertices() << "\n";
  for (int i = 0; i < mesh.n_vertices(); ++i) {
    const Vec& v = mesh.vertices[i];
    out << (i + 1) << ' ' << fmt_double(v[0]) << ' ' << fmt_double(v[1]) << ' '
        << fmt_double(v[2]) << "\n";
  }
  out << "$EndNodes\n$Elements\n" << mesh.n_cells() << "\n";
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const Cell& cell = mesh.cells[c];
    int type = 0;
    switch (cell.kind) {
      case CellKind::Tri: type = 2; break;
      case CellKind::Quad: type = 3; break;
      case CellKind::Tet: type = 4; break;
      case CellKind::Hex: type = 5; break;
    }
    out << (c + 1) << ' ' << type;
    if (mesh.has_material())
      out << " 2 " << mesh.material[c] << ' ' << mesh.material[c];
    else
      out << " 0";
    for (int k = 0; k < cell.nv(); ++k) out << ' ' << (cell.v[k] + 1);
    out << "\n";
  }
  out << "$EndElements\n";
  if (!out) throw std::runtime_error("error while writing " + path);
}

void write_vtk(const BackgroundMesh& mesh, const std::string& path,
               const std::map<std::string, std::vector<double>>& cell_scalars) {
  for (const auto& [name, values] : cell_scalars)
    if (int(values.size()) != mesh.n_cells())
      throw std::invalid_argument("cell field '" + name + "' size does not match cell count");

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "# vtk DataFile Version 2.0\nmesh\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.n_vertices() << " double\n";
  for (const Vec& v : mesh.vertices)
    out << fmt_double(v[0]) << ' ' << fmt_double(v[1]) << ' ' << fmt_double(v[2]) << "\n";

  std::size_t list_len = 0;
  for (const Cell& c : mesh.cells) list_len += 1 + c.nv();
  out << "CELLS " << mesh.n_cells() << ' ' << list_len << "\n";
  for (const Cell& c : mesh.cells) {
    out << c.nv();
    for (int k = 0; k < c.nv(); ++k) out << ' ' << c.v[k];
    out << "\n";
  }
  out << "CELL_TYPES " << mesh.n_cells() << "\n";
  for (const Cell& c : mesh.cells) {
    int t = 0;
    switch (c.kind) {
      case CellKind::Tri: t = 5; break;
      case CellKind::Quad: t = 9; break;
      case CellKind::Tet: t = 10; break;
      case CellKind::Hex: t = 12; break;
    }
    out << t << "\n";
  }
  if (!cell_scalars.empty()) {
    out << "CELL_DATA " << mesh.n_cells() << "\n";
    for (const auto& [name, values] : cell_scalars) {
      out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
      for (double x : values) out << fmt_double(x) << "\n";
    }
  }
  if (!out) throw std::runtime_error("error while writing " + path);
}

}  // namespace rtagg
