#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "rtagg/agglomeration.hpp"

namespace rtagg {

namespace {

// Principal axis of a point cloud (largest-eigenvalue direction of the covariance
// matrix): closed form in 2D, power iteration in 3D.
Vec principal_axis(const std::vector<Vec>& pts, const std::vector<int>& subset, int dim,
                   SplitMix64& rng) {
  Vec mean{0, 0, 0};
  for (int i : subset) mean = mean + pts[i];
  mean = (1.0 / subset.size()) * mean;
  double c[3][3] = {};
  for (int i : subset) {
    Vec d = pts[i] - mean;
    for (int r = 0; r < dim; ++r)
      for (int s = 0; s < dim; ++s) c[r][s] += d[r] * d[s];
  }
  if (dim == 2) {
    double trace_gap = c[0][0] - c[1][1];
    if (c[0][1] == 0.0 && trace_gap == 0.0) return {1, 0, 0};
    double theta = 0.5 * std::atan2(2.0 * c[0][1], trace_gap);
    return {std::cos(theta), std::sin(theta), 0};
  }
  Vec v{1.0 + 1e-3 * rng.next_double(), 1.0 + 1e-3 * rng.next_double(),
        1.0 + 1e-3 * rng.next_double()};
  for (int it = 0; it < 100; ++it) {
    Vec w{c[0][0] * v[0] + c[0][1] * v[1] + c[0][2] * v[2],
          c[1][0] * v[0] + c[1][1] * v[1] + c[1][2] * v[2],
          c[2][0] * v[0] + c[2][1] * v[1] + c[2][2] * v[2]};
    double len = norm(w);
    if (len == 0.0) return {1, 0, 0};
    v = (1.0 / len) * w;
  }
  return v;
}

void bisect(const std::vector<Vec>& centroids, std::vector<int>& subset, int k, int base,
            std::vector<int>& assignment, int dim, SplitMix64& rng) {
  if (k == 1) {
    for (int c : subset) assignment[c] = base;
    return;
  }
  const int k1 = k / 2, k2 = k - k1;
  const int n1 = int(std::llround(double(subset.size()) * k1 / k));
  Vec axis = principal_axis(centroids, subset, dim, rng);
  std::nth_element(subset.begin(), subset.begin() + n1, subset.end(), [&](int a, int b) {
    double pa = dot(centroids[a], axis), pb = dot(centroids[b], axis);
    return pa < pb || (pa == pb && a < b);
  });
  std::vector<int> left(subset.begin(), subset.begin() + n1);
  std::vector<int> right(subset.begin() + n1, subset.end());
  bisect(centroids, left, k1, base, assignment, dim, rng);
  bisect(centroids, right, k2, base + k1, assignment, dim, rng);
}

}  // namespace

Partition graph_partition(const BackgroundMesh& mesh, int n_parts, std::uint64_t seed) {
  const int n = mesh.n_cells();
  if (n_parts < 1 || n_parts > n)
    throw std::invalid_argument("part count must lie in [1, n_cells]");

  std::vector<Vec> centroids(n);
  for (int c = 0; c < n; ++c) centroids[c] = mesh.cell_centroid(c);
  std::vector<int> assignment(n, -1), all(n);
  std::iota(all.begin(), all.end(), 0);
  SplitMix64 rng(seed);
  bisect(centroids, all, n_parts, 0, assignment, mesh.dim, rng);

  // Repair pass: a part may come out face-disconnected; every fragment except the
  // largest is handed to the part most common among its outside neighbors.
  DualGraph graph = dual_adjacency(mesh);
  for (int pass = 0; pass < 32; ++pass) {
    bool changed = false;
    for (int p = 0; p < n_parts; ++p) {
      // Connected components of part p (fresh per part: earlier parts in this pass
      // may already have pushed cells into p).
      std::vector<int> comp(n, -1);
      std::vector<std::vector<int>> comps;
      for (int c = 0; c < n; ++c) {
        if (assignment[c] != p || comp[c] >= 0) continue;
        std::vector<int> queue{c};
        comp[c] = int(comps.size());
        std::size_t head = 0;
        while (head < queue.size()) {
          int u = queue[head++];
          for (int v : graph.neighbors[u])
            if (assignment[v] == p && comp[v] < 0) {
              comp[v] = comp[c];
              queue.push_back(v);
            }
        }
        comps.push_back(std::move(queue));
      }
      if (comps.size() <= 1) continue;
      std::size_t keep = 0;
      for (std::size_t i = 1; i < comps.size(); ++i)
        if (comps[i].size() > comps[keep].size()) keep = i;
      for (std::size_t i = 0; i < comps.size(); ++i) {
        if (i == keep) continue;
        // Majority vote over parts of neighbors outside the fragment.
        std::map<int, int> votes;
        for (int u : comps[i])
          for (int v : graph.neighbors[u])
            if (assignment[v] != p || comp[v] != int(i)) ++votes[assignment[v]];
        votes.erase(p);
        if (votes.empty()) continue;  // isolated island: keep as is
        int best = -1, best_count = -1;
        for (auto [part, count] : votes)
          if (count > best_count) {
            best = part;
            best_count = count;
          }
        for (int u : comps[i]) assignment[u] = best;
        changed = true;
      }
    }
    if (!changed) break;
  }

  Partition part;
  part.n_cells = n;
  part.n_agglomerates = n_parts;
  part.assignment = std::move(assignment);
  validate_partition(part);
  return part;
}

AgglomerateHierarchy build_graph_hierarchy(const BackgroundMesh& mesh, int n_parts,
                                           std::uint64_t seed) {
  AgglomerateHierarchy h;
  h.strategy = "graph";
  h.n_cells = mesh.n_cells();
  Partition ident;
  ident.n_cells = h.n_cells;
  ident.n_agglomerates = h.n_cells;
  ident.assignment.resize(h.n_cells);
  std::iota(ident.assignment.begin(), ident.assignment.end(), 0);
  Partition parts = graph_partition(mesh, n_parts, seed);
  h.parents.push_back(parts.assignment);
  h.levels.push_back(std::move(ident));
  h.levels.push_back(std::move(parts));
  validate_hierarchy(h);
  return h;
}

void export_metis_graph(const DualGraph& graph, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << graph.neighbors.size() << ' ' << graph.n_edges() << "\n";
  for (const auto& nbrs : graph.neighbors) {
    for (std::size_t i = 0; i < nbrs.size(); ++i) out << (i ? " " : "") << (nbrs[i] + 1);
    out << "\n";
  }
  if (!out) throw std::runtime_error("error while writing " + path);
}

Partition import_partition(const std::string& path, int n_cells) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  Partition p;
  p.n_cells = n_cells;
  p.assignment.reserve(n_cells);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream is(line);
    int id;
    if (!(is >> id)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": bad part id");
    }
    if (id < 0)
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": negative part id");
    p.assignment.push_back(id);
  }
  if (int(p.assignment.size()) != n_cells)
    throw std::runtime_error(path + ": expected " + std::to_string(n_cells) +
                             " entries, found " + std::to_string(p.assignment.size()));
  p.n_agglomerates = 1 + *std::max_element(p.assignment.begin(), p.assignment.end());
  validate_partition(p);  // rejects empty parts
  return p;
}

}  // namespace rtagg
