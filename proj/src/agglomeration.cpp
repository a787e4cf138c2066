#include "rtagg/agglomeration.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "rtagg/timer.hpp"

namespace rtagg {

void validate_partition(const Partition& p) {
  if (int(p.assignment.size()) != p.n_cells)
    throw std::invalid_argument("partition assignment size does not match cell count");
  if (p.n_agglomerates <= 0) throw std::invalid_argument("partition has no agglomerates");
  std::vector<char> used(p.n_agglomerates, 0);
  for (int a : p.assignment) {
    if (a < 0 || a >= p.n_agglomerates)
      throw std::invalid_argument("agglomerate id out of range");
    used[a] = 1;
  }
  for (int a = 0; a < p.n_agglomerates; ++a)
    if (!used[a])
      throw std::invalid_argument("empty part: agglomerate " + std::to_string(a) +
                                  " has no cells");
}

void validate_hierarchy(const AgglomerateHierarchy& h) {
  if (h.levels.empty()) throw std::invalid_argument("hierarchy has no levels");
  if (int(h.parents.size()) != h.n_levels() - 1)
    throw std::invalid_argument("hierarchy parent map count mismatch");
  for (const Partition& p : h.levels) {
    if (p.n_cells != h.n_cells) throw std::invalid_argument("level cell count mismatch");
    validate_partition(p);
  }
  for (int i = 0; i < h.n_cells; ++i)
    if (h.levels[0].assignment[i] != i)
      throw std::invalid_argument("level 0 is not the identity partition");
  for (int l = 1; l < h.n_levels(); ++l) {
    if (h.levels[l].n_agglomerates >= h.levels[l - 1].n_agglomerates)
      throw std::invalid_argument("level sizes must strictly decrease");
    const std::vector<int>& par = h.parents[l - 1];
    if (int(par.size()) != h.levels[l - 1].n_agglomerates)
      throw std::invalid_argument("parent map size mismatch at level " + std::to_string(l));
    for (int a : par)
      if (a < 0 || a >= h.levels[l].n_agglomerates)
        throw std::invalid_argument("parent id out of range at level " + std::to_string(l));
    for (int i = 0; i < h.n_cells; ++i)
      if (par[h.levels[l - 1].assignment[i]] != h.levels[l].assignment[i])
        throw std::invalid_argument("nesting violation at level " + std::to_string(l));
  }
}

std::vector<int> extract_leaves(const RTree& tree, int node) {
  std::vector<int> out;
  // Recursive descent: leaves contribute their stored entries in order, internal
  // nodes delegate to their children left to right.
  auto visit = [&](auto&& self, int n) -> void {
    const RTreeNode& nd = tree.node(n);
    if (nd.leaf)
      for (const RTreeEntry& e : nd.entries) out.push_back(e.id);
    else
      for (int c : nd.children) self(self, c);
  };
  visit(visit, node);
  return out;
}

Partition compute_agglomerates(const RTree& tree, int depth, int n_cells) {
  if (std::size_t(n_cells) != tree.size())
    throw std::invalid_argument("tree entry count does not match cell count");
  Partition p;
  p.n_cells = n_cells;
  p.assignment.assign(n_cells, -1);
  std::vector<int> nodes = tree.nodes_at_depth(depth);
  p.n_agglomerates = int(nodes.size());
  for (int j = 0; j < int(nodes.size()); ++j)
    for (int cell : extract_leaves(tree, nodes[j])) {
      if (cell < 0 || cell >= n_cells)
        throw std::invalid_argument("tree entry id out of cell range");
      p.assignment[cell] = j;
    }
  validate_partition(p);
  return p;
}

namespace {

Partition identity_partition(int n_cells) {
  Partition p;
  p.n_cells = n_cells;
  p.n_agglomerates = n_cells;
  p.assignment.resize(n_cells);
  for (int i = 0; i < n_cells; ++i) p.assignment[i] = i;
  return p;
}

}  // namespace

AgglomerateHierarchy build_hierarchy(const RTree& tree, int n_cells, AggTimings* timings) {
  if (std::size_t(n_cells) != tree.size() || n_cells == 0)
    throw std::invalid_argument("tree entry count does not match cell count");

  // Visit pass: walk each tree depth (leaves first, nodes BFS left-to-right) and
  // store the per-node cell lists and child counts the flagging pass consumes.
  WallTimer timer;
  struct DepthNodes {
    std::vector<std::vector<int>> cells;   // descendant cells per node
    std::vector<std::size_t> n_children;   // direct children per node
  };
  std::vector<DepthNodes> visited;
  for (int depth = tree.height() - 1; depth >= 0; --depth) {
    DepthNodes dn;
    const std::vector<int> nodes = tree.nodes_at_depth(depth);
    dn.cells.reserve(nodes.size());
    dn.n_children.reserve(nodes.size());
    for (int nid : nodes) {
      dn.cells.push_back(extract_leaves(tree, nid));
      const RTreeNode& nd = tree.node(nid);
      dn.n_children.push_back(nd.leaf ? 0 : nd.children.size());
    }
    visited.push_back(std::move(dn));
  }
  if (timings) timings->visit = timer.seconds();

  // Flag pass: write cell -> agglomerate ids per level. The parent of a level-l
  // agglomerate follows the tree edges: children of the j-th node at a depth are
  // contiguous at the next depth down.
  timer.reset();
  AgglomerateHierarchy h;
  h.strategy = "rtree";
  h.n_cells = n_cells;
  h.levels.push_back(identity_partition(n_cells));
  for (const DepthNodes& dn : visited) {
    const int n_agg = int(dn.cells.size());
    if (n_agg >= h.levels.back().n_agglomerates) continue;  // degenerate top
    Partition part;
    part.n_cells = n_cells;
    part.n_agglomerates = n_agg;
    part.assignment.assign(n_cells, -1);
    for (int j = 0; j < n_agg; ++j)
      for (int cell : dn.cells[j]) {
        if (cell < 0 || cell >= n_cells)
          throw std::invalid_argument("tree entry id out of cell range");
        part.assignment[cell] = j;
      }
    std::vector<int> parent;
    if (h.levels.size() == 1) {
      parent = part.assignment;  // child agglomerates are single cells
    } else {
      parent.reserve(h.levels.back().n_agglomerates);
      for (int j = 0; j < n_agg; ++j)
        for (std::size_t k = 0; k < dn.n_children[j]; ++k) parent.push_back(j);
    }
    h.levels.push_back(std::move(part));
    h.parents.push_back(std::move(parent));
  }
  validate_hierarchy(h);
  if (timings) timings->flag = timer.seconds();
  return h;
}

AgglomerateHierarchy build_hierarchy_by_material(const BackgroundMesh& mesh, int m, int M) {
  if (!mesh.has_material())
    throw std::invalid_argument("mesh carries no material labels");
  std::map<int, std::vector<int>> groups;  // label -> cell ids (ascending)
  for (int c = 0; c < mesh.n_cells(); ++c) groups[mesh.material[c]].push_back(c);

  struct MatTree {
    std::vector<int> cells;
    RTree tree;
  };
  std::vector<MatTree> mats;
  int max_height = 0;
  for (auto& [label, cells] : groups) {
    (void)label;
    std::vector<RTreeEntry> entries;
    entries.reserve(cells.size());
    for (int c : cells) entries.push_back({mesh.cell_bbox(c), c});
    RTree tree = RTree::build_str(mesh.dim, m, M, std::move(entries));
    max_height = std::max(max_height, tree.height());
    mats.push_back({cells, std::move(tree)});
  }

  AgglomerateHierarchy h;
  h.strategy = "rtree-material";
  h.n_cells = mesh.n_cells();
  h.levels.push_back(identity_partition(mesh.n_cells()));

  // Per-material partitions at hierarchy level l: tree depth H-l while l <= H,
  // afterwards the coarsest (root) partition repeats.
  for (int l = 1; l <= max_height; ++l) {
    Partition part;
    part.n_cells = mesh.n_cells();
    part.assignment.assign(mesh.n_cells(), -1);
    std::vector<int> parent;
    int offset = 0;
    for (MatTree& mt : mats) {
      const int H = mt.tree.height();
      const int depth = std::max(H - l, 0);
      const int prev_depth = std::max(H - (l - 1), 0);
      std::vector<int> nodes = mt.tree.nodes_at_depth(depth);
      for (int j = 0; j < int(nodes.size()); ++j)
        for (int cell : extract_leaves(mt.tree, nodes[j])) part.assignment[cell] = offset + j;

      if (l == 1) {
        // parents of the identity level: filled after the loop from assignments
      } else if (prev_depth == depth) {
        // material already at its coarsest partition: maps onto itself
        for (int j = 0; j < int(nodes.size()); ++j) parent.push_back(offset + j);
      } else {
        for (int j = 0; j < int(nodes.size()); ++j)
          for (std::size_t k = 0; k < mt.tree.node(nodes[j]).children.size(); ++k)
            parent.push_back(offset + j);
      }
      offset += int(nodes.size());
    }
    part.n_agglomerates = offset;
    if (part.n_agglomerates >= h.levels.back().n_agglomerates) break;  // no coarsening left
    if (l == 1) parent = part.assignment;
    h.levels.push_back(std::move(part));
    h.parents.push_back(std::move(parent));
  }
  validate_hierarchy(h);
  return h;
}

}  // namespace rtagg
