#pragma once

#include <string>
#include <vector>

#include "rtagg/geometry.hpp"

namespace rtagg {

struct RTreeEntry {
  Aabb box;
  int id = -1;  // payload: fine-mesh cell id (unique within a tree)
};

struct RTreeNode {
  Aabb box;
  int parent = -1;
  bool leaf = true;
  std::vector<int> children;       // node ids (internal nodes)
  std::vector<RTreeEntry> entries; // data entries (leaf nodes)

  int fanout() const { return leaf ? int(entries.size()) : int(children.size()); }
};

// R-tree of order (m, M): every node except the root holds between m and M
// entries/children, m <= M/2, all leaves at the same depth, and an internal root
// has at least two children. Supports deterministic STR bulk loading and
// R*-style single insertion (without forced reinsertion).
class RTree {
 public:
  RTree(int dim, int m, int M);

  // Sort-tile-recursive bulk load. Entries are tiled by bounding-box center
  // (x slabs, then y, then z in 3D; ties by entry id) and packed into runs of M;
  // a trailing run shorter than m borrows from its predecessor. Node levels are
  // packed recursively from the leaves up. Fully deterministic.
  static RTree build_str(int dim, int m, int M, std::vector<RTreeEntry> entries);

  // R*-style insertion: ChooseSubtree minimizes overlap enlargement directly
  // above the leaves and area enlargement higher up; overflowing nodes are split
  // with the minimal-overlap distribution (ties: smaller total margin, then the
  // lower first item id). Splits propagate and may raise the height by one.
  void insert(const Aabb& box, int id);

  int dim() const { return dim_; }
  int min_fanout() const { return m_; }
  int max_fanout() const { return M_; }
  int root() const { return root_; }
  int height() const { return height_; }  // number of node levels (0 = empty)
  std::size_t size() const { return size_; }
  const RTreeNode& node(int i) const { return nodes_[i]; }
  int n_nodes() const { return int(nodes_.size()); }

  // Node ids at the given depth (0 = root, height-1 = leaves), left to right.
  std::vector<int> nodes_at_depth(int depth) const;

  struct Validation {
    bool ok = true;
    std::string message;
  };
  // Checks fanout bounds, exact MBR consistency, uniform leaf depth, parent
  // links, and entry id uniqueness.
  Validation validate() const;

 private:
  int dim_, m_, M_;
  int root_ = -1;
  int height_ = 0;
  std::size_t size_ = 0;
  std::vector<RTreeNode> nodes_;

  int new_node(bool leaf);
  void recompute_box(int n);
  void add_child(int parent, int child);
  int choose_subtree(const Aabb& box) const;
  void split_node(int n);
  void adjust_upward(int n);
};

}  // namespace rtagg
