#include "rtagg/rtree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

namespace rtagg {

namespace {

int ceil_root(int p, int k) {  // smallest s with s^k >= p
  int s = int(std::ceil(std::pow(double(p), 1.0 / k)));
  s = std::max(s, 1);
  auto pow_int = [](long long b, int e) {
    long long r = 1;
    for (int i = 0; i < e; ++i) r *= b;
    return r;
  };
  while (pow_int(s, k) < p) ++s;
  while (s > 1 && pow_int(s - 1, k) >= p) --s;
  return s;
}

// Run sizes when packing n items into groups of at most M: full runs of M with the
// trailing run topped up from its predecessor if it would fall below m.
std::vector<int> pack_sizes(int n, int m, int M) {
  std::vector<int> sizes(n / M, M);
  int rem = n % M;
  if (rem > 0) {
    if (rem < m && !sizes.empty()) {
      sizes.back() -= m - rem;
      sizes.push_back(m);
    } else {
      sizes.push_back(rem);
    }
  }
  return sizes;
}

// Sort-tile order: indices into boxes, tiled along x (then y, then z) into slabs
// sized so that packing consecutive runs of M yields a near-square arrangement.
std::vector<int> str_order(const std::vector<Aabb>& boxes, const std::vector<int>& tie,
                           int dim, int M) {
  const int n = int(boxes.size());
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  auto by_axis = [&](int axis) {
    return [&, axis](int a, int b) {
      double ca = 0.5 * (boxes[a].lo[axis] + boxes[a].hi[axis]);
      double cb = 0.5 * (boxes[b].lo[axis] + boxes[b].hi[axis]);
      return ca < cb || (ca == cb && tie[a] < tie[b]);
    };
  };
  const int P = (n + M - 1) / M;
  const int S = ceil_root(P, dim);
  std::sort(idx.begin(), idx.end(), by_axis(0));
  if (dim == 2) {
    const std::size_t chunk = std::size_t(S) * M;
    for (std::size_t s = 0; s < idx.size(); s += chunk)
      std::sort(idx.begin() + s, idx.begin() + std::min(s + chunk, idx.size()), by_axis(1));
  } else {
    const std::size_t chunk0 = std::size_t(S) * S * M;
    const std::size_t chunk1 = std::size_t(S) * M;
    for (std::size_t s = 0; s < idx.size(); s += chunk0) {
      const std::size_t e0 = std::min(s + chunk0, idx.size());
      std::sort(idx.begin() + s, idx.begin() + e0, by_axis(1));
      for (std::size_t t = s; t < e0; t += chunk1)
        std::sort(idx.begin() + t, idx.begin() + std::min(t + chunk1, e0), by_axis(2));
    }
  }
  return idx;
}

}  // namespace

RTree::RTree(int dim, int m, int M) : dim_(dim), m_(m), M_(M) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("tree dimension must be 2 or 3");
  if (m < 1 || M < 2 || 2 * m > M)
    throw std::invalid_argument("tree order requires 1 <= m <= M/2");
}

int RTree::new_node(bool leaf) {
  RTreeNode n;
  n.leaf = leaf;
  nodes_.push_back(std::move(n));
  return int(nodes_.size()) - 1;
}

void RTree::recompute_box(int n) {
  RTreeNode& node = nodes_[n];
  Aabb box;
  if (node.leaf)
    for (const RTreeEntry& e : node.entries) box.extend(e.box);
  else
    for (int c : node.children) box.extend(nodes_[c].box);
  node.box = box;
}

void RTree::add_child(int parent, int child) {
  nodes_[parent].children.push_back(child);
  nodes_[child].parent = parent;
}

RTree RTree::build_str(int dim, int m, int M, std::vector<RTreeEntry> entries) {
  RTree t(dim, m, M);
  if (entries.empty()) return t;
  t.size_ = entries.size();

  // Pack the data entries into leaf nodes.
  std::vector<Aabb> boxes(entries.size());
  std::vector<int> tie(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (!entries[i].box.valid()) throw std::invalid_argument("invalid entry box");
    boxes[i] = entries[i].box;
    tie[i] = entries[i].id;
  }
  std::vector<int> order = str_order(boxes, tie, dim, M);
  std::vector<int> level;  // node ids of the level under construction
  std::size_t pos = 0;
  for (int sz : pack_sizes(int(entries.size()), m, M)) {
    int n = t.new_node(true);
    for (int k = 0; k < sz; ++k) t.nodes_[n].entries.push_back(entries[order[pos++]]);
    t.recompute_box(n);
    level.push_back(n);
  }
  t.height_ = 1;

  // Pack node levels until a single root remains.
  while (level.size() > 1) {
    boxes.resize(level.size());
    tie.resize(level.size());
    for (std::size_t i = 0; i < level.size(); ++i) {
      boxes[i] = t.nodes_[level[i]].box;
      tie[i] = level[i];
    }
    order = str_order(boxes, tie, dim, M);
    std::vector<int> next;
    pos = 0;
    for (int sz : pack_sizes(int(level.size()), m, M)) {
      int n = t.new_node(false);
      for (int k = 0; k < sz; ++k) t.add_child(n, level[order[pos++]]);
      t.recompute_box(n);
      next.push_back(n);
    }
    level.swap(next);
    ++t.height_;
  }
  t.root_ = level.front();
  return t;
}

int RTree::choose_subtree(const Aabb& box) const {
  int n = root_;
  while (!nodes_[n].leaf) {
    const std::vector<int>& kids = nodes_[n].children;
    const bool above_leaves = nodes_[kids.front()].leaf;
    int best = -1;
    double best_overlap = 0, best_enlarge = 0, best_area = 0;
    for (int c : kids) {
      const Aabb& cb = nodes_[c].box;
      Aabb grown = Aabb::hull(cb, box);
      double enlarge = grown.measure(dim_) - cb.measure(dim_);
      double overlap_delta = 0.0;
      if (above_leaves) {
        for (int s : kids) {
          if (s == c) continue;
          overlap_delta +=
              Aabb::overlap(grown, nodes_[s].box, dim_) - Aabb::overlap(cb, nodes_[s].box, dim_);
        }
      }
      double area = cb.measure(dim_);
      bool better;
      if (best < 0)
        better = true;
      else if (above_leaves && overlap_delta != best_overlap)
        better = overlap_delta < best_overlap;
      else if (enlarge != best_enlarge)
        better = enlarge < best_enlarge;
      else if (area != best_area)
        better = area < best_area;
      else
        better = c < best;
      if (better) {
        best = c;
        best_overlap = overlap_delta;
        best_enlarge = enlarge;
        best_area = area;
      }
    }
    n = best;
  }
  return n;
}

void RTree::split_node(int n) {
  RTreeNode& node = nodes_[n];
  struct Item {
    Aabb box;
    int id;       // entry id or child node id (tie-breaking)
    int payload;  // child node id for internal nodes, index into entries for leaves
  };
  std::vector<Item> items;
  if (node.leaf)
    for (std::size_t i = 0; i < node.entries.size(); ++i)
      items.push_back({node.entries[i].box, node.entries[i].id, int(i)});
  else
    for (int c : node.children) items.push_back({nodes_[c].box, c, c});
  const int total = int(items.size());

  // Enumerate split distributions: for each axis x sort key (lower/upper edge),
  // split the sorted sequence after k items, k in [m, total-m]. Pick the candidate
  // with the least overlap between the two group boxes; break ties by the smaller
  // summed margin, then by the id of the first item, then by enumeration order.
  std::vector<int> idx(total), best_idx;
  std::iota(idx.begin(), idx.end(), 0);
  double best_overlap = 0, best_margin = 0;
  int best_first = 0, best_k = -1;
  for (int axis = 0; axis < dim_; ++axis) {
    for (int key = 0; key < 2; ++key) {
      std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        double ca = key ? items[a].box.hi[axis] : items[a].box.lo[axis];
        double cb = key ? items[b].box.hi[axis] : items[b].box.lo[axis];
        return ca < cb || (ca == cb && items[a].id < items[b].id);
      });
      std::vector<Aabb> prefix(total), suffix(total);
      Aabb acc;
      for (int i = 0; i < total; ++i) {
        acc.extend(items[idx[i]].box);
        prefix[i] = acc;
      }
      acc = Aabb();
      for (int i = total - 1; i >= 0; --i) {
        acc.extend(items[idx[i]].box);
        suffix[i] = acc;
      }
      for (int k = m_; k <= total - m_; ++k) {
        double overlap = Aabb::overlap(prefix[k - 1], suffix[k], dim_);
        double margin = prefix[k - 1].margin(dim_) + suffix[k].margin(dim_);
        int first = items[idx[0]].id;
        bool better;
        if (best_k < 0)
          better = true;
        else if (overlap != best_overlap)
          better = overlap < best_overlap;
        else if (margin != best_margin)
          better = margin < best_margin;
        else if (first != best_first)
          better = first < best_first;
        else
          better = false;
        if (better) {
          best_overlap = overlap;
          best_margin = margin;
          best_first = first;
          best_k = k;
          best_idx = idx;
        }
      }
    }
  }

  // Materialize the two groups: `n` keeps the first group, a new sibling the rest.
  int n2 = new_node(node.leaf);
  RTreeNode& node2 = nodes_[n2];  // note: new_node may reallocate nodes_
  RTreeNode& node1 = nodes_[n];
  if (node1.leaf) {
    std::vector<RTreeEntry> e1, e2;
    for (int i = 0; i < best_k; ++i) e1.push_back(node1.entries[best_idx[i]]);
    for (int i = best_k; i < total; ++i) e2.push_back(node1.entries[best_idx[i]]);
    node1.entries.swap(e1);
    node2.entries.swap(e2);
  } else {
    std::vector<int> c1, c2;
    for (int i = 0; i < best_k; ++i) c1.push_back(items[best_idx[i]].payload);
    for (int i = best_k; i < total; ++i) c2.push_back(items[best_idx[i]].payload);
    node1.children.swap(c1);
    node2.children.clear();
    for (int c : c2) add_child(n2, c);
  }
  recompute_box(n);
  recompute_box(n2);

  if (n == root_) {
    int r = new_node(false);
    add_child(r, n);
    add_child(r, n2);
    recompute_box(r);
    root_ = r;
    ++height_;
    return;
  }
  int parent = nodes_[n].parent;
  auto& pk = nodes_[parent].children;
  pk.insert(std::find(pk.begin(), pk.end(), n) + 1, n2);
  nodes_[n2].parent = parent;
  if (nodes_[parent].fanout() > M_) split_node(parent);
}

void RTree::adjust_upward(int n) {
  for (int p = n; p >= 0; p = nodes_[p].parent) recompute_box(p);
}

void RTree::insert(const Aabb& box, int id) {
  if (!box.valid()) throw std::invalid_argument("invalid entry box");
  if (root_ < 0) {
    root_ = new_node(true);
    height_ = 1;
  }
  int leaf = choose_subtree(box);
  nodes_[leaf].entries.push_back({box, id});
  ++size_;
  adjust_upward(leaf);
  if (nodes_[leaf].fanout() > M_) split_node(leaf);
}

std::vector<int> RTree::nodes_at_depth(int depth) const {
  if (root_ < 0 || depth < 0 || depth >= height_)
    throw std::invalid_argument("depth out of range");
  std::vector<int> level{root_};
  for (int d = 0; d < depth; ++d) {
    std::vector<int> next;
    for (int n : level)
      for (int c : nodes_[n].children) next.push_back(c);
    level.swap(next);
  }
  return level;
}

RTree::Validation RTree::validate() const {
  auto fail = [](std::string msg) { return Validation{false, std::move(msg)}; };
  if (root_ < 0) return size_ == 0 ? Validation{} : fail("empty tree with nonzero size");

  std::unordered_set<int> seen_ids;
  std::size_t n_entries = 0;
  std::vector<std::pair<int, int>> stack{{root_, 0}};
  int leaf_depth = -1;
  while (!stack.empty()) {
    auto [n, depth] = stack.back();
    stack.pop_back();
    const RTreeNode& node = nodes_[n];
    if (!node.box.valid()) return fail("node " + std::to_string(n) + " has invalid box");

    Aabb hull;
    if (node.leaf) {
      if (leaf_depth < 0) leaf_depth = depth;
      if (depth != leaf_depth) return fail("leaves at unequal depths");
      if (depth != height_ - 1) return fail("leaf depth does not match height");
      for (const RTreeEntry& e : node.entries) {
        hull.extend(e.box);
        if (!seen_ids.insert(e.id).second)
          return fail("duplicate entry id " + std::to_string(e.id));
      }
      n_entries += node.entries.size();
    } else {
      if (!node.entries.empty()) return fail("internal node with data entries");
      for (int c : node.children) {
        if (nodes_[c].parent != n) return fail("broken parent link at node " + std::to_string(c));
        hull.extend(nodes_[c].box);
        stack.push_back({c, depth + 1});
      }
    }
    if (!(hull == node.box)) return fail("stale bounding box at node " + std::to_string(n));

    const int f = node.fanout();
    if (n == root_) {
      if (!node.leaf && f < 2) return fail("internal root with fewer than two children");
      if (f > M_) return fail("root overfull");
    } else if (f < m_ || f > M_) {
      return fail("node " + std::to_string(n) + " violates fanout bounds");
    }
  }
  if (n_entries != size_) return fail("entry count mismatch");
  return {};
}

}  // namespace rtagg
