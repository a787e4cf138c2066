#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rtagg/mesh.hpp"
#include "rtagg/rtree.hpp"

namespace rtagg {

// Surjective assignment of fine cells to agglomerates 0..n_agglomerates-1.
struct Partition {
  int n_cells = 0;
  int n_agglomerates = 0;
  std::vector<int> assignment;  // cell id -> agglomerate id
};

// Throws std::invalid_argument when the assignment is out of range, has the wrong
// size, or leaves an agglomerate id unused (empty part).
void validate_partition(const Partition& p);

// Nested sequence of partitions, finest first. levels[0] is the identity partition
// of the fine mesh; level sizes strictly decrease; parents[l] maps a level-l
// agglomerate id to its containing level-(l+1) agglomerate.
struct AgglomerateHierarchy {
  std::string strategy;  // "rtree" | "rtree-material" | "graph" | "external"
  int n_cells = 0;
  std::vector<Partition> levels;
  std::vector<std::vector<int>> parents;

  int n_levels() const { return int(levels.size()); }
};

// Checks partition validity per level, strictly decreasing sizes, identity at
// level 0, and parent-map consistency (nesting). Throws std::invalid_argument.
void validate_hierarchy(const AgglomerateHierarchy& h);

// All fine-cell ids stored in leaves below `node`, by recursive descent,
// in deterministic left-to-right order.
std::vector<int> extract_leaves(const RTree& tree, int node);

// One agglomerate per tree node at the given depth (0 = root).
// Tree entry ids must be exactly 0..n_cells-1.
Partition compute_agglomerates(const RTree& tree, int depth, int n_cells);

// Wall-clock breakdown of the agglomeration phases, in seconds. `build` is the
// tree construction (filled by callers that own that step); `visit` is the tree
// traversal collecting per-node cell lists; `flag` is writing the per-level
// cell -> agglomerate assignments and parent maps.
struct AggTimings {
  double build = 0.0;
  double visit = 0.0;
  double flag = 0.0;

  double total() const { return build + visit + flag; }
};

// Full hierarchy from one tree: identity partition, then one level per tree depth
// from the leaf level up to the root. When `timings` is given, its visit/flag
// fields are filled (build is left untouched).
AgglomerateHierarchy build_hierarchy(const RTree& tree, int n_cells,
                                     AggTimings* timings = nullptr);

// Builds one STR tree of order (m, M) per material label and concatenates the
// per-material partitions level by level (materials ordered by label). A material
// whose tree is shallower than the deepest one repeats its coarsest partition on
// the remaining levels. Requires mesh.material to be populated.
AgglomerateHierarchy build_hierarchy_by_material(const BackgroundMesh& mesh, int m, int M);

// ---------------------------------------------------------------------------
// Polytopal view of a partition.

struct Agglomerate {
  std::vector<int> cells;
  Aabb mbr;
  double measure = 0.0;
  double diameter = 0.0;
  bool connected = true;
  std::vector<int> faces;  // indices into PolytopalMesh::faces touching this agglomerate
};

// A fine-mesh facet on an agglomerate boundary. `inner`/`outer` are the
// agglomerates on the two sides with inner < outer (outer = -1 on the domain
// boundary); `sign` converts the fine face's owner-outward normal into the
// normal pointing from `inner` to `outer`.
struct PolytopalFace {
  int fine_face = -1;
  int inner = -1;
  int outer = -1;
  double sign = 1.0;
};

struct PolytopalMesh {
  const BackgroundMesh* fine = nullptr;  // non-owning: the fine mesh must outlive this
  Partition partition;
  std::vector<Agglomerate> agglomerates;
  std::vector<PolytopalFace> faces;  // skeleton: interfaces plus domain boundary
  double h_max = 0.0;                // max agglomerate diameter
  std::vector<int> disconnected;     // ids of non-face-connected agglomerates

  int n_agglomerates() const { return int(agglomerates.size()); }
  Vec face_normal(int f) const {  // unit normal from `inner` to `outer`
    return faces[f].sign * fine->face_normal(faces[f].fine_face);
  }
};

// Builds agglomerate cell lists, bounding boxes, measures, diameters (convex hull
// + farthest pair in 2D, farthest pair over boundary-face vertices in 3D),
// skeleton faces, and connectivity flags.
PolytopalMesh build_polytopal_mesh(const BackgroundMesh& mesh, Partition partition);

// ---------------------------------------------------------------------------
// Graph-based baseline partitioner (recursive inertial bisection on the cell
// centroids with a connectivity repair pass). `seed` only perturbs the principal
// axis start vector in 3D; results are deterministic per seed.
Partition graph_partition(const BackgroundMesh& mesh, int n_parts, std::uint64_t seed);

// Two-level hierarchy (identity + parts) wrapping graph_partition.
AgglomerateHierarchy build_graph_hierarchy(const BackgroundMesh& mesh, int n_parts,
                                           std::uint64_t seed);

// Text graph format: "N M" header, then one 1-indexed adjacency line per cell.
void export_metis_graph(const DualGraph& graph, const std::string& path);
// Flat partition file (one part id per line). Validates the result.
Partition import_partition(const std::string& path, int n_cells);

// ---------------------------------------------------------------------------
// Versioned JSON document for hierarchies.
void save_hierarchy(const AgglomerateHierarchy& h, const std::string& path);
AgglomerateHierarchy load_hierarchy(const std::string& path, int n_cells);

}  // namespace rtagg
