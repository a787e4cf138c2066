#pragma once

#include <string>
#include <vector>

#include "rtagg/agglomeration.hpp"

namespace rtagg {

// Per-agglomerate shape-quality numbers.
//   uf: diameter relative to the largest agglomerate diameter of the mesh,
//   cr: inscribed radius over half the diameter (the circumscribed-radius proxy),
//   br: agglomerate measure over bounding-box measure.
struct ElementMetrics {
  double uf = 0.0;
  double cr = 0.0;
  double br = 0.0;
};

struct MetricsReport {
  std::vector<ElementMetrics> per_agglomerate;
  double uf_min = 0, uf_max = 0, uf_avg = 0;
  double cr_min = 0, cr_max = 0, cr_avg = 0;
  double br_min = 0, br_max = 0, br_avg = 0;
  double of = 0;  // domain measure over summed bounding-box measures
};

double uniformity_factor(const PolytopalMesh& poly, int a);
double box_ratio(const PolytopalMesh& poly, int a);
double overlap_factor(const PolytopalMesh& poly);

// Radius of the largest inscribed ball, found by a quadtree/octree
// pole-of-inaccessibility search over the agglomerate's bounding box, resolved to
// tol_rel * diameter. For a disconnected agglomerate the largest face-connected
// component (ties: the one containing the lowest cell id) is measured.
double inradius(const PolytopalMesh& poly, int a, double tol_rel = 1e-3);

double circle_ratio(const PolytopalMesh& poly, int a, double tol_rel = 1e-3);

MetricsReport metrics_report(const PolytopalMesh& poly, double tol_rel = 1e-3);

// CSV: "agglomerate,uf,cr,br" rows followed by min/max/avg summary rows and an
// "of" row carrying the overlap factor.
void write_metrics_csv(const MetricsReport& report, const std::string& path);

}  // namespace rtagg
