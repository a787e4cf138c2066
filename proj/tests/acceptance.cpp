// Release acceptance suite: ten end-to-end checks covering agglomeration
// geometry, quality metrics, DG convergence, multigrid robustness, transfer
// exactness, assembly soundness, and agglomeration speed. Each criterion
// prints exactly one [PASS]/[FAIL] line with its measured values and
// tolerances; the exit code is the number of hard failures (criterion 10 is a
// soft target and is reported without gating).

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "rtagg/metrics.hpp"
#include "rtagg/multigrid.hpp"
#include "rtagg/pipeline.hpp"
#include "rtagg/timer.hpp"

using namespace rtagg;

namespace {

std::string fmt(const char* spec, ...) {
  char buf[1024];
  va_list args;
  va_start(args, spec);
  std::vsnprintf(buf, sizeof buf, spec, args);
  va_end(args);
  return buf;
}

int g_hard_failures = 0;

void report(int criterion, bool pass, const std::string& detail, bool soft = false) {
  std::printf("[%s] criterion %d%s: %s\n", pass ? "PASS" : "FAIL", criterion,
              soft ? " (soft)" : "", detail.c_str());
  std::fflush(stdout);
  if (!pass && !soft) ++g_hard_failures;
}

void report_exception(int criterion, const std::exception& e, bool soft = false) {
  report(criterion, false, fmt("exception: %s", e.what()), soft);
}

struct SplitMix {
  std::uint64_t state;
  double next() {  // uniform in [-1, 1)
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    z = z ^ (z >> 31);
    return 2.0 * (double(z >> 11) * 0x1.0p-53) - 1.0;
  }
  double in(double lo, double hi) { return lo + 0.5 * (next() + 1.0) * (hi - lo); }
};

// True when the level is exactly the nb x nb Cartesian block arrangement of an
// n x n structured quad grid (cells row-major), i.e. blocks of b = n/nb cells
// map one-to-one onto agglomerates.
bool is_cartesian_arrangement(int n, int nb, const Partition& level, std::string& why) {
  int b = n / nb;
  if (nb * b != n || level.n_agglomerates != nb * nb) {
    why = fmt("expected %d agglomerates, level has %d", nb * nb, level.n_agglomerates);
    return false;
  }
  std::vector<int> block_to_agg(nb * nb, -1);
  std::vector<int> agg_used(nb * nb, 0);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      int cell = j * n + i;
      int block = (j / b) * nb + (i / b);
      int agg = level.assignment[cell];
      if (block_to_agg[block] < 0) {
        block_to_agg[block] = agg;
        if (agg_used[agg]++) {
          why = fmt("agglomerate %d spans more than one block", agg);
          return false;
        }
      } else if (block_to_agg[block] != agg) {
        why = fmt("block %d is split between agglomerates %d and %d", block,
                  block_to_agg[block], agg);
        return false;
      }
    }
  }
  return true;
}

// UF/BR/OF at their exact values and CR within cr_tol of 1/sqrt(2), over every
// agglomerate of the level.
bool square_block_metrics(const PolytopalMesh& poly, double cr_tol, std::string& detail) {
  MetricsReport rep = metrics_report(poly, 1e-4);
  double uf_dev = 0.0, br_dev = 0.0, cr_dev = 0.0;
  for (const ElementMetrics& m : rep.per_agglomerate) {
    uf_dev = std::max(uf_dev, std::abs(m.uf - 1.0));
    br_dev = std::max(br_dev, std::abs(m.br - 1.0));
    cr_dev = std::max(cr_dev, std::abs(m.cr - 1.0 / std::sqrt(2.0)));
  }
  double of_dev = std::abs(rep.of - 1.0);
  bool pass = uf_dev <= 1e-12 && br_dev <= 1e-12 && cr_dev <= cr_tol && of_dev <= 1e-12;
  detail = fmt("UF=1 (max dev %.2g <= 1e-12), CR=%.6g (max dev %.2g <= %g), "
               "BR=1 (max dev %.2g <= 1e-12), OF=%.6g (dev %.2g <= 1e-12)",
               uf_dev, rep.cr_avg, cr_dev, cr_tol, br_dev, rep.of, of_dev);
  return pass;
}

int find_level_with(const AgglomerateHierarchy& hier, int n_agg) {
  for (int l = 0; l < hier.n_levels(); ++l)
    if (hier.levels[l].n_agglomerates == n_agg) return l;
  return -1;
}

// ---------------------------------------------------------------------------
// criterion 3: partition / nesting invariants

int check_hierarchy_invariants(const BackgroundMesh& mesh, const AgglomerateHierarchy& hier,
                               std::string& first_violation) {
  int violations = 0;
  auto flag = [&](const std::string& msg) {
    if (violations == 0) first_violation = msg;
    ++violations;
  };

  if (hier.n_levels() < 1) {
    flag("hierarchy has no levels");
    return violations;
  }
  // level 0 is the identity partition
  const Partition& l0 = hier.levels[0];
  if (l0.n_agglomerates != mesh.n_cells()) flag("level 0 is not the identity partition");
  for (int c = 0; c < std::min<int>(l0.assignment.size(), mesh.n_cells()); ++c)
    if (l0.assignment[c] != c) {
      flag(fmt("level 0 maps cell %d to %d", c, l0.assignment[c]));
      break;
    }

  for (int l = 0; l < hier.n_levels(); ++l) {
    const Partition& part = hier.levels[l];
    if (part.n_cells != mesh.n_cells() || int(part.assignment.size()) != mesh.n_cells()) {
      flag(fmt("level %d has wrong assignment size", l));
      continue;
    }
    // surjective assignment into [0, n_agglomerates)
    std::vector<int> count(part.n_agglomerates, 0);
    for (int c = 0; c < part.n_cells; ++c) {
      int a = part.assignment[c];
      if (a < 0 || a >= part.n_agglomerates) {
        flag(fmt("level %d assigns cell %d out of range", l, c));
        break;
      }
      ++count[a];
    }
    for (int a = 0; a < part.n_agglomerates; ++a)
      if (count[a] == 0) {
        flag(fmt("level %d agglomerate %d is empty", l, a));
        break;
      }
    // strictly decreasing sizes
    if (l + 1 < hier.n_levels() &&
        hier.levels[l + 1].n_agglomerates >= part.n_agglomerates)
      flag(fmt("level %d -> %d does not shrink", l, l + 1));
  }

  // parent maps: consistency with assignments, surjectivity, box nesting
  if (int(hier.parents.size()) != hier.n_levels() - 1)
    flag("parent map count does not match level count");
  for (int l = 0; l + 1 < hier.n_levels(); ++l) {
    const Partition& fine = hier.levels[l];
    const Partition& coarse = hier.levels[l + 1];
    if (int(hier.parents[l].size()) != fine.n_agglomerates) {
      flag(fmt("parents[%d] has wrong size", l));
      continue;
    }
    for (int c = 0; c < mesh.n_cells(); ++c) {
      if (hier.parents[l][fine.assignment[c]] != coarse.assignment[c]) {
        flag(fmt("level %d cell %d: parent map disagrees with assignments", l, c));
        break;
      }
    }
    std::vector<int> children(coarse.n_agglomerates, 0);
    for (int a = 0; a < fine.n_agglomerates; ++a) {
      int pa = hier.parents[l][a];
      if (pa < 0 || pa >= coarse.n_agglomerates) {
        flag(fmt("parents[%d][%d] out of range", l, a));
        break;
      }
      ++children[pa];
    }
    for (int a = 0; a < coarse.n_agglomerates; ++a)
      if (children[a] == 0) {
        flag(fmt("level %d agglomerate %d has no children", l + 1, a));
        break;
      }

    // geometric nesting of bounding boxes
    auto level_boxes = [&](const Partition& part) {
      std::vector<Aabb> boxes(part.n_agglomerates);  // default boxes are inverted
      for (int c = 0; c < mesh.n_cells(); ++c)
        boxes[part.assignment[c]].extend(mesh.cell_bbox(c));
      return boxes;
    };
    std::vector<Aabb> fb = level_boxes(fine);
    std::vector<Aabb> cb = level_boxes(coarse);
    double scale = 0.0;
    for (const Aabb& box : cb)
      for (int d = 0; d < mesh.dim; ++d) scale = std::max(scale, box.hi[d] - box.lo[d]);
    double eps = 1e-12 * (1.0 + scale);
    for (int a = 0; a < fine.n_agglomerates; ++a) {
      const Aabb& child = fb[a];
      const Aabb& parent = cb[hier.parents[l][a]];
      bool nested = true;
      for (int d = 0; d < mesh.dim; ++d)
        nested = nested && child.lo[d] >= parent.lo[d] - eps &&
                 child.hi[d] <= parent.hi[d] + eps;
      if (!nested) {
        flag(fmt("level %d agglomerate %d box is not inside its parent", l, a));
        break;
      }
    }
  }
  return violations;
}

// ---------------------------------------------------------------------------
// criteria 1 and 2

void criterion_1_and_2() {
  bool pass1 = false, pass2 = false;
  std::string detail1, detail2;
  double elapsed = 0.0;
  try {
    WallTimer timer;
    BackgroundMesh mesh = generate_structured_quad(32);
    AgglomerateHierarchy hier = agglomerate_rtree(mesh, 2, 4);

    int l16 = find_level_with(hier, 16);
    std::string why;
    if (l16 < 0) {
      detail1 = "no hierarchy level has 16 agglomerates";
    } else if (!is_cartesian_arrangement(32, 4, hier.levels[l16], why)) {
      detail1 = "16-agglomerate level is not a 4x4 Cartesian arrangement: " + why;
    } else {
      PolytopalMesh poly = build_polytopal_mesh(mesh, hier.levels[l16]);
      std::string metrics;
      pass1 = square_block_metrics(poly, 1e-3, metrics);
      elapsed = timer.seconds();
      pass1 = pass1 && elapsed < 1.0;
      detail1 = fmt("4x4 Cartesian level found; %s; runtime %.3f s < 1 s", metrics.c_str(),
                    elapsed);
    }
    report(1, pass1, detail1);

    // criterion 2: the 64-agglomerate level refines criterion 1's by 2x2
    int l64 = find_level_with(hier, 64);
    if (l16 < 0 || l64 < 0) {
      detail2 = "missing the 16- or 64-agglomerate level";
    } else if (!is_cartesian_arrangement(32, 8, hier.levels[l64], why)) {
      detail2 = "64-agglomerate level is not the 8x8 Cartesian arrangement: " + why;
    } else {
      // cell-set containment: each fine agglomerate lies in exactly one coarse
      // one, and each coarse agglomerate is the union of exactly 4 fine ones
      std::map<int, std::set<int>> children;  // coarse agg -> fine aggs
      std::map<int, int> fine_parent;         // fine agg -> coarse agg
      bool containment = true;
      for (int c = 0; c < mesh.n_cells(); ++c) {
        int af = hier.levels[l64].assignment[c];
        int ac = hier.levels[l16].assignment[c];
        auto it = fine_parent.find(af);
        if (it == fine_parent.end())
          fine_parent[af] = ac;
        else if (it->second != ac)
          containment = false;
        children[ac].insert(af);
      }
      bool split4 = int(children.size()) == 16;
      for (const auto& [ac, kids] : children) split4 = split4 && kids.size() == 4;
      std::string metrics;
      PolytopalMesh poly = build_polytopal_mesh(mesh, hier.levels[l64]);
      bool metrics_ok = square_block_metrics(poly, 1e-3, metrics);
      pass2 = containment && split4 && metrics_ok;
      detail2 = fmt("8x8 Cartesian level found; cell-set containment %s; every coarse "
                    "agglomerate has exactly 4 children: %s; %s",
                    containment ? "holds" : "violated", split4 ? "yes" : "no",
                    metrics.c_str());
    }
    report(2, pass2, detail2);
  } catch (const std::exception& e) {
    if (!pass1) report_exception(1, e);
    report_exception(2, e);
  }
}

// ---------------------------------------------------------------------------
// criterion 3

void criterion_3(const std::string& fixtures_dir) {
  try {
    struct Item {
      std::string name;
      BackgroundMesh mesh;
      AgglomerateHierarchy hier;
    };
    std::vector<Item> items;
    auto add_rtree = [&](const std::string& name, BackgroundMesh mesh, int m, int M) {
      AgglomerateHierarchy hier = agglomerate_rtree(mesh, m, M);
      items.push_back({name, std::move(mesh), std::move(hier)});
    };
    add_rtree("quad:16 (2,4)", make_mesh("quad:16"), 2, 4);
    add_rtree("quad:32 (2,4)", make_mesh("quad:32"), 2, 4);
    add_rtree("quad:32 (4,8)", make_mesh("quad:32"), 4, 8);
    add_rtree("hex:8 (2,4)", make_mesh("hex:8"), 2, 4);
    add_rtree("hex:8 (4,8)", make_mesh("hex:8"), 4, 8);
    add_rtree("pquad:16 (2,4)", make_mesh("pquad:16:0.25:3"), 2, 4);
    add_rtree("pquad:32 (2,4)", make_mesh("pquad:32:0.2:9"), 2, 4);
    add_rtree("two_blocks.msh (2,4)", make_mesh(fixtures_dir + "/two_blocks.msh"), 2, 4);
    add_rtree("cube_tets.msh (2,4)", make_mesh(fixtures_dir + "/cube_tets.msh"), 2, 4);
    {
      BackgroundMesh mesh = make_mesh(fixtures_dir + "/two_blocks.msh");
      AgglomerateHierarchy hier = build_hierarchy_by_material(mesh, 2, 4);
      items.push_back({"two_blocks.msh by material", std::move(mesh), std::move(hier)});
    }
    {
      BackgroundMesh mesh = make_mesh("quad:16");
      AgglomerateHierarchy hier = build_graph_hierarchy(mesh, 16, 0);
      items.push_back({"quad:16 graph 16 parts", std::move(mesh), std::move(hier)});
    }

    int total_violations = 0;
    int total_levels = 0;
    std::string first;
    for (const Item& item : items) {
      std::string why;
      int v = check_hierarchy_invariants(item.mesh, item.hier, why);
      if (v > 0 && total_violations == 0) first = item.name + ": " + why;
      total_violations += v;
      total_levels += item.hier.n_levels();
    }
    bool pass = total_violations == 0;
    std::string detail =
        fmt("%d meshes / %d hierarchy levels checked for identity, surjectivity, "
            "strict shrinking, parent consistency, and box nesting: %d violations",
            int(items.size()), total_levels, total_violations);
    if (!pass) detail += " (first: " + first + ")";
    report(3, pass, detail);
  } catch (const std::exception& e) {
    report_exception(3, e);
  }
}

// ---------------------------------------------------------------------------
// criterion 4

void criterion_4() {
  try {
    WallTimer timer;
    BackgroundMesh mesh = generate_structured_quad(32);
    AgglomerateHierarchy hier = agglomerate_rtree(mesh, 2, 4);
    int l256 = find_level_with(hier, 256);
    if (l256 < 0) {
      report(4, false, "no hierarchy level has 256 agglomerates");
      return;
    }
    std::vector<PConvRow> rows = run_p_convergence(
        mesh, hier.levels[l256], {1, 2, 3, 4, 5}, BasisFamily::Tensor, manufactured_case(2));
    const double reference[3] = {1.89974e-3, 2.93253e-5, 3.48542e-7};
    bool pass = true;
    std::string detail = "L2 errors on the 256-agglomerate level:";
    for (int k = 0; k < 3; ++k) {
      double rel = std::abs(rows[k].l2 - reference[k]) / reference[k];
      bool ok = rel <= 0.25;
      pass = pass && ok;
      detail += fmt(" p=%d %.6g (ref %.6g, dev %.1f%% <= 25%%)%s", rows[k].p, rows[k].l2,
                    reference[k], 100.0 * rel, ok ? "" : " VIOLATED");
    }
    for (int k = 3; k < 5; ++k) {
      bool ok = rows[k].l2 <= rows[k - 1].l2 / 30.0 || rows[k].l2 <= 1e-10;
      pass = pass && ok;
      detail += fmt("; p=%d %.6g (>=30x drop or <=1e-10)%s", rows[k].p, rows[k].l2,
                    ok ? "" : " VIOLATED");
    }
    double elapsed = timer.seconds();
    pass = pass && elapsed < 30.0;
    detail += fmt("; runtime %.1f s < 30 s", elapsed);
    report(4, pass, detail);
  } catch (const std::exception& e) {
    report_exception(4, e);
  }
}

// ---------------------------------------------------------------------------
// criterion 5

void criterion_5() {
  try {
    HConvResult res =
        run_h_convergence({8, 16, 32, 64}, 1, {1, 2, 3}, BasisFamily::Tensor, 2, 4);
    bool pass = true;
    std::string detail = "least-squares L2 orders over four meshes at fixed "
                         "agglomerate-to-cell ratio:";
    const double target[3] = {2.0, 3.0, 4.0};
    for (int k = 0; k < 3; ++k) {
      double dev = std::abs(res.l2_order[k] - target[k]);
      bool ok = dev <= 0.2;
      pass = pass && ok;
      detail += fmt(" Q%d %.3f (target %.0f, dev %.2f <= 0.2)%s", k + 1, res.l2_order[k],
                    target[k], dev, ok ? "" : " VIOLATED");
    }
    report(5, pass, detail);
  } catch (const std::exception& e) {
    report_exception(5, e);
  }
}

// ---------------------------------------------------------------------------
// criteria 6 and 7 (the built ladders are reused by criterion 8)

struct Ladders {
  // deepest ladders built for criteria 6 and 7, kept for the transfer checks
  BackgroundMesh mesh_2d, mesh_3d;
  AgglomerateHierarchy hier_2d, hier_3d;
  std::unique_ptr<MgHierarchy> mg_2d, mg_3d;
};

void criterion_6(Ladders& out) {
  try {
    WallTimer timer;
    out.mesh_2d = generate_structured_quad(64);
    out.hier_2d = agglomerate_rtree(out.mesh_2d, 2, 4);
    std::vector<MgLevelRow> rows = run_mg_levels(out.mesh_2d, out.hier_2d, {2, 3, 4}, {1},
                                                 BasisFamily::Tensor, constant_case());
    int lo = rows[0].iters_pcg, hi = rows[0].iters_pcg;
    std::string counts;
    for (const MgLevelRow& row : rows) {
      lo = std::min(lo, row.iters_pcg);
      hi = std::max(hi, row.iters_pcg);
      counts += fmt("%s%d levels: %d", counts.empty() ? "" : ", ", row.levels, row.iters_pcg);
    }
    int plain = rows[0].iters_plain_cg;
    double elapsed = timer.seconds();
    bool pass = hi <= 8 && (hi - lo) <= 2 && plain >= 150 && elapsed < 60.0;
    report(6, pass,
           fmt("preconditioned CG iterations on the 64x64 grid (f=1, g=0, p=1): %s "
               "(all <= 8, spread %d <= 2); plain CG %d >= 150; runtime %.1f s < 60 s",
               counts.c_str(), hi - lo, plain, elapsed));
    // keep the deepest ladder for criterion 8
    out.mg_2d = std::make_unique<MgHierarchy>(build_mg(
        out.mesh_2d, out.hier_2d, 4, 1, BasisFamily::Tensor, constant_case()));
  } catch (const std::exception& e) {
    report_exception(6, e);
  }
}

void criterion_7(Ladders& out) {
  try {
    WallTimer timer;
    out.mesh_3d = generate_structured_hex(16);
    out.hier_3d = agglomerate_rtree(out.mesh_3d, 4, 8);
    out.mg_3d = std::make_unique<MgHierarchy>(build_mg(
        out.mesh_3d, out.hier_3d, 4, 1, BasisFamily::Tensor, constant_case()));
    const MgHierarchy& mg = *out.mg_3d;

    std::string sizes;
    for (int l = mg.n_levels() - 1; l >= 0; --l)
      sizes += fmt("%s%d", sizes.empty() ? "" : "/", mg.levels[l]->a.rows());
    auto precond = [&](const std::vector<double>& r) { return mg.v_cycle(r); };
    SolveResult pre = pcg(mg.fine_matrix(), mg.fine_rhs, precond);
    SolveResult plain = pcg(mg.fine_matrix(), mg.fine_rhs, nullptr, 1e-12, 1e-9, 100000);
    double elapsed = timer.seconds();
    bool pass = pre.converged && pre.iterations <= 8 && plain.iterations >= 50 &&
                elapsed < 300.0;
    report(7, pass,
           fmt("16^3 hex grid, (m,M)=(4,8), p=1, ladder DoFs %s: preconditioned CG %d <= 8, "
               "plain CG %d >= 50; runtime %.1f s < 300 s",
               sizes.c_str(), pre.iterations, plain.iterations, elapsed));
  } catch (const std::exception& e) {
    report_exception(7, e);
  }
}

// ---------------------------------------------------------------------------
// criterion 8

double eval_dg_function(const DgSpace& space, const std::vector<double>& coeffs, int agg,
                        const Vec& x) {
  std::vector<double> values;
  std::vector<Vec> grads;
  space.basis[agg].eval(x, values, grads);
  double s = 0.0;
  for (int i = 0; i < space.local_dim(agg); ++i) s += coeffs[space.offset[agg] + i] * values[i];
  return s;
}

// Max relative pointwise mismatch between a random coarse function and its
// prolongation, over `vectors` random coefficient vectors and `samples` points
// per vector.
double max_transfer_mismatch(const MgHierarchy& mg, const std::vector<int>& parent_of,
                             int fine_level, int vectors, int samples, std::uint64_t seed) {
  const DgSpace& fine = mg.levels[fine_level]->space;
  const DgSpace& coarse = mg.levels[fine_level + 1]->space;
  const CsrMatrix& p = mg.levels[fine_level]->p;
  SplitMix rng{seed};
  double worst = 0.0;
  int dim = fine.poly->fine->dim;
  for (int v = 0; v < vectors; ++v) {
    std::vector<double> vc(coarse.n_dofs());
    for (double& c : vc) c = rng.next();
    std::vector<double> vf = p.apply(vc);
    for (int s = 0; s < samples; ++s) {
      int agg = int((rng.next() + 1.0) * 0.5 * fine.poly->n_agglomerates());
      agg = std::min(agg, fine.poly->n_agglomerates() - 1);
      const Aabb& box = fine.poly->agglomerates[agg].mbr;
      Vec x{0, 0, 0};
      for (int d = 0; d < dim; ++d) x[d] = rng.in(box.lo[d], box.hi[d]);
      double uf = eval_dg_function(fine, vf, agg, x);
      double uc = eval_dg_function(coarse, vc, parent_of[agg], x);
      worst = std::max(worst, std::abs(uf - uc) / std::max(1.0, std::abs(uc)));
    }
  }
  return worst;
}

void criterion_8(const Ladders& ladders) {
  try {
    if (!ladders.mg_2d || !ladders.mg_3d) {
      report(8, false, "ladders from criteria 6-7 are unavailable");
      return;
    }
    double worst = 0.0;
    int pairs = 0;
    for (int l = 0; l + 1 < ladders.mg_2d->n_levels(); ++l) {
      worst = std::max(worst, max_transfer_mismatch(*ladders.mg_2d, ladders.hier_2d.parents[l],
                                                    l, 20, 10, 1000 + l));
      ++pairs;
    }
    for (int l = 0; l + 1 < ladders.mg_3d->n_levels(); ++l) {
      worst = std::max(worst, max_transfer_mismatch(*ladders.mg_3d, ladders.hier_3d.parents[l],
                                                    l, 20, 10, 2000 + l));
      ++pairs;
    }
    bool pass = worst <= 1e-12;
    report(8, pass,
           fmt("%d level pairs, 20 random coarse vectors x 10 samples each (200 per pair): "
               "max relative pointwise mismatch %.2g <= 1e-12",
               pairs, worst));
  } catch (const std::exception& e) {
    report_exception(8, e);
  }
}

// ---------------------------------------------------------------------------
// criterion 9

void criterion_9(const std::string& fixtures_dir) {
  try {
    struct Target {
      std::string name;
      BackgroundMesh mesh;
      Partition level;
    };
    std::vector<Target> targets;
    auto add = [&](const std::string& name, BackgroundMesh mesh, int m, int M, int n_agg) {
      AgglomerateHierarchy hier = agglomerate_rtree(mesh, m, M);
      int l = find_level_with(hier, n_agg);
      if (l < 0) throw std::runtime_error(name + ": expected level not found");
      targets.push_back({name, std::move(mesh), hier.levels[l]});
    };
    add("quad:32", make_mesh("quad:32"), 2, 4, 256);
    add("quad:64", make_mesh("quad:64"), 2, 4, 256);
    add("hex:16", make_mesh("hex:16"), 4, 8, 64);
    add("pquad:16", make_mesh("pquad:16:0.25:3"), 2, 4, 64);
    add("cube_tets.msh", make_mesh(fixtures_dir + "/cube_tets.msh"), 2, 4, 12);
    {
      BackgroundMesh mesh = make_mesh(fixtures_dir + "/two_blocks.msh");
      AgglomerateHierarchy hier = build_hierarchy_by_material(mesh, 2, 4);
      targets.push_back({"two_blocks.msh", std::move(mesh), hier.levels[1]});
    }

    double worst_sym = 0.0;
    int spd_failures = 0, systems = 0;
    std::string first_fail;
    for (const Target& t : targets) {
      PolytopalMesh poly = build_polytopal_mesh(t.mesh, t.level);
      PoissonCase pc = t.mesh.dim == 2 ? manufactured_case(2) : manufactured_case(3);
      for (int p = 1; p <= 3; ++p) {
        for (BasisFamily family : {BasisFamily::Tensor, BasisFamily::TotalDegree}) {
          if (family == BasisFamily::TotalDegree && p != 2) continue;  // one per family extra
          DgSpace space = build_space(poly, p, family);
          DgSystem sys = assemble(space, pc);
          ++systems;
          worst_sym = std::max(worst_sym, sys.a.symmetry_error() / sys.a.max_abs());
          CholeskyFactor chol;
          if (!chol.factor(sys.a)) {
            ++spd_failures;
            if (first_fail.empty()) first_fail = fmt("%s p=%d", t.name.c_str(), p);
          }
        }
      }
    }

    // basis gradients against central finite differences
    double worst_grad = 0.0;
    Aabb box2, box3;
    box2.lo = {0.1, -0.3, 0.0};
    box2.hi = {1.4, 0.9, 0.0};
    box3.lo = {0.0, 0.0, 0.0};
    box3.hi = {2.0, 1.0, 1.5};
    SplitMix rng{314159};
    for (int dim : {2, 3}) {
      const Aabb& box = dim == 2 ? box2 : box3;
      for (int p : {1, 2, 3}) {
        for (BasisFamily family : {BasisFamily::Tensor, BasisFamily::TotalDegree}) {
          BoxBasis basis(dim, p, family, box);
          std::vector<double> vp, vm, vals;
          std::vector<Vec> grads, gdummy;
          for (int s = 0; s < 5; ++s) {
            Vec x{0, 0, 0};
            for (int d = 0; d < dim; ++d) x[d] = rng.in(box.lo[d], box.hi[d]);
            basis.eval(x, vals, grads);
            for (int d = 0; d < dim; ++d) {
              Vec xp = x, xm = x;
              const double h = 1e-6;
              xp[d] += h;
              xm[d] -= h;
              basis.eval(xp, vp, gdummy);
              basis.eval(xm, vm, gdummy);
              for (int i = 0; i < basis.size(); ++i) {
                double fd = (vp[i] - vm[i]) / (2.0 * h);
                double rel = std::abs(grads[i][d] - fd) / std::max(1.0, std::abs(grads[i][d]));
                worst_grad = std::max(worst_grad, rel);
              }
            }
          }
        }
      }
    }

    bool pass = worst_sym <= 1e-14 && spd_failures == 0 && worst_grad <= 1e-6;
    std::string detail =
        fmt("%d assembled systems over %d meshes: max relative asymmetry %.2g <= 1e-14, "
            "Cholesky SPD failures %d; basis gradients vs finite differences: max relative "
            "deviation %.2g <= 1e-6",
            systems, int(targets.size()), worst_sym, spd_failures, worst_grad);
    if (spd_failures > 0) detail += " (first: " + first_fail + ")";
    report(9, pass, detail);
  } catch (const std::exception& e) {
    report_exception(9, e);
  }
}

// ---------------------------------------------------------------------------
// criterion 10 (soft)

void criterion_10() {
  try {
    BackgroundMesh mesh = generate_perturbed_quad_grid(364, 256, 0.2, 42);
    AggTimings timings;
    agglomerate_rtree(mesh, 2, 4, &timings);
    bool pass = timings.total() <= 0.5;
    report(10, pass,
           fmt("agglomeration of a %d-cell perturbed quad grid: build %.4f s + visit %.4f s "
               "+ flag %.4f s = %.4f s (soft target <= 0.5 s, single-threaded)",
               mesh.n_cells(), timings.build, timings.visit, timings.flag, timings.total()),
           /*soft=*/true);
  } catch (const std::exception& e) {
    report_exception(10, e, /*soft=*/true);
  }
}

}  // namespace

int main(int argc, char** argv) {
  std::string fixtures_dir = argc > 1 ? argv[1] : "tests/fixtures";

  criterion_1_and_2();
  criterion_3(fixtures_dir);
  criterion_4();
  criterion_5();

  Ladders ladders;
  criterion_6(ladders);
  criterion_7(ladders);
  criterion_8(ladders);
  criterion_9(fixtures_dir);
  criterion_10();

  if (g_hard_failures == 0)
    std::printf("acceptance: all hard criteria passed\n");
  else
    std::printf("acceptance: %d hard criteria FAILED\n", g_hard_failures);
  return g_hard_failures;
}
