#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rtagg/multigrid.hpp"

namespace rtagg {

// Parses a compact mesh source: "quad:N" (structured unit-square quads),
// "hex:N" (structured unit-cube hexes), "pquad:N:amp:seed" (perturbed quads),
// or a path to a Gmsh .msh file. Throws std::invalid_argument on a malformed
// generator spec; file errors propagate from the reader.
BackgroundMesh make_mesh(const std::string& source);

// STR tree build plus hierarchy extraction, with the three-phase wall-clock
// breakdown (build / visit / flag) when `timings` is given.
AgglomerateHierarchy agglomerate_rtree(const BackgroundMesh& mesh, int m, int M,
                                       AggTimings* timings = nullptr);

// Least-squares slope of y against x. Used on log-log data to obtain observed
// convergence orders. Needs at least two distinct x values.
double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y);

// Direct (Cholesky) solves are refused above this DoF count.
inline constexpr int kDirectDofCap = 20000;

struct SolveOutcome {
  int dofs = 0;
  std::vector<double> coeffs;
  ErrorPair errors;         // valid only when the case provides an exact solution
  bool has_errors = false;
};

// Assembles the case on the given space and solves it directly. Throws
// std::runtime_error suggesting the multigrid solver when the space exceeds
// kDirectDofCap, or when the factorization fails.
SolveOutcome solve_direct(const DgSpace& space, const PoissonCase& pc, double c_sigma = 10.0);

struct PConvRow {
  int p = 0;
  int dofs = 0;
  double l2 = 0.0;
  double h1 = 0.0;
};

// Direct solves of `pc` on one fixed partition for each degree in `degrees`.
std::vector<PConvRow> run_p_convergence(const BackgroundMesh& mesh, const Partition& level,
                                        const std::vector<int>& degrees, BasisFamily family,
                                        const PoissonCase& pc, double c_sigma = 10.0);
void write_p_convergence_csv(const std::vector<PConvRow>& rows, const std::string& path);

struct HConvResult {
  std::vector<int> ns;                  // grid resolutions, ascending
  std::vector<double> h_max;            // agglomerated mesh size per resolution
  std::vector<std::vector<double>> l2;  // [degree index][resolution index]
  std::vector<std::vector<double>> h1;
  std::vector<double> l2_order;         // observed least-squares order per degree
  std::vector<double> h1_order;
};

// Fixed agglomerate-to-cell ratio refinement study: for each n, agglomerate the
// structured n x n quad grid with an STR tree of order (m, M), pick hierarchy
// level `level`, and solve the manufactured problem for each degree.
HConvResult run_h_convergence(const std::vector<int>& ns, int level,
                              const std::vector<int>& degrees, BasisFamily family, int m,
                              int M, double c_sigma = 10.0);
void write_h_convergence_csv(const HConvResult& res, const std::vector<int>& degrees,
                             const std::string& path);

struct MgLevelRow {
  int levels = 0;
  int p = 0;
  int dofs_finest = 0;
  int iters_pcg = 0;
  int iters_plain_cg = 0;
};

// Level-robustness study: for each degree and each ladder depth, solve with
// V-cycle-preconditioned CG and record iterations; plain CG runs once per
// degree on the finest system (the count repeats across its rows).
std::vector<MgLevelRow> run_mg_levels(const BackgroundMesh& mesh,
                                      const AgglomerateHierarchy& hier,
                                      const std::vector<int>& level_counts,
                                      const std::vector<int>& degrees, BasisFamily family,
                                      const PoissonCase& pc, double c_sigma = 10.0);
void write_mg_levels_csv(const std::vector<MgLevelRow>& rows, const std::string& path);

struct TimingRow {
  std::string strategy;
  int n_cells = 0;
  double build = 0.0;
  double visit = 0.0;
  double flag = 0.0;
};

// Agglomeration timing comparison on one mesh: the R-tree pipeline's three
// phases, and the graph baseline (partitioning as build, hierarchy wrap as
// flag) at the R-tree's leaf-level agglomerate count.
std::vector<TimingRow> run_timing(const BackgroundMesh& mesh, int m, int M,
                                  std::uint64_t seed = 0);
void write_timing_csv(const std::vector<TimingRow>& rows, const std::string& path);

}  // namespace rtagg
