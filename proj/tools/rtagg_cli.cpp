// rtagg command-line front end: agglomerate meshes, score agglomerate quality,
// solve the model problem, and run the study sweeps with reproducible outputs.
//
// Exit codes: 0 success, 1 numerical failure (non-convergence), 2 usage/IO error.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "rtagg/metrics.hpp"
#include "rtagg/pipeline.hpp"
#include "rtagg/timer.hpp"

namespace {

using nlohmann::json;
using namespace rtagg;

// Numerical failures exit with 1; everything else that throws exits with 2.
struct NumericalFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string resolve_outdir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("RTAGG_OUTDIR"); env && *env) return env;
  return ".";
}

int parse_int(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("invalid " + what + " '" + s + "': expected an integer");
  }
}

double parse_num(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("invalid " + what + " '" + s + "': expected a number");
  }
}

std::vector<int> parse_int_list(const std::string& s, const std::string& what) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const std::size_t next = s.find(',', pos);
    const std::string tok = s.substr(pos, next - pos);
    out.push_back(parse_int(tok, what));
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  if (out.empty()) throw std::invalid_argument(what + " list is empty");
  return out;
}

std::pair<int, int> parse_order(const std::string& s) {
  const std::vector<int> v = parse_int_list(s, "tree order");
  if (v.size() != 2 || v[0] < 1 || v[1] < 2 * v[0])
    throw std::invalid_argument("invalid tree order '" + s + "': expected m,M with M >= 2m");
  return {v[0], v[1]};
}

// Applies a JSON config file on top of parsed flags: every key must name a
// known option of the subcommand; values overwrite the flag values.
void apply_config(const std::string& path,
                  const std::map<std::string, std::string*>& targets) {
  if (path.empty()) return;
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config file '" + path + "'");
  json cfg;
  try {
    in >> cfg;
  } catch (const json::exception& e) {
    throw std::invalid_argument("config file '" + path + "' is not valid JSON: " + e.what());
  }
  if (!cfg.is_object())
    throw std::invalid_argument("config file '" + path + "' must hold a JSON object");
  for (const auto& [key, value] : cfg.items()) {
    const auto it = targets.find(key);
    if (it == targets.end())
      throw std::invalid_argument("unknown config key '" + key + "' in '" + path + "'");
    if (value.is_string()) {
      *it->second = value.get<std::string>();
    } else if (value.is_number_integer()) {
      *it->second = std::to_string(value.get<long long>());
    } else if (value.is_number()) {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", value.get<double>());
      *it->second = buf;
    } else if (value.is_array()) {
      std::string joined;
      for (const auto& elem : value) {
        if (!elem.is_number_integer())
          throw std::invalid_argument("config key '" + key + "' has a non-integer element");
        if (!joined.empty()) joined += ',';
        joined += std::to_string(elem.get<long long>());
      }
      *it->second = joined;
    } else {
      throw std::invalid_argument("config key '" + key + "' has an unsupported value type");
    }
  }
}

AgglomerateHierarchy hierarchy_for(const BackgroundMesh& mesh, const std::string& hier_path,
                                   const std::string& order) {
  if (!hier_path.empty()) return load_hierarchy(hier_path, mesh.n_cells());
  const auto [m, M] = parse_order(order);
  return agglomerate_rtree(mesh, m, M);
}

BasisFamily parse_family(const std::string& s) {
  if (s == "tensor") return BasisFamily::Tensor;
  if (s == "total") return BasisFamily::TotalDegree;
  throw std::invalid_argument("invalid basis family '" + s + "': expected tensor or total");
}

PoissonCase parse_case(const std::string& s, int dim) {
  if (s == "manufactured") return manufactured_case(dim);
  if (s == "constant") return constant_case();
  throw std::invalid_argument("invalid case '" + s + "': expected manufactured or constant");
}

int check_level(int level, const AgglomerateHierarchy& hier) {
  if (level < 0 || level >= hier.n_levels())
    throw std::invalid_argument("level " + std::to_string(level) + " out of range: hierarchy has " +
                                std::to_string(hier.n_levels()) + " levels (0.." +
                                std::to_string(hier.n_levels() - 1) + ")");
  return level;
}

// ---------------------------------------------------------------------------

struct AgglomerateOpts {
  std::string gen, mesh, order = "2,4", strategy = "rtree", parts, seed = "0", out, config;
};

int cmd_agglomerate(AgglomerateOpts& o) {
  apply_config(o.config, {{"gen", &o.gen},
                          {"mesh", &o.mesh},
                          {"order", &o.order},
                          {"strategy", &o.strategy},
                          {"parts", &o.parts},
                          {"seed", &o.seed},
                          {"out", &o.out}});
  if (o.gen.empty() == o.mesh.empty())
    throw std::invalid_argument("exactly one of --gen and --mesh is required");
  const std::string source = o.gen.empty() ? o.mesh : o.gen;
  const BackgroundMesh mesh = make_mesh(source);
  const std::string outdir = resolve_outdir(o.out);

  AggTimings t;
  AgglomerateHierarchy hier;
  if (o.strategy == "rtree") {
    const auto [m, M] = parse_order(o.order);
    hier = agglomerate_rtree(mesh, m, M, &t);
  } else if (o.strategy == "rtree-material") {
    const auto [m, M] = parse_order(o.order);
    WallTimer timer;
    hier = build_hierarchy_by_material(mesh, m, M);
    t.build = timer.seconds();
  } else if (o.strategy == "graph") {
    if (o.parts.empty()) throw std::invalid_argument("--parts is required with --strategy graph");
    WallTimer timer;
    hier = build_graph_hierarchy(mesh, parse_int(o.parts, "part count"),
                                 std::uint64_t(parse_int(o.seed, "seed")));
    t.build = timer.seconds();
  } else {
    throw std::invalid_argument("invalid strategy '" + o.strategy +
                                "': expected rtree, rtree-material, or graph");
  }

  save_hierarchy(hier, outdir + "/hierarchy.json");
  for (int l = 0; l < hier.n_levels(); ++l) {
    std::vector<double> ids(hier.levels[l].assignment.begin(), hier.levels[l].assignment.end());
    write_vtk(mesh, outdir + "/level_" + std::to_string(l) + ".vtk", {{"agglomerate", ids}});
  }
  for (int l = 0; l < hier.n_levels(); ++l)
    std::printf("level %d: %d agglomerates\n", l, hier.levels[l].n_agglomerates);
  std::printf("build %.6g s, visit %.6g s, flag %.6g s (total %.6g s)\n", t.build, t.visit,
              t.flag, t.total());
  std::printf("wrote %s/hierarchy.json and %d VTK level files\n", outdir.c_str(),
              hier.n_levels());
  return 0;
}

struct MetricsOpts {
  std::string mesh, hierarchy, level, tol = "1e-3", out, config;
};

int cmd_metrics(MetricsOpts& o) {
  apply_config(o.config, {{"mesh", &o.mesh},
                          {"hierarchy", &o.hierarchy},
                          {"level", &o.level},
                          {"tol", &o.tol},
                          {"out", &o.out}});
  if (o.mesh.empty() || o.hierarchy.empty() || o.level.empty())
    throw std::invalid_argument("--mesh, --hierarchy, and --level are required");
  const BackgroundMesh mesh = make_mesh(o.mesh);
  const AgglomerateHierarchy hier = load_hierarchy(o.hierarchy, mesh.n_cells());
  const int level = check_level(parse_int(o.level, "level"), hier);
  const PolytopalMesh poly = build_polytopal_mesh(mesh, hier.levels[level]);
  const MetricsReport report = metrics_report(poly, parse_num(o.tol, "tolerance"));
  const std::string path =
      resolve_outdir(o.out) + "/metrics_level_" + std::to_string(level) + ".csv";
  write_metrics_csv(report, path);
  std::printf("level %d: %d agglomerates\n", level, poly.n_agglomerates());
  std::printf("UF %.6g CR %.6g BR %.6g OF %.6g\n", report.uf_avg, report.cr_avg,
              report.br_avg, report.of);
  std::printf("wrote %s\n", path.c_str());
  return 0;
}

struct SolveOpts {
  std::string mesh, hierarchy, order = "2,4", level, p = "1", family = "tensor";
  std::string sigma = "10", pcase = "manufactured", solver = "direct", levels = "2";
  std::string out, config;
};

int cmd_solve(SolveOpts& o) {
  apply_config(o.config, {{"mesh", &o.mesh},
                          {"hierarchy", &o.hierarchy},
                          {"order", &o.order},
                          {"level", &o.level},
                          {"p", &o.p},
                          {"family", &o.family},
                          {"sigma", &o.sigma},
                          {"case", &o.pcase},
                          {"solver", &o.solver},
                          {"levels", &o.levels},
                          {"out", &o.out}});
  if (o.mesh.empty()) throw std::invalid_argument("--mesh is required");
  const BackgroundMesh mesh = make_mesh(o.mesh);
  const AgglomerateHierarchy hier = hierarchy_for(mesh, o.hierarchy, o.order);
  const int p = parse_int(o.p, "degree");
  const BasisFamily family = parse_family(o.family);
  const double sigma = parse_num(o.sigma, "penalty constant");
  const PoissonCase pc = parse_case(o.pcase, mesh.dim);
  const std::string outdir = resolve_outdir(o.out);

  if (o.solver == "direct") {
    if (o.level.empty()) throw std::invalid_argument("--level is required with --solver direct");
    const int level = check_level(parse_int(o.level, "level"), hier);
    const PolytopalMesh poly = build_polytopal_mesh(mesh, hier.levels[level]);
    const DgSpace space = build_space(poly, p, family);
    if (space.n_dofs() > kDirectDofCap)
      throw std::invalid_argument(
          "direct solve refused at " + std::to_string(space.n_dofs()) + " DoFs (cap " +
          std::to_string(kDirectDofCap) + "); rerun with --solver r3mg");
    const SolveOutcome sol = solve_direct(space, pc, sigma);
    write_solution_vtk(space, sol.coeffs, outdir + "/solution.vtk");
    if (sol.has_errors)
      std::printf("dofs %d l2 %.6g h1semi %.6g\n", sol.dofs, sol.errors.l2,
                  sol.errors.h1_semi);
    else
      std::printf("dofs %d\n", sol.dofs);
  } else if (o.solver == "r3mg") {
    const int n_levels = parse_int(o.levels, "level count");
    const MgHierarchy mg = build_mg(mesh, hier, n_levels, p, family, pc, sigma);
    const auto precond = [&mg](const std::vector<double>& r) { return mg.v_cycle(r); };
    const SolveResult sol = pcg(mg.fine_matrix(), mg.fine_rhs, precond);
    if (!sol.converged)
      throw NumericalFailure("conjugate gradients did not converge in " +
                             std::to_string(sol.iterations) + " iterations (residual " +
                             std::to_string(sol.residuals.back()) + ")");
    const DgSpace& space = mg.levels.front()->space;
    write_solution_vtk(space, sol.x, outdir + "/solution.vtk");
    if (pc.exact && pc.exact_grad) {
      const ErrorPair err = compute_errors(space, sol.x, pc);
      std::printf("dofs %d iterations %d l2 %.6g h1semi %.6g\n", space.n_dofs(),
                  sol.iterations, err.l2, err.h1_semi);
    } else {
      std::printf("dofs %d iterations %d\n", space.n_dofs(), sol.iterations);
    }
  } else {
    throw std::invalid_argument("invalid solver '" + o.solver + "': expected direct or r3mg");
  }
  std::printf("wrote %s/solution.vtk\n", outdir.c_str());
  return 0;
}

struct StudyOpts {
  std::string kind, mesh, order = "2,4", level = "2", degrees = "1,2,3";
  std::string ns = "8,16,32,64", levels = "2,3,4", family = "tensor", sigma = "10";
  std::string pcase, seed = "0", out, config;
};

int cmd_study(StudyOpts& o) {
  apply_config(o.config, {{"kind", &o.kind},
                          {"mesh", &o.mesh},
                          {"order", &o.order},
                          {"level", &o.level},
                          {"degrees", &o.degrees},
                          {"ns", &o.ns},
                          {"levels", &o.levels},
                          {"family", &o.family},
                          {"sigma", &o.sigma},
                          {"case", &o.pcase},
                          {"seed", &o.seed},
                          {"out", &o.out}});
  const std::string outdir = resolve_outdir(o.out);
  const std::vector<int> degrees = parse_int_list(o.degrees, "degree");
  const BasisFamily family = parse_family(o.family);
  const double sigma = parse_num(o.sigma, "penalty constant");
  const auto [m, M] = parse_order(o.order);

  if (o.kind == "p-convergence") {
    if (o.mesh.empty()) throw std::invalid_argument("--mesh is required");
    const BackgroundMesh mesh = make_mesh(o.mesh);
    const AgglomerateHierarchy hier = agglomerate_rtree(mesh, m, M);
    const int level = check_level(parse_int(o.level, "level"), hier);
    const std::vector<PConvRow> rows = run_p_convergence(
        mesh, hier.levels[level], degrees, family, manufactured_case(mesh.dim), sigma);
    write_p_convergence_csv(rows, outdir + "/p_convergence.csv");
    for (const PConvRow& r : rows)
      std::printf("p %d dofs %d l2 %.6g h1semi %.6g\n", r.p, r.dofs, r.l2, r.h1);
    std::printf("wrote %s/p_convergence.csv\n", outdir.c_str());
  } else if (o.kind == "h-convergence") {
    const std::vector<int> ns = parse_int_list(o.ns, "grid size");
    const int level = parse_int(o.level, "level");
    const HConvResult res = run_h_convergence(ns, level, degrees, family, m, M, sigma);
    write_h_convergence_csv(res, degrees, outdir + "/h_convergence.csv");
    for (std::size_t d = 0; d < degrees.size(); ++d)
      std::printf("p %d observed l2 order %.6g h1semi order %.6g\n", degrees[d],
                  res.l2_order[d], res.h1_order[d]);
    std::printf("wrote %s/h_convergence.csv\n", outdir.c_str());
  } else if (o.kind == "mg-levels") {
    if (o.mesh.empty()) throw std::invalid_argument("--mesh is required");
    const BackgroundMesh mesh = make_mesh(o.mesh);
    const AgglomerateHierarchy hier = agglomerate_rtree(mesh, m, M);
    const std::vector<int> level_counts = parse_int_list(o.levels, "level count");
    const PoissonCase pc = parse_case(o.pcase.empty() ? "constant" : o.pcase, mesh.dim);
    const std::vector<MgLevelRow> rows =
        run_mg_levels(mesh, hier, level_counts, degrees, family, pc, sigma);
    write_mg_levels_csv(rows, outdir + "/mg_levels.csv");
    for (const MgLevelRow& r : rows)
      std::printf("levels %d p %d dofs %d pcg %d cg %d\n", r.levels, r.p, r.dofs_finest,
                  r.iters_pcg, r.iters_plain_cg);
    std::printf("wrote %s/mg_levels.csv\n", outdir.c_str());
  } else if (o.kind == "timing") {
    if (o.mesh.empty()) throw std::invalid_argument("--mesh is required");
    const BackgroundMesh mesh = make_mesh(o.mesh);
    const std::vector<TimingRow> rows =
        run_timing(mesh, m, M, std::uint64_t(parse_int(o.seed, "seed")));
    write_timing_csv(rows, outdir + "/timing.csv");
    for (const TimingRow& r : rows)
      std::printf("%s: %d cells, build %.6g s, visit %.6g s, flag %.6g s\n",
                  r.strategy.c_str(), r.n_cells, r.build, r.visit, r.flag);
    std::printf("wrote %s/timing.csv\n", outdir.c_str());
  } else {
    throw std::invalid_argument(
        "invalid study kind '" + o.kind +
        "': expected p-convergence, h-convergence, mg-levels, or timing");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"R-tree mesh agglomeration, quality metrics, and multigrid studies"};
  app.require_subcommand(1);

  AgglomerateOpts ao;
  CLI::App* agg = app.add_subcommand("agglomerate", "Build an agglomerate hierarchy");
  agg->add_option("--gen", ao.gen, "Generator spec: quad:N, hex:N, pquad:N:amp:seed");
  agg->add_option("--mesh", ao.mesh, "Gmsh .msh file (or generator spec)");
  agg->add_option("--order", ao.order, "R-tree order m,M (default 2,4)");
  agg->add_option("--strategy", ao.strategy, "rtree | rtree-material | graph");
  agg->add_option("--parts", ao.parts, "Part count for the graph strategy");
  agg->add_option("--seed", ao.seed, "Seed for the graph strategy");
  agg->add_option("--out", ao.out, "Output directory (default $RTAGG_OUTDIR or .)");
  agg->add_option("--config", ao.config, "JSON config file overriding flags");

  MetricsOpts mo;
  CLI::App* met = app.add_subcommand("metrics", "Score agglomerate quality");
  met->add_option("--mesh", mo.mesh, "Mesh source (generator spec or .msh path)");
  met->add_option("--hierarchy", mo.hierarchy, "Hierarchy JSON file");
  met->add_option("--level", mo.level, "Hierarchy level to score");
  met->add_option("--tol", mo.tol, "Relative inradius tolerance (default 1e-3)");
  met->add_option("--out", mo.out, "Output directory");
  met->add_option("--config", mo.config, "JSON config file overriding flags");

  SolveOpts so;
  CLI::App* sol = app.add_subcommand("solve", "Solve the model Poisson problem");
  sol->add_option("--mesh", so.mesh, "Mesh source (generator spec or .msh path)");
  sol->add_option("--hierarchy", so.hierarchy, "Hierarchy JSON file (default: build R-tree)");
  sol->add_option("--order", so.order, "R-tree order m,M when building (default 2,4)");
  sol->add_option("--level", so.level, "Hierarchy level to solve on (direct mode)");
  sol->add_option("--p", so.p, "Polynomial degree (default 1)");
  sol->add_option("--family", so.family, "Basis family: tensor | total");
  sol->add_option("--sigma", so.sigma, "Penalty constant (default 10)");
  sol->add_option("--case", so.pcase, "Problem data: manufactured | constant");
  sol->add_option("--solver", so.solver, "direct | r3mg");
  sol->add_option("--levels", so.levels, "Ladder depth for r3mg (default 2)");
  sol->add_option("--out", so.out, "Output directory");
  sol->add_option("--config", so.config, "JSON config file overriding flags");

  StudyOpts to;
  CLI::App* stu = app.add_subcommand("study", "Run a study sweep and emit CSV");
  stu->add_option("kind", to.kind, "p-convergence | h-convergence | mg-levels | timing")
      ->required();
  stu->add_option("--mesh", to.mesh, "Mesh source (generator spec or .msh path)");
  stu->add_option("--order", to.order, "R-tree order m,M (default 2,4)");
  stu->add_option("--level", to.level, "Hierarchy level (default 2)");
  stu->add_option("--degrees", to.degrees, "Degree list (default 1,2,3)");
  stu->add_option("--ns", to.ns, "Grid sizes for h-convergence (default 8,16,32,64)");
  stu->add_option("--levels", to.levels, "Ladder depths for mg-levels (default 2,3,4)");
  stu->add_option("--family", to.family, "Basis family: tensor | total");
  stu->add_option("--sigma", to.sigma, "Penalty constant (default 10)");
  stu->add_option("--case", to.pcase, "Problem data (mg-levels; default constant)");
  stu->add_option("--seed", to.seed, "Seed for the graph baseline (timing)");
  stu->add_option("--out", to.out, "Output directory");
  stu->add_option("--config", to.config, "JSON config file overriding flags");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (agg->parsed()) return cmd_agglomerate(ao);
    if (met->parsed()) return cmd_metrics(mo);
    if (sol->parsed()) return cmd_solve(so);
    if (stu->parsed()) return cmd_study(to);
    std::fprintf(stderr, "error: no subcommand given\n");
    return 2;
  } catch (const NumericalFailure& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
