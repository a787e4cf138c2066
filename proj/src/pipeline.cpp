#include "rtagg/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "rtagg/rtree.hpp"
#include "rtagg/timer.hpp"

namespace rtagg {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = s.find(sep, pos);
    out.push_back(s.substr(pos, next - pos));
    if (next == std::string::npos) return out;
    pos = next + 1;
  }
}

int parse_positive_int(const std::string& tok, const std::string& spec) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(tok, &used);
    if (used != tok.size() || v <= 0) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("malformed mesh spec '" + spec + "'");
  }
}

double parse_double(const std::string& tok, const std::string& spec) {
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("malformed mesh spec '" + spec + "'");
  }
}

std::uint64_t parse_seed(const std::string& tok, const std::string& spec) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("malformed mesh spec '" + spec + "'");
  }
}

class CsvFile {
 public:
  explicit CsvFile(const std::string& path) : f_(std::fopen(path.c_str(), "w")) {
    if (!f_) throw std::runtime_error("cannot open '" + path + "' for writing");
  }
  ~CsvFile() {
    if (f_) std::fclose(f_);
  }
  CsvFile(const CsvFile&) = delete;
  CsvFile& operator=(const CsvFile&) = delete;

  void line(const std::string& s) { std::fprintf(f_, "%s\n", s.c_str()); }
  std::FILE* get() { return f_; }

 private:
  std::FILE* f_;
};

std::string full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

BackgroundMesh make_mesh(const std::string& source) {
  const std::vector<std::string> tok = split(source, ':');
  const std::string& kind = tok.front();
  if (kind == "quad") {
    if (tok.size() != 2) throw std::invalid_argument("malformed mesh spec '" + source + "'");
    return generate_structured_quad(parse_positive_int(tok[1], source));
  }
  if (kind == "hex") {
    if (tok.size() != 2) throw std::invalid_argument("malformed mesh spec '" + source + "'");
    return generate_structured_hex(parse_positive_int(tok[1], source));
  }
  if (kind == "pquad") {
    if (tok.size() != 4) throw std::invalid_argument("malformed mesh spec '" + source + "'");
    return generate_perturbed_quad(parse_positive_int(tok[1], source),
                                   parse_double(tok[2], source), parse_seed(tok[3], source));
  }
  return read_msh(source);
}

AgglomerateHierarchy agglomerate_rtree(const BackgroundMesh& mesh, int m, int M,
                                       AggTimings* timings) {
  WallTimer timer;
  std::vector<RTreeEntry> entries;
  entries.reserve(mesh.n_cells());
  for (int c = 0; c < mesh.n_cells(); ++c) entries.push_back({mesh.cell_bbox(c), c});
  const RTree tree = RTree::build_str(mesh.dim, m, M, std::move(entries));
  if (timings) timings->build = timer.seconds();
  return build_hierarchy(tree, mesh.n_cells(), timings);
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("slope needs at least two matched samples");
  const double n = double(x.size());
  const double xm = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double ym = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - xm) * (x[i] - xm);
    sxy += (x[i] - xm) * (y[i] - ym);
  }
  if (sxx == 0.0) throw std::invalid_argument("slope undefined: all x values coincide");
  return sxy / sxx;
}

SolveOutcome solve_direct(const DgSpace& space, const PoissonCase& pc, double c_sigma) {
  SolveOutcome out;
  out.dofs = space.n_dofs();
  if (out.dofs > kDirectDofCap)
    throw std::runtime_error("direct solve refused at " + std::to_string(out.dofs) +
                             " DoFs (cap " + std::to_string(kDirectDofCap) +
                             "); use the r3mg multigrid solver for systems this large");
  DgSystem sys = assemble(space, pc, c_sigma);
  CholeskyFactor chol;
  if (!chol.factor(sys.a))
    throw std::runtime_error("assembled matrix is not positive definite");
  out.coeffs = chol.solve(sys.b);
  if (pc.exact && pc.exact_grad) {
    out.errors = compute_errors(space, out.coeffs, pc);
    out.has_errors = true;
  }
  return out;
}

std::vector<PConvRow> run_p_convergence(const BackgroundMesh& mesh, const Partition& level,
                                        const std::vector<int>& degrees, BasisFamily family,
                                        const PoissonCase& pc, double c_sigma) {
  const PolytopalMesh poly = build_polytopal_mesh(mesh, level);
  std::vector<PConvRow> rows;
  for (int p : degrees) {
    const DgSpace space = build_space(poly, p, family);
    const SolveOutcome sol = solve_direct(space, pc, c_sigma);
    rows.push_back({p, sol.dofs, sol.errors.l2, sol.errors.h1_semi});
  }
  return rows;
}

void write_p_convergence_csv(const std::vector<PConvRow>& rows, const std::string& path) {
  CsvFile f(path);
  f.line("p,dofs,l2,h1semi");
  for (const PConvRow& r : rows)
    std::fprintf(f.get(), "%d,%d,%s,%s\n", r.p, r.dofs, full(r.l2).c_str(),
                 full(r.h1).c_str());
}

HConvResult run_h_convergence(const std::vector<int>& ns, int level,
                              const std::vector<int>& degrees, BasisFamily family, int m,
                              int M, double c_sigma) {
  HConvResult res;
  res.ns = ns;
  res.l2.assign(degrees.size(), {});
  res.h1.assign(degrees.size(), {});
  const PoissonCase pc = manufactured_case(2);
  for (int n : ns) {
    const BackgroundMesh mesh = generate_structured_quad(n);
    const AgglomerateHierarchy hier = agglomerate_rtree(mesh, m, M);
    if (level < 0 || level >= hier.n_levels())
      throw std::invalid_argument("hierarchy of " + std::to_string(hier.n_levels()) +
                                  " levels has no level " + std::to_string(level));
    const PolytopalMesh poly = build_polytopal_mesh(mesh, hier.levels[level]);
    res.h_max.push_back(poly.h_max);
    for (std::size_t d = 0; d < degrees.size(); ++d) {
      const DgSpace space = build_space(poly, degrees[d], family);
      const SolveOutcome sol = solve_direct(space, pc, c_sigma);
      res.l2[d].push_back(sol.errors.l2);
      res.h1[d].push_back(sol.errors.h1_semi);
    }
  }
  std::vector<double> logh;
  for (double h : res.h_max) logh.push_back(std::log(h));
  for (std::size_t d = 0; d < degrees.size(); ++d) {
    std::vector<double> l2log, h1log;
    for (double e : res.l2[d]) l2log.push_back(std::log(e));
    for (double e : res.h1[d]) h1log.push_back(std::log(e));
    res.l2_order.push_back(least_squares_slope(logh, l2log));
    res.h1_order.push_back(least_squares_slope(logh, h1log));
  }
  return res;
}

void write_h_convergence_csv(const HConvResult& res, const std::vector<int>& degrees,
                             const std::string& path) {
  CsvFile f(path);
  f.line("degree,n,h_max,l2,h1semi,l2_order,h1_order");
  for (std::size_t d = 0; d < degrees.size(); ++d)
    for (std::size_t i = 0; i < res.ns.size(); ++i)
      std::fprintf(f.get(), "%d,%d,%s,%s,%s,%s,%s\n", degrees[d], res.ns[i],
                   full(res.h_max[i]).c_str(), full(res.l2[d][i]).c_str(),
                   full(res.h1[d][i]).c_str(), full(res.l2_order[d]).c_str(),
                   full(res.h1_order[d]).c_str());
}

std::vector<MgLevelRow> run_mg_levels(const BackgroundMesh& mesh,
                                      const AgglomerateHierarchy& hier,
                                      const std::vector<int>& level_counts,
                                      const std::vector<int>& degrees, BasisFamily family,
                                      const PoissonCase& pc, double c_sigma) {
  std::vector<MgLevelRow> rows;
  for (int p : degrees) {
    int plain_iters = -1;
    for (int levels : level_counts) {
      const MgHierarchy mg = build_mg(mesh, hier, levels, p, family, pc, c_sigma);
      if (plain_iters < 0)
        plain_iters =
            pcg(mg.fine_matrix(), mg.fine_rhs, nullptr, 1e-12, 1e-9, 100000).iterations;
      const auto precond = [&mg](const std::vector<double>& r) { return mg.v_cycle(r); };
      const SolveResult sol = pcg(mg.fine_matrix(), mg.fine_rhs, precond);
      rows.push_back({levels, p, mg.fine_matrix().rows(), sol.iterations, plain_iters});
    }
  }
  return rows;
}

void write_mg_levels_csv(const std::vector<MgLevelRow>& rows, const std::string& path) {
  CsvFile f(path);
  f.line("levels,p,dofs_finest,iters_pcg,iters_plain_cg");
  for (const MgLevelRow& r : rows)
    std::fprintf(f.get(), "%d,%d,%d,%d,%d\n", r.levels, r.p, r.dofs_finest, r.iters_pcg,
                 r.iters_plain_cg);
}

std::vector<TimingRow> run_timing(const BackgroundMesh& mesh, int m, int M,
                                  std::uint64_t seed) {
  std::vector<TimingRow> rows;
  AggTimings t;
  const AgglomerateHierarchy hier = agglomerate_rtree(mesh, m, M, &t);
  rows.push_back({"rtree", mesh.n_cells(), t.build, t.visit, t.flag});

  if (hier.n_levels() > 1) {
    const int n_parts = hier.levels[1].n_agglomerates;
    WallTimer timer;
    Partition part = graph_partition(mesh, n_parts, seed);
    const double build = timer.seconds();
    timer.reset();
    AgglomerateHierarchy gh;
    gh.strategy = "graph";
    gh.n_cells = mesh.n_cells();
    Partition identity;
    identity.n_cells = mesh.n_cells();
    identity.n_agglomerates = mesh.n_cells();
    identity.assignment.resize(mesh.n_cells());
    std::iota(identity.assignment.begin(), identity.assignment.end(), 0);
    gh.levels.push_back(std::move(identity));
    gh.parents.push_back(part.assignment);
    gh.levels.push_back(std::move(part));
    validate_hierarchy(gh);
    rows.push_back({"graph", mesh.n_cells(), build, 0.0, timer.seconds()});
  }
  return rows;
}

void write_timing_csv(const std::vector<TimingRow>& rows, const std::string& path) {
  CsvFile f(path);
  f.line("strategy,n_cells,build_s,visit_s,flag_s,total_s");
  for (const TimingRow& r : rows)
    std::fprintf(f.get(), "%s,%d,%s,%s,%s,%s\n", r.strategy.c_str(), r.n_cells,
                 full(r.build).c_str(), full(r.visit).c_str(), full(r.flag).c_str(),
                 full(r.build + r.visit + r.flag).c_str());
}

}  // namespace rtagg
