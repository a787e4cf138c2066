#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "rtagg/dg.hpp"
#include "rtagg/sparse.hpp"

using namespace rtagg;

namespace {

// n x n structured quad cells grouped into (n/b) x (n/b) Cartesian blocks.
Partition block_partition(int n, int b) {
  Partition part;
  part.n_cells = n * n;
  int nb = n / b;
  part.n_agglomerates = nb * nb;
  part.assignment.resize(part.n_cells);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) part.assignment[j * n + i] = (j / b) * nb + (i / b);
  return part;
}

Partition identity_partition(int n_cells) {
  Partition part;
  part.n_cells = n_cells;
  part.n_agglomerates = n_cells;
  part.assignment.resize(n_cells);
  for (int c = 0; c < n_cells; ++c) part.assignment[c] = c;
  return part;
}

std::vector<double> solve_spd(const CsrMatrix& a, const std::vector<double>& b) {
  CholeskyFactor chol;
  REQUIRE(chol.factor(a));
  return chol.solve(b);
}

PoissonCase linear_case() {
  PoissonCase pc;
  pc.f = [](const Vec&) { return 0.0; };
  pc.g = [](const Vec& x) { return 1.0 + 2.0 * x[0] + 3.0 * x[1]; };
  pc.exact = pc.g;
  pc.exact_grad = [](const Vec&) { return Vec{2.0, 3.0, 0.0}; };
  return pc;
}

PoissonCase quadratic_case() {
  // u = x^2 + y^2 - x y  =>  -Laplace(u) = -4
  PoissonCase pc;
  pc.f = [](const Vec&) { return -4.0; };
  pc.g = [](const Vec& x) { return x[0] * x[0] + x[1] * x[1] - x[0] * x[1]; };
  pc.exact = pc.g;
  pc.exact_grad = [](const Vec& x) {
    return Vec{2.0 * x[0] - x[1], 2.0 * x[1] - x[0], 0.0};
  };
  return pc;
}

}  // namespace

TEST_CASE("assembled SIPG matrices are symmetric to machine precision") {
  BackgroundMesh mesh = generate_structured_quad(8);
  PolytopalMesh poly = build_polytopal_mesh(mesh, block_partition(8, 2));
  PoissonCase pc = manufactured_case(2);
  struct Cfg {
    int p;
    BasisFamily family;
  };
  for (Cfg cfg : {Cfg{1, BasisFamily::Tensor}, Cfg{2, BasisFamily::Tensor},
                  Cfg{3, BasisFamily::Tensor}, Cfg{2, BasisFamily::TotalDegree}}) {
    DgSpace space = build_space(poly, cfg.p, cfg.family);
    DgSystem sys = assemble(space, pc);
    CAPTURE(cfg.p);
    CHECK(sys.a.rows() == space.n_dofs());
    CHECK(sys.a.cols() == space.n_dofs());
    CHECK(int(sys.b.size()) == space.n_dofs());
    CHECK(sys.a.symmetry_error() <= 1e-14 * sys.a.max_abs());
  }
}

TEST_CASE("assembled SIPG matrices are positive definite") {
  BackgroundMesh mesh = generate_structured_quad(8);
  PolytopalMesh poly = build_polytopal_mesh(mesh, block_partition(8, 2));
  PoissonCase pc = manufactured_case(2);
  for (BasisFamily family : {BasisFamily::Tensor, BasisFamily::TotalDegree}) {
    DgSpace space = build_space(poly, 2, family);
    DgSystem sys = assemble(space, pc);
    CholeskyFactor chol;
    CHECK(chol.factor(sys.a));
    CHECK(chol.ok());
  }
}

TEST_CASE("3D assembly on hexahedra is symmetric and positive definite") {
  BackgroundMesh mesh = generate_structured_hex(2);
  PolytopalMesh poly = build_polytopal_mesh(mesh, identity_partition(mesh.n_cells()));
  DgSpace space = build_space(poly, 1, BasisFamily::Tensor);
  DgSystem sys = assemble(space, manufactured_case(3));
  CHECK(sys.a.symmetry_error() <= 1e-14 * sys.a.max_abs());
  CholeskyFactor chol;
  CHECK(chol.factor(sys.a));
}

TEST_CASE("zero coefficients reproduce the manufactured solution norms") {
  // || sin(pi x) sin(pi y) ||_L2 = 1/2 and | . |_H1 = pi / sqrt(2) on the unit square
  BackgroundMesh mesh = generate_structured_quad(8);
  PolytopalMesh poly = build_polytopal_mesh(mesh, block_partition(8, 2));
  DgSpace space = build_space(poly, 2, BasisFamily::Tensor);
  std::vector<double> zero(space.n_dofs(), 0.0);
  ErrorPair err = compute_errors(space, zero, manufactured_case(2));
  CHECK(err.l2 == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(err.h1_semi == doctest::Approx(M_PI / std::sqrt(2.0)).epsilon(1e-9));
}

TEST_CASE("linear exact solutions are reproduced to solver precision") {
  BackgroundMesh mesh = generate_structured_quad(8);
  PolytopalMesh poly = build_polytopal_mesh(mesh, block_partition(8, 2));
  PoissonCase pc = linear_case();
  for (BasisFamily family : {BasisFamily::Tensor, BasisFamily::TotalDegree}) {
    DgSpace space = build_space(poly, 1, family);
    DgSystem sys = assemble(space, pc);
    std::vector<double> u = solve_spd(sys.a, sys.b);
    ErrorPair err = compute_errors(space, u, pc);
    CAPTURE(int(family));
    CHECK(err.l2 <= 1e-10);
    CHECK(err.h1_semi <= 1e-9);
  }
}

TEST_CASE("quadratic exact solutions are reproduced at p = 2") {
  BackgroundMesh mesh = generate_structured_quad(4);
  PolytopalMesh poly = build_polytopal_mesh(mesh, block_partition(4, 2));
  PoissonCase pc = quadratic_case();
  for (BasisFamily family : {BasisFamily::Tensor, BasisFamily::TotalDegree}) {
    DgSpace space = build_space(poly, 2, family);
    DgSystem sys = assemble(space, pc);
    std::vector<double> u = solve_spd(sys.a, sys.b);
    ErrorPair err = compute_errors(space, u, pc);
    CAPTURE(int(family));
    CHECK(err.l2 <= 1e-9);
    CHECK(err.h1_semi <= 1e-8);
  }
}

TEST_CASE("penalty scales with c_sigma p^2 over the agglomerate diameter") {
  BackgroundMesh mesh = generate_structured_quad(4);
  PolytopalMesh poly = build_polytopal_mesh(mesh, identity_partition(mesh.n_cells()));
  DgSpace space = build_space(poly, 2, BasisFamily::Tensor);
  double diam = 0.25 * std::sqrt(2.0);  // every agglomerate is one 1/4 x 1/4 cell
  int boundary = -1, interior = -1;
  for (int f = 0; f < int(poly.faces.size()); ++f) {
    if (poly.faces[f].outer < 0)
      boundary = f;
    else
      interior = f;
  }
  REQUIRE(boundary >= 0);
  REQUIRE(interior >= 0);
  CHECK(penalty_sigma(space, boundary, 10.0) ==
        doctest::Approx(10.0 * 4.0 / diam).epsilon(1e-13));
  CHECK(penalty_sigma(space, interior, 10.0) ==
        doctest::Approx(10.0 * 4.0 / diam).epsilon(1e-13));
  CHECK(penalty_sigma(space, interior, 1.0) ==
        doctest::Approx(4.0 / diam).epsilon(1e-13));
}

TEST_CASE("manufactured case data is self-consistent") {
  PoissonCase pc = manufactured_case(2);
  Vec x{0.3, 0.7, 0.0};
  double u = std::sin(M_PI * 0.3) * std::sin(M_PI * 0.7);
  CHECK(pc.exact(x) == doctest::Approx(u).epsilon(1e-14));
  CHECK(pc.g(x) == doctest::Approx(u).epsilon(1e-14));
  CHECK(pc.f(x) == doctest::Approx(2.0 * M_PI * M_PI * u).epsilon(1e-14));
  // gradient against central differences
  const double h = 1e-7;
  for (int d = 0; d < 2; ++d) {
    Vec xp = x, xm = x;
    xp[d] += h;
    xm[d] -= h;
    double fd = (pc.exact(xp) - pc.exact(xm)) / (2.0 * h);
    CHECK(pc.exact_grad(x)[d] == doctest::Approx(fd).epsilon(1e-6));
  }

  PoissonCase scaled = manufactured_case(2, Vec{2.0, 1.0, 1.0});
  double us = std::sin(2.0 * M_PI * 0.3) * std::sin(M_PI * 0.7);
  CHECK(scaled.exact(x) == doctest::Approx(us).epsilon(1e-14));
  CHECK(scaled.f(x) == doctest::Approx(5.0 * M_PI * M_PI * us).epsilon(1e-13));

  PoissonCase cc = constant_case();
  CHECK(cc.f(x) == doctest::Approx(1.0));
  CHECK(cc.g(x) == doctest::Approx(0.0).scale(1.0));
  CHECK_FALSE(bool(cc.exact));
}

TEST_CASE("errors decrease under p-refinement") {
  BackgroundMesh mesh = generate_structured_quad(8);
  PolytopalMesh poly = build_polytopal_mesh(mesh, block_partition(8, 2));
  PoissonCase pc = manufactured_case(2);
  double prev_l2 = 0.0, prev_h1 = 0.0;
  for (int p = 1; p <= 3; ++p) {
    DgSpace space = build_space(poly, p, BasisFamily::Tensor);
    DgSystem sys = assemble(space, pc);
    std::vector<double> u = solve_spd(sys.a, sys.b);
    ErrorPair err = compute_errors(space, u, pc);
    if (p > 1) {
      CHECK(err.l2 < 0.2 * prev_l2);
      CHECK(err.h1_semi < prev_h1);
    }
    prev_l2 = err.l2;
    prev_h1 = err.h1_semi;
  }
}

TEST_CASE("cell-center evaluation matches the recovered polynomial") {
  BackgroundMesh mesh = generate_structured_quad(8);
  PolytopalMesh poly = build_polytopal_mesh(mesh, block_partition(8, 2));
  PoissonCase pc = linear_case();
  DgSpace space = build_space(poly, 1, BasisFamily::Tensor);
  DgSystem sys = assemble(space, pc);
  std::vector<double> u = solve_spd(sys.a, sys.b);
  std::vector<double> centers = evaluate_at_cell_centers(space, u);
  REQUIRE(int(centers.size()) == mesh.n_cells());
  for (int c = 0; c < mesh.n_cells(); ++c) {
    Vec x = mesh.cell_centroid(c);
    CHECK(centers[c] == doctest::Approx(pc.exact(x)).epsilon(1e-9));
  }
}

TEST_CASE("solution export writes a legacy VTK file") {
  BackgroundMesh mesh = generate_structured_quad(4);
  PolytopalMesh poly = build_polytopal_mesh(mesh, block_partition(4, 2));
  DgSpace space = build_space(poly, 1, BasisFamily::Tensor);
  std::vector<double> zero(space.n_dofs(), 0.0);
  std::string path = "test_dg_solution.vtk";
  write_solution_vtk(space, zero, path);
  std::ifstream in(path);
  REQUIRE(in.good());
  std::string first;
  std::getline(in, first);
  CHECK(first.rfind("# vtk", 0) == 0);
  std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(all.find("CELL_DATA") != std::string::npos);
  in.close();
  std::remove(path.c_str());
}

TEST_CASE("error computation requires exact solution data") {
  BackgroundMesh mesh = generate_structured_quad(4);
  PolytopalMesh poly = build_polytopal_mesh(mesh, block_partition(4, 2));
  DgSpace space = build_space(poly, 1, BasisFamily::Tensor);
  std::vector<double> zero(space.n_dofs(), 0.0);
  CHECK_THROWS_AS(compute_errors(space, zero, constant_case()), std::exception);
}
