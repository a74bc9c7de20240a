#include <doctest.h>

#include <cmath>
#include <random>

#include "cylflow/geometry.hpp"

using namespace cylflow;

namespace {

GridPtr sheet_grid(double R = 6.0, int ny = 49, int nt = 16) {
  return make_grid({2, 1}, R, ny, nt);
}

double max_abs(const Field& f) {
  double m = 0.0;
  for (double v : f.v) m = std::max(m, std::abs(v));
  return m;
}

Field sheet_field(GridPtr g, double (*fn)(double, double, double)) {
  Field f(g);
  for (int j1 = 0; j1 < g->ny(); ++j1)
    for (int j2 = 0; j2 < g->ny(); ++j2)
      for (int t = 0; t < g->ntheta(); ++t)
        f.v[g->index(j1, j2, t)] = fn(g->y(j1), g->y(j2), g->theta(t));
  return f;
}

}  // namespace

TEST_CASE("stencil tables reproduce polynomials exactly") {
  const int n = 33;
  const double h = 0.17;
  const auto d1 = make_d1_table(n, h);
  const auto d2 = make_d2_table(n, h);
  for (int deg = 0; deg <= 4; ++deg) {
    std::vector<double> f(n);
    for (int j = 0; j < n; ++j) f[j] = std::pow(-1.3 + j * h, deg);
    for (int j = 0; j < n; ++j) {
      const double x = -1.3 + j * h;
      const double want1 = deg == 0 ? 0.0 : deg * std::pow(x, deg - 1);
      const double want2 = deg <= 1 ? 0.0 : deg * (deg - 1) * std::pow(x, deg - 2);
      CHECK(d1.apply(f.data(), j, 1) == doctest::Approx(want1).epsilon(1e-9).scale(1.0));
      CHECK(d2.apply(f.data(), j, 1) == doctest::Approx(want2).epsilon(1e-9).scale(1.0));
    }
  }
}

TEST_CASE("round sheet is stationary") {
  CylinderGraph g(sheet_grid(), constants::sqrt2);
  CHECK(max_abs(evolution_rhs(g)) < 1e-12);
}

TEST_CASE("constant radius evolves by -m/c + c/2") {
  for (double c : {0.9, constants::sqrt2, 2.3}) {
    CylinderGraph g2(sheet_grid(), c);
    Field r2 = evolution_rhs(g2);
    const double want = -1.0 / c + 0.5 * c;
    for (double v : r2.v) CHECK(v == doctest::Approx(want).epsilon(1e-12));

    CylinderGraph g1(make_grid({1, 1}, 6.0, 49, 16), c);
    Field r1 = evolution_rhs(g1);
    for (double v : r1.v) CHECK(v == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("constant radius has mean curvature m/r on both instances") {
  for (double r : {0.8, constants::sqrt2, 3.0}) {
    CylinderGraph g2(sheet_grid(), r);
    for (double h : mean_curvature(g2).v) CHECK(h == doctest::Approx(1.0 / r).epsilon(1e-13));
    CylinderGraph g1(make_grid({1, 1}, 6.0, 33, 12), r);
    for (double h : mean_curvature(g1).v) CHECK(h == doctest::Approx(1.0 / r).epsilon(1e-13));
  }
}

TEST_CASE("neutral perturbation has quadratically small rhs") {
  // psi_1 = y1^2 - 2 is annihilated by the linearization, so the rhs is
  // pure quadratic: sup |rhs| ~ sup|u|^2 / sqrt(8) with the constant
  // measured on |y| <= 4 below 1 after normalizing by sup|u|^2.
  auto grid = sheet_grid(6.0, 61, 8);
  auto rhs_sup = [&](double eps) {
    Field v(grid, constants::sqrt2);
    for (int j1 = 0; j1 < grid->ny(); ++j1)
      for (int j2 = 0; j2 < grid->ny(); ++j2)
        for (int t = 0; t < grid->ntheta(); ++t) {
          const double y1 = grid->y(j1);
          v.v[grid->index(j1, j2, t)] += eps * (y1 * y1 - 2.0);
        }
    Field r = evolution_rhs(CylinderGraph(std::move(v)));
    double sup = 0.0, supu = 0.0;
    for (int j1 = 0; j1 < grid->ny(); ++j1)
      for (int j2 = 0; j2 < grid->ny(); ++j2) {
        if (grid->flat_radius(j1, j2) > 4.0) continue;
        const double y1 = grid->y(j1);
        supu = std::max(supu, std::abs(eps * (y1 * y1 - 2.0)));
        for (int t = 0; t < grid->ntheta(); ++t)
          sup = std::max(sup, std::abs(r.v[grid->index(j1, j2, t)]));
      }
    return std::pair{sup, supu};
  };
  const auto [s1, u1] = rhs_sup(1e-3);
  const auto [s2, u2] = rhs_sup(5e-4);
  CHECK(s1 / (u1 * u1) < 1.0);          // measured constant below 1
  CHECK(s1 / s2 == doctest::Approx(4.0).epsilon(0.02));  // quadratic decay
}

TEST_CASE("drift Laplacian annihilates the neutral modes and scales the unstable ones") {
  auto grid = sheet_grid(5.0, 41, 16);
  const double h = grid->hy();
  struct Case {
    double (*fn)(double, double, double);
    double lambda;
  };
  const Case cases[] = {
      {[](double, double, double) { return 1.0; }, 1.0},
      {[](double y1, double, double) { return y1; }, 0.5},
      {[](double, double y2, double) { return y2; }, 0.5},
      {[](double, double, double th) { return std::cos(th); }, 0.5},
      {[](double, double, double th) { return std::sin(th); }, 0.5},
      {[](double y1, double, double) { return y1 * y1 - 2.0; }, 0.0},
      {[](double, double y2, double) { return y2 * y2 - 2.0; }, 0.0},
      {[](double y1, double y2, double) { return 2.0 * y1 * y2; }, 0.0},
      {[](double y1, double, double th) { return y1 * std::cos(th); }, 0.0},
      {[](double y1, double, double th) { return y1 * std::sin(th); }, 0.0},
      {[](double, double y2, double th) { return y2 * std::cos(th); }, 0.0},
      {[](double, double y2, double th) { return y2 * std::sin(th); }, 0.0},
  };
  for (const auto& c : cases) {
    Field u = sheet_field(grid, c.fn);
    Field lu = ou_apply(u);
    double err = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
      err = std::max(err, std::abs(lu.v[i] - c.lambda * u.v[i]));
    CHECK(err <= 10.0 * h * h);
  }
}

TEST_CASE("quadratic form drops angular terms for theta-independent input") {
  auto grid = sheet_grid(5.0, 33, 8);
  Field u = sheet_field(grid, [](double y1, double y2, double) {
    return 0.3 * std::exp(-0.1 * (y1 * y1 + y2 * y2));
  });
  Field q = quadratic_form(u);
  for (std::size_t i = 0; i < u.size(); ++i)
    CHECK(q.v[i] == doctest::Approx(-u.v[i] * u.v[i] / constants::sqrt8).epsilon(1e-10));

  Field zero(grid);
  Field qz = quadratic_form(zero);
  CHECK(max_abs(qz) == 0.0);
}

TEST_CASE("expansion residual vanishes at u = 0 and decays at third order") {
  auto grid = sheet_grid(6.0, 61, 16);
  CHECK(max_abs(expansion_residual(CylinderGraph(grid, constants::sqrt2))) < 1e-12);

  // u0 = 0.1 (psi_1 + psi_3/4 + 0.05 y1 cos(theta)), Richardson fit of
  // |residual(eps u0)|_inf over eps in {1e-1, 1e-2, 1e-3}.
  auto residual_norm = [&](double eps) {
    Field v(grid, constants::sqrt2);
    for (int j1 = 0; j1 < grid->ny(); ++j1)
      for (int j2 = 0; j2 < grid->ny(); ++j2)
        for (int t = 0; t < grid->ntheta(); ++t) {
          const double y1 = grid->y(j1), y2 = grid->y(j2), th = grid->theta(t);
          const double u0 = 0.1 * ((y1 * y1 - 2.0) + 0.5 * y1 * y2 +
                                   0.05 * y1 * std::cos(th));
          v.v[grid->index(j1, j2, t)] += eps * u0;
        }
    return max_abs(expansion_residual(CylinderGraph(std::move(v))));
  };
  const double r1 = residual_norm(1e-1);
  const double r2 = residual_norm(1e-2);
  const double r3 = residual_norm(1e-3);
  const double order12 = std::log10(r1 / r2);
  const double order23 = std::log10(r2 / r3);
  CHECK(order12 >= 2.9);
  CHECK(order23 >= 2.9);
}

TEST_CASE("evolution and mean curvature agree through the normal-speed identity") {
  // d_tau v * <w, nu> = <-H nu + F/2, nu> becomes
  // rhs = -H |N| / v + (v - y . dv)/2 at every node.
  auto grid = sheet_grid(4.0, 33, 12);
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> amp(-0.05, 0.05);
  Field v(grid, constants::sqrt2);
  for (int j1 = 0; j1 < grid->ny(); ++j1)
    for (int j2 = 0; j2 < grid->ny(); ++j2) {
      const double y1 = grid->y(j1), y2 = grid->y(j2);
      const double a = amp(rng);
      for (int t = 0; t < grid->ntheta(); ++t) {
        const double th = grid->theta(t);
        v.v[grid->index(j1, j2, t)] +=
            a * std::exp(-0.2 * (y1 * y1 + y2 * y2)) + 0.02 * std::cos(th) * std::sin(0.5 * y1);
      }
    }
  CylinderGraph g(std::move(v));
  Field rhs = evolution_rhs(g);
  Field H = mean_curvature(g);
  Field nn = normal_magnitude(g);

  // y . dv from the same stencils via a tiny helper: recompute with the
  // identity rhs + H |N| / v - (v - y.dv)/2 = 0  <=>  combine fields.
  // (v - y.dv)/2 = rhs + m/v - num/den; num/den = -H |N|/v + m |N|... use
  // the direct relation below instead: both sides share num/den, so
  // checking rhs + H|N|/v - (v - y.dv)/2 = 0 reduces to comparing two
  // algebraically equal expressions built from independent code paths.
  GeometryWorkspace ws;
  Field drift(g.radius.grid);
  {
    // (v - y.dv)/2 = rhs - num/den + m/v and num/den = m/|N| * |N|/v ... ;
    // evaluate y.dv directly from stencils for an independent check.
    const Grid& gr = g.grid();
    const auto d1 = make_d1_table(gr.ny(), gr.hy());
    const int nt = gr.ntheta();
    const std::ptrdiff_t s1 = static_cast<std::ptrdiff_t>(gr.ny()) * nt;
    for (int j1 = 0; j1 < gr.ny(); ++j1)
      for (int j2 = 0; j2 < gr.ny(); ++j2) {
        const std::size_t base = gr.index(j1, j2, 0);
        const double* line1 = g.radius.v.data() + static_cast<std::size_t>(j2) * nt;
        const double* line2 = g.radius.v.data() + static_cast<std::size_t>(j1) * gr.ny() * nt;
        for (int t = 0; t < nt; ++t) {
          const double g1 = d1.apply(line1 + t, j1, s1);
          const double g2 = d1.apply(line2 + t, j2, nt);
          drift.v[base + t] = gr.y(j1) * g1 + gr.y(j2) * g2;
        }
      }
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < rhs.size(); ++i) {
    const double vv = g.radius.v[i];
    const double lhs = rhs.v[i] + H.v[i] * nn.v[i] / vv - 0.5 * (vv - drift.v[i]);
    worst = std::max(worst, std::abs(lhs));
  }
  CHECK(worst < 1e-11);
}

TEST_CASE("mean curvature matches a cotangent mesh oracle under refinement") {
  // Random smooth profile on the (k=1, m=1) instance; triangulate the
  // embedded surface of revolution in R^3 and compare against the
  // cotangent-Laplacian mean curvature at interior vertices.
  auto profile = [](double y, double th) {
    return 1.3 + 0.2 * std::sin(0.7 * y) + 0.1 * std::cos(th + 0.3 * y);
  };
  auto mesh_error = [&](int ny, int nt) {
    auto grid = make_grid({1, 1}, 3.0, ny, nt);
    Field v(grid);
    for (int j = 0; j < ny; ++j)
      for (int t = 0; t < nt; ++t) v.v[grid->index(j, 0, t)] = profile(grid->y(j), grid->theta(t));
    CylinderGraph g(v);
    Field H = mean_curvature(g);

    // Vertex positions of the structured triangulation.
    auto pos = [&](int j, int t, double out[3]) {
      const double vv = v.v[grid->index(j, 0, (t % nt + nt) % nt)];
      const double th = 2.0 * constants::pi * t / nt;
      out[0] = grid->y(j);
      out[1] = vv * std::cos(th);
      out[2] = vv * std::sin(th);
    };
    double worst = 0.0;
    for (int j = 2; j < ny - 2; ++j)
      for (int t = 0; t < nt; ++t) {
        // One-ring of the structured grid, triangulated consistently:
        // neighbors (j-1,t), (j+1,t), (j,t-1), (j,t+1), (j-1,t+1), (j+1,t-1).
        const int nb[6][2] = {{j - 1, t},     {j - 1, t + 1}, {j, t + 1},
                              {j + 1, t},     {j + 1, t - 1}, {j, t - 1}};
        double xi[3];
        pos(j, t, xi);
        double lap[3] = {0, 0, 0};
        double area = 0.0;
        for (int e = 0; e < 6; ++e) {
          const int ea = e, eb = (e + 1) % 6, ec = (e + 5) % 6;
          double xj[3], xl[3], xr[3];
          pos(nb[ea][0], nb[ea][1], xj);
          pos(nb[eb][0], nb[eb][1], xl);
          pos(nb[ec][0], nb[ec][1], xr);
          auto cot_at = [&](const double* apex) {
            double u1[3], u2[3];
            for (int d = 0; d < 3; ++d) {
              u1[d] = xi[d] - apex[d];
              u2[d] = xj[d] - apex[d];
            }
            const double dot = u1[0] * u2[0] + u1[1] * u2[1] + u1[2] * u2[2];
            const double cx = u1[1] * u2[2] - u1[2] * u2[1];
            const double cy = u1[2] * u2[0] - u1[0] * u2[2];
            const double cz = u1[0] * u2[1] - u1[1] * u2[0];
            return dot / std::sqrt(cx * cx + cy * cy + cz * cz);
          };
          const double w = cot_at(xl) + cot_at(xr);
          for (int d = 0; d < 3; ++d) lap[d] += w * (xj[d] - xi[d]);
          // Barycentric area contribution of triangle (xi, xj, xl).
          double e1[3], e2[3];
          for (int d = 0; d < 3; ++d) {
            e1[d] = xj[d] - xi[d];
            e2[d] = xl[d] - xi[d];
          }
          const double cx = e1[1] * e2[2] - e1[2] * e2[1];
          const double cy = e1[2] * e2[0] - e1[0] * e2[2];
          const double cz = e1[0] * e2[1] - e1[1] * e2[0];
          area += std::sqrt(cx * cx + cy * cy + cz * cz) / 6.0;
        }
        // Delta x = -H nu with H the sum of principal curvatures.
        double hm = 0.0;
        for (int d = 0; d < 3; ++d) lap[d] /= 2.0 * area;
        hm = std::sqrt(lap[0] * lap[0] + lap[1] * lap[1] + lap[2] * lap[2]);
        worst = std::max(worst, std::abs(hm - std::abs(H.v[grid->index(j, 0, t)])));
      }
    return worst;
  };
  const double e1 = mesh_error(41, 24);
  const double e2 = mesh_error(81, 48);
  CHECK(e2 < e1 / 2.5);  // second-order mesh convergence toward the formula
}

TEST_CASE("operations validate their preconditions") {
  auto grid = sheet_grid(4.0, 17, 8);
  Field v(grid, 1.0);
  v.v[3] = -0.2;
  CHECK_THROWS_AS(CylinderGraph{v}, domain_error);
  CHECK_THROWS_AS(make_grid({3, 1}, 4.0, 17, 8), config_error);
  CHECK_THROWS_AS(make_grid({1, 2}, 4.0, 17, 8), config_error);

  Field u(make_grid({1, 1}, 4.0, 17, 8));
  CHECK_THROWS_AS(ou_apply(u), config_error);
  CHECK_THROWS_AS(quadratic_form(u), config_error);
}
