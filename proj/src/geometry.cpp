#include "cylflow/geometry.hpp"

#include <cmath>

namespace cylflow {

namespace {

void put(StencilTable& t, int j, int start, std::initializer_list<double> cs, double scale) {
  t.start[j] = start;
  t.len[j] = static_cast<int>(cs.size());
  double* w = &t.w[static_cast<std::size_t>(j) * StencilTable::stride];
  int i = 0;
  for (double c : cs) w[i++] = c * scale;
}

}  // namespace

StencilTable make_d1_table(int n, double h) {
  StencilTable t;
  t.start.resize(n);
  t.len.resize(n);
  t.w.assign(static_cast<std::size_t>(n) * StencilTable::stride, 0.0);
  const double s = 1.0 / (12.0 * h);
  put(t, 0, 0, {-25, 48, -36, 16, -3}, s);
  put(t, 1, 0, {-3, -10, 18, -6, 1}, s);
  for (int j = 2; j < n - 2; ++j) put(t, j, j - 2, {1, -8, 0, 8, -1}, s);
  put(t, n - 2, n - 5, {-1, 6, -18, 10, 3}, s);
  put(t, n - 1, n - 5, {3, -16, 36, -48, 25}, s);
  return t;
}

StencilTable make_d2_table(int n, double h) {
  StencilTable t;
  t.start.resize(n);
  t.len.resize(n);
  t.w.assign(static_cast<std::size_t>(n) * StencilTable::stride, 0.0);
  const double s = 1.0 / (12.0 * h * h);
  put(t, 0, 0, {45, -154, 214, -156, 61, -10}, s);
  put(t, 1, 0, {10, -15, -4, 14, -6, 1}, s);
  for (int j = 2; j < n - 2; ++j) put(t, j, j - 2, {-1, 16, -30, 16, -1}, s);
  put(t, n - 2, n - 6, {1, -6, 14, -4, -15, 10}, s);
  put(t, n - 1, n - 6, {-10, 61, -156, 214, -154, 45}, s);
  return t;
}

namespace {

struct FlatTables {
  StencilTable d1, d2;
};

FlatTables make_tables(const Grid& g) {
  return {make_d1_table(g.ny(), g.hy()), make_d2_table(g.ny(), g.hy())};
}

// Dense Fourier matvec along one theta pencil.
inline void theta_matvec(const double* mat, const double* pencil, double* out, int n) {
  for (int j = 0; j < n; ++j) {
    const double* row = mat + static_cast<std::size_t>(j) * n;
    double s = 0.0;
    for (int k = 0; k < n; ++k) s += row[k] * pencil[k];
    out[j] = s;
  }
}

void fill_theta_derivatives(const Field& f, std::vector<double>& vt, std::vector<double>& vtt) {
  const Grid& g = *f.grid;
  const int nt = g.ntheta();
  const std::size_t npencil = f.size() / static_cast<std::size_t>(nt);
  vt.resize(f.size());
  vtt.resize(f.size());
  const double* d1 = g.theta_d1().data();
  const double* d2 = g.theta_d2().data();
  const double* v = f.v.data();
  double* pt = vt.data();
  double* ptt = vtt.data();
  parallel_for(static_cast<std::ptrdiff_t>(npencil), [&](std::size_t p) {
    const std::size_t off = p * nt;
    theta_matvec(d1, v + off, pt + off, nt);
    theta_matvec(d2, v + off, ptt + off, nt);
  });
}

// Evaluates the quotient pieces of the graphical equation at every node and
// hands them to `emit(idx, v, num, den, ydotgrad)`. Stencils are applied
// along axis lines: the pointer passed to StencilTable::apply addresses the
// first node of the line.
template <class Emit>
void quotient_kernel(const CylinderGraph& graph, GeometryWorkspace& ws, const Emit& emit) {
  const Grid& g = graph.grid();
  const int ny = g.ny();
  const int nt = g.ntheta();
  const FlatTables tabs = make_tables(g);
  fill_theta_derivatives(graph.radius, ws.vtheta, ws.vthetatheta);
  const double* v = graph.radius.v.data();
  const double* vt = ws.vtheta.data();
  const double* vtt = ws.vthetatheta.data();
  const StencilTable& d1 = tabs.d1;
  const StencilTable& d2 = tabs.d2;

  if (g.spec().k == 2) {
    const std::ptrdiff_t s1 = static_cast<std::ptrdiff_t>(ny) * nt;  // stride along y1
    const std::ptrdiff_t s2 = nt;                                    // stride along y2
    parallel_for(ny, [&](std::size_t j1u) {
      const int j1 = static_cast<int>(j1u);
      const double y1 = g.y(j1);
      std::vector<double> row12(static_cast<std::size_t>(StencilTable::stride) * nt);
      const int start1 = d1.start[j1];
      const int len1 = d1.len[j1];
      const double* w1 = &d1.w[static_cast<std::size_t>(j1) * StencilTable::stride];
      for (int j2 = 0; j2 < ny; ++j2) {
        const double y2 = g.y(j2);
        const std::size_t node0 = g.index(j1, j2, 0);
        const double* line1 = v + static_cast<std::size_t>(j2) * nt;          // y1 line at (., j2, .)
        const double* line2 = v + static_cast<std::size_t>(j1) * ny * nt;     // y2 line at (j1, ., .)
        const double* line1t = vt + static_cast<std::size_t>(j2) * nt;
        const double* line2t = vt + static_cast<std::size_t>(j1) * ny * nt;
        // row12[i][it] = (D1_y2 v) on the y1-stencil nodes, for the mixed term.
        for (int i = 0; i < len1; ++i) {
          const double* lo = v + static_cast<std::size_t>(start1 + i) * ny * nt;
          double* dst = &row12[static_cast<std::size_t>(i) * nt];
          for (int it = 0; it < nt; ++it) dst[it] = d1.apply(lo + it, j2, s2);
        }
        for (int it = 0; it < nt; ++it) {
          const double vc = v[node0 + it];
          const double g1 = d1.apply(line1 + it, j1, s1);
          const double g2 = d1.apply(line2 + it, j2, s2);
          const double v11 = d2.apply(line1 + it, j1, s1);
          const double v22 = d2.apply(line2 + it, j2, s2);
          double v12 = 0.0;
          for (int i = 0; i < len1; ++i) v12 += w1[i] * row12[static_cast<std::size_t>(i) * nt + it];
          const double vtc = vt[node0 + it];
          const double v1t = d1.apply(line1t + it, j1, s1);
          const double v2t = d1.apply(line2t + it, j2, s2);
          const double vttc = vtt[node0 + it];

          const double gradsq = g1 * g1 + g2 * g2;
          const double den = (1.0 + gradsq) * vc * vc + vtc * vtc;
          const double a11 = den - vc * vc * g1 * g1;
          const double a22 = den - vc * vc * g2 * g2;
          const double a12 = -vc * vc * g1 * g2;
          const double num = a11 * v11 + a22 * v22 + 2.0 * a12 * v12 +
                             (1.0 + gradsq) * vttc -
                             2.0 * vtc * (g1 * v1t + g2 * v2t) - vtc * vtc / vc;
          emit(node0 + it, vc, num, den, y1 * g1 + y2 * g2);
        }
      }
    });
  } else {
    const std::ptrdiff_t s1 = nt;
    parallel_for(ny, [&](std::size_t j1u) {
      const int j1 = static_cast<int>(j1u);
      const double y1 = g.y(j1);
      const std::size_t node0 = g.index(j1, 0, 0);
      for (int it = 0; it < nt; ++it) {
        const double vc = v[node0 + it];
        const double g1 = d1.apply(v + it, j1, s1);
        const double v11 = d2.apply(v + it, j1, s1);
        const double vtc = vt[node0 + it];
        const double v1t = d1.apply(vt + it, j1, s1);
        const double vttc = vtt[node0 + it];

        const double den = (1.0 + g1 * g1) * vc * vc + vtc * vtc;
        const double a11 = den - vc * vc * g1 * g1;
        const double num = a11 * v11 + (1.0 + g1 * g1) * vttc -
                           2.0 * vtc * g1 * v1t - vtc * vtc / vc;
        emit(node0 + it, vc, num, den, y1 * g1);
      }
    });
  }
}

}  // namespace

void evolution_rhs(const CylinderGraph& g, Field& out, GeometryWorkspace& ws) {
  if (!out.grid || !out.grid->compatible(g.grid())) out = Field(g.radius.grid);
  const double m = g.grid().spec().m;
  double* o = out.v.data();
  quotient_kernel(g, ws, [o, m](std::size_t i, double v, double num, double den, double ydg) {
    o[i] = num / den - m / v + 0.5 * (v - ydg);
  });
}

Field evolution_rhs(const CylinderGraph& g) {
  Field out(g.radius.grid);
  GeometryWorkspace ws;
  evolution_rhs(g, out, ws);
  return out;
}

void mean_curvature(const CylinderGraph& g, Field& out, GeometryWorkspace& ws) {
  if (!out.grid || !out.grid->compatible(g.grid())) out = Field(g.radius.grid);
  const double m = g.grid().spec().m;
  double* o = out.v.data();
  quotient_kernel(g, ws, [o, m](std::size_t i, double v, double num, double den, double) {
    const double nn = std::sqrt(den);
    o[i] = -v * num / (den * nn) + m / nn;
  });
}

Field mean_curvature(const CylinderGraph& g) {
  Field out(g.radius.grid);
  GeometryWorkspace ws;
  mean_curvature(g, out, ws);
  return out;
}

Field normal_magnitude(const CylinderGraph& g) {
  Field out(g.radius.grid);
  GeometryWorkspace ws;
  double* o = out.v.data();
  quotient_kernel(g, ws, [o](std::size_t i, double, double, double den, double) {
    o[i] = std::sqrt(den);
  });
  return out;
}

Field ou_apply(const Field& u) {
  const Grid& g = *u.grid;
  if (!g.spec().is_sheet())
    throw config_error("ou_apply is defined on the (k=2, m=1) sheet instance");
  const int ny = g.ny();
  const int nt = g.ntheta();
  const FlatTables tabs = make_tables(g);
  Field out(u.grid);
  std::vector<double> ut, utt;
  fill_theta_derivatives(u, ut, utt);
  const double* f = u.v.data();
  double* o = out.v.data();
  const std::ptrdiff_t s1 = static_cast<std::ptrdiff_t>(ny) * nt;
  parallel_for(ny, [&](std::size_t j1u) {
    const int j1 = static_cast<int>(j1u);
    const double y1 = g.y(j1);
    for (int j2 = 0; j2 < ny; ++j2) {
      const double y2 = g.y(j2);
      const std::size_t node0 = g.index(j1, j2, 0);
      const double* line1 = f + static_cast<std::size_t>(j2) * nt;
      const double* line2 = f + static_cast<std::size_t>(j1) * ny * nt;
      for (int it = 0; it < nt; ++it) {
        const double u1 = tabs.d1.apply(line1 + it, j1, s1);
        const double u2 = tabs.d1.apply(line2 + it, j2, nt);
        const double u11 = tabs.d2.apply(line1 + it, j1, s1);
        const double u22 = tabs.d2.apply(line2 + it, j2, nt);
        o[node0 + it] =
            u11 + u22 - 0.5 * (y1 * u1 + y2 * u2) + 0.5 * utt[node0 + it] + f[node0 + it];
      }
    }
  });
  return out;
}

Field quadratic_form(const Field& u) {
  const Grid& g = *u.grid;
  if (!g.spec().is_sheet())
    throw config_error("quadratic_form is defined on the (k=2, m=1) sheet instance");
  Field out(u.grid);
  std::vector<double> ut, utt;
  fill_theta_derivatives(u, ut, utt);
  const double c2 = 1.0 / constants::sqrt8;
  const double c1 = 1.0 / constants::sqrt2;
  for (std::size_t i = 0; i < u.size(); ++i)
    out.v[i] = -c2 * (u.v[i] * u.v[i] + ut[i] * ut[i]) - c1 * u.v[i] * utt[i];
  return out;
}

Field expansion_residual(const CylinderGraph& g) {
  if (!g.grid().spec().is_sheet())
    throw config_error("expansion_residual is defined on the (k=2, m=1) sheet instance");
  Field u = g.deviation();
  Field rhs = evolution_rhs(g);
  Field lin = ou_apply(u);
  Field quad = quadratic_form(u);
  Field out(g.radius.grid);
  for (std::size_t i = 0; i < out.size(); ++i)
    out.v[i] = rhs.v[i] - lin.v[i] - quad.v[i];
  return out;
}

}  // namespace cylflow
