#pragma once

#include "cylflow/grid.hpp"

namespace cylflow {

// Finite-difference tables for one uniform flat axis: 4th-order central
// stencils in the interior, 4th-order one-sided closures at the edges.
struct StencilTable {
  // For node j, derivative = sum_i w[j][i] * f[start[j] + i].
  std::vector<int> start;
  std::vector<int> len;
  std::vector<double> w;  // 6 slots per node
  static constexpr int stride = 6;

  double apply(const double* f, int j, std::ptrdiff_t elem_stride) const {
    const double* c = &w[static_cast<std::size_t>(j) * stride];
    const double* p = f + static_cast<std::ptrdiff_t>(start[j]) * elem_stride;
    double s = 0.0;
    for (int i = 0; i < len[j]; ++i) s += c[i] * p[i * elem_stride];
    return s;
  }
};

StencilTable make_d1_table(int n, double h);
StencilTable make_d2_table(int n, double h);

// Scratch arrays reused across evaluations by the flow solver.
struct GeometryWorkspace {
  std::vector<double> vtheta;
  std::vector<double> vthetatheta;
};

// Right-hand side of the renormalized graphical mean curvature evolution
// over R^k x S^1:
//   d_tau v = [A:ddv + (1+|dv|^2) v_tt - 2 dv.(v_t dv_t) - v_t^2/v] / W
//             - m/v + (v - y.dv)/2,   W = (1+|dv|^2) v^2 + v_t^2,
// with A = W*I - v^2 dv (x) dv. Flat derivatives use the 4th-order tables,
// angular derivatives are Fourier-exact.
void evolution_rhs(const CylinderGraph& g, Field& out, GeometryWorkspace& ws);
Field evolution_rhs(const CylinderGraph& g);

// Mean curvature (sum of principal curvatures) of the embedded graph,
// H = -v*num/|N|^3 + m/|N| with |N|^2 = W as above. Constant radius r gives
// H = m/r.
void mean_curvature(const CylinderGraph& g, Field& out, GeometryWorkspace& ws);
Field mean_curvature(const CylinderGraph& g);

// |N| = sqrt((1+|dv|^2) v^2 + |v_t|^2) at every node.
Field normal_magnitude(const CylinderGraph& g);

// Linearization of the evolution at the round sheet (k=2 only):
//   L u = u_11 + u_22 - (y1 u_1 + y2 u_2)/2 + u_tt/2 + u.
Field ou_apply(const Field& u);

// Quadratic part of the expansion at the round sheet:
//   Q(u) = -u^2/sqrt(8) - u_t^2/sqrt(8) - u u_tt/sqrt(2).
Field quadratic_form(const Field& u);

// Remainder of the expansion: evolution_rhs(sqrt(2)+u) - L u - Q(u).
Field expansion_residual(const CylinderGraph& g);

}  // namespace cylflow
