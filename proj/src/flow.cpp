#include "cylflow/flow.hpp"

#include <algorithm>
#include <cmath>

namespace cylflow {

double ModeBoundary::value(double y1, double y2, double tau) const {
  const AlphaState m = exact_mode_solution(seed, tau);
  return constants::sqrt2 + m.a1 * y1 * y1 + m.a2 * y2 * y2 + 2.0 * m.a3 * y1 * y2 -
         2.0 * (m.a1 + m.a2);
}

double cfl_limit(const Grid& g) {
  const double dth = constants::sqrt2 * g.htheta();
  return 0.2 * std::min(g.hy() * g.hy(), dth * dth);
}

double suggested_step(const Grid& g, double vmin, double cfl_factor) {
  const double arc = std::min(constants::sqrt2, vmin) * g.htheta();
  return cfl_factor * std::min(g.hy() * g.hy(), arc * arc);
}

namespace {

// Imposes the boundary policy on the outermost two rings of the flat box.
void impose_boundary(Field& v, double tau, BoundaryPolicy policy,
                     const std::optional<ModeBoundary>& mb) {
  const Grid& g = *v.grid;
  if (policy == BoundaryPolicy::free_ends) return;
  const int n = g.ny();
  const int nt = g.ntheta();

  if (policy == BoundaryPolicy::dirichlet_mode) {
    if (!mb) throw config_error("dirichlet_mode boundary needs a mode prediction seed");
    auto set_node = [&](int j1, int j2) {
      const double val = mb->value(g.y(j1), g.spec().k == 2 ? g.y(j2) : 0.0, tau);
      const std::size_t base = g.index(j1, j2, 0);
      for (int t = 0; t < nt; ++t) v.v[base + t] = val;
    };
    if (g.spec().k == 2) {
      for (int j = 0; j < n; ++j)
        for (int b = 0; b < 2; ++b) {
          set_node(b, j);
          set_node(n - 1 - b, j);
          set_node(j, b);
          set_node(j, n - 1 - b);
        }
    } else {
      for (int b = 0; b < 2; ++b) {
        set_node(b, 0);
        set_node(n - 1 - b, 0);
      }
    }
    return;
  }

  // neumann: even reflection through node 2 / node n-3.
  auto reflect_axis1 = [&](int j2) {
    for (int t = 0; t < nt; ++t) {
      v.v[g.index(0, j2, 0) + t] = v.v[g.index(4, j2, 0) + t];
      v.v[g.index(1, j2, 0) + t] = v.v[g.index(3, j2, 0) + t];
      v.v[g.index(n - 1, j2, 0) + t] = v.v[g.index(n - 5, j2, 0) + t];
      v.v[g.index(n - 2, j2, 0) + t] = v.v[g.index(n - 4, j2, 0) + t];
    }
  };
  if (g.spec().k == 2) {
    for (int j2 = 0; j2 < n; ++j2) reflect_axis1(j2);
    for (int j1 = 0; j1 < n; ++j1)
      for (int t = 0; t < nt; ++t) {
        v.v[g.index(j1, 0, 0) + t] = v.v[g.index(j1, 4, 0) + t];
        v.v[g.index(j1, 1, 0) + t] = v.v[g.index(j1, 3, 0) + t];
        v.v[g.index(j1, n - 1, 0) + t] = v.v[g.index(j1, n - 5, 0) + t];
        v.v[g.index(j1, n - 2, 0) + t] = v.v[g.index(j1, n - 4, 0) + t];
      }
  } else {
    reflect_axis1(0);
  }
}

void check_positive(const Field& v, double tau) {
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!(v.v[i] > 0.0)) throw blowup_error(tau, i, v.v[i]);
}

}  // namespace

FlowState step(const FlowState& s, double dtau, StepContext& ctx) {
  const Grid& g = s.graph.grid();
  if (!(dtau > 0.0)) throw config_error("time step must be positive (the flow is irreversible)");
  if (dtau > cfl_limit(g) * (1.0 + 1e-12))
    throw config_error("time step exceeds the CFL bound for this grid");

  const Field& v0 = s.graph.radius;
  auto axpy = [&](Field& out, const Field& k, double c) {
    out.v.resize(v0.size());
    out.grid = v0.grid;
    for (std::size_t i = 0; i < v0.size(); ++i) out.v[i] = v0.v[i] + c * k.v[i];
  };

  CylinderGraph work(v0);  // validated copy
  evolution_rhs(work, ctx.k1, ctx.ws);

  axpy(ctx.stage, ctx.k1, 0.5 * dtau);
  impose_boundary(ctx.stage, s.tau + 0.5 * dtau, ctx.policy, ctx.boundary);
  check_positive(ctx.stage, s.tau + 0.5 * dtau);
  work.radius.v.swap(ctx.stage.v);
  evolution_rhs(work, ctx.k2, ctx.ws);
  work.radius.v.swap(ctx.stage.v);

  axpy(ctx.stage, ctx.k2, 0.5 * dtau);
  impose_boundary(ctx.stage, s.tau + 0.5 * dtau, ctx.policy, ctx.boundary);
  check_positive(ctx.stage, s.tau + 0.5 * dtau);
  work.radius.v.swap(ctx.stage.v);
  evolution_rhs(work, ctx.k3, ctx.ws);
  work.radius.v.swap(ctx.stage.v);

  axpy(ctx.stage, ctx.k3, dtau);
  impose_boundary(ctx.stage, s.tau + dtau, ctx.policy, ctx.boundary);
  check_positive(ctx.stage, s.tau + dtau);
  work.radius.v.swap(ctx.stage.v);
  evolution_rhs(work, ctx.k4, ctx.ws);
  work.radius.v.swap(ctx.stage.v);

  Field vn(v0.grid);
  const double c = dtau / 6.0;
  for (std::size_t i = 0; i < v0.size(); ++i)
    vn.v[i] = v0.v[i] +
              c * (ctx.k1.v[i] + 2.0 * ctx.k2.v[i] + 2.0 * ctx.k3.v[i] + ctx.k4.v[i]);
  impose_boundary(vn, s.tau + dtau, ctx.policy, ctx.boundary);
  check_positive(vn, s.tau + dtau);
  return {s.tau + dtau, CylinderGraph(std::move(vn))};
}

GaussianArea gaussian_area(const CylinderGraph& g) {
  const Grid& gr = g.grid();
  if (!gr.spec().is_sheet())
    throw config_error("gaussian_area is defined on the (k=2, m=1) sheet instance");
  Field nn = normal_magnitude(g);
  const auto gw = gregory_weights(gr.ny(), gr.hy());
  const double pref =
      std::pow(4.0 * constants::pi, -1.5) * 2.0 * constants::pi / gr.ntheta();
  double acc = 0.0;
  for (int j1 = 0; j1 < gr.ny(); ++j1)
    for (int j2 = 0; j2 < gr.ny(); ++j2) {
      const double y1 = gr.y(j1), y2 = gr.y(j2);
      const double wy = gw[j1] * gw[j2] * std::exp(-(y1 * y1 + y2 * y2) / 4.0);
      const std::size_t base = gr.index(j1, j2, 0);
      double at = 0.0;
      for (int t = 0; t < gr.ntheta(); ++t) {
        const double v = g.radius.v[base + t];
        at += std::exp(-v * v / 4.0) * nn.v[base + t];
      }
      acc += wy * at;
    }
  GaussianArea area;
  area.interior = pref * acc;
  const double efrac = std::erf(0.5 * gr.R());
  area.tail = constants::gaussian_area_cylinder * (1.0 - efrac * efrac);
  return area;
}

std::vector<ModeState> FlowHistory::mode_series() const {
  std::vector<ModeState> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.modes);
  return out;
}

std::vector<double> FlowHistory::taus() const {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.tau);
  return out;
}

std::vector<double> FlowHistory::norms() const {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.unorm);
  return out;
}

namespace {

HistoryRecord make_record(const FlowState& s, const SheetDiagnostics& diag, const RunConfig& cfg) {
  HistoryRecord rec;
  rec.tau = s.tau;
  Field u = s.graph.deviation();
  rec.modes = diag.mode_state(u, s.tau);
  rec.S = rec.modes.trace();
  rec.D = rec.modes.det();
  rec.x = constants::sqrt2 * s.tau * rec.S;
  rec.y = 8.0 * s.tau * s.tau * rec.D;
  const GaussianArea F = gaussian_area(s.graph);
  rec.F_interior = F.interior;
  rec.F_tail = F.tail;
  rec.F_total = F.total();
  rec.theta_defect = theta_defect(u, cfg.defect_radius);
  rec.unorm = std::sqrt(rec.modes.norm2);
  if (cfg.store_snapshots) rec.snapshot = s.graph.radius;
  return rec;
}

}  // namespace

FlowHistory run_flow(const CylinderGraph& initial, const RunConfig& cfg,
                     const SheetDiagnostics& diag) {
  if (!(cfg.tau0 < cfg.tau1 && cfg.tau1 < 0.0))
    throw config_error("flow runs require tau0 < tau1 < 0");
  if (!(cfg.sample_stride > 0.0)) throw config_error("sampling stride must be positive");
  if (!(cfg.cfl_factor > 0.0 && cfg.cfl_factor <= 0.2))
    throw config_error("CFL factor must lie in (0, 0.2]");

  StepContext ctx;
  ctx.policy = cfg.policy;
  ctx.boundary = cfg.boundary;

  FlowHistory hist;
  FlowState state{cfg.tau0, initial};
  {
    Field v0 = initial.radius;
    impose_boundary(v0, cfg.tau0, cfg.policy, cfg.boundary);
    state.graph = CylinderGraph(std::move(v0));
  }
  hist.records.push_back(make_record(state, diag, cfg));

  const Grid& g = initial.grid();
  try {
    double target = cfg.tau0;
    while (target < cfg.tau1 - 1e-12) {
      target = std::min(cfg.tau1, target + cfg.sample_stride);
      while (state.tau < target - 1e-12) {
        double dt;
        if (cfg.fixed_dtau) {
          dt = *cfg.fixed_dtau;
        } else {
          double vmin = state.graph.radius.v[0];
          for (double val : state.graph.radius.v) vmin = std::min(vmin, val);
          dt = suggested_step(g, vmin, cfg.cfl_factor);
        }
        dt = std::min(dt, target - state.tau);
        state = step(state, dt, ctx);
      }
      hist.records.push_back(make_record(state, diag, cfg));
    }
  } catch (const blowup_error& e) {
    hist.partial = true;
    hist.blowup_note = "blow-up at tau = " + std::to_string(e.tau) + ", node " +
                       std::to_string(e.node) + ", value " + std::to_string(e.value);
  }
  return hist;
}

}  // namespace cylflow
