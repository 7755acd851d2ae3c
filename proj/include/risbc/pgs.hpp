#pragma once
#include <algorithm>
#include <cmath>
#include <limits>

#include "risbc/conic.hpp"

namespace risbc {

struct SubgradientOptions {
  int max_iters = 40000;
  double feas_tol = 1e-9;
  double step_scale = 0.5;
};

/// Fallback backend: switching projected-subgradient ascent on the max-min
/// epigraph objective. Low accuracy (~1e-3 on normalized data) but free of
/// linear algebra; used to cross-check the interior-point backend on the
/// diagonal architectures and as a self-contained safety net.
inline ConicSolution solve_subgradient(const ConicProblem& p, const CVec& x0,
                                       const SubgradientOptions& opt = {}) {
  ConicSolution sol;
  if (!p.equalities.empty()) {
    sol.status = SolveStatus::NumericalFailure;
    sol.message = "subgradient backend does not handle equality constraints";
    return sol;
  }
  CVec x = x0.size() == p.dim ? x0 : CVec::Zero(p.dim);

  const auto grad_quadrow = [&](const QuadConstraint& c, const CVec& at) {
    CVec g = CVec::Zero(p.dim);
    if (c.lin.size() > 0) g += c.lin;
    if (c.quad) g += c.quad_coeff * c.quad->gradient(at);
    return g;
  };
  const auto grad_epirow = [&](const EpigraphRow& r, const CVec& at) {
    CVec g = r.lin.size() > 0 ? CVec(r.lin) : CVec(CVec::Zero(p.dim));
    if (r.quad) g -= r.quad_coeff * r.quad->gradient(at);
    return g;
  };

  CVec x_best = x;
  double best = -std::numeric_limits<double>::infinity();
  bool have_best = false;
  const double base_step = opt.step_scale * (1.0 + x.norm());

  for (int it = 0; it < opt.max_iters; ++it) {
    // most violated constraint, if any
    int worst = -1;
    bool worst_affine = false;
    double worst_v = opt.feas_tol;
    for (int i = 0; i < static_cast<int>(p.quadratic.size()); ++i) {
      const double v = p.quadratic_value(i, x);
      if (v > worst_v) {
        worst_v = v;
        worst = i;
        worst_affine = false;
      }
    }
    for (int i = 0; i < static_cast<int>(p.affine.size()); ++i) {
      const double v = -p.affine_row_value(i, x);
      if (v > worst_v) {
        worst_v = v;
        worst = i;
        worst_affine = true;
      }
    }

    if (worst >= 0) {
      // Polyak step toward the violated halfspace
      CVec g = worst_affine ? CVec(-p.affine[worst].lin)
                            : grad_quadrow(p.quadratic[worst], x);
      const double gn = g.squaredNorm();
      if (gn <= 0.0) break;
      x -= (worst_v / gn) * g;
      continue;
    }

    const double val = p.epigraph_value(x);
    if (!have_best || val > best) {
      best = val;
      x_best = x;
      have_best = true;
    }
    // subgradient of the active (argmin) row, diminishing step
    int argmin = 0;
    double vmin = std::numeric_limits<double>::infinity();
    for (int k = 0; k < static_cast<int>(p.epigraph.size()); ++k) {
      const double v = p.epigraph_row_value(k, x);
      if (v < vmin) {
        vmin = v;
        argmin = k;
      }
    }
    CVec g = grad_epirow(p.epigraph[argmin], x);
    const double gn = g.norm();
    if (gn <= 1e-300) break;
    x += (base_step / ((1.0 + it / 50.0) * gn)) * g;
  }

  if (!have_best) {
    sol.status = SolveStatus::Infeasible;
    sol.message = "no feasible iterate found";
    sol.x = x;
    return sol;
  }
  sol.x = x_best;
  sol.t = best;
  sol.objective = best;
  sol.status = SolveStatus::Optimal;
  sol.kkt.primal = std::max(0.0, p.max_violation(x_best));
  sol.message = "subgradient backend (low accuracy)";
  return sol;
}

}  // namespace risbc
