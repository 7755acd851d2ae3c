#pragma once
#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <vector>

#include "risbc/conic.hpp"

namespace risbc {

struct IpmOptions {
  double tol = 1e-8;            // duality-gap target
  int max_newton = 200;         // global Newton budget per phase
  double barrier_factor = 30.0; // centering-parameter growth
  double feas_margin = 1e-10;   // strictness needed to skip phase 1
  int woodbury_min_real_dim = 64;
  bool allow_woodbury = true;
};

namespace detail {

/// One inequality in the f(y) <= 0 orientation over y = [Re x; Im x; t; (s)]:
/// f = qc*quad(x) + Re(lin^H x) + cst + t_coeff * t - s_active * s.
struct BarrierRow {
  const QuadForm* quad = nullptr;
  double qc = 0.0;
  CVec lin;       // zero-size means no affine x part
  double cst = 0.0;
  double t_coeff = 0.0;
  int local_coord = -1;  // complex coordinate when the x-gradient is supported there; -1 dense
};

inline int single_support(const CVec& lin, const QuadForm* quad) {
  int coord = -1;
  auto touch = [&coord](int j) {
    if (coord == -1 || coord == j) {
      coord = j;
      return true;
    }
    return false;
  };
  for (int j = 0; j < lin.size(); ++j)
    if (lin(j) != cxd(0.0, 0.0) && !touch(j)) return -1;
  if (quad) {
    if (quad->kind != GramKind::ScaledCoords) return -1;
    for (int j = 0; j < quad->dim; ++j)
      if (quad->coord_weights(j) != 0.0 && !touch(j)) return -1;
  }
  return coord;
}

struct Compiled {
  int d = 0;       // complex dim
  int nx = 0;      // 2d
  int ntail = 0;   // 1 (t) or 2 (t, s)
  bool phase1 = false;
  std::vector<BarrierRow> rows;
  RMat eq;   // p x nx (t/s never constrained by equalities)
  RVec eq_rhs;

  int n() const { return nx + ntail; }

  CVec x_of(const RVec& y) const {
    CVec x(d);
    for (int j = 0; j < d; ++j) x(j) = cxd(y(j), y(d + j));
    return x;
  }

  double row_value(const BarrierRow& r, const CVec& x, double t, double s) const {
    double v = r.cst + r.t_coeff * t - (phase1 ? s : 0.0);
    if (r.lin.size() > 0) v += (r.lin.adjoint() * x).real()(0);
    if (r.quad) v += r.qc * r.quad->value(x);
    return v;
  }

  /// Gradient over y; returns the complex composite for the x part.
  void row_gradient(const BarrierRow& r, const CVec& x, CVec& gx, double& gt, double& gs) const {
    gx.setZero(d);
    if (r.lin.size() > 0) gx = r.lin;
    if (r.quad) gx += r.qc * r.quad->gradient(x);
    gt = r.t_coeff;
    gs = phase1 ? -1.0 : 0.0;
  }
};

inline Compiled compile(const ConicProblem& p, bool phase1) {
  Compiled c;
  c.d = p.dim;
  c.nx = 2 * p.dim;
  c.phase1 = phase1;
  c.ntail = phase1 ? 2 : 1;

  for (const auto& row : p.epigraph) {
    BarrierRow r;
    r.quad = row.quad.get();
    r.qc = row.quad_coeff;
    r.lin = -row.lin;
    r.cst = -row.constant;
    r.t_coeff = 1.0;
    r.local_coord = -1;  // epigraph rows always couple through t
    c.rows.push_back(std::move(r));
  }
  for (const auto& q : p.quadratic) {
    BarrierRow r;
    r.quad = q.quad.get();
    r.qc = q.quad_coeff;
    r.lin = q.lin;
    r.cst = q.constant;
    r.local_coord = single_support(r.lin, r.quad);
    c.rows.push_back(std::move(r));
  }
  for (const auto& a : p.affine) {
    BarrierRow r;
    r.lin = -a.lin;
    r.cst = -a.constant;
    r.local_coord = single_support(r.lin, nullptr);
    c.rows.push_back(std::move(r));
  }

  const int p_eq = static_cast<int>(p.equalities.size());
  c.eq.resize(2 * p_eq, c.nx);
  c.eq_rhs.resize(2 * p_eq);
  for (int i = 0; i < p_eq; ++i) {
    const auto& eq = p.equalities[i];
    for (int j = 0; j < c.d; ++j) {
      const cxd a = j < eq.coeffs.size() ? eq.coeffs(j) : cxd(0, 0);
      // Re(a^T x) and Im(a^T x) as real-linear rows
      c.eq(2 * i, j) = a.real();
      c.eq(2 * i, c.d + j) = -a.imag();
      c.eq(2 * i + 1, j) = a.imag();
      c.eq(2 * i + 1, c.d + j) = a.real();
    }
    c.eq_rhs(2 * i) = eq.rhs.real();
    c.eq_rhs(2 * i + 1) = eq.rhs.imag();
  }
  return c;
}

/// 2*realify(A) for the quadratic's Hermitian Gram matrix A, cached per form.
inline RMat realified_hessian(const QuadForm& q) {
  const int d = q.dim;
  RMat h = RMat::Zero(2 * d, 2 * d);
  auto put = [&](int a, int b, cxd v) {
    h(a, b) += 2.0 * v.real();
    h(a, d + b) += -2.0 * v.imag();
    h(d + a, b) += 2.0 * v.imag();
    h(d + a, d + b) += 2.0 * v.real();
  };
  switch (q.kind) {
    case GramKind::Dense: {
      const CMat a = q.rows.adjoint() * q.rows;
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
          if (a(i, j) != cxd(0, 0)) put(i, j, a(i, j));
      break;
    }
    case GramKind::ScaledCoords:
      for (int j = 0; j < d; ++j) {
        h(j, j) = 2.0 * q.coord_weights(j);
        h(d + j, d + j) = 2.0 * q.coord_weights(j);
      }
      break;
    case GramKind::MatRowBlock: {
      const int r = static_cast<int>(q.block_cols.rows());
      const CMat qsmall = q.block_cols * q.block_cols.adjoint();  // r x r
      // A entry at (j'*M + m, j*M + m) is qsmall(j, j')
      for (int m = 0; m < q.mat_rows; ++m)
        for (int jp = 0; jp < r; ++jp)
          for (int j = 0; j < r; ++j)
            put(jp * q.mat_rows + m, j * q.mat_rows + m, qsmall(j, jp));
      break;
    }
  }
  return h;
}

struct BarrierState {
  RVec y;
  double tau = 1.0;
  int newton_steps = 0;
};

class BarrierSolver {
 public:
  BarrierSolver(const Compiled& c, const IpmOptions& opt) : c_(c), opt_(opt) {
    use_woodbury_ = opt.allow_woodbury && c.eq.rows() == 0 && c.nx >= opt.woodbury_min_real_dim;
    if (use_woodbury_) {
      for (const auto& r : c.rows)
        if (r.quad && r.quad->kind == GramKind::MatRowBlock) use_woodbury_ = false;
    }
    if (!use_woodbury_)
      for (const auto& r : c_.rows)
        if (r.quad && r.quad->kind != GramKind::ScaledCoords &&
            cache_.find(r.quad) == cache_.end())
          cache_[r.quad] = realified_hessian(*r.quad);
  }

  bool values(const RVec& y, RVec& f) const {
    const CVec x = c_.x_of(y);
    const double t = y(c_.nx);
    const double s = c_.phase1 ? y(c_.nx + 1) : 0.0;
    f.resize(c_.rows.size());
    for (size_t i = 0; i < c_.rows.size(); ++i) {
      f(i) = c_.row_value(c_.rows[i], x, t, s);
      if (!std::isfinite(f(i))) return false;
    }
    return true;
  }

  double barrier_objective(const RVec& y, const RVec& f, double tau) const {
    double v = tau * objective(y);
    for (int i = 0; i < f.size(); ++i) {
      if (f(i) >= 0.0) return std::numeric_limits<double>::infinity();
      v -= std::log(-f(i));
    }
    return v;
  }

  double objective(const RVec& y) const {
    return c_.phase1 ? y(c_.nx + 1) : -y(c_.nx);
  }

  /// One centering run at fixed tau. Returns false on numerical breakdown.
  bool center(BarrierState& st, double dec_tol, int max_steps,
              const std::optional<double>& phase1_exit) {
    RVec f;
    for (int it = 0; it < max_steps; ++it) {
      if (st.newton_steps >= opt_.max_newton) return true;  // budget: keep best point
      if (!values(st.y, f)) return false;
      // row values include the -s shift; add s back to test the original rows
      if (phase1_exit && f.maxCoeff() + st.y(c_.nx + 1) <= *phase1_exit) return true;

      RVec g;
      RVec step;
      if (!newton_direction(st.y, f, st.tau, g, step)) return false;
      const double dec = -g.dot(step);
      if (!(dec > 0.0)) return true;  // at (numerical) optimum
      if (dec <= dec_tol) return true;

      // backtracking: keep strict feasibility, then Armijo
      double alpha = 1.0;
      const double psi0 = barrier_objective(st.y, f, st.tau);
      RVec f_new;
      bool moved = false;
      for (int ls = 0; ls < 60; ++ls) {
        RVec y_new = st.y + alpha * step;
        if (values(y_new, f_new) && f_new.maxCoeff() < 0.0) {
          const double psi_new = barrier_objective(y_new, f_new, st.tau);
          if (psi_new <= psi0 - 0.25 * alpha * dec) {
            st.y = std::move(y_new);
            moved = true;
            break;
          }
        }
        alpha *= 0.5;
      }
      ++st.newton_steps;
      if (!moved) return true;  // step annihilated by rounding; accept the point
    }
    return true;
  }

  bool newton_direction(const RVec& y, const RVec& f, double tau, RVec& g, RVec& step) {
    const int n = c_.n();
    const CVec x = c_.x_of(y);
    g.setZero(n);
    g(c_.nx) += c_.phase1 ? 0.0 : -tau;
    if (c_.phase1) g(c_.nx + 1) += tau;

    if (use_woodbury_) return newton_woodbury(y, x, f, g, step);
    return newton_dense(y, x, f, g, step);
  }

 private:
  void real_grad(const CVec& gx, double gt, double gs, RVec& out) const {
    out.setZero(c_.n());
    for (int j = 0; j < c_.d; ++j) {
      out(j) = gx(j).real();
      out(c_.d + j) = gx(j).imag();
    }
    out(c_.nx) = gt;
    if (c_.phase1) out(c_.nx + 1) = gs;
  }

  bool newton_dense(const RVec& y, const CVec& x, const RVec& f, RVec& g, RVec& step) {
    const int n = c_.n();
    RMat h = RMat::Zero(n, n);
    CVec gx(c_.d);
    RVec grad_i(n);
    for (size_t i = 0; i < c_.rows.size(); ++i) {
      const auto& r = c_.rows[i];
      const double alpha = 1.0 / (-f(i));
      const double beta = alpha * alpha;
      double gt, gs;
      c_.row_gradient(r, x, gx, gt, gs);
      real_grad(gx, gt, gs, grad_i);
      g.noalias() += alpha * grad_i;
      h.selfadjointView<Eigen::Lower>().rankUpdate(grad_i, beta);
      if (r.quad) {
        if (r.quad->kind == GramKind::ScaledCoords) {
          for (int j = 0; j < c_.d; ++j) {
            const double w = 2.0 * alpha * r.qc * r.quad->coord_weights(j);
            h(j, j) += w;
            h(c_.d + j, c_.d + j) += w;
          }
        } else {
          h.topLeftCorner(c_.nx, c_.nx).triangularView<Eigen::Lower>() +=
              (alpha * r.qc) * cache_.at(r.quad);
        }
      }
    }
    double eps = 1e-12 * (1.0 + h.diagonal().cwiseAbs().mean());
    for (int attempt = 0; attempt < 4; ++attempt) {
      RMat hreg = h;
      hreg.diagonal().array() += eps;
      Eigen::LLT<RMat> llt(hreg.selfadjointView<Eigen::Lower>());
      if (llt.info() == Eigen::Success) {
        if (c_.eq.rows() == 0) {
          step = llt.solve(-g);
        } else {
          // KKT via Schur complement on the equality rows
          RMat e_full = RMat::Zero(c_.eq.rows(), n);
          e_full.leftCols(c_.nx) = c_.eq;
          const RMat hin_et = llt.solve(e_full.transpose());
          const RVec hin_g = llt.solve(g);
          const RMat schur = e_full * hin_et;
          Eigen::LDLT<RMat> sld(schur);
          const RVec nu = sld.solve(-(e_full * hin_g));
          step = -hin_g - hin_et * nu;
        }
        if (step.allFinite()) return true;
      }
      eps *= 1e3;
    }
    return false;
  }

  bool newton_woodbury(const RVec& y, const CVec& x, const RVec& f, RVec& g, RVec& step) {
    const int d = c_.d, nx = c_.nx, ntail = c_.ntail;
    std::vector<Eigen::Matrix2d> dblocks(d, Eigen::Matrix2d::Zero());
    std::vector<RVec> ucols;
    RMat hxt = RMat::Zero(nx, ntail);
    RMat htt = RMat::Zero(ntail, ntail);
    CVec gx(d);
    RVec gi_x(nx);

    for (size_t i = 0; i < c_.rows.size(); ++i) {
      const auto& r = c_.rows[i];
      const double alpha = 1.0 / (-f(i));
      const double beta = alpha * alpha;
      double gt, gs;
      c_.row_gradient(r, x, gx, gt, gs);
      for (int j = 0; j < d; ++j) {
        g(j) += alpha * gx(j).real();
        g(d + j) += alpha * gx(j).imag();
      }
      g(nx) += alpha * gt;
      if (c_.phase1) g(nx + 1) += alpha * gs;

      Eigen::Vector2d tail;
      tail(0) = gt;
      if (ntail > 1) tail(1) = gs;
      const Eigen::Vector2d tail_used = tail.head(ntail).eval();
      htt.noalias() += beta * tail_used * tail_used.transpose();

      if (r.local_coord >= 0) {
        const int jc = r.local_coord;
        const Eigen::Vector2d gl(gx(jc).real(), gx(jc).imag());
        dblocks[jc].noalias() += beta * gl * gl.transpose();
        hxt.row(jc).noalias() += beta * gl(0) * tail_used.transpose();
        hxt.row(d + jc).noalias() += beta * gl(1) * tail_used.transpose();
      } else {
        gi_x.setZero();
        for (int j = 0; j < d; ++j) {
          gi_x(j) = gx(j).real();
          gi_x(d + j) = gx(j).imag();
        }
        ucols.emplace_back(std::sqrt(beta) * gi_x);
        hxt.noalias() += beta * gi_x * tail_used.transpose();
      }

      if (r.quad) {
        if (r.quad->kind == GramKind::ScaledCoords) {
          for (int j = 0; j < d; ++j) {
            const double w = 2.0 * alpha * r.qc * r.quad->coord_weights(j);
            dblocks[j](0, 0) += w;
            dblocks[j](1, 1) += w;
          }
        } else {
          const double scale = std::sqrt(2.0 * alpha * r.qc);
          for (int gr = 0; gr < r.quad->rows.rows(); ++gr) {
            RVec u(nx), v(nx);
            for (int j = 0; j < d; ++j) {
              const cxd rv = r.quad->rows(gr, j);
              u(j) = scale * rv.real();
              u(d + j) = -scale * rv.imag();
              v(j) = scale * rv.imag();
              v(d + j) = scale * rv.real();
            }
            ucols.emplace_back(std::move(u));
            ucols.emplace_back(std::move(v));
          }
        }
      }
    }

    double diag_mean = 0.0;
    for (int j = 0; j < d; ++j) diag_mean += dblocks[j](0, 0) + dblocks[j](1, 1);
    diag_mean /= nx;
    const double eps = 1e-12 * (1.0 + diag_mean);
    for (int j = 0; j < d; ++j) {
      dblocks[j](0, 0) += eps;
      dblocks[j](1, 1) += eps;
    }
    htt.diagonal().array() += eps;

    std::vector<Eigen::Matrix2d> dinv(d);
    for (int j = 0; j < d; ++j) {
      bool invertible = false;
      dblocks[j].computeInverseWithCheck(dinv[j], invertible);
      if (!invertible) return false;
    }
    auto apply_dinv = [&](const RVec& rhs) {
      RVec out(nx);
      for (int j = 0; j < d; ++j) {
        const Eigen::Vector2d r2(rhs(j), rhs(d + j));
        const Eigen::Vector2d o2 = dinv[j] * r2;
        out(j) = o2(0);
        out(d + j) = o2(1);
      }
      return out;
    };

    const int q = static_cast<int>(ucols.size());
    RMat u_mat(nx, q), w_mat(nx, q);
    for (int k = 0; k < q; ++k) {
      u_mat.col(k) = ucols[k];
      w_mat.col(k) = apply_dinv(ucols[k]);
    }
    RMat s_small = RMat::Identity(q, q);
    s_small.noalias() += u_mat.transpose() * w_mat;
    Eigen::LLT<RMat> s_llt(s_small);
    if (s_llt.info() != Eigen::Success) return false;
    auto solve_hxx = [&](const RVec& rhs) -> RVec {
      const RVec dr = apply_dinv(rhs);
      const RVec corr = w_mat * s_llt.solve(u_mat.transpose() * dr);
      return dr - corr;
    };

    const RVec gx_part = g.head(nx);
    Eigen::Vector2d gtail;
    gtail(0) = g(nx);
    if (ntail > 1) gtail(1) = g(nx + 1);
    const RVec shg = solve_hxx(gx_part);
    RMat p_cols(nx, ntail);
    for (int k = 0; k < ntail; ++k) p_cols.col(k) = solve_hxx(hxt.col(k));
    RMat schur = htt - hxt.transpose() * p_cols;
    Eigen::LDLT<RMat> schur_ld(schur);
    const RVec dtail = schur_ld.solve(hxt.transpose() * shg - gtail.head(ntail));
    const RVec dx = -shg - p_cols * dtail;

    step.resize(c_.n());
    step.head(nx) = dx;
    step(nx) = dtail(0);
    if (ntail > 1) step(nx + 1) = dtail(1);
    return step.allFinite();
  }

  const Compiled& c_;
  const IpmOptions& opt_;
  bool use_woodbury_ = false;
  std::map<const QuadForm*, RMat> cache_;
};

}  // namespace detail

/// Interior-point solve of a ConicProblem: feasible-start log barrier with a
/// phase-1 auxiliary problem when the warm point is not strictly feasible.
inline ConicSolution solve_conic(const ConicProblem& problem, const IpmOptions& opt = {},
                                 const CVec* warm_x = nullptr) {
  ConicSolution sol;
  if (problem.epigraph.empty()) {
    sol.status = SolveStatus::NumericalFailure;
    sol.message = "no objective rows";
    return sol;
  }

  CVec x0 = warm_x ? *warm_x : CVec::Zero(problem.dim);
  if (x0.size() != problem.dim) {
    sol.status = SolveStatus::NumericalFailure;
    sol.message = "warm start has wrong dimension";
    return sol;
  }

  // Phase 2 compiled form; phase 1 shares rows plus the slack coordinate.
  const detail::Compiled c2 = detail::compile(problem, false);

  auto make_y = [&](const CVec& x, double extra_margin) {
    RVec y(c2.n());
    for (int j = 0; j < problem.dim; ++j) {
      y(j) = x(j).real();
      y(problem.dim + j) = x(j).imag();
    }
    // strictly feasible t for the epigraph rows
    double tmin = std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < problem.epigraph.size(); ++k)
      tmin = std::min(tmin, problem.epigraph_row_value(static_cast<int>(k), x));
    y(c2.nx) = tmin - extra_margin * (1.0 + std::abs(tmin));
    return y;
  };

  // Correct the warm start onto the equality manifold if needed.
  if (c2.eq.rows() > 0) {
    RVec xr(c2.nx);
    for (int j = 0; j < problem.dim; ++j) {
      xr(j) = x0(j).real();
      xr(problem.dim + j) = x0(j).imag();
    }
    const RVec resid = c2.eq * xr - c2.eq_rhs;
    if (resid.cwiseAbs().maxCoeff() > 1e-12) {
      Eigen::LDLT<RMat> gram((c2.eq * c2.eq.transpose()).eval());
      xr -= c2.eq.transpose() * gram.solve(resid);
      for (int j = 0; j < problem.dim; ++j) x0(j) = cxd(xr(j), xr(problem.dim + j));
    }
  }

  detail::BarrierSolver solver2(c2, opt);
  RVec y = make_y(x0, 0.1);
  RVec f;
  int total_newton = 0;
  bool strictly_feasible = solver2.values(y, f) && f.maxCoeff() < -opt.feas_margin;

  if (!strictly_feasible) {
    const detail::Compiled c1 = detail::compile(problem, true);
    detail::BarrierSolver solver1(c1, opt);
    RVec y1(c1.n());
    y1.head(c2.n()) = make_y(x0, 0.1);
    y1(c1.nx + 1) = 0.0;
    RVec f1;
    if (!solver1.values(y1, f1)) {
      sol.status = SolveStatus::NumericalFailure;
      sol.message = "phase 1: non-finite constraint values at start";
      return sol;
    }
    // with s = 0 the row values equal the original rows; lift s above the worst
    double worst = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < f1.size(); ++i) worst = std::max(worst, f1(i));
    y1(c1.nx + 1) = worst + 0.5 * (1.0 + std::abs(worst));

    detail::BarrierState st1{y1, 0, 0};
    const int m = static_cast<int>(c1.rows.size());
    st1.tau = m / (1.0 + std::abs(y1(c1.nx + 1)));
    const double exit_margin = -10.0 * opt.feas_margin;
    bool found = false;
    for (int stage = 0; stage < 60; ++stage) {
      if (!solver1.center(st1, 1e-7, 50, exit_margin)) break;
      RVec fs;
      solver1.values(st1.y, fs);
      const double s_now = st1.y(c1.nx + 1);
      if ((fs.array() + s_now).maxCoeff() <= exit_margin || s_now < exit_margin) {
        // found strictly feasible x (drop the slack, rebuild t)
        CVec xf = c1.x_of(st1.y);
        y = make_y(xf, 0.1);
        RVec f2;
        if (solver2.values(y, f2) && f2.maxCoeff() < 0.0) found = true;
        break;
      }
      if (m / st1.tau <= opt.tol || st1.newton_steps >= opt.max_newton) break;
      st1.tau *= opt.barrier_factor;
    }
    total_newton += st1.newton_steps;
    if (!found) {
      sol.status = SolveStatus::Infeasible;
      sol.x = c1.x_of(st1.y);
      sol.message = "phase 1 could not reach a strictly feasible point; residual slack " +
                    std::to_string(st1.y(c1.nx + 1));
      sol.kkt.primal = st1.y(c1.nx + 1);
      sol.newton_steps = total_newton;
      return sol;
    }
  }

  // Phase 2: maximize t along the central path.
  detail::BarrierState st{y, 0, 0};
  const int m = static_cast<int>(c2.rows.size());
  st.tau = m / std::max(1.0, std::abs(y(c2.nx)));
  const int max_stages = 80;
  for (int stage = 0; stage < max_stages; ++stage) {
    const bool last = m / st.tau <= opt.tol;
    if (!solver2.center(st, last ? 1e-11 : 1e-7, 50, std::nullopt)) {
      sol.status = SolveStatus::NumericalFailure;
      sol.message = "newton breakdown in phase 2";
      sol.x = c2.x_of(st.y);
      sol.t = st.y(c2.nx);
      sol.newton_steps = total_newton + st.newton_steps;
      return sol;
    }
    if (last || st.newton_steps >= opt.max_newton) break;
    st.tau *= opt.barrier_factor;
  }
  total_newton += st.newton_steps;

  solver2.values(st.y, f);
  sol.x = c2.x_of(st.y);
  sol.t = st.y(c2.nx);
  sol.objective = sol.t;
  sol.newton_steps = total_newton;
  sol.kkt.gap = m / st.tau;
  sol.kkt.primal = std::max(0.0, f.maxCoeff());
  if (c2.eq.rows() > 0) {
    RVec xr(c2.nx);
    xr = st.y.head(c2.nx);
    sol.kkt.primal = std::max(sol.kkt.primal, (c2.eq * xr - c2.eq_rhs).cwiseAbs().maxCoeff());
  }
  {
    RVec g, step;
    if (solver2.newton_direction(st.y, f, st.tau, g, step)) {
      RVec gp = g;
      if (c2.eq.rows() > 0) {
        RMat e_full = RMat::Zero(c2.eq.rows(), c2.n());
        e_full.leftCols(c2.nx) = c2.eq;
        Eigen::LDLT<RMat> gram((e_full * e_full.transpose()).eval());
        gp -= e_full.transpose() * gram.solve(e_full * g);
      }
      sol.kkt.dual = gp.cwiseAbs().maxCoeff() / st.tau;
    }
  }
  const bool budget_hit = total_newton >= opt.max_newton && sol.kkt.gap > opt.tol;
  sol.status = budget_hit ? SolveStatus::MaxIters : SolveStatus::Optimal;
  if (sol.kkt.primal > 10.0 * opt.tol) sol.status = SolveStatus::NumericalFailure;
  return sol;
}

}  // namespace risbc
