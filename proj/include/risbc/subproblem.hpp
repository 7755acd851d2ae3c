#pragma once
#include <Eigen/SVD>
#include <memory>
#include <optional>
#include <utility>

#include "risbc/architectures.hpp"
#include "risbc/conic.hpp"
#include "risbc/ipm.hpp"
#include "risbc/types.hpp"

namespace risbc {

/// Affine minorant of |value(x)|^2 around a reference: the tangent
/// 2 Re{u * (row.x)^*} - |u|^2 with u the reference value. Exact at the
/// reference and below the parabola everywhere.
struct AffineMinorant {
  CVec lin;        // as Re(lin^H x)
  double constant; // -|u|^2
};

inline AffineMinorant linearize_numerator(cxd ref_value, const CVec& functional_row) {
  AffineMinorant m;
  m.lin = 2.0 * ref_value * functional_row.conjugate();
  m.constant = -std::norm(ref_value);
  return m;
}

inline double minorant_value(const AffineMinorant& m, const CVec& x) {
  return (m.lin.adjoint() * x).real()(0) + m.constant;
}

namespace detail_sub {

/// Shared pieces of one Phi-block: per-(user, beam) linear functionals of the
/// Phi variable, noise-normalized so sigma^2 = 1.
struct PhiBlockCore {
  int dim = 0;                       // complex variable dimension
  CMat functionals;                  // (K*K) x dim; row k*K+i is h_k(.) w_i
  CVec ref_values;                   // functional values at the reference
  std::vector<std::shared_ptr<const QuadForm>> interference;  // per user k (may be null for K=1)
};

inline void build_interference_grams(PhiBlockCore& core, int k_users) {
  core.interference.resize(k_users);
  for (int k = 0; k < k_users; ++k) {
    if (k_users == 1) {
      core.interference[k] = nullptr;
      continue;
    }
    CMat rows(k_users - 1, core.dim);
    int r = 0;
    for (int i = 0; i < k_users; ++i)
      if (i != k) rows.row(r++) = core.functionals.row(k * k_users + i);
    core.interference[k] = std::make_shared<QuadForm>(QuadForm::dense(std::move(rows)));
  }
}

}  // namespace detail_sub

/// Maps a Phi-subproblem solution vector back to a reflection matrix, and a
/// reflection matrix into the solver's variable space (for warm starts).
struct PhiSubproblemMap {
  RisArchitecture arch = RisArchitecture::GpDiagonal;
  int m_elems = 0;
  CMat basis;  // BD only: orthonormal B with Z = Phi * B

  CMat phi_from(const CVec& x) const {
    if (arch == RisArchitecture::GpBeyondDiagonal) {
      const int r = static_cast<int>(basis.cols());
      Eigen::Map<const CMat> z(x.data(), m_elems, r);
      const CMat bt_z = basis.transpose() * z;
      CMat phi = z * basis.adjoint() + basis.conjugate() * z.transpose() -
                 basis.conjugate() * bt_z * basis.adjoint();
      return 0.5 * (phi + phi.transpose().eval());
    }
    CMat phi = CMat::Zero(m_elems, m_elems);
    for (int m = 0; m < m_elems; ++m) phi(m, m) = x(m);
    return phi;
  }

  CVec vars_from_phi(const CMat& phi) const {
    if (arch == RisArchitecture::GpBeyondDiagonal) {
      CMat z = phi * basis;
      return Eigen::Map<CVec>(z.data(), z.size());
    }
    CVec x(m_elems);
    for (int m = 0; m < m_elems; ++m) x(m) = phi(m, m);
    return x;
  }
};

/// Reusable Phi-block assembly context: everything that does not depend on
/// the Dinkelbach parameter.
struct PhiBlockContext {
  PhiSubproblemMap map;
  detail_sub::PhiBlockCore core;
  std::shared_ptr<const QuadForm> passivity;  // GP architectures
  double passivity_scale = 1.0;               // 1 / Tr(R)
  CMat phi_ref;
  double trust_margin = 0.35;  // LP only
  int k_users = 0;
};

/// Precomputes functionals for one Phi block. `beams` are held fixed;
/// channels are normalized by the noise std so sigma^2 = 1 downstream.
inline PhiBlockContext make_phi_context(const ChannelSet& channels, const BeamformerSet& beams,
                                        const CMat& phi_ref, RisArchitecture arch,
                                        double noise_power, double lp_trust_margin = 0.35) {
  if (arch != RisArchitecture::GpBeyondDiagonal && arch != RisArchitecture::GpDiagonal &&
      arch != RisArchitecture::LpDiagonal)
    throw std::invalid_argument("make_phi_context: architecture has no Phi block");
  channels.check_consistent();
  const int m_elems = channels.num_ris_elements();
  const int k_users = channels.num_users();
  if (beams.num_users() != k_users || beams.w.rows() != channels.num_tx_antennas())
    throw std::invalid_argument("make_phi_context: beamformer dimensions inconsistent");

  PhiBlockContext ctx;
  ctx.k_users = k_users;
  ctx.phi_ref = phi_ref;
  ctx.trust_margin = lp_trust_margin;
  ctx.map.arch = arch;
  ctx.map.m_elems = m_elems;

  const double inv_sigma = 1.0 / std::sqrt(noise_power);
  const CMat incident = channels.bs_ris * beams.w;  // M x K, column i = F w_i

  if (arch == RisArchitecture::GpBeyondDiagonal) {
    // orthonormal basis of span{F w_i}; everything depends on Phi via Z = Phi B
    Eigen::JacobiSVD<CMat> svd(incident, Eigen::ComputeThinU);
    const double smax = svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
    int rank = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()(i) > std::max(1e-12 * smax, 1e-300)) ++rank;
    if (rank == 0) throw std::invalid_argument("make_phi_context: all incident beams are zero");
    ctx.map.basis = svd.matrixU().leftCols(rank);
    const int r = rank;
    const CMat coeff = ctx.map.basis.adjoint() * incident;  // r x K, column i = c_i

    ctx.core.dim = m_elems * r;
    ctx.core.functionals.resize(k_users * k_users, ctx.core.dim);
    for (int k = 0; k < k_users; ++k)
      for (int i = 0; i < k_users; ++i) {
        CVec row = CVec::Zero(ctx.core.dim);
        for (int j = 0; j < r; ++j)
          for (int m = 0; m < m_elems; ++m)
            row(j * m_elems + m) = inv_sigma * channels.ris_user(k, m) * coeff(j, i);
        ctx.core.functionals.row(k * k_users + i) = row.transpose();
      }
    ctx.passivity = std::make_shared<QuadForm>(QuadForm::mat_row_block(m_elems, coeff));
    ctx.passivity_scale = 1.0 / incident.squaredNorm();
  } else {
    ctx.core.dim = m_elems;
    ctx.core.functionals.resize(k_users * k_users, m_elems);
    for (int k = 0; k < k_users; ++k)
      for (int i = 0; i < k_users; ++i)
        for (int m = 0; m < m_elems; ++m)
          ctx.core.functionals(k * k_users + i, m) =
              inv_sigma * channels.ris_user(k, m) * incident(m, i);
    if (arch == RisArchitecture::GpDiagonal) {
      RVec weights(m_elems);
      for (int m = 0; m < m_elems; ++m) weights(m) = incident.row(m).squaredNorm();
      ctx.passivity = std::make_shared<QuadForm>(QuadForm::scaled_coords(std::move(weights)));
      ctx.passivity_scale = 1.0 / incident.squaredNorm();
    }
  }

  const CVec ref_vars = ctx.map.vars_from_phi(phi_ref);
  ctx.core.ref_values = ctx.core.functionals * ref_vars;
  detail_sub::build_interference_grams(ctx.core, k_users);
  return ctx;
}

/// Assembles the Dinkelbach-parameterized Phi problem for the context's
/// architecture: epigraph rows d_hat_k - mu lambda_k (1 + I_k) >= t, the
/// threshold rows d_hat_k - gamma_bar (1 + I_k) >= 0 when requested, and the
/// architecture's feasible-set rows.
inline ConicProblem assemble_phi_problem(const PhiBlockContext& ctx, double mu, const RVec& lambda,
                                         std::optional<double> gamma_bar) {
  const int k_users = ctx.k_users;
  if (lambda.size() != k_users) throw std::invalid_argument("assemble_phi_problem: lambda size");
  ConicProblem p;
  p.dim = ctx.core.dim;
  p.metadata.mu = mu;
  p.metadata.lambda = lambda;
  p.metadata.label = "phi-" + to_string(ctx.map.arch);

  for (int k = 0; k < k_users; ++k) {
    const CVec row = ctx.core.functionals.row(k * k_users + k).transpose();
    const auto minorant = linearize_numerator(ctx.core.ref_values(k * k_users + k), row);

    EpigraphRow epi;
    epi.lin = minorant.lin;
    epi.constant = minorant.constant - mu * lambda(k);
    if (mu * lambda(k) != 0.0 && ctx.core.interference[k]) {
      epi.quad = ctx.core.interference[k];
      epi.quad_coeff = mu * lambda(k);
    }
    epi.name = "user" + std::to_string(k);
    p.epigraph.push_back(std::move(epi));

    if (gamma_bar) {
      QuadConstraint thr;
      thr.lin = -minorant.lin;
      thr.constant = *gamma_bar - minorant.constant;
      if (*gamma_bar != 0.0 && ctx.core.interference[k]) {
        thr.quad = ctx.core.interference[k];
        thr.quad_coeff = *gamma_bar;
      }
      thr.name = "sinr-floor user" + std::to_string(k);
      p.quadratic.push_back(std::move(thr));
    }
  }

  if (ctx.map.arch == RisArchitecture::GpDiagonal ||
      ctx.map.arch == RisArchitecture::GpBeyondDiagonal) {
    QuadConstraint pass;
    pass.quad = ctx.passivity;
    pass.quad_coeff = ctx.passivity_scale;
    pass.constant = -1.0 - 1e-9;  // hair of slack keeps boundary warm starts strictly interior
    pass.name = "global passivity";
    p.quadratic.push_back(std::move(pass));
  }

  if (ctx.map.arch == RisArchitecture::GpBeyondDiagonal) {
    const CMat& b = ctx.map.basis;
    const int m_elems = ctx.map.m_elems;
    const int r = static_cast<int>(b.cols());
    for (int i = 0; i < r; ++i)
      for (int j = i + 1; j < r; ++j) {
        LinearEquality eq;
        eq.coeffs = CVec::Zero(p.dim);
        for (int m = 0; m < m_elems; ++m) {
          eq.coeffs(j * m_elems + m) += b(m, i);
          eq.coeffs(i * m_elems + m) -= b(m, j);
        }
        eq.rhs = cxd(0, 0);
        eq.name = "symmetry " + std::to_string(i) + "," + std::to_string(j);
        p.equalities.push_back(std::move(eq));
      }
  }

  if (ctx.map.arch == RisArchitecture::LpDiagonal) {
    const int m_elems = ctx.map.m_elems;
    for (int m = 0; m < m_elems; ++m) {
      QuadConstraint cap;
      RVec w = RVec::Zero(m_elems);
      w(m) = 1.0;
      cap.quad = std::make_shared<QuadForm>(QuadForm::scaled_coords(std::move(w)));
      cap.constant = -1.0 - 1e-9;  // strict interior at unit-modulus references
      cap.name = "modulus cap " + std::to_string(m);
      p.quadratic.push_back(std::move(cap));

      // CCP lower bound on |phi_m|^2 >= 1, imposed at the rim of a trust
      // region: Re(phi_ref^* phi) >= 1 - eta
      AffineConstraint lens;
      lens.lin = CVec::Zero(m_elems);
      lens.lin(m) = ctx.phi_ref(m, m);
      lens.constant = -(1.0 - ctx.trust_margin);
      lens.name = "unit-modulus bound " + std::to_string(m);
      p.affine.push_back(std::move(lens));
    }
  }
  return p;
}

/// Convenience builders named after the problems they assemble.
struct PhiProblem {
  ConicProblem problem;
  PhiSubproblemMap map;
};

inline PhiProblem build_phi_gp_bd(const ChannelSet& ch, const BeamformerSet& beams, double mu,
                                  const RVec& lambda, std::optional<double> gamma_bar,
                                  const CMat& phi_ref, double noise_power) {
  auto ctx = make_phi_context(ch, beams, phi_ref, RisArchitecture::GpBeyondDiagonal, noise_power);
  return {assemble_phi_problem(ctx, mu, lambda, gamma_bar), ctx.map};
}

inline PhiProblem build_phi_gp_d(const ChannelSet& ch, const BeamformerSet& beams, double mu,
                                 const RVec& lambda, std::optional<double> gamma_bar,
                                 const CMat& phi_ref, double noise_power) {
  auto ctx = make_phi_context(ch, beams, phi_ref, RisArchitecture::GpDiagonal, noise_power);
  return {assemble_phi_problem(ctx, mu, lambda, gamma_bar), ctx.map};
}

inline PhiProblem build_phi_lp_d(const ChannelSet& ch, const BeamformerSet& beams, double mu,
                                 const RVec& lambda, std::optional<double> gamma_bar,
                                 const CMat& phi_ref, double noise_power,
                                 double trust_margin = 0.35) {
  auto ctx = make_phi_context(ch, beams, phi_ref, RisArchitecture::LpDiagonal, noise_power,
                              trust_margin);
  return {assemble_phi_problem(ctx, mu, lambda, gamma_bar), ctx.map};
}

/// Beamformer-block context: variable is the stacked {w_k}; the effective
/// rows are held fixed.
struct WBlockContext {
  int n_tx = 0;
  int k_users = 0;
  detail_sub::PhiBlockCore core;  // reuses the functional-row machinery
  double power_budget = 0.0;
  std::shared_ptr<const QuadForm> power;
};

struct WSubproblemMap {
  int n_tx = 0;
  int k_users = 0;
  CMat w_from(const CVec& x) const {
    return Eigen::Map<const CMat>(x.data(), n_tx, k_users);
  }
  CVec vars_from_w(const CMat& w) const {
    CMat copy = w;
    return Eigen::Map<CVec>(copy.data(), copy.size());
  }
};

inline WBlockContext make_w_context(const CMat& effective, const BeamformerSet& w_ref,
                                    double power_budget, double noise_power) {
  const int k_users = static_cast<int>(effective.rows());
  const int n_tx = static_cast<int>(effective.cols());
  if (w_ref.w.rows() != n_tx || w_ref.w.cols() != k_users)
    throw std::invalid_argument("make_w_context: reference beamformer dimensions");
  if (!(power_budget > 0.0)) throw std::invalid_argument("make_w_context: power budget");

  WBlockContext ctx;
  ctx.n_tx = n_tx;
  ctx.k_users = k_users;
  ctx.power_budget = power_budget;
  ctx.core.dim = n_tx * k_users;
  ctx.core.functionals.resize(k_users * k_users, ctx.core.dim);
  const double inv_sigma = 1.0 / std::sqrt(noise_power);
  for (int k = 0; k < k_users; ++k)
    for (int i = 0; i < k_users; ++i) {
      CVec row = CVec::Zero(ctx.core.dim);
      for (int n = 0; n < n_tx; ++n) row(i * n_tx + n) = inv_sigma * effective(k, n);
      ctx.core.functionals.row(k * k_users + i) = row.transpose();
    }
  WSubproblemMap map{n_tx, k_users};
  ctx.core.ref_values = ctx.core.functionals * map.vars_from_w(w_ref.w);
  detail_sub::build_interference_grams(ctx.core, k_users);
  ctx.power = std::make_shared<QuadForm>(QuadForm::scaled_coords(RVec::Ones(ctx.core.dim)));
  return ctx;
}

inline ConicProblem assemble_w_problem(const WBlockContext& ctx, double mu, const RVec& lambda,
                                       std::optional<double> gamma_bar) {
  const int k_users = ctx.k_users;
  if (lambda.size() != k_users) throw std::invalid_argument("assemble_w_problem: lambda size");
  ConicProblem p;
  p.dim = ctx.core.dim;
  p.metadata.mu = mu;
  p.metadata.lambda = lambda;
  p.metadata.label = "w-block";

  for (int k = 0; k < k_users; ++k) {
    const CVec row = ctx.core.functionals.row(k * k_users + k).transpose();
    const auto minorant = linearize_numerator(ctx.core.ref_values(k * k_users + k), row);
    EpigraphRow epi;
    epi.lin = minorant.lin;
    epi.constant = minorant.constant - mu * lambda(k);
    if (mu * lambda(k) != 0.0 && ctx.core.interference[k]) {
      epi.quad = ctx.core.interference[k];
      epi.quad_coeff = mu * lambda(k);
    }
    epi.name = "user" + std::to_string(k);
    p.epigraph.push_back(std::move(epi));
    if (gamma_bar) {
      QuadConstraint thr;
      thr.lin = -minorant.lin;
      thr.constant = *gamma_bar - minorant.constant;
      if (*gamma_bar != 0.0 && ctx.core.interference[k]) {
        thr.quad = ctx.core.interference[k];
        thr.quad_coeff = *gamma_bar;
      }
      thr.name = "sinr-floor user" + std::to_string(k);
      p.quadratic.push_back(std::move(thr));
    }
  }

  QuadConstraint power;
  power.quad = ctx.power;
  power.quad_coeff = 1.0 / ctx.power_budget;
  power.constant = -1.0 - 1e-10;
  power.name = "transmit power";
  p.quadratic.push_back(std::move(power));
  return p;
}

struct WProblem {
  ConicProblem problem;
  WSubproblemMap map;
};

inline WProblem build_w(const CMat& effective, const BeamformerSet& w_ref, double mu,
                        const RVec& lambda, std::optional<double> gamma_bar, double power_budget,
                        double noise_power) {
  auto ctx = make_w_context(effective, w_ref, power_budget, noise_power);
  return {assemble_w_problem(ctx, mu, lambda, gamma_bar), WSubproblemMap{ctx.n_tx, ctx.k_users}};
}

/// Solver entry point used by the optimizer; thin wrapper over the
/// interior-point backend.
inline ConicSolution solve(const ConicProblem& problem, double tol = 1e-8, int max_iters = 200,
                           const CVec* warm = nullptr) {
  IpmOptions opt;
  opt.tol = tol;
  opt.max_newton = max_iters;
  return solve_conic(problem, opt, warm);
}

}  // namespace risbc
