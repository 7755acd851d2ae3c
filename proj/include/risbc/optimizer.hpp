#pragma once
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "risbc/fbl.hpp"
#include "risbc/subproblem.hpp"

namespace risbc {

/// One solvable realization in physical units.
struct Instance {
  ChannelSet channels;
  double noise_power = 1.0;
  double power_budget = 1.0;
  double gamma_bar = 0.0;  // SINR floor; 0 disables the floor rows
};

struct OptimizerConfig {
  RVec lambda;  // profile weights on the open simplex; empty => equal
  int max_outer = 50;
  int max_inner = 20;
  double outer_tol = 1e-4;
  double inner_tol = 1e-5;
  int warmup_cap = 10;
  double lp_trust_margin = 0.35;
  double accept_slack = 1e-8;
  double solver_tol = 1e-8;
  int solver_max_newton = 200;
  bool collect_trace = true;

  RVec weights(int k_users) const {
    if (lambda.size() == 0) return RVec::Constant(k_users, 1.0 / k_users);
    if (lambda.size() != k_users)
      throw std::invalid_argument("OptimizerConfig: lambda size must match user count");
    for (int k = 0; k < k_users; ++k)
      if (!(lambda(k) > 0.0)) throw std::invalid_argument("OptimizerConfig: lambda must be > 0");
    return lambda / lambda.sum();
  }
};

struct TraceRow {
  int outer = 0;
  int inner = 0;
  double mu = 0.0;
  double min_sinr = 0.0;
  double passivity_gap = 0.0;
  SolveStatus status = SolveStatus::Optimal;
  double ms = 0.0;
};

struct OptimizerTrace {
  std::vector<TraceRow> rows;

  std::string to_csv() const {
    std::ostringstream os;
    os << "outer_iter,inner_iter,mu,min_sinr,passivity_gap,solver_status,ms_elapsed\n";
    os.precision(17);
    for (const auto& r : rows)
      os << r.outer << ',' << r.inner << ',' << r.mu << ',' << r.min_sinr << ','
         << r.passivity_gap << ',' << to_string(r.status) << ',' << r.ms << '\n';
    return os.str();
  }
};

struct SolveResult {
  BeamformerSet beams;
  RisState ris;
  RVec sinrs;
  double min_sinr = 0.0;
  double objective = 0.0;  // min_k sinr_k / lambda_k
  bool feasible = false;
  bool infeasible_instance = false;  // warm-up could not reach the SINR floor
  int outer_iters = 0;
  int rejected_blocks = 0;
  OptimizerTrace trace;
};

/// Matched filters at equal power split over a random unit-modulus diagonal
/// surface (the universal feasible initializer).
inline std::pair<BeamformerSet, RisState> initialize(const ChannelSet& channels,
                                                     RisArchitecture arch, double power_budget,
                                                     Rng& rng) {
  RisState state = random_phi(arch, channels.num_ris_elements(), rng);
  const CMat rows = effective_rows(channels, state);
  const int k_users = channels.num_users();
  BeamformerSet beams;
  beams.w.resize(channels.num_tx_antennas(), k_users);
  const double amp = std::sqrt(power_budget / k_users);
  for (int k = 0; k < k_users; ++k) {
    const double norm = rows.row(k).norm();
    if (!(norm > 0.0)) throw std::invalid_argument("initialize: user has an all-zero channel");
    beams.w.col(k) = amp * rows.row(k).adjoint() / norm;
  }
  return {std::move(beams), std::move(state)};
}

/// Dinkelbach parameter update: the minimum weighted ratio over users.
inline double min_weighted_ratio(const RVec& numerators, const RVec& lambda,
                                 const RVec& denominators) {
  if (numerators.size() != lambda.size() || lambda.size() != denominators.size())
    throw std::invalid_argument("min_weighted_ratio: size mismatch");
  double mu = std::numeric_limits<double>::infinity();
  for (int k = 0; k < numerators.size(); ++k) {
    if (!(denominators(k) > 0.0))
      throw std::invalid_argument("min_weighted_ratio: nonpositive denominator");
    if (!(lambda(k) > 0.0))
      throw std::invalid_argument("min_weighted_ratio: nonpositive weight");
    mu = std::min(mu, numerators(k) / (lambda(k) * denominators(k)));
  }
  return mu;
}

namespace detail_opt {

/// Linearized numerators and noise-normalized denominators at x, from a
/// block's functional core.
inline void ratio_parts(const detail_sub::PhiBlockCore& core, int k_users, const CVec& x,
                        RVec& numer, RVec& denom) {
  const CVec values = core.functionals * x;
  numer.resize(k_users);
  denom.resize(k_users);
  for (int k = 0; k < k_users; ++k) {
    const cxd u = core.ref_values(k * k_users + k);
    const cxd v = values(k * k_users + k);
    numer(k) = 2.0 * (u * std::conj(v)).real() - std::norm(u);
    double interf = 0.0;
    for (int i = 0; i < k_users; ++i)
      if (i != k) interf += std::norm(values(k * k_users + i));
    denom(k) = 1.0 + interf;
  }
}

struct BlockOutcome {
  CVec x;
  double mu = 0.0;
  int inner_iters = 0;
  bool ok = false;
  SolveStatus last_status = SolveStatus::NumericalFailure;
};

/// Generalized Dinkelbach loop over one block: alternate solving the
/// mu-parameterized epigraph problem and updating mu as the minimum ratio.
template <typename AssembleFn>
inline BlockOutcome dinkelbach_loop(const detail_sub::PhiBlockCore& core, int k_users,
                                    const RVec& lambda, const CVec& x_start,
                                    AssembleFn&& assemble, const OptimizerConfig& cfg,
                                    int outer_idx, OptimizerTrace* trace,
                                    const std::function<double(const CVec&)>& true_min_sinr,
                                    const std::function<double(const CVec&)>& gap_probe) {
  BlockOutcome out;
  out.x = x_start;
  RVec numer, denom;
  ratio_parts(core, k_users, out.x, numer, denom);
  out.mu = min_weighted_ratio(numer, lambda, denom);

  IpmOptions sopt;
  sopt.tol = cfg.solver_tol;
  sopt.max_newton = cfg.solver_max_newton;

  for (int m = 1; m <= cfg.max_inner; ++m) {
    const auto start = std::chrono::steady_clock::now();
    ConicProblem problem = assemble(out.mu);
    problem.metadata.outer_iter = outer_idx;
    problem.metadata.inner_iter = m;
    const ConicSolution sol = solve_conic(problem, sopt, &out.x);
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    out.last_status = sol.status;
    if (sol.status != SolveStatus::Optimal && sol.status != SolveStatus::MaxIters) {
      if (trace && cfg.collect_trace)
        trace->rows.push_back({outer_idx, m, out.mu, true_min_sinr(out.x), gap_probe(out.x),
                               sol.status, ms});
      return out;  // ok stays false; caller keeps the previous iterate
    }
    out.x = sol.x;
    out.inner_iters = m;
    ratio_parts(core, k_users, out.x, numer, denom);
    const double mu_new = min_weighted_ratio(numer, lambda, denom);
    if (trace && cfg.collect_trace)
      trace->rows.push_back({outer_idx, m, mu_new, true_min_sinr(out.x), gap_probe(out.x),
                             sol.status, ms});
    const bool converged = std::abs(mu_new - out.mu) <= cfg.inner_tol * std::max(1.0, std::abs(out.mu));
    out.mu = mu_new;
    if (converged) break;
  }
  out.ok = true;
  return out;
}

}  // namespace detail_opt

/// True (non-linearized) per-user SINRs for the current point.
inline RVec true_sinrs(const Instance& inst, const RisState& state, const BeamformerSet& beams) {
  return sinr_all(effective_rows(inst.channels, state), beams, inst.noise_power);
}

inline double weighted_min(const RVec& sinrs, const RVec& lambda) {
  double v = std::numeric_limits<double>::infinity();
  for (int k = 0; k < sinrs.size(); ++k) v = std::min(v, sinrs(k) / lambda(k));
  return v;
}

/// One Dinkelbach pass over the beamformer block. The returned candidate is
/// rescaled onto the power ball when the solver's slack lets it creep above.
struct BlockStep {
  bool ok = false;
  SolveStatus status = SolveStatus::NumericalFailure;
  int inner_iters = 0;
  double mu = 0.0;
};

inline BlockStep dinkelbach_w_block(const Instance& inst, const RisState& state,
                                    BeamformerSet& beams, const RVec& lambda,
                                    std::optional<double> gamma_bar, const OptimizerConfig& cfg,
                                    int outer_idx, OptimizerTrace* trace) {
  const CMat rows = effective_rows(inst.channels, state);
  const auto ctx = make_w_context(rows, beams, inst.power_budget, inst.noise_power);
  WSubproblemMap map{ctx.n_tx, ctx.k_users};
  auto true_fn = [&](const CVec& x) {
    BeamformerSet cand{map.w_from(x)};
    return true_sinrs(inst, state, cand).minCoeff();
  };
  auto gap_fn = [&](const CVec&) {
    return state.architecture == RisArchitecture::None ? 0.0 : state.passivity_gap;
  };
  const auto outcome = detail_opt::dinkelbach_loop(
      ctx.core, ctx.k_users, lambda, map.vars_from_w(beams.w),
      [&](double mu) { return assemble_w_problem(ctx, mu, lambda, gamma_bar); }, cfg, outer_idx,
      trace, true_fn, gap_fn);
  BlockStep step{outcome.ok, outcome.last_status, outcome.inner_iters, outcome.mu};
  if (!outcome.ok) return step;
  BeamformerSet cand{map.w_from(outcome.x)};
  const double total = cand.total_power();
  if (total > inst.power_budget) cand.w *= std::sqrt(inst.power_budget / total);
  beams = std::move(cand);
  return step;
}

/// One Dinkelbach pass over the reflection block for the given architecture.
/// LP solutions are renormalized onto the unit circle before returning.
inline BlockStep dinkelbach_phi_block(const Instance& inst, RisState& state,
                                      const BeamformerSet& beams, const RVec& lambda,
                                      std::optional<double> gamma_bar, const OptimizerConfig& cfg,
                                      int outer_idx, OptimizerTrace* trace,
                                      double trust_margin_override = -1.0) {
  const double eta = trust_margin_override > 0.0 ? trust_margin_override : cfg.lp_trust_margin;
  const auto ctx = make_phi_context(inst.channels, beams, state.phi, state.architecture,
                                    inst.noise_power, eta);
  auto true_fn = [&](const CVec& x) {
    RisState cand = state;
    cand.phi = ctx.map.phi_from(x);
    return true_sinrs(inst, cand, beams).minCoeff();
  };
  auto gap_fn = [&](const CVec& x) {
    return passivity_gap(ctx.map.phi_from(x), inst.channels.bs_ris, beams);
  };
  const auto outcome = detail_opt::dinkelbach_loop(
      ctx.core, ctx.k_users, lambda, ctx.map.vars_from_phi(state.phi),
      [&](double mu) { return assemble_phi_problem(ctx, mu, lambda, gamma_bar); }, cfg, outer_idx,
      trace, true_fn, gap_fn);
  BlockStep step{outcome.ok, outcome.last_status, outcome.inner_iters, outcome.mu};
  if (!outcome.ok) return step;
  CMat phi = ctx.map.phi_from(outcome.x);
  if (state.architecture == RisArchitecture::LpDiagonal) {
    for (int m = 0; m < phi.rows(); ++m) {
      const double mod = std::abs(phi(m, m));
      phi(m, m) = mod > 1e-12 ? phi(m, m) / mod : state.phi(m, m);
    }
  }
  state.phi = std::move(phi);
  state.passivity_gap = passivity_gap(state.phi, inst.channels.bs_ris, beams);
  return step;
}

struct StartPoint {
  BeamformerSet beams;
  RisState ris;
};

/// Full alternating solve: w block then Phi block per outer iteration, each
/// accepted only if the true weighted min-SINR does not decrease, with a
/// floor-free warm-up phase when the start violates the SINR floor.
inline SolveResult solve_max_min(const Instance& inst, RisArchitecture arch,
                                 const OptimizerConfig& cfg, std::uint64_t init_seed = 1,
                                 const StartPoint* warm = nullptr) {
  inst.channels.check_consistent();
  const int k_users = inst.channels.num_users();
  const RVec lambda = cfg.weights(k_users);

  SolveResult res;
  if (warm) {
    res.beams = warm->beams;
    res.ris = warm->ris;
    res.ris.architecture = arch;
  } else {
    Rng rng = Rng::stream(init_seed, 0);
    auto [beams, state] = initialize(inst.channels, arch, inst.power_budget, rng);
    res.beams = std::move(beams);
    res.ris = std::move(state);
  }
  if (arch != RisArchitecture::None)
    res.ris.passivity_gap = passivity_gap(res.ris.phi, inst.channels.bs_ris, res.beams);

  const bool optimize_phi = arch == RisArchitecture::LpDiagonal ||
                            arch == RisArchitecture::GpDiagonal ||
                            arch == RisArchitecture::GpBeyondDiagonal;

  RVec sinrs = true_sinrs(inst, res.ris, res.beams);
  double objective = weighted_min(sinrs, lambda);
  if (cfg.collect_trace)
    res.trace.rows.push_back({0, 0, objective, sinrs.minCoeff(), res.ris.passivity_gap,
                              SolveStatus::Optimal, 0.0});

  int outer_counter = 0;
  auto run_outer = [&](std::optional<double> gamma_bar, int iter_cap,
                       const std::function<bool()>& stop_early) -> int {
    int iters = 0;
    for (int t = 1; t <= iter_cap; ++t) {
      ++outer_counter;
      const double prev_objective = objective;

      // beamformer block. For the globally passive architectures the pair
      // (Phi, w) must stay jointly feasible: Eq.-(4)-style passivity depends
      // on the transmit covariance, so a w move can strand Phi outside the
      // feasible set. Such candidates are retried with Phi rescaled back
      // onto the passivity boundary and accepted only on joint ascent.
      {
        const bool gp_arch = arch == RisArchitecture::GpDiagonal ||
                             arch == RisArchitecture::GpBeyondDiagonal;
        BeamformerSet cand = res.beams;
        const auto step = dinkelbach_w_block(inst, res.ris, cand, lambda, gamma_bar, cfg,
                                             outer_counter, cfg.collect_trace ? &res.trace : nullptr);
        bool accepted = false;
        if (step.ok) {
          double gap = 0.0, incident = 0.0, reflected = 0.0;
          if (gp_arch) {
            for (int k = 0; k < cand.num_users(); ++k) {
              const CVec in_k = inst.channels.bs_ris * cand.w.col(k);
              incident += in_k.squaredNorm();
              reflected += (res.ris.phi * in_k).squaredNorm();
            }
            gap = reflected - incident;
          }
          if (!gp_arch || gap <= 1e-9 * std::max(1.0, incident)) {
            const RVec cand_sinrs = true_sinrs(inst, res.ris, cand);
            const double cand_obj = weighted_min(cand_sinrs, lambda);
            if (cand_obj >= objective - cfg.accept_slack * std::max(1.0, objective)) {
              res.beams = std::move(cand);
              sinrs = cand_sinrs;
              objective = std::max(objective, cand_obj);
              accepted = true;
            }
          } else if (reflected > 0.0) {
            RisState scaled = res.ris;
            scaled.phi *= std::sqrt(incident / reflected);
            const RVec cand_sinrs = true_sinrs(inst, scaled, cand);
            const double cand_obj = weighted_min(cand_sinrs, lambda);
            if (cand_obj >= objective - cfg.accept_slack * std::max(1.0, objective)) {
              res.ris = std::move(scaled);
              res.beams = std::move(cand);
              sinrs = cand_sinrs;
              objective = std::max(objective, cand_obj);
              accepted = true;
            }
          }
        }
        if (!accepted) ++res.rejected_blocks;
      }

      // reflection block
      if (optimize_phi) {
        bool accepted = false;
        double margin = -1.0;  // default
        for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
          RisState cand = res.ris;
          const auto step = dinkelbach_phi_block(inst, cand, res.beams, lambda, gamma_bar, cfg,
                                                 outer_counter,
                                                 cfg.collect_trace ? &res.trace : nullptr, margin);
          if (step.ok) {
            const RVec cand_sinrs = true_sinrs(inst, cand, res.beams);
            const double cand_obj = weighted_min(cand_sinrs, lambda);
            if (cand_obj >= objective - cfg.accept_slack * std::max(1.0, objective)) {
              res.ris = std::move(cand);
              sinrs = cand_sinrs;
              objective = std::max(objective, cand_obj);
              accepted = true;
            }
          }
          if (arch != RisArchitecture::LpDiagonal) break;  // retry only makes sense for LP
          margin = cfg.lp_trust_margin / 5.0;
        }
        if (!accepted) ++res.rejected_blocks;
      }

      iters = t;
      if (stop_early && stop_early()) break;
      const double rel = std::abs(objective - prev_objective) / std::max(1e-300, prev_objective);
      if (objective > 0.0 && rel <= cfg.outer_tol) break;
    }
    return iters;
  };

  // warm-up: reach the SINR floor before imposing it
  res.infeasible_instance = false;
  if (inst.gamma_bar > 0.0 && sinrs.minCoeff() < inst.gamma_bar) {
    run_outer(std::nullopt, cfg.warmup_cap, [&] { return sinrs.minCoeff() >= inst.gamma_bar; });
    if (sinrs.minCoeff() < inst.gamma_bar) res.infeasible_instance = true;
  }

  if (!res.infeasible_instance) {
    const std::optional<double> floor =
        inst.gamma_bar > 0.0 ? std::optional<double>(inst.gamma_bar) : std::nullopt;
    run_outer(floor, cfg.max_outer, nullptr);
  }
  res.outer_iters = outer_counter;

  res.sinrs = sinrs;
  res.min_sinr = sinrs.minCoeff();
  res.objective = objective;
  if (arch != RisArchitecture::None)
    res.ris.passivity_gap = passivity_gap(res.ris.phi, inst.channels.bs_ris, res.beams);
  const auto report = is_feasible(res.ris, inst.channels.bs_ris, res.beams, 1e-6,
                                  inst.power_budget);
  res.feasible = !res.infeasible_instance && report.feasible &&
                 (inst.gamma_bar == 0.0 || res.min_sinr >= inst.gamma_bar - 1e-6);
  return res;
}

/// Floor-free warm-up as a standalone operation: returns the best point
/// found; the caller inspects the achieved min-SINR.
inline SolveResult warmup(const Instance& inst, RisArchitecture arch, const OptimizerConfig& cfg,
                          std::uint64_t init_seed = 1) {
  Instance relaxed = inst;
  relaxed.gamma_bar = 0.0;
  OptimizerConfig wcfg = cfg;
  wcfg.max_outer = cfg.warmup_cap;
  SolveResult res = solve_max_min(relaxed, arch, wcfg, init_seed);
  res.infeasible_instance = inst.gamma_bar > 0.0 && res.min_sinr < inst.gamma_bar;
  return res;
}

}  // namespace risbc
