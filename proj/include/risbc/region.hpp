#pragma once
#include <algorithm>
#include <optional>
#include <sstream>
#include <vector>

#include "risbc/optimizer.hpp"
#include "risbc/svg.hpp"

namespace risbc {

/// One converged point of the SINR- or rate-region boundary.
struct RegionPoint {
  RVec weights;    // lambda (SINR profile) or alpha (rate profile)
  RVec sinrs;
  RVec rates;      // fbl rates clamped at 0
  RVec raw_rates;  // unclamped
  double objective = 0.0;  // gamma for SINR profiles, r for rate profiles
  double min_sinr = 0.0;
  bool feasible = false;
  bool infeasible_instance = false;
  int outer_iters = 0;
};

inline RegionPoint make_region_point(const SolveResult& res, const RVec& weights,
                                     const FblParams& params) {
  RegionPoint pt;
  pt.weights = weights;
  pt.sinrs = res.sinrs;
  pt.raw_rates.resize(res.sinrs.size());
  pt.rates.resize(res.sinrs.size());
  for (int k = 0; k < res.sinrs.size(); ++k) {
    pt.raw_rates(k) = fbl_rate(res.sinrs(k), params);
    pt.rates(k) = std::max(0.0, pt.raw_rates(k));
  }
  pt.objective = res.objective;
  pt.min_sinr = res.min_sinr;
  pt.feasible = res.feasible;
  pt.infeasible_instance = res.infeasible_instance;
  pt.outer_iters = res.outer_iters;
  return pt;
}

/// Solves the SINR-profile problem for one weight vector.
inline RegionPoint sinr_region_point(const RVec& lambda, const Instance& inst,
                                     RisArchitecture arch, const FblParams& params,
                                     OptimizerConfig cfg, std::uint64_t seed = 1,
                                     const StartPoint* warm = nullptr) {
  for (int k = 0; k < lambda.size(); ++k)
    if (!(lambda(k) > 0.0))
      throw std::invalid_argument("sinr_region_point: weights must be strictly positive");
  cfg.lambda = lambda;
  const SolveResult res = solve_max_min(inst, arch, cfg, seed, warm);
  return make_region_point(res, lambda / lambda.sum(), params);
}

/// Pareto filter: keep points whose rate tuples are not dominated within the set.
inline std::vector<RegionPoint> pareto_filter(std::vector<RegionPoint> pts) {
  std::vector<RegionPoint> keep;
  for (size_t i = 0; i < pts.size(); ++i) {
    bool dominated = false;
    for (size_t j = 0; j < pts.size() && !dominated; ++j) {
      if (i == j) continue;
      bool all_ge = true, one_gt = false;
      for (int k = 0; k < pts[i].rates.size(); ++k) {
        if (pts[j].rates(k) < pts[i].rates(k) - 1e-12) all_ge = false;
        if (pts[j].rates(k) > pts[i].rates(k) + 1e-12) one_gt = true;
      }
      dominated = all_ge && one_gt;
    }
    if (!dominated) keep.push_back(std::move(pts[i]));
  }
  return keep;
}

/// Simplex grid for K = 2 or 3 with L points per edge, clear of the closed
/// boundary so weights stay strictly positive.
inline std::vector<RVec> simplex_grid(int k_users, int grid_points, double margin = 0.02) {
  std::vector<RVec> out;
  if (grid_points < 2) throw std::invalid_argument("simplex_grid: need at least two points");
  if (k_users == 2) {
    for (int i = 0; i < grid_points; ++i) {
      const double a = margin + (1.0 - 2.0 * margin) * i / (grid_points - 1);
      RVec w(2);
      w << a, 1.0 - a;
      out.push_back(w);
    }
  } else if (k_users == 3) {
    for (int i = 0; i < grid_points; ++i)
      for (int j = 0; j < grid_points - i; ++j) {
        const double a = static_cast<double>(i) / (grid_points - 1);
        const double b = static_cast<double>(j) / (grid_points - 1);
        RVec w(3);
        w << a, b, 1.0 - a - b;
        for (int k = 0; k < 3; ++k) w(k) = margin + (1.0 - 3.0 * margin) * w(k);
        w /= w.sum();
        out.push_back(w);
      }
  } else {
    throw std::invalid_argument("simplex_grid: boundary sweeps support K = 2 or 3 only");
  }
  return out;
}

/// lambda-swept SINR boundary mapped through the rate function, Pareto
/// filtered. Successive solves are warm-started from their neighbor.
inline std::vector<RegionPoint> rate_region_boundary(const Instance& inst, RisArchitecture arch,
                                                     int grid_points, const FblParams& params,
                                                     const OptimizerConfig& cfg,
                                                     std::uint64_t seed = 1) {
  const int k_users = inst.channels.num_users();
  std::vector<RegionPoint> pts;
  std::optional<StartPoint> warm;
  for (const RVec& lambda : simplex_grid(k_users, grid_points)) {
    OptimizerConfig local = cfg;
    local.lambda = lambda;
    const SolveResult res =
        solve_max_min(inst, arch, local, seed, warm ? &*warm : nullptr);
    if (res.feasible) warm = StartPoint{res.beams, res.ris};
    pts.push_back(make_region_point(res, lambda, params));
  }
  return pareto_filter(std::move(pts));
}

/// Rate-profile point via bisection on the common rate r: targets
/// gamma*_k = rate_inverse(alpha_k r) are mapped to an SINR profile and
/// tested with the SINR-profile solver (Lemma-2 correspondence).
inline RegionPoint rate_profile_point(const RVec& alpha, const Instance& inst,
                                      RisArchitecture arch, const FblParams& params,
                                      const OptimizerConfig& cfg, std::uint64_t seed = 1,
                                      double rel_tol = 1e-3) {
  const int k_users = inst.channels.num_users();
  if (alpha.size() != k_users)
    throw std::invalid_argument("rate_profile_point: alpha size must match user count");
  for (int k = 0; k < k_users; ++k)
    if (!(alpha(k) > 0.0))
      throw std::invalid_argument("rate_profile_point: alpha must be strictly positive");
  const RVec a = alpha / alpha.sum();

  // Feasibility oracle for a candidate r; remembers the achieving solution.
  std::optional<StartPoint> warm;
  RegionPoint best;
  best.weights = a;
  best.feasible = false;
  auto try_rate = [&](double r) -> bool {
    RVec targets(k_users);
    for (int k = 0; k < k_users; ++k) {
      const double want = a(k) * r;
      if (want < fbl_rate(params.threshold, params)) return false;  // below the monotone range
      targets(k) = rate_inverse(want, params);
    }
    const double total = targets.sum();
    if (!(total > 0.0)) return true;  // r = 0 with zero targets is trivially achievable
    OptimizerConfig local = cfg;
    local.lambda = targets / total;
    const SolveResult res = solve_max_min(inst, arch, local, seed, warm ? &*warm : nullptr);
    if (res.infeasible_instance) return false;
    bool ok = true;
    for (int k = 0; k < k_users; ++k)
      if (res.sinrs(k) < targets(k) * (1.0 - 1e-6)) ok = false;
    if (ok && res.feasible) {
      warm = StartPoint{res.beams, res.ris};
      best = make_region_point(res, a, params);
      best.objective = r;
    }
    return ok && res.feasible;
  };

  // Anchor: an equal-profile-in-SINR solve gives a feasible starting rate.
  OptimizerConfig anchor_cfg = cfg;
  anchor_cfg.lambda = a;
  const SolveResult anchor = solve_max_min(inst, arch, anchor_cfg, seed);
  if (anchor.infeasible_instance || !anchor.feasible) {
    best = make_region_point(anchor, a, params);
    best.objective = 0.0;
    return best;
  }
  warm = StartPoint{anchor.beams, anchor.ris};
  double r_lo = 0.0;
  for (int k = 0; k < k_users; ++k) {
    const double rate_k = fbl_rate(anchor.sinrs(k), params);
    const double candidate = std::max(0.0, rate_k) / a(k);
    r_lo = k == 0 ? candidate : std::min(r_lo, candidate);
  }
  r_lo = std::max(0.0, r_lo);
  if (!try_rate(r_lo)) {
    // fall back: shrink until feasible (handles anchor rounding)
    double shrink = r_lo;
    bool ok = false;
    for (int it = 0; it < 20 && !ok; ++it) {
      shrink *= 0.9;
      ok = try_rate(shrink);
    }
    if (!ok) {
      best = make_region_point(anchor, a, params);
      best.objective = 0.0;
      return best;
    }
    r_lo = shrink;
  }

  double r_hi = std::max(r_lo, 1e-3) * 2.0;
  int guard = 0;
  while (try_rate(r_hi) && guard++ < 30) {
    r_lo = r_hi;
    r_hi *= 2.0;
  }
  for (int it = 0; it < 60; ++it) {
    if (r_hi - r_lo <= rel_tol * std::max(r_lo, 1e-9)) break;
    const double mid = 0.5 * (r_lo + r_hi);
    if (try_rate(mid))
      r_lo = mid;
    else
      r_hi = mid;
  }
  return best;
}

/// Symmetric Hausdorff distance between two point clouds in rate space.
inline double hausdorff_distance(const std::vector<RVec>& a, const std::vector<RVec>& b) {
  if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
  auto directed = [](const std::vector<RVec>& from, const std::vector<RVec>& to) {
    double worst = 0.0;
    for (const auto& p : from) {
      double nearest = std::numeric_limits<double>::infinity();
      for (const auto& q : to) nearest = std::min(nearest, (p - q).norm());
      worst = std::max(worst, nearest);
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

inline std::string region_to_csv(const std::vector<RegionPoint>& pts) {
  std::ostringstream os;
  os.precision(17);
  if (pts.empty()) return "";
  const int k = static_cast<int>(pts.front().weights.size());
  for (int i = 0; i < k; ++i) os << "weight_" << i << ',';
  for (int i = 0; i < k; ++i) os << "sinr_" << i << ',';
  for (int i = 0; i < k; ++i) os << "rate_" << i << ',';
  os << "objective,min_sinr,feasible\n";
  for (const auto& p : pts) {
    for (int i = 0; i < k; ++i) os << p.weights(i) << ',';
    for (int i = 0; i < k; ++i) os << p.sinrs(i) << ',';
    for (int i = 0; i < k; ++i) os << p.rates(i) << ',';
    os << p.objective << ',' << p.min_sinr << ',' << (p.feasible ? 1 : 0) << '\n';
  }
  return os.str();
}

/// Two-user boundary scatter as a self-contained SVG.
inline std::string region_to_svg(const std::vector<RegionPoint>& pts, const std::string& title) {
  SvgSeries s;
  s.label = "rate boundary";
  for (const auto& p : pts) {
    if (p.rates.size() != 2) continue;
    s.x.push_back(p.rates(0));
    s.y.push_back(p.rates(1));
  }
  return svg_line_plot(title, "rate of user 1 (nats)", "rate of user 2 (nats)", {s});
}

}  // namespace risbc
