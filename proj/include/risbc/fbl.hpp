#pragma once
#include <cmath>
#include <limits>
#include <stdexcept>

#include "risbc/architectures.hpp"
#include "risbc/types.hpp"

namespace risbc {

/// Complementary standard normal CDF.
inline double q_function(double x) { return 0.5 * std::erfc(x * M_SQRT1_2); }

/// Inverse of the Q-function on (0, 0.5]. Rational approximation of the
/// inverse normal CDF (Acklam) followed by two Newton polish steps against
/// erfc; absolute error well below 1e-9 across eps in [1e-12, 0.5].
inline double q_inverse(double eps) {
  if (!(eps > 0.0) || eps > 0.5)
    throw std::invalid_argument("q_inverse: eps must lie in (0, 0.5]");
  if (eps == 0.5) return 0.0;

  static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                  -2.759285104469687e+02, 1.383577518672690e+02,
                                  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                  -1.556989798598866e+02, 6.680131188771972e+01,
                                  -1.328068155288572e+01};
  static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                  -2.400758277161838e+00, -2.549732539343734e+00,
                                  4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                  2.445134137142996e+00, 3.754408661907416e+00};

  // Lower-tail inverse normal CDF at p = eps (always p < 0.5 here), negated.
  const double p = eps;
  double x;
  if (p < 0.02425) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  x = -x;  // Q^{-1}(eps) = -Phi^{-1}(eps)

  for (int it = 0; it < 2; ++it) {
    const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
    if (pdf <= 0.0) break;
    x += (q_function(x) - eps) / pdf;
  }
  return x;
}

/// Finite-block-length parameters: the dispersion penalty c = Q^{-1}(eps)/sqrt(n)
/// and the SINR threshold above which the rate is nondecreasing.
struct FblParams {
  int block_length = 256;
  double error_prob = 1e-5;
  double c = 0.0;          // Q^{-1}(eps) / sqrt(n)
  double threshold = 0.0;  // (sqrt(1 + 2 c^2) - 1) / 2

  static FblParams make(int n, double eps) {
    if (n < 1) throw std::invalid_argument("FblParams: block length must be >= 1");
    if (!(eps > 0.0) || eps > 0.5)
      throw std::invalid_argument("FblParams: error probability must lie in (0, 0.5]");
    FblParams p;
    p.block_length = n;
    p.error_prob = eps;
    p.c = q_inverse(eps) / std::sqrt(static_cast<double>(n));
    p.threshold = 0.5 * (std::sqrt(1.0 + 2.0 * p.c * p.c) - 1.0);
    return p;
  }
};

/// Channel dispersion of Gaussian signals under TIN, v = 2 gamma / (1 + gamma).
inline double dispersion(double gamma) {
  if (gamma < 0.0) throw std::invalid_argument("dispersion: gamma must be >= 0");
  return 2.0 * gamma / (1.0 + gamma);
}

/// Normal-approximation achievable rate in nats per channel use,
/// ln(1+gamma) - c*sqrt(v). Negative values are returned as-is; reporting
/// layers clamp.
inline double fbl_rate(double gamma, const FblParams& params) {
  if (gamma < 0.0) throw std::invalid_argument("fbl_rate: gamma must be >= 0");
  return std::log1p(gamma) - params.c * std::sqrt(dispersion(gamma));
}

/// SINR threshold: fbl_rate is nondecreasing on [threshold, inf).
inline double sinr_threshold(const FblParams& params) { return params.threshold; }

/// Unique gamma >= threshold with fbl_rate(gamma) = r, by safeguarded
/// bisection. Requires r >= fbl_rate(threshold) (any r >= 0 qualifies).
inline double rate_inverse(double r, const FblParams& params) {
  if (r < 0.0) throw std::invalid_argument("rate_inverse: rate must be >= 0");
  const double lo0 = params.threshold;
  const double f_lo = fbl_rate(lo0, params);
  if (r < f_lo - 1e-12)
    throw std::invalid_argument("rate_inverse: rate below fbl_rate(threshold), no monotone preimage");
  if (r <= f_lo) return lo0;

  double hi = std::max(1.0, 2.0 * lo0);
  int guard = 0;
  while (fbl_rate(hi, params) < r) {
    hi *= 2.0;
    if (++guard > 1024) throw std::runtime_error("rate_inverse: bracketing failed");
  }
  double lo = lo0;
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double f = fbl_rate(mid, params);
    if (f < r)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 1e-13 * std::max(1.0, hi) && std::abs(f - r) < 1e-10) return mid;
  }
  return 0.5 * (lo + hi);
}

/// Per-user SINRs under TIN for effective rows H (K x N) and beamformers W.
inline RVec sinr_all(const CMat& rows, const BeamformerSet& beams, double noise_power) {
  const int k_users = static_cast<int>(rows.rows());
  if (beams.num_users() != k_users)
    throw std::invalid_argument("sinr_all: beamformer count must match user count");
  if (!(noise_power > 0.0)) throw std::invalid_argument("sinr_all: noise power must be > 0");
  const CMat cross = rows * beams.w;  // cross(k, i) = h_k w_i
  RVec out(k_users);
  for (int k = 0; k < k_users; ++k) {
    double interference = 0.0;
    for (int i = 0; i < k_users; ++i)
      if (i != k) interference += std::norm(cross(k, i));
    out(k) = std::norm(cross(k, k)) / (noise_power + interference);
  }
  return out;
}

/// SINR of user k, with the No-RIS mode dispatched on the state's architecture.
inline double sinr(int k, const BeamformerSet& beams, const ChannelSet& channels,
                   const RisState& state, double noise_power) {
  const CMat rows = effective_rows(channels, state);
  if (k < 0 || k >= rows.rows()) throw std::invalid_argument("sinr: user index out of range");
  return sinr_all(rows, beams, noise_power)(k);
}

}  // namespace risbc
