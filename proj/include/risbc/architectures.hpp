#pragma once
#include <optional>
#include <string>
#include <vector>

#include "risbc/rng.hpp"
#include "risbc/types.hpp"

namespace risbc {

enum class RisArchitecture {
  LpDiagonal,       // diagonal, unit-modulus elements
  GpDiagonal,       // diagonal, global passivity
  GpBeyondDiagonal, // symmetric full matrix, global passivity
  RandomDiagonal,   // diagonal, random unit-modulus phases, never optimized
  None              // no surface; direct channels only
};

inline std::string to_string(RisArchitecture a) {
  switch (a) {
    case RisArchitecture::LpDiagonal: return "lp-d";
    case RisArchitecture::GpDiagonal: return "gp-d";
    case RisArchitecture::GpBeyondDiagonal: return "gp-bd";
    case RisArchitecture::RandomDiagonal: return "rand";
    case RisArchitecture::None: return "none";
  }
  return "?";
}

inline std::optional<RisArchitecture> architecture_from_string(const std::string& s) {
  if (s == "lp-d") return RisArchitecture::LpDiagonal;
  if (s == "gp-d") return RisArchitecture::GpDiagonal;
  if (s == "gp-bd") return RisArchitecture::GpBeyondDiagonal;
  if (s == "rand") return RisArchitecture::RandomDiagonal;
  if (s == "none") return RisArchitecture::None;
  return std::nullopt;
}

/// Reflection matrix plus the architecture it claims to satisfy. The cached
/// gap is the value checked against the beamformers it was last validated
/// with; is_feasible always recomputes.
struct RisState {
  CMat phi;  // M x M
  RisArchitecture architecture = RisArchitecture::None;
  double passivity_gap = 0.0;
  double feasibility_tol = 1e-6;

  int size() const { return static_cast<int>(phi.rows()); }
};

/// Reflected-minus-incident power, Tr(F W F^H (Phi^H Phi - I)) with
/// W = sum_k w_k w_k^H. Nonpositive means globally passive.
inline double passivity_gap(const CMat& phi, const CMat& bs_ris, const BeamformerSet& beams) {
  if (phi.rows() != phi.cols() || phi.rows() != bs_ris.rows() ||
      beams.w.rows() != bs_ris.cols())
    throw std::invalid_argument("passivity_gap: dimension mismatch");
  double gap = 0.0;
  for (int k = 0; k < beams.num_users(); ++k) {
    const CVec incident = bs_ris * beams.w.col(k);
    gap += (phi * incident).squaredNorm() - incident.squaredNorm();
  }
  return gap;
}

struct FeasibilityReport {
  bool feasible = true;
  struct Violation {
    std::string constraint;
    double magnitude;
  };
  std::vector<Violation> violations;

  void add(const std::string& name, double magnitude) {
    feasible = false;
    violations.push_back({name, magnitude});
  }
  std::string summary() const {
    if (feasible) return "feasible";
    std::string s;
    for (const auto& v : violations) {
      if (!s.empty()) s += "; ";
      s += v.constraint + " (" + std::to_string(v.magnitude) + ")";
    }
    return s;
  }
};

/// Checks the architecture's feasible-set membership; when a power budget is
/// supplied the beamformer power constraint is reported as well.
inline FeasibilityReport is_feasible(const RisState& state, const CMat& bs_ris,
                                     const BeamformerSet& beams, double tol = 1e-6,
                                     std::optional<double> power_budget = std::nullopt) {
  FeasibilityReport report;
  const auto check_diagonal = [&] {
    double worst = 0.0;
    for (int i = 0; i < state.phi.rows(); ++i)
      for (int j = 0; j < state.phi.cols(); ++j)
        if (i != j) worst = std::max(worst, std::abs(state.phi(i, j)));
    if (worst > 0.0) report.add("off-diagonal entries must be exactly zero", worst);
  };
  const auto check_gap = [&] {
    const double gap = passivity_gap(state.phi, bs_ris, beams);
    if (gap > tol) report.add("global passivity gap", gap);
  };

  switch (state.architecture) {
    case RisArchitecture::LpDiagonal:
    case RisArchitecture::RandomDiagonal: {
      check_diagonal();
      double worst = 0.0;
      for (int m = 0; m < state.phi.rows(); ++m)
        worst = std::max(worst, std::abs(std::abs(state.phi(m, m)) - 1.0));
      if (worst > tol) report.add("unit modulus deviation", worst);
      break;
    }
    case RisArchitecture::GpDiagonal:
      check_diagonal();
      check_gap();
      break;
    case RisArchitecture::GpBeyondDiagonal: {
      const double asym = (state.phi - state.phi.transpose()).cwiseAbs().maxCoeff();
      if (asym > tol) report.add("symmetry deviation", asym);
      check_gap();
      break;
    }
    case RisArchitecture::None:
      break;
  }
  if (power_budget) {
    const double excess = beams.total_power() - *power_budget;
    if (excess > tol) report.add("transmit power budget", excess);
  }
  return report;
}

/// Unit-modulus diagonal draw: feasible for all three architectures, so it
/// doubles as the universal initializer.
inline RisState random_phi(RisArchitecture arch, int num_elements, Rng& rng) {
  if (arch == RisArchitecture::None) return RisState{CMat::Zero(0, 0), arch, 0.0, 1e-6};
  if (num_elements < 1) throw std::invalid_argument("random_phi: need at least one element");
  CMat phi = CMat::Zero(num_elements, num_elements);
  for (int m = 0; m < num_elements; ++m) phi(m, m) = rng.random_phase();
  return RisState{std::move(phi), arch, 0.0, 1e-6};
}

/// Effective downlink rows: h_k = f_k Phi F, or the direct g_k rows when no
/// surface is present.
inline CMat effective_rows(const ChannelSet& channels, const RisState& state) {
  if (state.architecture == RisArchitecture::None) {
    if (channels.direct.size() == 0)
      throw std::invalid_argument("effective_rows: no direct channels for No-RIS mode");
    return channels.direct;
  }
  const int k_users = channels.num_users();
  CMat rows(k_users, channels.num_tx_antennas());
  const CMat phi_f = state.phi * channels.bs_ris;
  for (int k = 0; k < k_users; ++k) rows.row(k) = channels.ris_user.row(k) * phi_f;
  return rows;
}

}  // namespace risbc
