#pragma once
#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace risbc {

using cxd = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using CRow = Eigen::RowVectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }
inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

/// Channel realization for one trial. Row k of `ris_user` is f_k (1xM),
/// row k of `direct` is g_k (1xN, used only by the No-RIS baseline).
struct ChannelSet {
  CMat bs_ris;    // F, M x N
  CMat ris_user;  // K x M
  CMat direct;    // K x N

  int num_ris_elements() const { return static_cast<int>(bs_ris.rows()); }
  int num_tx_antennas() const { return static_cast<int>(bs_ris.cols()); }
  int num_users() const { return static_cast<int>(ris_user.rows()); }

  void check_consistent() const {
    if (ris_user.cols() != bs_ris.rows())
      throw std::invalid_argument("ChannelSet: ris_user columns must match bs_ris rows");
    if (direct.size() > 0 && direct.cols() != bs_ris.cols())
      throw std::invalid_argument("ChannelSet: direct columns must match bs_ris columns");
    if (!bs_ris.allFinite() || !ris_user.allFinite() || (direct.size() > 0 && !direct.allFinite()))
      throw std::invalid_argument("ChannelSet: non-finite entries");
  }
};

/// The K downlink beamforming vectors, stored as columns of an N x K matrix.
struct BeamformerSet {
  CMat w;  // N x K

  int num_users() const { return static_cast<int>(w.cols()); }
  double total_power() const { return w.squaredNorm(); }
  CVec beam(int k) const { return w.col(k); }
};

/// End-to-end channel through the surface: h_k = f_k * Phi * F (1 x N).
inline CRow effective_channel(const CMat& bs_ris, const CRow& ris_user_row, const CMat& phi) {
  const auto m = bs_ris.rows();
  if (ris_user_row.cols() != m || phi.rows() != m || phi.cols() != m)
    throw std::invalid_argument("effective_channel: dimension mismatch");
  return ris_user_row * phi * bs_ris;
}

}  // namespace risbc
