#pragma once
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "risbc/types.hpp"

namespace risbc {

/// Convex quadratic kept in Gram-factor form (never as an explicit PSD
/// matrix). Three storage kinds:
///   Dense:       q(x) = || rows * x ||^2, rows are complex functionals.
///   ScaledCoords q(x) = sum_j weights_j |x_j|^2.
///   MatRowBlock: the variable is a column-major vec of an (mat_rows x r)
///                matrix Z and q(Z) = sum_k || Z * block_cols.col(k) ||^2.
enum class GramKind { Dense, ScaledCoords, MatRowBlock };

struct QuadForm {
  GramKind kind = GramKind::Dense;
  int dim = 0;
  CMat rows;           // Dense
  RVec coord_weights;  // ScaledCoords
  CMat block_cols;     // MatRowBlock: r x n_cols, r = dim / mat_rows
  int mat_rows = 0;

  static QuadForm dense(CMat gram_rows) {
    QuadForm q;
    q.kind = GramKind::Dense;
    q.dim = static_cast<int>(gram_rows.cols());
    q.rows = std::move(gram_rows);
    return q;
  }
  static QuadForm scaled_coords(RVec weights) {
    QuadForm q;
    q.kind = GramKind::ScaledCoords;
    q.dim = static_cast<int>(weights.size());
    q.coord_weights = std::move(weights);
    return q;
  }
  static QuadForm mat_row_block(int mat_rows, CMat cols) {
    QuadForm q;
    q.kind = GramKind::MatRowBlock;
    q.mat_rows = mat_rows;
    q.dim = mat_rows * static_cast<int>(cols.rows());
    q.block_cols = std::move(cols);
    return q;
  }

  double value(const CVec& x) const {
    switch (kind) {
      case GramKind::Dense:
        return (rows * x).squaredNorm();
      case GramKind::ScaledCoords: {
        double s = 0.0;
        for (int j = 0; j < dim; ++j) s += coord_weights(j) * std::norm(x(j));
        return s;
      }
      case GramKind::MatRowBlock: {
        const int r = static_cast<int>(block_cols.rows());
        Eigen::Map<const CMat> z(x.data(), mat_rows, r);
        double s = 0.0;
        for (int k = 0; k < block_cols.cols(); ++k) s += (z * block_cols.col(k)).squaredNorm();
        return s;
      }
    }
    return 0.0;
  }

  /// Composite gradient G with dq/d[Re x; Im x] = [Re G; Im G].
  CVec gradient(const CVec& x) const {
    switch (kind) {
      case GramKind::Dense:
        return 2.0 * (rows.adjoint() * (rows * x));
      case GramKind::ScaledCoords: {
        CVec g(dim);
        for (int j = 0; j < dim; ++j) g(j) = 2.0 * coord_weights(j) * x(j);
        return g;
      }
      case GramKind::MatRowBlock: {
        const int r = static_cast<int>(block_cols.rows());
        Eigen::Map<const CMat> z(x.data(), mat_rows, r);
        const CMat q_small = block_cols * block_cols.adjoint();  // r x r Hermitian
        CMat g = 2.0 * (z * q_small);
        return Eigen::Map<CVec>(g.data(), dim);
      }
    }
    return CVec::Zero(dim);
  }
};

/// coeff * quad(x) + Re(lin^H x) + constant <= 0
struct QuadConstraint {
  std::shared_ptr<const QuadForm> quad;  // may be null (pure affine in <= 0 form)
  double quad_coeff = 1.0;
  CVec lin;
  double constant = 0.0;
  std::string name;
};

/// Re(lin^H x) + constant - coeff * quad(x) >= t  (one per user)
struct EpigraphRow {
  std::shared_ptr<const QuadForm> quad;
  double quad_coeff = 1.0;
  CVec lin;
  double constant = 0.0;
  std::string name;
};

/// Re(lin^H x) + constant >= 0
struct AffineConstraint {
  CVec lin;
  double constant = 0.0;
  std::string name;
};

/// coeffs^T x = rhs (plain transpose, complex-linear)
struct LinearEquality {
  CVec coeffs;
  cxd rhs{0.0, 0.0};
  std::string name;
};

enum class SolveStatus { Optimal, Infeasible, MaxIters, NumericalFailure };

inline std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::MaxIters: return "max_iters";
    case SolveStatus::NumericalFailure: return "numerical_failure";
  }
  return "?";
}

/// Max-min epigraph program over a complex variable: maximize t subject to
/// every epigraph row >= t plus the listed constraints.
struct ConicProblem {
  int dim = 0;
  std::vector<EpigraphRow> epigraph;
  std::vector<QuadConstraint> quadratic;
  std::vector<AffineConstraint> affine;
  std::vector<LinearEquality> equalities;

  struct Metadata {
    double mu = 0.0;
    RVec lambda;
    int outer_iter = 0;
    int inner_iter = 0;
    std::string label;
  } metadata;

  static double affine_value(const CVec& lin, double constant, const CVec& x) {
    if (lin.size() == 0) return constant;
    return constant + (lin.adjoint() * x).real()(0);
  }

  double epigraph_row_value(int k, const CVec& x) const {
    const auto& row = epigraph[k];
    double v = affine_value(row.lin, row.constant, x);
    if (row.quad) v -= row.quad_coeff * row.quad->value(x);
    return v;
  }

  /// min over epigraph rows; equals the optimal t for a feasible x.
  double epigraph_value(const CVec& x) const {
    double v = std::numeric_limits<double>::infinity();
    for (int k = 0; k < static_cast<int>(epigraph.size()); ++k)
      v = std::min(v, epigraph_row_value(k, x));
    return v;
  }

  /// Constraint residual f(x) in the <= 0 orientation.
  double quadratic_value(int i, const CVec& x) const {
    const auto& c = quadratic[i];
    double v = affine_value(c.lin, c.constant, x);
    if (c.quad) v += c.quad_coeff * c.quad->value(x);
    return v;
  }

  double affine_row_value(int i, const CVec& x) const {
    return affine_value(affine[i].lin, affine[i].constant, x);
  }

  /// Largest constraint violation at x (0 means feasible; epigraph rows not
  /// included since t is free).
  double max_violation(const CVec& x) const {
    double v = 0.0;
    for (int i = 0; i < static_cast<int>(quadratic.size()); ++i)
      v = std::max(v, quadratic_value(i, x));
    for (int i = 0; i < static_cast<int>(affine.size()); ++i)
      v = std::max(v, -affine_row_value(i, x));
    for (const auto& eq : equalities)
      v = std::max(v, std::abs((eq.coeffs.transpose() * x)(0) - eq.rhs));
    return v;
  }

  /// Text dump; layout documented in docs/formats.md.
  std::string dump() const {
    std::ostringstream os;
    os << "conic-problem dim=" << dim << " label=" << metadata.label
       << " mu=" << metadata.mu << " outer=" << metadata.outer_iter
       << " inner=" << metadata.inner_iter << "\n";
    auto dump_quad = [&os](const QuadForm& q) {
      switch (q.kind) {
        case GramKind::Dense:
          os << "gram dense rows=" << q.rows.rows() << "\n";
          for (int i = 0; i < q.rows.rows(); ++i) {
            os << "  g" << i << ":";
            for (int j = 0; j < q.rows.cols(); ++j)
              os << " (" << q.rows(i, j).real() << "," << q.rows(i, j).imag() << ")";
            os << "\n";
          }
          break;
        case GramKind::ScaledCoords:
          os << "gram scaled-coords:";
          for (int j = 0; j < q.coord_weights.size(); ++j) os << " " << q.coord_weights(j);
          os << "\n";
          break;
        case GramKind::MatRowBlock:
          os << "gram mat-row-block mat_rows=" << q.mat_rows
             << " cols=" << q.block_cols.cols() << "\n";
          break;
      }
    };
    auto dump_lin = [&os](const CVec& lin, double c) {
      os << "  affine const=" << c << " lin:";
      for (int j = 0; j < lin.size(); ++j)
        os << " (" << lin(j).real() << "," << lin(j).imag() << ")";
      os << "\n";
    };
    for (size_t k = 0; k < epigraph.size(); ++k) {
      os << "objective-row " << k << " [" << epigraph[k].name << "] coeff="
         << epigraph[k].quad_coeff << "\n";
      dump_lin(epigraph[k].lin, epigraph[k].constant);
      if (epigraph[k].quad) dump_quad(*epigraph[k].quad);
    }
    for (size_t i = 0; i < quadratic.size(); ++i) {
      os << "constraint-row " << i << " [" << quadratic[i].name << "] coeff="
         << quadratic[i].quad_coeff << " sense=(<=0)\n";
      dump_lin(quadratic[i].lin, quadratic[i].constant);
      if (quadratic[i].quad) dump_quad(*quadratic[i].quad);
    }
    for (size_t i = 0; i < affine.size(); ++i) {
      os << "affine-row " << i << " [" << affine[i].name << "] sense=(>=0)\n";
      dump_lin(affine[i].lin, affine[i].constant);
    }
    os << "equalities " << equalities.size() << "\n";
    return os.str();
  }
};

struct KktResiduals {
  double primal = 0.0;
  double dual = 0.0;
  double gap = 0.0;
};

struct ConicSolution {
  CVec x;
  double t = 0.0;
  double objective = 0.0;
  SolveStatus status = SolveStatus::NumericalFailure;
  KktResiduals kkt;
  int newton_steps = 0;
  std::string message;
};

}  // namespace risbc
