#include <catch2/catch_amalgamated.hpp>
#include <memory>

#include "risbc/conic.hpp"
#include "risbc/ipm.hpp"
#include "risbc/pgs.hpp"
#include "risbc/rng.hpp"

using namespace risbc;

namespace {

ConicProblem trivial_toy() {
  // maximize t s.t. 1 >= t
  ConicProblem p;
  p.dim = 1;
  EpigraphRow row;
  row.lin = CVec::Zero(1);
  row.constant = 1.0;
  row.name = "one";
  p.epigraph.push_back(row);
  // keep x bounded so the barrier has a bounded domain
  QuadConstraint ball;
  ball.quad = std::make_shared<QuadForm>(QuadForm::scaled_coords(RVec::Ones(1)));
  ball.constant = -4.0;
  p.quadratic.push_back(ball);
  return p;
}

ConicProblem ball_linear(const CVec& b) {
  // maximize Re(b^H x) s.t. ||x||^2 <= 1  -> t* = ||b||
  ConicProblem p;
  p.dim = static_cast<int>(b.size());
  EpigraphRow row;
  row.lin = b;
  row.name = "linear";
  p.epigraph.push_back(row);
  QuadConstraint ball;
  ball.quad = std::make_shared<QuadForm>(QuadForm::scaled_coords(RVec::Ones(p.dim)));
  ball.constant = -1.0;
  ball.name = "unit ball";
  p.quadratic.push_back(ball);
  return p;
}

}  // namespace

TEST_CASE("trivially feasible toy reaches t = 1") {
  const auto p = trivial_toy();
  const auto sol = solve_conic(p);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK_THAT(sol.t, Catch::Matchers::WithinAbs(1.0, 1e-7));
  CHECK(sol.kkt.gap <= 1e-8);
}

TEST_CASE("infeasible toy is certified infeasible") {
  ConicProblem p;
  p.dim = 1;
  EpigraphRow row;
  row.lin = CVec::Ones(1);
  p.epigraph.push_back(row);
  AffineConstraint far;  // Re(x) >= 1
  far.lin = CVec::Ones(1);
  far.constant = -1.0;
  p.affine.push_back(far);
  QuadConstraint ball;  // |x|^2 <= 0.25
  ball.quad = std::make_shared<QuadForm>(QuadForm::scaled_coords(RVec::Ones(1)));
  ball.constant = -0.25;
  p.quadratic.push_back(ball);

  const auto sol = solve_conic(p);
  CHECK(sol.status == SolveStatus::Infeasible);
  CHECK(!sol.message.empty());
}

TEST_CASE("linear objective over the unit ball") {
  Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const int d = 1 + static_cast<int>(rng.uniform(0, 5));
    CVec b(d);
    for (int j = 0; j < d; ++j) b(j) = rng.complex_normal();
    const auto p = ball_linear(b);
    const auto sol = solve_conic(p);
    REQUIRE(sol.status == SolveStatus::Optimal);
    CHECK_THAT(sol.t, Catch::Matchers::WithinAbs(b.norm(), 1e-6));
    CHECK(p.max_violation(sol.x) <= 1e-7);
    // x aligns with b
    CHECK_THAT(std::abs((b.adjoint() * sol.x)(0)) / (b.norm() * sol.x.norm()),
               Catch::Matchers::WithinAbs(1.0, 1e-5));
  }
}

TEST_CASE("quadratic epigraph row: maximize -|x-c|^2") {
  const cxd c(0.7, -0.3);
  ConicProblem p;
  p.dim = 1;
  EpigraphRow row;
  row.quad = std::make_shared<QuadForm>(QuadForm::scaled_coords(RVec::Ones(1)));
  row.quad_coeff = 1.0;
  row.lin = CVec::Constant(1, 2.0 * c);
  row.constant = -std::norm(c);
  p.epigraph.push_back(row);
  const auto sol = solve_conic(p);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK_THAT(sol.t, Catch::Matchers::WithinAbs(0.0, 1e-6));
  CHECK_THAT(std::abs(sol.x(0) - c), Catch::Matchers::WithinAbs(0.0, 1e-4));
}

TEST_CASE("max-min over two affine rows") {
  ConicProblem p;
  p.dim = 1;
  EpigraphRow r1, r2;
  r1.lin = CVec::Constant(1, cxd(-1.0, 0.0));
  r1.constant = 1.0;  // 1 - Re(x)... lin^H x with lin=-1 gives -Re(x)
  r2.lin = CVec::Constant(1, cxd(1.0, 0.0));
  r2.constant = 1.0;
  p.epigraph.push_back(r1);
  p.epigraph.push_back(r2);
  QuadConstraint ball;
  ball.quad = std::make_shared<QuadForm>(QuadForm::scaled_coords(RVec::Ones(1)));
  ball.constant = -1.0;
  p.quadratic.push_back(ball);
  const auto sol = solve_conic(p);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK_THAT(sol.t, Catch::Matchers::WithinAbs(1.0, 1e-6));
  CHECK_THAT(sol.x(0).real(), Catch::Matchers::WithinAbs(0.0, 1e-5));
}

TEST_CASE("complex-linear equality constraints are honored") {
  // maximize Re(x1) s.t. x1 = x2, ||x||^2 <= 1 -> x1 = x2 = 1/sqrt(2)
  ConicProblem p;
  p.dim = 2;
  EpigraphRow row;
  row.lin = CVec::Zero(2);
  row.lin(0) = 1.0;
  p.epigraph.push_back(row);
  QuadConstraint ball;
  ball.quad = std::make_shared<QuadForm>(QuadForm::scaled_coords(RVec::Ones(2)));
  ball.constant = -1.0;
  p.quadratic.push_back(ball);
  LinearEquality eq;
  eq.coeffs = CVec(2);
  eq.coeffs << cxd(1, 0), cxd(-1, 0);
  eq.rhs = cxd(0, 0);
  p.equalities.push_back(eq);

  const auto sol = solve_conic(p);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK_THAT(sol.t, Catch::Matchers::WithinAbs(M_SQRT1_2, 1e-6));
  CHECK(std::abs(sol.x(0) - sol.x(1)) < 1e-8);
}

TEST_CASE("MatRowBlock quadratic is equivalent to its dense expansion") {
  Rng rng(11);
  const int m_rows = 4, r = 2, n_cols = 3;
  CMat cols(r, n_cols);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < n_cols; ++j) cols(i, j) = rng.complex_normal();

  const auto block = QuadForm::mat_row_block(m_rows, cols);
  // dense rows: for each (col k, matrix row m) the functional Z_m . c_k
  CMat dense_rows(n_cols * m_rows, m_rows * r);
  dense_rows.setZero();
  for (int k = 0; k < n_cols; ++k)
    for (int m = 0; m < m_rows; ++m)
      for (int j = 0; j < r; ++j) dense_rows(k * m_rows + m, j * m_rows + m) = cols(j, k);
  const auto dense = QuadForm::dense(dense_rows);

  CVec x(m_rows * r);
  for (int j = 0; j < x.size(); ++j) x(j) = rng.complex_normal();
  CHECK_THAT(block.value(x), Catch::Matchers::WithinRel(dense.value(x), 1e-12));
  CHECK((block.gradient(x) - dense.gradient(x)).norm() < 1e-12);

  CHECK((detail::realified_hessian(block) - detail::realified_hessian(dense)).cwiseAbs().maxCoeff()
        < 1e-12);
}

namespace {

/// Random bounded max-min QCQP with coordinate-structured constraints, the
/// shape the diagonal architectures produce.
ConicProblem random_structured(Rng& rng, int d, int users) {
  ConicProblem p;
  p.dim = d;
  for (int k = 0; k < users; ++k) {
    EpigraphRow row;
    CMat rows(2, d);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < d; ++j) rows(i, j) = 0.3 * rng.complex_normal();
    row.quad = std::make_shared<QuadForm>(QuadForm::dense(rows));
    row.quad_coeff = 0.5 + rng.uniform();
    row.lin = CVec(d);
    for (int j = 0; j < d; ++j) row.lin(j) = rng.complex_normal();
    row.constant = rng.uniform(-0.2, 1.0);
    p.epigraph.push_back(std::move(row));
  }
  for (int j = 0; j < d; ++j) {
    QuadConstraint cap;
    RVec w = RVec::Zero(d);
    w(j) = 1.0;
    cap.quad = std::make_shared<QuadForm>(QuadForm::scaled_coords(w));
    cap.constant = -1.0;
    p.quadratic.push_back(std::move(cap));
  }
  return p;
}

}  // namespace

TEST_CASE("woodbury and dense newton backends agree") {
  Rng rng(21);
  for (int trial = 0; trial < 6; ++trial) {
    const int d = 36;
    auto p = random_structured(rng, d, 3);
    IpmOptions dense_opt;
    dense_opt.allow_woodbury = false;
    IpmOptions wb_opt;
    wb_opt.woodbury_min_real_dim = 16;

    const auto a = solve_conic(p, dense_opt);
    const auto b = solve_conic(p, wb_opt);
    REQUIRE(a.status == SolveStatus::Optimal);
    REQUIRE(b.status == SolveStatus::Optimal);
    CHECK_THAT(a.t, Catch::Matchers::WithinAbs(b.t, 1e-6));
  }
}

TEST_CASE("subgradient fallback approaches the interior-point optimum") {
  Rng rng(31);
  auto p = random_structured(rng, 6, 2);
  const auto ipm = solve_conic(p);
  REQUIRE(ipm.status == SolveStatus::Optimal);
  const auto pgs = solve_subgradient(p, CVec::Zero(6));
  REQUIRE(pgs.status == SolveStatus::Optimal);
  CHECK(pgs.t <= ipm.t + 1e-6);
  CHECK_THAT(pgs.t, Catch::Matchers::WithinAbs(ipm.t, 5e-3 * (1.0 + std::abs(ipm.t))));
  CHECK(p.max_violation(pgs.x) <= 1e-8);
}

TEST_CASE("warm starts preserve the optimum and reuse fewer steps") {
  Rng rng(41);
  auto p = random_structured(rng, 12, 3);
  const auto cold = solve_conic(p);
  REQUIRE(cold.status == SolveStatus::Optimal);
  const auto warm = solve_conic(p, {}, &cold.x);
  REQUIRE(warm.status == SolveStatus::Optimal);
  CHECK_THAT(warm.t, Catch::Matchers::WithinAbs(cold.t, 1e-7));
  CHECK(warm.newton_steps <= cold.newton_steps);
}

TEST_CASE("solutions satisfy constraints to ten times the tolerance") {
  Rng rng(51);
  for (int trial = 0; trial < 8; ++trial) {
    auto p = random_structured(rng, 8, 3);
    const auto sol = solve_conic(p);
    REQUIRE(sol.status == SolveStatus::Optimal);
    CHECK(p.max_violation(sol.x) <= 1e-7);
    CHECK(sol.kkt.gap <= 1e-8);
    // epigraph correctness: reported t equals min over rows at the solution
    CHECK_THAT(p.epigraph_value(sol.x), Catch::Matchers::WithinAbs(sol.t, 1e-6));
  }
}

TEST_CASE("problem dump is readable and complete") {
  auto p = trivial_toy();
  p.metadata.label = "toy";
  const std::string text = p.dump();
  CHECK(text.find("objective-row") != std::string::npos);
  CHECK(text.find("constraint-row") != std::string::npos);
  CHECK(text.find("label=toy") != std::string::npos);
}
