#include "doctest.h"

#include <Eigen/Eigenvalues>

#include "star_swipt/cone_ipm.hpp"
#include "star_swipt/rng.hpp"

using namespace star_swipt;
using namespace star_swipt::ipm;

namespace {

SpMat sparse(const RMat& M) { return M.sparseView(); }

}  // namespace

TEST_CASE("svec round trip and inner product") {
  RMat X(3, 3), Y(3, 3);
  X << 2, 1, 0.5, 1, 3, -1, 0.5, -1, 4;
  Y << 1, -2, 0, -2, 5, 1, 0, 1, 2;
  CHECK((smat(svec(X), 3) - X).norm() < 1e-14);
  CHECK(svec(X).dot(svec(Y)) == doctest::Approx((X * Y).trace()));
  CHECK(svec_index(3, 2, 1) == 4);
}

TEST_CASE("lp: minimize x subject to x >= 1") {
  Problem p;
  p.c = RVec::Ones(1);
  p.G = sparse(-RMat::Ones(1, 1));
  p.h = -RVec::Ones(1);
  p.dims.nonneg = 1;
  const Result r = solve(p);
  REQUIRE(r.status == Status::optimal);
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("lp: contradictory bounds are infeasible") {
  Problem p;
  p.c = RVec::Ones(1);
  RMat G(2, 1);
  G << -1, 1;
  p.G = sparse(G);
  p.h = RVec(2);
  p.h << -1, 0;
  p.dims.nonneg = 2;
  const Result r = solve(p);
  CHECK(r.status == Status::primal_infeasible);
}

TEST_CASE("lp: unbounded objective is reported") {
  Problem p;
  p.c = -RVec::Ones(1);
  p.G = sparse(-RMat::Ones(1, 1));
  p.h = RVec::Zero(1);
  p.dims.nonneg = 1;
  CHECK(solve(p).status == Status::dual_infeasible);
}

TEST_CASE("soc: minimize t with ||x - a|| <= t") {
  // variables (t, x1, x2); minimize t + 0 s.t. x1 = 3, x2 = 4, (t, x) in SOC
  Problem p;
  p.c = RVec::Zero(3);
  p.c[0] = 1.0;
  p.G = sparse(-RMat::Identity(3, 3));
  p.h = RVec::Zero(3);
  p.dims.soc = {3};
  RMat A = RMat::Zero(2, 3);
  A(0, 1) = 1;
  A(1, 2) = 1;
  p.A = sparse(A);
  p.b = RVec(2);
  p.b << 3, 4;
  const Result r = solve(p);
  REQUIRE(r.status == Status::optimal);
  CHECK(r.x[0] == doctest::Approx(5.0).epsilon(1e-7));
}

TEST_CASE("sdp: maximize trace with fixed diagonal") {
  // V = [[a, b], [b, c]] PSD, a = c = 0.5, maximize a + c (=1)
  Problem p;
  p.c = RVec(3);
  p.c << -1, 0, -1;
  RMat G = RMat::Zero(3, 3);
  G(0, 0) = -1;
  G(1, 1) = -std::sqrt(2.0);
  G(2, 2) = -1;
  p.G = sparse(G);
  p.h = RVec::Zero(3);
  p.dims.psd = {2};
  RMat A = RMat::Zero(2, 3);
  A(0, 0) = 1;
  A(1, 2) = 1;
  p.A = sparse(A);
  p.b = RVec::Constant(2, 0.5);
  const Result r = solve(p);
  REQUIRE(r.status == Status::optimal);
  CHECK(-r.pcost == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("sdp: max <C, V> over the spectraplex equals the top eigenvalue") {
  Rng rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 4;
    RMat C(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) C(i, j) = rng.normal();
    C = 0.5 * (C + C.transpose()).eval();
    const int nv = n * (n + 1) / 2;
    // variable = svec(V); maximize <C,V> s.t. tr V = 1, V PSD
    Problem p;
    p.c = -svec(C);
    p.G = sparse(-RMat::Identity(nv, nv));
    p.h = RVec::Zero(nv);
    p.dims.psd = {n};
    p.A = sparse(svec(RMat::Identity(n, n)).transpose());
    p.b = RVec::Ones(1);
    const Result r = solve(p);
    REQUIRE(r.status == Status::optimal);
    Eigen::SelfAdjointEigenSolver<RMat> es(C);
    CHECK(-r.pcost == doctest::Approx(es.eigenvalues()[n - 1]).epsilon(1e-7));
  }
}

TEST_CASE("mixed cones: random feasible instances reach optimality") {
  Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 6;
    ConeDims dims;
    dims.nonneg = 3;
    dims.soc = {3, 4};
    dims.psd = {3};
    const int m = dims.size();
    RMat G(m, n);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) G(i, j) = rng.normal();
    // strictly feasible primal: h = G x0 + s0 with s0 interior
    RVec x0(n);
    for (int j = 0; j < n; ++j) x0[j] = rng.normal();
    RVec s0 = RVec::Zero(m);
    s0.head(3).setOnes();
    s0[3] = 1;
    s0[6] = 1;
    s0.tail(6) = svec(RMat::Identity(3, 3));
    // dual interior z0 gives c = -G' z0, so the problem is bounded
    RVec z0 = s0;
    Problem p;
    p.c = -G.transpose() * z0;
    p.G = sparse(G);
    p.h = G * x0 + s0;
    p.dims = dims;
    const Result r = solve(p);
    REQUIRE(r.status == Status::optimal);
    CHECK(std::abs(r.pcost - r.dcost) < 1e-6 * std::max(1.0, std::abs(r.pcost)));
  }
}
