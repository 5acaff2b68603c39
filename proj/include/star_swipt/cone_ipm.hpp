#pragma once

#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "star_swipt/types.hpp"

// Homogeneous self-dual primal-dual interior-point method for
//
//   minimize    c'x
//   subject to  G x + s = h,  A x = b,  s in K
//
// where K is a product of a nonnegative orthant, second-order cones and
// positive semidefinite cones. PSD blocks are stored as svec: the lower
// triangle in column-major order with off-diagonal entries scaled by sqrt(2),
// so the Euclidean inner product of two svec vectors equals the trace inner
// product of the matrices.
namespace star_swipt::ipm {

using SpMat = Eigen::SparseMatrix<double>;

struct ConeDims {
  int nonneg = 0;
  std::vector<int> soc;  // block lengths (>= 1)
  std::vector<int> psd;  // matrix orders

  int size() const;
  int degree() const;
};

struct Problem {
  RVec c;
  SpMat G;
  RVec h;
  SpMat A;
  RVec b;
  ConeDims dims;
};

enum class Status {
  optimal,
  near_optimal,  // stalled within inaccurate_factor times the tolerances
  primal_infeasible,
  dual_infeasible,
  max_iterations,
  numerical_failure,
};

std::string to_string(Status s);

struct Options {
  double feastol = 1e-8;
  double abstol = 1e-8;
  double reltol = 1e-8;
  int max_iter = 100;
  // a stalled solve whose best iterate is within this factor of the
  // tolerances is reported as near_optimal
  double inaccurate_factor = 100.0;
  bool verbose = false;
};

struct Result {
  Status status = Status::numerical_failure;
  RVec x, y, z, s;
  double pcost = 0.0;
  double dcost = 0.0;
  double gap = 0.0;
  double pres = 0.0;  // relative primal residual
  double dres = 0.0;  // relative dual residual
  int iterations = 0;
};

Result solve(const Problem& prob, const Options& opt = {});

/// svec position of entry (i, j), i >= j, of an order-n symmetric matrix.
int svec_index(int n, int i, int j);
RVec svec(const RMat& X);
RMat smat(const Eigen::Ref<const RVec>& v, int n);

}  // namespace star_swipt::ipm
