#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "star_swipt/types.hpp"

namespace star_swipt {

/// Affine function of the program's real scalar variables.
struct LinExpr {
  std::vector<std::pair<int, double>> terms;
  double constant = 0.0;

  LinExpr() = default;
  LinExpr(double c) : constant(c) {}  // NOLINT: implicit by design
  static LinExpr var(int index, double coef = 1.0);

  LinExpr& operator+=(const LinExpr& o);
  LinExpr& operator-=(const LinExpr& o);
  LinExpr& operator*=(double a);

  double eval(const RVec& x) const;
  /// Merges duplicate indices and drops zero coefficients.
  LinExpr& compact();
};

LinExpr operator+(LinExpr a, const LinExpr& b);
LinExpr operator-(LinExpr a, const LinExpr& b);
LinExpr operator-(LinExpr a);
LinExpr operator*(double a, LinExpr e);
LinExpr operator*(LinExpr e, double a);

/// Complex scalar that is affine in the real variables.
struct CLin {
  LinExpr re;
  LinExpr im;
};

CLin operator+(const CLin& a, const CLin& b);
CLin operator-(const CLin& a, const CLin& b);
/// Complex constant times complex affine expression.
CLin operator*(cplx a, const CLin& x);
CLin conj(const CLin& x);

/// a^T x for constant complex a and affine complex x (no conjugation).
CLin dotu(const CVec& a, const std::vector<CLin>& x);
/// Re{ a^H x } as a real affine expression.
LinExpr re_inner(const CVec& a, const std::vector<CLin>& x);
/// Sum of squares components of x as a flat real list (Re parts then Im
/// parts), suitable for norm cones: ||x||_2 = ||flatten(x)||_2.
std::vector<LinExpr> flatten(const std::vector<CLin>& x);

/// Complex vector variable of length n backed by 2n real scalars.
struct ComplexVarVec {
  std::string name;
  int offset = 0;  // Re parts at offset..offset+n-1, Im parts follow
  int n = 0;

  CLin operator[](int i) const;
  std::vector<CLin> exprs() const;
};

/// Hermitian n x n matrix variable with n^2 real parameters: the diagonal,
/// then the real and imaginary parts of the strict upper triangle.
struct HermitianVar {
  std::string name;
  int offset = 0;
  int n = 0;

  int diag_index(int a) const;
  /// Index of Re V(a,b) and Im V(a,b) for a < b.
  int re_index(int a, int b) const;
  int im_index(int a, int b) const;
  CLin entry(int a, int b) const;
  LinExpr trace() const;
  /// Re Tr(C V) for a constant Hermitian C.
  LinExpr re_trace_product(const CMat& C) const;
};

enum class VarKind { scalar, vector, complex_vector, hermitian };

struct VarInfo {
  std::string name;
  int offset = 0;
  int size = 0;  // number of real scalars
  VarKind kind = VarKind::scalar;
};

/// near_optimal: the solver stalled close to, but not within, the requested
/// tolerance. Still usable as a solution.
enum class SolveStatus { optimal, near_optimal, infeasible, unbounded, max_iterations, numerical_failure };

std::string to_string(SolveStatus s);

struct ConicSolution {
  SolveStatus status = SolveStatus::numerical_failure;
  RVec x;
  double objective = 0.0;
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;

  bool ok() const { return status == SolveStatus::optimal || status == SolveStatus::near_optimal; }
  double value(int index) const { return x[index]; }
  double value(const LinExpr& e) const { return e.eval(x); }
  cplx value(const CLin& e) const { return {e.re.eval(x), e.im.eval(x)}; }
  CVec value(const ComplexVarVec& v) const;
  CMat value(const HermitianVar& v) const;
};

enum class ConeKind { zero, nonneg, soc, psd };

struct Constraint {
  ConeKind kind = ConeKind::nonneg;
  // zero/nonneg: each row is one scalar constraint.
  // soc: rows[0] >= ||rows[1..]||.
  // psd: the lower triangle of an order-`order` symmetric matrix, column-major.
  std::vector<LinExpr> rows;
  int order = 0;
  std::string label;
};

/// Solver-agnostic conic program over real scalar variables.
class ConicProgram {
 public:
  int add_var(const std::string& name);
  std::vector<int> add_vars(const std::string& name, int n);
  ComplexVarVec add_complex(const std::string& name, int n);
  HermitianVar add_hermitian(const std::string& name, int n);

  void minimize(LinExpr objective);
  void maximize(LinExpr objective);

  /// lhs == rhs
  void add_equal(const LinExpr& lhs, const LinExpr& rhs, const std::string& label);
  /// e >= 0
  void add_nonneg(const LinExpr& e, const std::string& label);
  /// lhs >= rhs
  void add_geq(const LinExpr& lhs, const LinExpr& rhs, const std::string& label);
  /// ||xs||_2 <= t
  void add_soc(const LinExpr& t, const std::vector<LinExpr>& xs, const std::string& label);
  /// ||xs||_2^2 <= y * z with y, z >= 0 (rotated cone).
  void add_rotated(const std::vector<LinExpr>& xs, const LinExpr& y, const LinExpr& z,
                   const std::string& label);
  /// x^2 <= rho * d with rho, d >= 0.
  void add_quad_over_lin(const LinExpr& x, const LinExpr& d, const LinExpr& rho,
                         const std::string& label);
  /// ||xs||_2^2 <= rhs
  void add_sq_norm_le(const std::vector<LinExpr>& xs, const LinExpr& rhs, const std::string& label);
  /// Symmetric matrix given by its lower triangle (column-major) is PSD.
  void add_psd(int order, const std::vector<LinExpr>& lower, const std::string& label);
  /// V >= 0 through the real embedding [Re -Im; Im Re].
  void add_hermitian_psd(const HermitianVar& v, const std::string& label);

  /// `verbose` prints one line per interior-point iteration to stdout.
  ConicSolution solve(double tol = 1e-8, bool verbose = false) const;

  /// One constraint per line, prefixed by its label.
  void dump(std::ostream& os) const;

  int num_vars() const { return num_vars_; }
  const std::vector<VarInfo>& variables() const { return vars_; }
  const std::vector<Constraint>& constraints() const { return cons_; }
  /// Number of constraints whose label starts with `prefix`.
  int count_labeled(const std::string& prefix) const;

 private:
  int reserve(const std::string& name, int size, VarKind kind);
  void check(const LinExpr& e) const;

  int num_vars_ = 0;
  std::vector<VarInfo> vars_;
  std::vector<Constraint> cons_;
  LinExpr objective_;
  bool maximize_ = false;
};

/// Real embedding of a complex vector: (Re; Im).
RVec embed_complex(const CVec& v);
CVec unembed_complex(const RVec& v);
/// Real symmetric embedding [Re -Im; Im Re] of a Hermitian matrix.
RMat embed_hermitian(const CMat& V);
CMat unembed_hermitian(const RMat& M);

}  // namespace star_swipt
