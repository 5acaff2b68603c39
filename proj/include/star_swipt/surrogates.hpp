#pragma once

#include <map>
#include <string>

#include "star_swipt/types.hpp"

// Convex surrogates used to build the inner approximations of the
// nonconvex constraints. Every "lower" operator is a global under-estimator
// of its target that is tight at the expansion point; every "upper" operator
// over-estimates and is tight at the expansion point.
namespace star_swipt {

/// Concave under-estimator of x*y, tight at (x0, y0).
double theta_lower(double x, double y, double x0, double y0);
/// Convex over-estimator of x*y, tight at (x0, y0).
double theta_upper(double x, double y, double x0, double y0);
/// Tangent line of 2^x at x0 (an under-estimator, 2^x being convex).
double gamma_lower(double x, double x0);
/// Affine under-estimator of |h^H u|^2 / x on x > 0, tight at (u0, x0).
/// Throws std::domain_error if x0 <= 0.
double psi_lower(const CVec& u, double x, const CVec& u0, double x0, const CVec& h);

/// max over ||dg|| <= sigma of |(g_hat + dg)^H u| (exact).
double robust_abs_max(const CVec& g_hat, const CVec& u, double sigma);
/// sigma^2 + 2 sigma ||g_hat||
double robust_mu(const CVec& g_hat, double sigma);
/// |g_hat^H u|^2 - mu ||u||^2, a lower bound of the ball minimum of |(g_hat + dg)^H u|^2.
double robust_sq_min(const CVec& g_hat, const CVec& u, double sigma);
/// |g_hat^H u|^2 + mu ||u||^2, an upper bound of the ball maximum.
double robust_sq_max(const CVec& g_hat, const CVec& u, double sigma);

/// A = pos - neg with pos, neg PSD, from an eigenvalue split. `neg_factor`
/// satisfies neg = neg_factor * neg_factor^H.
struct PsdSplit {
  CMat pos;
  CMat neg;
  CMat neg_factor;
};

PsdSplit psd_split(const CMat& A, double clip = 1e-10);

/// 2 Re{u0^H A+ u} - u0^H A+ u0 - u^H A- u: concave in u, below u^H A u,
/// equal at u = u0.
double psd_split_quad_lower(const CVec& u, const CVec& u0, const PsdSplit& split);

/// log2(1 + 1/(a b)), jointly convex on a, b > 0.
double rate_from_ab(double a, double b);
/// First-order expansion of rate_from_ab at (a0, b0): a global lower bound.
double taylor_rate_lower(double a, double b, double a0, double b0);

/// Expansion values keyed by variable name. Lookups of missing names throw,
/// so every surrogate evaluation names the value it was expanded at.
class ExpansionPoint {
 public:
  void set(const std::string& name, double v);
  void set(const std::string& name, const CVec& v);
  double scalar(const std::string& name) const;
  const CVec& vector(const std::string& name) const;
  bool has(const std::string& name) const;
  /// Throws std::domain_error naming the first non-finite value.
  void validate() const;

 private:
  std::map<std::string, double> scalars_;
  std::map<std::string, CVec> vectors_;
};

}  // namespace star_swipt
