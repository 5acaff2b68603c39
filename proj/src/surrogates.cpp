#include "star_swipt/surrogates.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace star_swipt {

double theta_lower(double x, double y, double x0, double y0) {
  const double s0 = x0 + y0;
  return 0.5 * s0 * (x + y) - 0.25 * s0 * s0 - 0.25 * (x - y) * (x - y);
}

double theta_upper(double x, double y, double x0, double y0) {
  const double d0 = x0 - y0;
  return 0.25 * (x + y) * (x + y) + 0.25 * d0 * d0 - 0.5 * d0 * (x - y);
}

double gamma_lower(double x, double x0) {
  return std::exp2(x0) * (1.0 + std::numbers::ln2 * (x - x0));
}

double psi_lower(const CVec& u, double x, const CVec& u0, double x0, const CVec& h) {
  if (!(x0 > 0.0)) throw std::domain_error("psi_lower: expansion point x0 must be positive");
  const cplx hu0 = h.dot(u0);  // h^H u0
  const cplx hu = h.dot(u);
  // Re{u0^H h h^H u} = Re{conj(h^H u0) (h^H u)}
  const double cross = (std::conj(hu0) * hu).real();
  return 2.0 * cross / x0 - std::norm(hu0) * x / (x0 * x0);
}

double robust_abs_max(const CVec& g_hat, const CVec& u, double sigma) {
  return std::abs(g_hat.dot(u)) + sigma * u.norm();
}

double robust_mu(const CVec& g_hat, double sigma) { return sigma * sigma + 2.0 * sigma * g_hat.norm(); }

double robust_sq_min(const CVec& g_hat, const CVec& u, double sigma) {
  return std::norm(g_hat.dot(u)) - robust_mu(g_hat, sigma) * u.squaredNorm();
}

double robust_sq_max(const CVec& g_hat, const CVec& u, double sigma) {
  return std::norm(g_hat.dot(u)) + robust_mu(g_hat, sigma) * u.squaredNorm();
}

PsdSplit psd_split(const CMat& A, double clip) {
  if (A.rows() != A.cols()) throw DimensionError("psd_split: matrix must be square");
  const CMat Ah = 0.5 * (A + A.adjoint());
  Eigen::SelfAdjointEigenSolver<CMat> es(Ah);
  const RVec& ev = es.eigenvalues();
  const CMat& V = es.eigenvectors();
  const int n = static_cast<int>(A.rows());
  PsdSplit s;
  s.pos = CMat::Zero(n, n);
  s.neg = CMat::Zero(n, n);
  int nneg = 0;
  for (int i = 0; i < n; ++i) nneg += ev[i] < -clip;
  s.neg_factor = CMat::Zero(n, nneg);
  int col = 0;
  for (int i = 0; i < n; ++i) {
    if (ev[i] > clip) {
      s.pos += ev[i] * V.col(i) * V.col(i).adjoint();
    } else if (ev[i] < -clip) {
      s.neg -= ev[i] * V.col(i) * V.col(i).adjoint();
      s.neg_factor.col(col++) = std::sqrt(-ev[i]) * V.col(i);
    }
  }
  return s;
}

double psd_split_quad_lower(const CVec& u, const CVec& u0, const PsdSplit& split) {
  const CVec pu0 = split.pos * u0;
  return 2.0 * pu0.dot(u).real() - pu0.dot(u0).real() - u.dot(split.neg * u).real();
}

double rate_from_ab(double a, double b) { return std::log2(1.0 + 1.0 / (a * b)); }

double taylor_rate_lower(double a, double b, double a0, double b0) {
  const double log2e = std::numbers::log2e;
  return rate_from_ab(a0, b0) - log2e * (a - a0) / (a0 + a0 * a0 * b0) -
         log2e * (b - b0) / (b0 + b0 * b0 * a0);
}

void ExpansionPoint::set(const std::string& name, double v) { scalars_[name] = v; }
void ExpansionPoint::set(const std::string& name, const CVec& v) { vectors_[name] = v; }

double ExpansionPoint::scalar(const std::string& name) const {
  auto it = scalars_.find(name);
  if (it == scalars_.end()) throw std::out_of_range("expansion point has no scalar '" + name + "'");
  return it->second;
}

const CVec& ExpansionPoint::vector(const std::string& name) const {
  auto it = vectors_.find(name);
  if (it == vectors_.end()) throw std::out_of_range("expansion point has no vector '" + name + "'");
  return it->second;
}

bool ExpansionPoint::has(const std::string& name) const {
  return scalars_.count(name) > 0 || vectors_.count(name) > 0;
}

void ExpansionPoint::validate() const {
  for (const auto& [k, v] : scalars_) {
    if (!std::isfinite(v)) throw std::domain_error("non-finite expansion value '" + k + "'");
  }
  for (const auto& [k, v] : vectors_) {
    if (!v.allFinite()) throw std::domain_error("non-finite expansion vector '" + k + "'");
  }
}

}  // namespace star_swipt
