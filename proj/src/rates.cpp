#include "star_swipt/rates.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "star_swipt/kernels.hpp"
#include "star_swipt/surrogates.hpp"

namespace star_swipt {

RISProfile RISProfile::uniform(int m) {
  RISProfile r;
  r.beta_t = RVec::Constant(m, 0.5);
  r.beta_r = RVec::Constant(m, 0.5);
  r.theta_t = RVec::Zero(m);
  r.theta_r = RVec::Zero(m);
  return r;
}

namespace {
CVec coefficients(const RVec& beta, const RVec& theta) {
  CVec u(beta.size());
  for (Eigen::Index m = 0; m < beta.size(); ++m) {
    u[m] = std::polar(std::sqrt(std::max(beta[m], 0.0)), theta[m]);
  }
  return u;
}
}  // namespace

CVec RISProfile::u_t() const { return coefficients(beta_t, theta_t); }
CVec RISProfile::u_r() const { return coefficients(beta_r, theta_r); }

void RISProfile::validate(double tol) const {
  const auto m = beta_t.size();
  if (beta_r.size() != m || theta_t.size() != m || theta_r.size() != m) {
    throw DimensionError("RISProfile: vectors differ in length");
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    if (beta_t[i] < -tol || beta_t[i] > 1.0 + tol || beta_r[i] < -tol || beta_r[i] > 1.0 + tol) {
      throw std::domain_error("RISProfile: amplitude outside [0, 1]");
    }
    if (std::abs(beta_t[i] + beta_r[i] - 1.0) > tol) {
      throw std::domain_error("RISProfile: beta_t + beta_r != 1");
    }
    const double two_pi = 2.0 * std::numbers::pi;
    if (!(theta_t[i] >= 0.0 && theta_t[i] < two_pi && theta_r[i] >= 0.0 && theta_r[i] < two_pi)) {
      throw std::domain_error("RISProfile: phase outside [0, 2pi)");
    }
  }
}

PrecoderSet PrecoderSet::zeros(int n_tx, int n_ir, int n_uer) {
  PrecoderSet p;
  p.p_c = CVec::Zero(n_tx);
  p.p.assign(n_ir, CVec::Zero(n_tx));
  p.f.assign(n_uer, CVec::Zero(n_tx));
  p.alpha = RVec::Constant(n_ir, 1.0 / n_ir);
  return p;
}

double PrecoderSet::power() const {
  double s = p_c.squaredNorm();
  for (const auto& v : p) s += v.squaredNorm();
  for (const auto& v : f) s += v.squaredNorm();
  return s;
}

PrecoderSet PrecoderSet::scaled(double factor) const {
  PrecoderSet out = *this;
  out.p_c *= factor;
  for (auto& v : out.p) v *= factor;
  for (auto& v : out.f) v *= factor;
  return out;
}

CMat PrecoderSet::stream_matrix() const {
  CMat S(n_tx(), 1 + n_ir() + n_uer());
  S.col(0) = p_c;
  for (int k = 0; k < n_ir(); ++k) S.col(1 + k) = p[k];
  for (int j = 0; j < n_uer(); ++j) S.col(1 + n_ir() + j) = f[j];
  return S;
}

CRow combined_channel(const CVec& g, const CVec& u, const CMat& H) {
  if (g.size() != H.rows() || u.size() != H.rows()) {
    throw DimensionError("combined_channel: RIS dimension mismatch");
  }
  return (g.conjugate().cwiseProduct(u)).transpose() * H;
}

IrSinr ir_sinrs(const PrecoderSet& pre, const CRow& h, int k) {
  if (h.size() != pre.n_tx()) throw DimensionError("ir_sinrs: antenna dimension mismatch");
  auto gain = [&](const CVec& v) { return std::norm((h * v)(0)); };
  double priv = 0.0;
  for (const auto& v : pre.p) priv += gain(v);
  double energy = 0.0;
  for (const auto& v : pre.f) energy += gain(v);
  const double own = gain(pre.p[k]);
  IrSinr s;
  s.common = gain(pre.p_c) / (priv + energy + 1.0);
  s.priv = own / (priv - own + energy + 1.0);
  return s;
}

double harvested_energy(const PrecoderSet& pre, const CRow& h) {
  if (h.size() != pre.n_tx()) throw DimensionError("harvested_energy: antenna dimension mismatch");
  double q = std::norm((h * pre.p_c)(0));
  for (const auto& v : pre.p) q += std::norm((h * v)(0));
  for (const auto& v : pre.f) q += std::norm((h * v)(0));
  return q;
}

RateReport worst_case_secrecy(const PrecoderSet& pre, const RISProfile& ris, const ChannelSet& ch,
                              int n_samples, std::uint64_t seed) {
  const int K = ch.n_ir(), J = ch.n_uer();
  if (pre.n_ir() != K || pre.n_uer() != J || pre.n_tx() != ch.n_tx() || ris.size() != ch.n_ris()) {
    throw DimensionError("worst_case_secrecy: design does not match channel set");
  }
  RateReport r;
  const CVec ut = ris.u_t();
  const CVec ur = ris.u_r();
  r.r_ck.resize(K);
  r.r_k.resize(K);
  for (int k = 0; k < K; ++k) {
    const IrSinr s = ir_sinrs(pre, combined_channel(ch.g_t[k], ut, ch.H), k);
    r.r_ck[k] = std::log2(1.0 + s.common);
    r.r_k[k] = std::log2(1.0 + s.priv);
  }
  r.r_c = *std::min_element(r.r_ck.begin(), r.r_ck.end());

  // streams seen from the reflection side: diag(u_r) H s
  const CMat streams = ur.asDiagonal() * (ch.H * pre.stream_matrix());
  const int ns = static_cast<int>(streams.cols());
  r.leak_c.resize(J);
  r.leak_c_sampled.resize(J);
  r.leak_p.assign(K, std::vector<double>(J));
  r.leak_p_sampled.assign(K, std::vector<double>(J));
  r.energy_nominal.resize(J);
  for (int j = 0; j < J; ++j) {
    const CVec& g = ch.g_r_hat[j];
    RVec hi(ns), lo(ns), nominal(ns);
    for (int n = 0; n < ns; ++n) {
      const CVec s = streams.col(n);
      const double a = robust_abs_max(g, s, ch.nu);
      hi[n] = a * a;
      lo[n] = std::max(0.0, robust_sq_min(g, s, ch.nu));
      nominal[n] = std::norm(g.dot(s));
    }
    r.energy_nominal[j] = nominal.sum();
    r.energy_worst += lo.sum();
    const double lo_priv = lo.segment(1, K).sum();
    const double lo_energy = lo.tail(ns - 1 - K).sum();
    r.leak_c[j] = std::log2(1.0 + hi[0] / (lo_priv + lo_energy + 1.0));
    for (int k = 0; k < K; ++k) {
      const double den = lo[0] + lo_priv - lo[1 + k] + lo_energy + 1.0;
      r.leak_p[k][j] = std::log2(1.0 + hi[1 + k] / den);
    }
    const kernels::UerWorst w = kernels::sampled_uer_worst(
        streams, K, g, ch.nu, n_samples, derive_seed(seed, static_cast<std::uint64_t>(j)));
    r.leak_c_sampled[j] = w.leak_c;
    for (int k = 0; k < K; ++k) r.leak_p_sampled[k][j] = w.leak_p[k];
    r.energy_sampled += w.energy_min;
    const double slack = 1e-9 * (1.0 + r.leak_c[j]);
    if (w.leak_c > r.leak_c[j] + slack) r.bound_dominates = false;
    for (int k = 0; k < K; ++k) {
      if (w.leak_p[k] > r.leak_p[k][j] + 1e-9 * (1.0 + r.leak_p[k][j])) r.bound_dominates = false;
    }
  }
  const double max_leak_c = *std::max_element(r.leak_c.begin(), r.leak_c.end());
  const double max_leak_c_s = *std::max_element(r.leak_c_sampled.begin(), r.leak_c_sampled.end());
  r.common_undecodable = max_leak_c < r.r_c;
  r.secrecy.resize(K);
  r.secrecy_sampled.resize(K);
  for (int k = 0; k < K; ++k) {
    const double lp = *std::max_element(r.leak_p[k].begin(), r.leak_p[k].end());
    const double lps = *std::max_element(r.leak_p_sampled[k].begin(), r.leak_p_sampled[k].end());
    r.secrecy[k] = pre.alpha[k] * std::max(0.0, r.r_c - max_leak_c) + std::max(0.0, r.r_k[k] - lp);
    r.secrecy_sampled[k] =
        pre.alpha[k] * std::max(0.0, r.r_c - max_leak_c_s) + std::max(0.0, r.r_k[k] - lps);
  }
  r.r_sec = *std::min_element(r.secrecy.begin(), r.secrecy.end());
  r.r_sec_sampled = *std::min_element(r.secrecy_sampled.begin(), r.secrecy_sampled.end());
  r.sum_rate = r.r_c;
  for (double v : r.r_k) r.sum_rate += v;
  return r;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string rate_report_header(int n_ir, int n_uer) {
  std::ostringstream os;
  os << "r_c";
  for (int k = 0; k < n_ir; ++k) os << ",r_c" << k;
  for (int k = 0; k < n_ir; ++k) os << ",r_p" << k;
  for (int j = 0; j < n_uer; ++j) os << ",leak_c" << j;
  for (int k = 0; k < n_ir; ++k)
    for (int j = 0; j < n_uer; ++j) os << ",leak_p" << k << "_" << j;
  for (int j = 0; j < n_uer; ++j) os << ",leak_c" << j << "_sampled";
  for (int k = 0; k < n_ir; ++k)
    for (int j = 0; j < n_uer; ++j) os << ",leak_p" << k << "_" << j << "_sampled";
  for (int j = 0; j < n_uer; ++j) os << ",energy" << j;
  os << ",energy_worst,energy_sampled";
  for (int k = 0; k < n_ir; ++k) os << ",secrecy" << k;
  for (int k = 0; k < n_ir; ++k) os << ",secrecy" << k << "_sampled";
  os << ",r_sec,r_sec_sampled,sum_rate,bound_dominates,common_undecodable";
  return os.str();
}

std::string to_csv_row(const RateReport& r) {
  std::ostringstream os;
  os << format_double(r.r_c);
  for (double v : r.r_ck) os << "," << format_double(v);
  for (double v : r.r_k) os << "," << format_double(v);
  for (double v : r.leak_c) os << "," << format_double(v);
  for (const auto& row : r.leak_p)
    for (double v : row) os << "," << format_double(v);
  for (double v : r.leak_c_sampled) os << "," << format_double(v);
  for (const auto& row : r.leak_p_sampled)
    for (double v : row) os << "," << format_double(v);
  for (double v : r.energy_nominal) os << "," << format_double(v);
  os << "," << format_double(r.energy_worst) << "," << format_double(r.energy_sampled);
  for (double v : r.secrecy) os << "," << format_double(v);
  for (double v : r.secrecy_sampled) os << "," << format_double(v);
  os << "," << format_double(r.r_sec) << "," << format_double(r.r_sec_sampled) << ","
     << format_double(r.sum_rate) << "," << (r.bound_dominates ? 1 : 0) << ","
     << (r.common_undecodable ? 1 : 0);
  return os.str();
}

}  // namespace star_swipt
