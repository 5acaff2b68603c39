#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "star_swipt/scenario.hpp"
#include "star_swipt/types.hpp"

namespace star_swipt {

/// Per-element STAR-RIS coefficients in energy-splitting mode. Amplitudes
/// are stored squared (power split), phases in radians.
struct RISProfile {
  RVec beta_t, beta_r;
  RVec theta_t, theta_r;

  /// beta = 1/2 on both sides, zero phases.
  static RISProfile uniform(int m);

  int size() const { return static_cast<int>(beta_t.size()); }
  /// u[m] = sqrt(beta[m]) exp(i theta[m])
  CVec u_t() const;
  CVec u_r() const;
  /// Throws std::domain_error when the coupling or range invariants fail by
  /// more than `tol`.
  void validate(double tol = 1e-12) const;
};

struct PrecoderSet {
  CVec p_c;
  std::vector<CVec> p;  // private, one per IR
  std::vector<CVec> f;  // energy, one per UER
  RVec alpha;           // common-rate shares

  static PrecoderSet zeros(int n_tx, int n_ir, int n_uer);

  int n_tx() const { return static_cast<int>(p_c.size()); }
  int n_ir() const { return static_cast<int>(p.size()); }
  int n_uer() const { return static_cast<int>(f.size()); }
  double power() const;
  PrecoderSet scaled(double factor) const;
  /// Streams as matrix columns: [p_c, p_1..p_K, f_1..f_J].
  CMat stream_matrix() const;
};

/// g^H diag(u) H as a row vector.
CRow combined_channel(const CVec& g, const CVec& u, const CMat& H);

struct IrSinr {
  double common = 0.0;
  double priv = 0.0;
};

/// SINRs at an information receiver with combined channel h. The private
/// stream is decoded after the common stream has been removed.
IrSinr ir_sinrs(const PrecoderSet& pre, const CRow& h, int k);
/// Energy collected through combined channel h (unit efficiency).
double harvested_energy(const PrecoderSet& pre, const CRow& h);

struct RateReport {
  std::vector<double> r_ck;  // per-IR common-stream rates
  double r_c = 0.0;          // min_k r_ck
  std::vector<double> r_k;   // private rates

  // Worst-case eavesdropper rates from the closed-form ball bounds and from
  // sampling; [j] and [k][j].
  std::vector<double> leak_c;
  std::vector<std::vector<double>> leak_p;
  std::vector<double> leak_c_sampled;
  std::vector<std::vector<double>> leak_p_sampled;

  std::vector<double> energy_nominal;  // Q_j at the estimated channel
  double energy_worst = 0.0;           // sum_j of the closed-form lower bound
  double energy_sampled = 0.0;         // sum_j of the sampled minimum

  std::vector<double> secrecy;          // per-IR totals, closed form
  std::vector<double> secrecy_sampled;  // per-IR totals, sampled leakage
  double r_sec = 0.0;                   // min_k secrecy
  double r_sec_sampled = 0.0;
  double sum_rate = 0.0;  // r_c + sum_k r_k

  bool bound_dominates = true;  // closed-form leakage >= sampled everywhere
  bool common_undecodable = true;  // max_j closed-form leak_c < r_c
};

/// Exact rates and worst-case secrecy of a design. n_samples draws per UER
/// from the uncertainty ball give the sampled variant.
RateReport worst_case_secrecy(const PrecoderSet& pre, const RISProfile& ris,
                              const ChannelSet& ch, int n_samples, std::uint64_t seed);

std::string rate_report_header(int n_ir, int n_uer);
std::string to_csv_row(const RateReport& r);

/// Formats with 9 significant digits.
std::string format_double(double v);

}  // namespace star_swipt
