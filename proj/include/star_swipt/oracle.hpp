#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "star_swipt/rates.hpp"
#include "star_swipt/scenario.hpp"

// Brute-force validators. Design evaluation here is written out directly
// from the system model and does not call into the rate, surrogate or
// optimizer code, so it can act as an independent check on all three.
namespace star_swipt::oracle {

inline constexpr int kCertifySamples = 1000;
inline constexpr int kAuditSamples = 10000;

/// Design evaluated under sampled channel errors. Sample 0 of every UER is
/// the error-free estimate, so the sampled leakage is never below nominal.
struct SampledEvaluation {
  std::vector<double> r_ck;    // [k] common-stream rate at IR k
  double r_c = 0.0;            // min_k r_ck
  std::vector<double> r_k;     // [k] private rate
  double leak_c = 0.0;         // max over UERs and samples
  std::vector<double> leak_p;  // [k] max over UERs and samples
  double energy_min = 0.0;     // sum_j of the sampled minimum of Q_j
  std::vector<double> secrecy;  // [k]
  double r_sec = 0.0;           // min_k secrecy
};

SampledEvaluation sampled_evaluation(const PrecoderSet& pre, const RISProfile& ris, const ChannelSet& ch,
                                     int n_ball_samples, std::uint64_t seed);

struct Check {
  std::string name;
  bool pass = false;
  double value = 0.0;  // quantity tested
  double bound = 0.0;  // limit it was tested against
};

struct Certificate {
  std::vector<Check> checks;
  bool pass() const;
  /// Names of the failed checks joined by ';', empty when all pass.
  std::string failures() const;
};

/// Checks every constraint of the design problem: power, share simplex,
/// common rate against each IR, per-IR common-rate floor, energy floor
/// under sampled errors and the STAR-RIS invariants. `r_c` is the claimed
/// common rate; NaN means min_k of the achievable common rates.
Certificate certify_design(const PrecoderSet& pre, const RISProfile& ris, const ChannelSet& ch,
                           const ScenarioConfig& cfg, int n_ball_samples = kCertifySamples,
                           std::uint64_t seed = 0, double r_c = std::numeric_limits<double>::quiet_NaN());

struct OperatorAudit {
  std::string name;
  int samples = 0;
  int violations = 0;             // samples on the wrong side of the target
  double worst_violation = 0.0;   // largest wrong-side excess, relative
  double tangency_residual = 0.0;  // largest mismatch at the expansion point, relative
  bool pass(double tangency_tol = 1e-9) const {
    return violations == 0 && tangency_residual <= tangency_tol;
  }
};

struct AuditReport {
  std::vector<OperatorAudit> operators;
  double wall_ms = 0.0;
  bool pass(double tangency_tol = 1e-9) const;
};

/// Samples random points and expansion points for each surrogate operator
/// and records bound-direction violations and tangency residuals. Empty
/// report for n_samples <= 0.
AuditReport surrogate_audit(int n_samples, std::uint64_t seed);

std::string audit_csv_header();
void write_audit_csv(std::ostream& os, const AuditReport& report);

struct GridResult {
  bool found = false;  // false when no grid point is feasible
  PrecoderSet pre;
  RISProfile ris;
  double r_sec = 0.0;  // sampled objective of the best point
  long cells = 0;      // grid size
  long evaluated = 0;  // cells that needed the sampled evaluation
};

/// Exhaustive search for K = J = 1, N_T <= 2, M <= 2. Per element the phases
/// take {0, pi/2, pi, 3pi/2} and the transmit split {0, .25, .5, .75, 1}; each
/// stream direction is (cos a, sin a e^{i phi}) with a on `density` + 1 levels
/// in [0, pi/2], and stream powers are multiples of P_t / density with total
/// at most P_t. density 1 evaluates the single point (uniform profile, equal
/// power on the first antenna). Grid cells are pruned with the error-free
/// objective, which bounds the sampled one from above.
GridResult grid_search_tiny(const ChannelSet& ch, const ScenarioConfig& cfg, int density = 4,
                            int n_ball_samples = kCertifySamples, std::uint64_t seed = 0);

}  // namespace star_swipt::oracle
