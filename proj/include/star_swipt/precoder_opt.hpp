#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "star_swipt/conic.hpp"
#include "star_swipt/rates.hpp"
#include "star_swipt/scenario.hpp"
#include "star_swipt/surrogates.hpp"

namespace star_swipt {

struct PrecoderOptions {
  double delta_i = 1e-2;  // SPCA stop threshold on |delta r_sec|
  int n_max = 30;         // SPCA iteration cap
  double delta_e = 1e-3;  // restoration stop threshold on |delta s|
  int m_max = 30;         // restoration iteration cap
  double solver_tol = 1e-7;
  double s_floor = -10.0;  // lower bound on the infeasibility indicator
  double rho_floor = 1e-6;  // smallest SINR expansion value
  bool tighten = true;      // re-expand SPCA at the exact auxiliaries of each iterate
  bool verbose = false;     // solver iteration log
};

/// Iterate of the precoder subproblem: precoders in physical units plus
/// every auxiliary variable. Index conventions: k = IR, j and jj = UER.
struct PrecoderSubproblemState {
  PrecoderSet pre;
  double r_sec = 0.0;
  double r_c = 0.0;
  std::vector<double> gamma;                 // [k] private-rate lower bounds
  std::vector<double> alpha_c;               // [j] common leakage upper bounds
  std::vector<std::vector<double>> alpha_p;  // [k][j] private leakage upper bounds
  std::vector<double> rho_cj;                // [j] UER common SINR bounds
  std::vector<std::vector<double>> rho_kj;   // [k][j] UER private SINR bounds
  std::vector<double> rho_k;                 // [k] IR private SINR bounds
  std::vector<double> rho_ck;                // [k] IR common SINR bounds
  std::vector<std::vector<double>> a;        // [j][k] private interference at UER
  std::vector<std::vector<double>> b;        // [j][jj] energy interference at UER
  std::vector<double> x_c;                   // [j] robust common amplitude
  std::vector<std::vector<double>> x_p;      // [k][j] robust private amplitude
  std::vector<double> v;                     // [j] common power at UER
  std::vector<double> lam_c;                 // [j] worst-case common energy
  std::vector<std::vector<double>> lam_p;    // [j][k] worst-case private energy
  std::vector<std::vector<double>> xi;       // [j][jj] worst-case energy-stream energy
  double s = 0.0;                            // infeasibility indicator
  int iteration = 0;
  std::vector<double> history;  // surrogate r_sec per solved iteration
  bool feasible = false;

  /// Slacks computed from the exact closed-form quantities of `pre`. UER
  /// leakage denominators (worst-case interference plus unit noise) are
  /// floored at `leak_den_floor`.
  static PrecoderSubproblemState from_design(const PrecoderSet& pre, const ChannelSet& ch,
                                             const RISProfile& ris, double leak_den_floor = 1e-9);
  /// Named expansion values used by the surrogates; throws on non-finite.
  ExpansionPoint expansion(double pt_linear, double rho_floor) const;
};

enum class PrecoderMode { spca, restoration };

/// Conic subproblem plus handles to every variable. Precoders are scaled
/// by 1/sqrt(P_t) inside the program so the power ball has unit radius.
struct PrecoderProgram {
  ConicProgram prog;
  double scale = 1.0;  // physical = scale * program value
  ComplexVarVec p_c;
  std::vector<ComplexVarVec> p, f;
  std::vector<int> alpha, gamma, rho_k, rho_ck, alpha_c, rho_cj, x_c, v, lam_c;
  std::vector<std::vector<int>> alpha_p, rho_kj, x_p, a, b, lam_p, xi;
  int r_sec = -1;
  int r_c = -1;
  int s = -1;  // restoration mode only
};

PrecoderProgram build_precoder_program(const PrecoderSubproblemState& state, const ChannelSet& ch,
                                       const RISProfile& ris, const ScenarioConfig& cfg,
                                       PrecoderMode mode, const PrecoderOptions& opt = {});

/// Reads the solved values into a new state (precoders rescaled onto the
/// power ball, shares projected onto the simplex).
PrecoderSubproblemState read_precoder_solution(const PrecoderProgram& pp, const ConicSolution& sol,
                                               double pt_linear);

struct PrecoderTraceRow {
  int iteration = 0;
  double r_sec = 0.0;
  double s = 0.0;
  SolveStatus status = SolveStatus::optimal;
};

enum class PrecoderOutcome { converged, iteration_cap, subproblem_failed };

struct RestorationResult {
  PrecoderSubproblemState state;  // feasible == (s <= 0)
  std::vector<PrecoderTraceRow> trace;
};

struct SpcaResult {
  PrecoderSubproblemState state;  // last successful iterate
  std::vector<PrecoderTraceRow> trace;
  PrecoderOutcome outcome = PrecoderOutcome::converged;
  int restarts = 0;
  bool ok() const { return outcome != PrecoderOutcome::subproblem_failed; }
};

/// Minimizes the infeasibility indicator from `init`.
RestorationResult fipsa(const ChannelSet& ch, const RISProfile& ris, const ScenarioConfig& cfg,
                        const PrecoderSubproblemState& init, const PrecoderOptions& opt = {});

/// Random precoders: isotropic complex Gaussian with power P_t/(K+J+1) per
/// stream, equal shares.
PrecoderSet random_precoders(const ChannelSet& ch, double pt_linear, std::uint64_t seed);

/// SPCA from a feasible `init`. On a failed subproblem, restoration is
/// restarted once from the last feasible iterate.
SpcaResult spca_precoders(const ChannelSet& ch, const RISProfile& ris, const ScenarioConfig& cfg,
                          const PrecoderSubproblemState& init, const PrecoderOptions& opt = {});

std::string precoder_trace_header();
void write_precoder_trace(std::ostream& os, const std::vector<PrecoderTraceRow>& rows);

}  // namespace star_swipt
