#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "star_swipt/conic.hpp"
#include "star_swipt/rates.hpp"
#include "star_swipt/scenario.hpp"

namespace star_swipt {

struct RisOptions {
  double delta_p = 1e-2;    // rank-ratio tolerance
  double step0 = 0.1;       // initial relaxation step
  double step_min = 1e-6;   // give up on the rank relaxation below this step
  double obj_tol = 1e-3;    // objective change counted as converged
  int max_iter = 50;
  double solver_tol = 1e-7;
  bool verbose = false;
};

/// Per-stream effective vectors diag(g^H) H s for fixed precoders. Streams
/// are ordered [common, private 1..K, energy 1..J]; with v = conj(u) the
/// received amplitude of stream n is v^H hbar_n.
struct EffectiveVectors {
  std::vector<std::vector<CVec>> t;  // [k][n], IR side
  std::vector<std::vector<CVec>> r;  // [j][n], UER side, estimated channel
  std::vector<std::vector<CMat>> t_gram, r_gram;  // hbar hbar^H
  std::vector<RVec> stream_power;  // [n] |[H s_n]_m|^2, so ||diag(u) H s_n||^2 = Tr(V diag(.))
  std::vector<double> mu;          // [j] nu^2 + 2 nu ||g_hat_j||

  int n_streams() const { return t.empty() ? 0 : static_cast<int>(t[0].size()); }
};

EffectiveVectors effective_vectors(const ChannelSet& ch, const PrecoderSet& pre);

/// Lifted matrix v v^H of a profile side, v = conj(u).
CMat lift_profile(const CVec& u);

struct RISSubproblemState {
  CMat V_t, V_r;
  std::vector<double> A_c, B_c, A_p, B_p;  // [k] rate slacks evaluated at V_t
  double eps = 0.0;                        // rank relaxation parameter
  double step = 0.1;
  int iteration = 0;

  /// Slacks from the exact traces of the given matrices.
  static RISSubproblemState from_matrices(const CMat& V_t, const CMat& V_r, const EffectiveVectors& ev);
  static RISSubproblemState from_profile(const RISProfile& ris, const EffectiveVectors& ev);
};

/// Worst-case harvested energy bound summed over UERs and streams at a
/// lifted reflection matrix; the same bound the SDP enforces.
double energy_bound(const CMat& V_r, const EffectiveVectors& ev);

/// Exact sum rate min_k R_c,k + sum_k R_k at a lifted transmission matrix.
double matrix_sum_rate(const CMat& V_t, const EffectiveVectors& ev);

/// Largest eigenvalue over trace; 1 for a rank-one matrix.
double rank_ratio(const CMat& V);

struct RisProgram {
  ConicProgram prog;
  HermitianVar V_t, V_r;
  int r_c = -1;
  std::vector<int> gamma;
  std::vector<int> A_c, B_c, A_p, B_p;  // rate slacks divided by their expansion values
};

/// Sum-rate SDP around `state` with precoders and shares fixed. The rank
/// rows are omitted when state.eps == 0.
RisProgram build_ris_program(const RISSubproblemState& state, const EffectiveVectors& ev,
                             const RVec& alpha, const ScenarioConfig& cfg);

/// Profile from the principal eigenvectors, renormalized so the two power
/// splits of each element sum to one.
RISProfile extract_profile(const CMat& V_t, const CMat& V_r);

struct RisTraceRow {
  int iteration = 0;
  double objective = 0.0;
  double eps = 0.0;
  double step = 0.0;
  SolveStatus status = SolveStatus::optimal;
};

struct RisResult {
  RISProfile profile;   // extracted from the last solved iterate, or the input
  CMat V_t, V_r;
  double objective = 0.0;          // surrogate sum rate of the last solved iterate
  double matrix_sum_rate = 0.0;    // exact sum rate of the matrix iterate
  double profile_sum_rate = 0.0;   // exact sum rate after extraction
  std::vector<RisTraceRow> trace;
  bool solved = false;         // at least one subproblem succeeded
  bool rank_complete = false;  // rank ratio reached 1 - delta_p
};

/// Sequential rank-one relaxation started from `init`.
RisResult sequential_rank_one(const ChannelSet& ch, const PrecoderSet& pre, const ScenarioConfig& cfg,
                              const RISProfile& init, const RisOptions& opt = {});

std::string ris_trace_header();
void write_ris_trace(std::ostream& os, const std::vector<RisTraceRow>& rows);

}  // namespace star_swipt
