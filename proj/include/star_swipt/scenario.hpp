#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "star_swipt/config_file.hpp"
#include "star_swipt/rng.hpp"
#include "star_swipt/types.hpp"

namespace star_swipt {

/// Geometry, sizes, power budget and propagation parameters of one
/// STAR-RIS SWIPT downlink.
///
/// Powers are in dB against a common reference; the receiver noise power is
/// `noise_db` in that reference. All link-budget arithmetic downstream works
/// in noise-normalized units (unit noise power), so the linear transmit
/// power seen by the optimizers is 10^(pt_db/10) and the BS->RIS matrix is
/// scaled by 10^(-noise_db/20).
struct ScenarioConfig {
  int n_tx = 4;    // BS antennas
  int n_ris = 10;  // STAR-RIS elements
  int n_ir = 2;    // information receivers (transmission side)
  int n_uer = 2;   // untrusted energy receivers (reflection side)

  double pt_db = 25.0;
  double noise_db = -115.0;
  double e_th = 0.5;      // sum harvested energy floor, noise-normalized
  double r_c_min = 1.0;   // per-IR common-rate share floor, bit/s/Hz
  double nu = 1e-4;       // RIS->UER CSI error norm-ball radius

  Vec3 bs_pos{0.0, 0.0, 0.0};
  Vec3 ris_pos{400.0, 400.0, 150.0};
  double ir_offset = 30.0;   // disc centre distance from the RIS foot point
  double ir_radius = 20.0;
  double uer_offset = 30.0;
  double uer_radius = 20.0;

  double pl_los = 2.0;
  double pl_nlos = 3.5;
  double lambda1 = 9.61;
  double lambda2 = 0.16;
  double rician_k = 0.0;

  std::uint64_t seed = 1;

  /// Throws ConfigError on the first violated invariant.
  void validate() const;
  double pt_linear() const;
};

/// Assigns `kv` to the matching ScenarioConfig field. Returns false when
/// the key is not a scenario key; throws ConfigError on a bad value.
bool apply_scenario_key(ScenarioConfig& cfg, const KeyValue& kv);

/// Loads a config file holding scenario keys only.
ScenarioConfig load_scenario_config(const std::filesystem::path& path);

struct ChannelSet {
  CMat H;                     // M x N_T, BS -> RIS, noise-normalized
  std::vector<CVec> g_t;      // K vectors of length M, RIS -> IR
  std::vector<CVec> g_r_hat;  // J vectors of length M, RIS -> UER estimates
  double nu = 0.0;

  std::vector<Vec3> ir_pos;
  std::vector<Vec3> uer_pos;

  int n_tx() const { return static_cast<int>(H.cols()); }
  int n_ris() const { return static_cast<int>(H.rows()); }
  int n_ir() const { return static_cast<int>(g_t.size()); }
  int n_uer() const { return static_cast<int>(g_r_hat.size()); }

  /// Throws DimensionError / std::domain_error if shapes or values are bad.
  void validate() const;
};

/// Elevation-dependent path-loss exponent of the air-to-ground model.
/// `d` is the 3-D link length and `height` the vertical separation.
double path_loss_exponent(double d, double height, double los, double nlos,
                          double lambda1, double lambda2);

/// One fading vector of length n with per-entry mean power d^-alpha. With
/// rician_k > 0 the deterministic part `los` (unit-modulus entries) carries
/// K/(K+1) of the power.
CVec draw_link(Rng& rng, int n, double d, double alpha, double rician_k,
               const CVec& los);

/// Deterministic in cfg.seed.
ChannelSet synthesize_channels(const ScenarioConfig& cfg);

/// Uniform draw from the complex norm ball {dg : ||dg||_2 <= nu} of the
/// same dimension as g_hat.
CVec sample_uncertainty(const CVec& g_hat, double nu, Rng& rng);
CVec sample_uncertainty(const CVec& g_hat, double nu, std::uint64_t seed);

}  // namespace star_swipt
