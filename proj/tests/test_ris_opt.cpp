#include "doctest.h"

#include <cmath>
#include <numbers>
#include <sstream>

#include "star_swipt/precoder_opt.hpp"
#include "star_swipt/ris_opt.hpp"
#include "star_swipt/rng.hpp"

using namespace star_swipt;

namespace {

ScenarioConfig tiny_config(int m) {
  ScenarioConfig cfg;
  cfg.n_tx = 2;
  cfg.n_ris = m;
  cfg.n_ir = 1;
  cfg.n_uer = 1;
  cfg.pt_db = 25.0;
  return cfg;
}

RISProfile random_profile(Rng& rng, int m) {
  RISProfile r = RISProfile::uniform(m);
  for (int i = 0; i < m; ++i) {
    r.beta_t[i] = rng.uniform();
    r.beta_r[i] = 1.0 - r.beta_t[i];
    r.theta_t[i] = 2.0 * std::numbers::pi * rng.uniform();
    r.theta_r[i] = 2.0 * std::numbers::pi * rng.uniform();
  }
  return r;
}

// Optimized precoders for the default scenario at 15 dB.
struct Solved {
  ScenarioConfig cfg;
  ChannelSet ch;
  PrecoderSet pre;
};

Solved solved_default(std::uint64_t seed) {
  Solved s;
  s.cfg.pt_db = 15.0;
  s.cfg.seed = seed;
  s.ch = synthesize_channels(s.cfg);
  const RISProfile ris = RISProfile::uniform(s.cfg.n_ris);
  const auto init =
      PrecoderSubproblemState::from_design(random_precoders(s.ch, s.cfg.pt_linear(), 7), s.ch, ris);
  const RestorationResult fr = fipsa(s.ch, ris, s.cfg, init);
  REQUIRE(fr.state.feasible);
  const SpcaResult sr = spca_precoders(s.ch, ris, s.cfg, fr.state);
  REQUIRE(sr.ok());
  s.pre = sr.state.pre;
  return s;
}

}  // namespace

TEST_CASE("effective vectors reproduce the combined channel") {
  ScenarioConfig cfg;
  const ChannelSet ch = synthesize_channels(cfg);
  Rng rng(5);
  const PrecoderSet pre = random_precoders(ch, cfg.pt_linear(), 2);
  const RISProfile ris = random_profile(rng, cfg.n_ris);
  const EffectiveVectors ev = effective_vectors(ch, pre);
  const CVec vt = ris.u_t().conjugate(), vr = ris.u_r().conjugate();
  const CMat S = pre.stream_matrix();
  for (int k = 0; k < cfg.n_ir; ++k) {
    const CRow h = combined_channel(ch.g_t[k], ris.u_t(), ch.H);
    for (int n = 0; n < S.cols(); ++n) {
      const cplx direct = (h * S.col(n))(0);
      CHECK(std::abs(vt.dot(ev.t[k][n]) - direct) < 1e-12 * (1.0 + std::abs(direct)));
      CHECK(std::abs(ev.t[k][n].dot(lift_profile(ris.u_t()) * ev.t[k][n]).real() - std::norm(direct)) <
            1e-9 * (1.0 + std::norm(direct)));
    }
  }
  for (int j = 0; j < cfg.n_uer; ++j) {
    const CRow h = combined_channel(ch.g_r_hat[j], ris.u_r(), ch.H);
    for (int n = 0; n < S.cols(); ++n) {
      const cplx direct = (h * S.col(n))(0);
      CHECK(std::abs(vr.dot(ev.r[j][n]) - direct) < 1e-12 * (1.0 + std::abs(direct)));
    }
  }
}

TEST_CASE("effective vectors by hand for two elements") {
  ChannelSet ch;
  ch.H = CMat(2, 1);
  ch.H << cplx(1, 0), cplx(0, 2);
  ch.g_t = {CVec(2)};
  ch.g_t[0] << cplx(1, 1), cplx(3, 0);
  ch.g_r_hat = {CVec(2)};
  ch.g_r_hat[0] << cplx(0, 1), cplx(1, 0);
  ch.nu = 0.5;
  PrecoderSet pre = PrecoderSet::zeros(1, 1, 1);
  pre.p_c << cplx(2, 0);
  const EffectiveVectors ev = effective_vectors(ch, pre);
  // conj(g) .* (H p): (1-i)*2 = 2-2i, 3*(4i) = 12i
  CHECK(std::abs(ev.t[0][0][0] - cplx(2, -2)) < 1e-15);
  CHECK(std::abs(ev.t[0][0][1] - cplx(0, 12)) < 1e-15);
  // (-i)*2 = -2i, 1*(4i) = 4i
  CHECK(std::abs(ev.r[0][0][0] - cplx(0, -2)) < 1e-15);
  CHECK(std::abs(ev.r[0][0][1] - cplx(0, 4)) < 1e-15);
  CHECK(ev.stream_power[0][0] == doctest::Approx(4.0));
  CHECK(ev.stream_power[0][1] == doctest::Approx(16.0));
  CHECK(ev.mu[0] == doctest::Approx(0.25 + 2.0 * 0.5 * std::sqrt(2.0)));
  // zero private and energy precoders give zero vectors
  CHECK(ev.t[0][1].norm() == 0.0);
  CHECK(ev.r[0][2].norm() == 0.0);
  CHECK(ev.t_gram[0][0](1, 0) == ev.t[0][0][1] * std::conj(ev.t[0][0][0]));
}

TEST_CASE("RIS program structure") {
  const ScenarioConfig cfg = tiny_config(2);
  const ChannelSet ch = synthesize_channels(cfg);
  const PrecoderSet pre = random_precoders(ch, cfg.pt_linear(), 2);
  const EffectiveVectors ev = effective_vectors(ch, pre);
  RISSubproblemState st = RISSubproblemState::from_profile(RISProfile::uniform(2), ev);

  // psd 2, coupling M, per IR 7 rows, energy (1 + K + J) J + 1
  st.eps = 0.0;
  RisProgram rp = build_ris_program(st, ev, pre.alpha, cfg);
  CHECK(rp.prog.constraints().size() == 2 + 2 + 7 + 3 + 1);
  CHECK(rp.prog.count_labeled("rank.") == 0);

  st.eps = 0.5;
  rp = build_ris_program(st, ev, pre.alpha, cfg);
  CHECK(rp.prog.constraints().size() == 2 + 2 + 7 + 3 + 1 + 2);
  CHECK(rp.prog.count_labeled("rank.") == 2);

  st.A_c[0] = std::nan("");
  CHECK_THROWS_AS(build_ris_program(st, ev, pre.alpha, cfg), std::domain_error);
}

TEST_CASE("slack state from a lifted profile matches the exact rates") {
  ScenarioConfig cfg;
  const ChannelSet ch = synthesize_channels(cfg);
  Rng rng(8);
  const PrecoderSet pre = random_precoders(ch, cfg.pt_linear(), 4);
  const RISProfile ris = random_profile(rng, cfg.n_ris);
  const EffectiveVectors ev = effective_vectors(ch, pre);
  const RISSubproblemState st = RISSubproblemState::from_profile(ris, ev);
  const RateReport rep = worst_case_secrecy(pre, ris, ch, 0, 1);
  for (int k = 0; k < cfg.n_ir; ++k) {
    CHECK(rate_from_ab(st.A_c[k], st.B_c[k]) == doctest::Approx(rep.r_ck[k]).epsilon(1e-9));
    CHECK(rate_from_ab(st.A_p[k], st.B_p[k]) == doctest::Approx(rep.r_k[k]).epsilon(1e-9));
  }
  CHECK(matrix_sum_rate(st.V_t, ev) == doctest::Approx(rep.sum_rate).epsilon(1e-9));
  CHECK(rank_ratio(st.V_t) == doctest::Approx(1.0));
}

TEST_CASE("extraction recovers a rank-one profile up to a global phase") {
  Rng rng(21);
  const RISProfile ris = random_profile(rng, 6);
  const RISProfile out = extract_profile(lift_profile(ris.u_t()), lift_profile(ris.u_r()));
  out.validate();
  for (int m = 0; m < 6; ++m) {
    CHECK(out.beta_t[m] == doctest::Approx(ris.beta_t[m]).epsilon(1e-9));
    CHECK(out.beta_t[m] + out.beta_r[m] == 1.0);
  }
  // phase differences relative to element 0 are preserved
  auto rel = [](const RVec& th, int m) { return std::polar(1.0, th[m] - th[0]); };
  for (int m = 1; m < 6; ++m) {
    CHECK(std::abs(rel(out.theta_t, m) - rel(ris.theta_t, m)) < 1e-8);
    CHECK(std::abs(rel(out.theta_r, m) - rel(ris.theta_r, m)) < 1e-8);
  }
}

TEST_CASE("extraction of the symmetric half identity") {
  const CMat half = 0.5 * CMat::Identity(4, 4);
  const RISProfile out = extract_profile(half, half);
  out.validate();
  for (int m = 0; m < 4; ++m) {
    CHECK(out.beta_t[m] == doctest::Approx(0.5));
    CHECK(out.beta_r[m] == doctest::Approx(0.5));
  }
}

TEST_CASE("near rank-one matrices extract with small objective loss") {
  ScenarioConfig cfg;
  const ChannelSet ch = synthesize_channels(cfg);
  Rng rng(33);
  const PrecoderSet pre = random_precoders(ch, cfg.pt_linear(), 9);
  const EffectiveVectors ev = effective_vectors(ch, pre);
  for (int trial = 0; trial < 5; ++trial) {
    const RISProfile ris = random_profile(rng, cfg.n_ris);
    CVec w(cfg.n_ris);
    for (int m = 0; m < cfg.n_ris; ++m) w[m] = rng.complex_normal();
    w.normalize();
    const CMat Vt = lift_profile(ris.u_t()) + 1e-4 * w * w.adjoint();
    const CMat Vr = lift_profile(ris.u_r()) + 1e-4 * w * w.adjoint();
    const RISProfile out = extract_profile(Vt, Vr);
    out.validate();
    const double before = matrix_sum_rate(Vt, ev);
    const double after = matrix_sum_rate(lift_profile(out.u_t()), ev);
    CHECK(after >= 0.99 * before);
  }
}

TEST_CASE("single element surface is rank one after the first solve") {
  ScenarioConfig cfg = tiny_config(1);
  cfg.e_th = 0.0;
  cfg.r_c_min = 0.0;
  const ChannelSet ch = synthesize_channels(cfg);
  const PrecoderSet pre = random_precoders(ch, cfg.pt_linear(), 2);
  const RisResult res = sequential_rank_one(ch, pre, cfg, RISProfile::uniform(1));
  REQUIRE(res.solved);
  REQUIRE(res.trace.size() >= 2);
  CHECK(res.trace[1].eps == doctest::Approx(1.0 - 0.1 * RisOptions{}.delta_p));
  CHECK(rank_ratio(res.V_t) == 1.0);
  CHECK(res.rank_complete);
  res.profile.validate();
}

TEST_CASE("sequential rank-one relaxation on the default scenario") {
  const Solved s = solved_default(3);
  const RISProfile init = RISProfile::uniform(s.cfg.n_ris);
  const RisResult res = sequential_rank_one(s.ch, s.pre, s.cfg, init);
  REQUIRE(res.solved);
  CHECK(res.rank_complete);
  CHECK(rank_ratio(res.V_t) >= 1.0 - RisOptions{}.delta_p);
  CHECK(rank_ratio(res.V_r) >= 1.0 - RisOptions{}.delta_p);
  res.profile.validate();
  CHECK(res.profile_sum_rate >= 0.95 * res.matrix_sum_rate);
  // the surrogate objective never exceeds the exact matrix value
  CHECK(res.objective <= res.matrix_sum_rate + 1e-6);

  double eps = 0.0;
  for (const auto& row : res.trace) {
    if (row.status != SolveStatus::optimal && row.status != SolveStatus::near_optimal) continue;
    CHECK(row.eps >= eps);
    eps = row.eps;
  }

  // the energy bound at the extracted profile is below every sampled energy
  const EffectiveVectors ev = effective_vectors(s.ch, s.pre);
  const RateReport rep = worst_case_secrecy(s.pre, res.profile, s.ch, 1000, 4);
  CHECK(rep.energy_sampled >= energy_bound(lift_profile(res.profile.u_r()), ev) - 1e-9);

  std::ostringstream os;
  write_ris_trace(os, res.trace);
  CHECK(os.str().rfind(ris_trace_header() + "\n", 0) == 0);
}
