#include "doctest.h"

#include <sstream>

#include "star_swipt/precoder_opt.hpp"

using namespace star_swipt;

namespace {

ScenarioConfig small_config(int K, int J, int nt, int m, double nu) {
  ScenarioConfig cfg;
  cfg.n_ir = K;
  cfg.n_uer = J;
  cfg.n_tx = nt;
  cfg.n_ris = m;
  cfg.nu = nu;
  cfg.pt_db = 15.0;
  return cfg;
}

PrecoderProgram random_program(const ScenarioConfig& cfg, PrecoderMode mode) {
  const ChannelSet ch = synthesize_channels(cfg);
  const RISProfile ris = RISProfile::uniform(cfg.n_ris);
  const PrecoderSet pre = random_precoders(ch, cfg.pt_linear(), 3);
  return build_precoder_program(PrecoderSubproblemState::from_design(pre, ch, ris), ch, ris, cfg, mode);
}

// Constraint instances of the secrecy subproblem, by block:
//   power 1, simplex K + 1, sign constraints 1 + 3K + KJ + J,
//   secrecy K J^2 (every common/private UER pair), caps J + KJ,
//   per UER: common leakage 2 + robust + K + J, private leakage K (2 + robust) + 1,
//            energy 1 + K + J,
//   energy total 1, per IR: 4 rate rows + 1 common floor.
// A robust amplitude is one cone when nu = 0 and three rows otherwise.
int expected_constraints(int K, int J, bool robust) {
  const int amp = robust ? 3 : 1;
  const int per_uer = (2 + amp + K + J) + K * (2 + amp) + 1 + (1 + K + J);
  return 1 + (K + 1) + (1 + 3 * K + K * J + J) + K * J * J + (J + K * J) + J * per_uer + 1 + 5 * K;
}

}  // namespace

TEST_CASE("precoder program constraint count for one IR and one UER") {
  const ScenarioConfig cfg = small_config(1, 1, 2, 2, 1e-4);
  const PrecoderProgram pp = random_program(cfg, PrecoderMode::spca);
  CHECK(static_cast<int>(pp.prog.constraints().size()) == 34);
  CHECK(expected_constraints(1, 1, true) == 34);
  CHECK(pp.prog.count_labeled("secrecy") == 1);
  CHECK(pp.prog.count_labeled("leak_c.robust") == 3);
  CHECK(pp.prog.count_labeled("rate_") == 4);
}

TEST_CASE("precoder program constraint count scales with users") {
  for (auto [K, J] : {std::pair{2, 1}, std::pair{1, 2}, std::pair{2, 2}, std::pair{3, 2}}) {
    const ScenarioConfig cfg = small_config(K, J, 3, 4, 1e-4);
    const PrecoderProgram pp = random_program(cfg, PrecoderMode::spca);
    CHECK(static_cast<int>(pp.prog.constraints().size()) == expected_constraints(K, J, true));
    CHECK(pp.prog.count_labeled("secrecy") == K * J * J);
  }
}

TEST_CASE("restoration program drops secrecy rows and adds the indicator") {
  const ScenarioConfig cfg = small_config(2, 2, 3, 4, 1e-4);
  const PrecoderProgram pp = random_program(cfg, PrecoderMode::restoration);
  CHECK(pp.s >= 0);
  CHECK(pp.prog.count_labeled("secrecy") == 0);
  CHECK(pp.prog.count_labeled("restoration.") == 2);
  CHECK(static_cast<int>(pp.prog.constraints().size()) == expected_constraints(2, 2, true) - 8 + 2);
}

TEST_CASE("zero uncertainty collapses robust blocks to nominal ones") {
  const ScenarioConfig cfg = small_config(2, 2, 3, 4, 0.0);
  const PrecoderProgram pp = random_program(cfg, PrecoderMode::spca);
  CHECK(static_cast<int>(pp.prog.constraints().size()) == expected_constraints(2, 2, false));
  for (const auto& v : pp.prog.variables()) CHECK(v.name.find(".norm") == std::string::npos);
  // with no uncertainty every UER quadratic form is PSD, so its lower bound is affine
  for (const auto& c : pp.prog.constraints()) {
    if (c.label.rfind("energy.", 0) == 0 && c.label != "energy.total") CHECK(c.kind == ConeKind::nonneg);
    if (c.label.rfind("leak_c.interf", 0) == 0) CHECK(c.kind == ConeKind::nonneg);
  }
}

TEST_CASE("zero energy floor is met by zero energy slacks") {
  ScenarioConfig cfg = small_config(2, 2, 3, 4, 1e-4);
  cfg.e_th = 0.0;
  const PrecoderProgram pp = random_program(cfg, PrecoderMode::spca);
  const RVec zero = RVec::Zero(pp.prog.num_vars());
  int found = 0;
  for (const auto& c : pp.prog.constraints()) {
    if (c.label != "energy.total") continue;
    ++found;
    CHECK(c.rows[0].eval(zero) >= 0.0);
  }
  CHECK(found == 1);
}

TEST_CASE("precoder program rejects a mismatched state") {
  const ScenarioConfig cfg = small_config(2, 2, 3, 4, 1e-4);
  const ChannelSet ch = synthesize_channels(cfg);
  const RISProfile ris = RISProfile::uniform(cfg.n_ris);
  const PrecoderSet pre = random_precoders(ch, cfg.pt_linear(), 3);
  const auto st = PrecoderSubproblemState::from_design(pre, ch, ris);
  CHECK_THROWS_AS(build_precoder_program(st, ch, RISProfile::uniform(cfg.n_ris + 1), cfg, PrecoderMode::spca),
                  DimensionError);
  ScenarioConfig other = cfg;
  other.n_ir = 1;
  CHECK_THROWS_AS(build_precoder_program(st, synthesize_channels(other), RISProfile::uniform(cfg.n_ris), other,
                                         PrecoderMode::spca),
                  DimensionError);
}

TEST_CASE("random precoders split the power budget evenly") {
  const ScenarioConfig cfg = small_config(2, 2, 4, 6, 1e-4);
  const ChannelSet ch = synthesize_channels(cfg);
  const PrecoderSet pre = random_precoders(ch, cfg.pt_linear(), 11);
  const double per = cfg.pt_linear() / 5.0;
  CHECK(pre.p_c.squaredNorm() == doctest::Approx(per));
  for (const auto& v : pre.p) CHECK(v.squaredNorm() == doctest::Approx(per));
  for (const auto& v : pre.f) CHECK(v.squaredNorm() == doctest::Approx(per));
  CHECK(pre.power() == doctest::Approx(cfg.pt_linear()));
  CHECK(pre.alpha.sum() == doctest::Approx(1.0));
}

TEST_CASE("restoration then SPCA on the default scenario") {
  ScenarioConfig cfg;
  cfg.pt_db = 15.0;
  cfg.seed = 2;
  const ChannelSet ch = synthesize_channels(cfg);
  const RISProfile ris = RISProfile::uniform(cfg.n_ris);
  const auto init = PrecoderSubproblemState::from_design(random_precoders(ch, cfg.pt_linear(), 7), ch, ris);

  const RestorationResult fr = fipsa(ch, ris, cfg, init);
  REQUIRE(fr.state.feasible);
  CHECK(fr.state.s <= 0.0);
  CHECK(static_cast<int>(fr.trace.size()) <= PrecoderOptions{}.m_max);

  const SpcaResult sr = spca_precoders(ch, ris, cfg, fr.state);
  REQUIRE(sr.ok());
  REQUIRE(sr.state.history.size() >= 2);
  for (size_t i = 1; i < sr.state.history.size(); ++i) {
    CHECK(sr.state.history[i] >= sr.state.history[i - 1] - 1e-6);
  }
  if (sr.outcome == PrecoderOutcome::converged) {
    const auto& h = sr.state.history;
    CHECK(std::abs(h.back() - h[h.size() - 2]) < PrecoderOptions{}.delta_i);
  }

  const PrecoderSet& pre = sr.state.pre;
  CHECK(pre.power() <= cfg.pt_linear() + 1e-6);
  CHECK(pre.alpha.minCoeff() >= -1e-9);
  CHECK(pre.alpha.sum() == doctest::Approx(1.0).epsilon(1e-9));
  const RateReport rep = worst_case_secrecy(pre, ris, ch, 200, 5);
  CHECK(rep.energy_worst >= cfg.e_th - 1e-6);
  for (int k = 0; k < cfg.n_ir; ++k) CHECK(pre.alpha[k] * rep.r_c >= cfg.r_c_min - 1e-6);
  // the surrogate objective is a certified lower bound on the exact secrecy rate
  CHECK(rep.r_sec >= sr.state.r_sec - 1e-6);

  SUBCASE("an already feasible state needs one restoration step") {
    const RestorationResult again = fipsa(ch, ris, cfg, sr.state);
    CHECK(again.trace.size() == 1);
    CHECK(again.state.feasible);
  }

  SUBCASE("trace CSV has one row per iteration") {
    std::ostringstream os;
    write_precoder_trace(os, sr.trace);
    const std::string out = os.str();
    CHECK(out.rfind(precoder_trace_header() + "\n", 0) == 0);
    CHECK(std::count(out.begin(), out.end(), '\n') == static_cast<long>(sr.trace.size()) + 1);
  }
}

TEST_CASE("unreachable energy floor ends infeasible after restoration") {
  ScenarioConfig cfg;
  cfg.pt_db = 15.0;
  cfg.seed = 2;
  cfg.e_th = 1e6;
  const ChannelSet ch = synthesize_channels(cfg);
  const RISProfile ris = RISProfile::uniform(cfg.n_ris);
  const auto init = PrecoderSubproblemState::from_design(random_precoders(ch, cfg.pt_linear(), 7), ch, ris);
  PrecoderOptions opt;
  opt.m_max = 10;
  const RestorationResult fr = fipsa(ch, ris, cfg, init, opt);
  CHECK_FALSE(fr.state.feasible);
  CHECK(fr.state.s > 0.0);
  CHECK(static_cast<int>(fr.trace.size()) <= opt.m_max);
}

TEST_CASE("vanishing power gives vanishing secrecy rate") {
  ScenarioConfig cfg;
  cfg.pt_db = -40.0;
  cfg.seed = 2;
  cfg.e_th = 0.0;
  cfg.r_c_min = 0.0;
  const ChannelSet ch = synthesize_channels(cfg);
  const RISProfile ris = RISProfile::uniform(cfg.n_ris);
  const auto init = PrecoderSubproblemState::from_design(random_precoders(ch, cfg.pt_linear(), 7), ch, ris);
  const RestorationResult fr = fipsa(ch, ris, cfg, init);
  REQUIRE(fr.state.feasible);
  const SpcaResult sr = spca_precoders(ch, ris, cfg, fr.state);
  REQUIRE(sr.ok());
  CHECK(sr.state.r_sec < 1e-3);
  CHECK(worst_case_secrecy(sr.state.pre, ris, ch, 50, 1).r_sec < 1e-3);
}

TEST_CASE("SPCA is monotone with and without re-expansion at exact auxiliaries") {
  ScenarioConfig cfg;
  cfg.pt_db = 30.0;
  cfg.seed = 6;
  const ChannelSet ch = synthesize_channels(cfg);
  const RISProfile ris = RISProfile::uniform(cfg.n_ris);
  const auto init = PrecoderSubproblemState::from_design(random_precoders(ch, cfg.pt_linear(), 7), ch, ris);
  const RestorationResult fr = fipsa(ch, ris, cfg, init);
  REQUIRE(fr.state.feasible);
  for (bool tighten : {true, false}) {
    CAPTURE(tighten);
    PrecoderOptions opt;
    opt.tighten = tighten;
    opt.n_max = 10;
    const SpcaResult sr = spca_precoders(ch, ris, cfg, fr.state, opt);
    REQUIRE(sr.ok());
    const auto& h = sr.state.history;
    for (size_t i = 1; i < h.size(); ++i) CHECK(h[i] >= h[i - 1] - 1e-6);
    CHECK(worst_case_secrecy(sr.state.pre, ris, ch, 0, 0).r_sec >= h.back() - 1e-6);
  }
}

TEST_CASE("restoration solves every subproblem at large error radii") {
  for (double nu : {1e-3, 1e-2}) {
    CAPTURE(nu);
    ScenarioConfig cfg;
    cfg.seed = 1;
    cfg.nu = nu;
    const ChannelSet ch = synthesize_channels(cfg);
    const RISProfile ris = RISProfile::uniform(cfg.n_ris);
    const auto init =
        PrecoderSubproblemState::from_design(random_precoders(ch, cfg.pt_linear(), derive_seed(1, 1)), ch, ris);
    const RestorationResult fr = fipsa(ch, ris, cfg, init);
    REQUIRE_FALSE(fr.trace.empty());
    for (const auto& row : fr.trace) CHECK(row.status == SolveStatus::optimal);
    // at nu = 1e-2 the worst-case energy bound cannot reach the floor
    CHECK(fr.state.feasible == (nu < 5e-3));
    CHECK((fr.state.feasible || fr.state.s > 0.0));
  }
}
