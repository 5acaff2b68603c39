#include "star_swipt/ris_opt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "star_swipt/surrogates.hpp"

namespace star_swipt {

namespace {

// smallest received power used to form the rate slacks
constexpr double kTraceFloor = 1e-12;

std::string nm(const std::string& base, int i) { return base + "[" + std::to_string(i) + "]"; }
std::string nm(const std::string& base, int i, int j) {
  return base + "[" + std::to_string(i) + "," + std::to_string(j) + "]";
}

LinExpr X(int i) { return LinExpr::var(i); }

double quad(const CMat& V, const CVec& h) { return h.dot(V * h).real(); }

// First-order expansion of log2(1 + 1/(A B)) at (a0, b0) in the normalized
// variables a = A / a0 and b = B / b0, which equal one at the expansion point.
LinExpr rate_tangent(const LinExpr& a, const LinExpr& b, double a0, double b0) {
  const double g = -std::numbers::log2e / (1.0 + a0 * b0);
  return rate_from_ab(a0, b0) + g * (a - 1.0) + g * (b - 1.0);
}

}  // namespace

EffectiveVectors effective_vectors(const ChannelSet& ch, const PrecoderSet& pre) {
  const int K = ch.n_ir(), J = ch.n_uer();
  if (pre.n_ir() != K || pre.n_uer() != J || pre.n_tx() != ch.n_tx()) {
    throw DimensionError("effective_vectors: precoders do not match channel set");
  }
  const CMat HS = ch.H * pre.stream_matrix();  // M x streams
  const int ns = static_cast<int>(HS.cols());
  EffectiveVectors ev;
  ev.t.assign(K, std::vector<CVec>(ns));
  ev.t_gram.assign(K, std::vector<CMat>(ns));
  ev.r.assign(J, std::vector<CVec>(ns));
  ev.r_gram.assign(J, std::vector<CMat>(ns));
  ev.stream_power.resize(ns);
  ev.mu.resize(J);
  for (int j = 0; j < J; ++j) ev.mu[j] = robust_mu(ch.g_r_hat[j], ch.nu);
  for (int n = 0; n < ns; ++n) {
    const CVec hs = HS.col(n);
    ev.stream_power[n] = hs.cwiseAbs2();
    for (int k = 0; k < K; ++k) {
      ev.t[k][n] = ch.g_t[k].conjugate().cwiseProduct(hs);
      ev.t_gram[k][n] = ev.t[k][n] * ev.t[k][n].adjoint();
    }
    for (int j = 0; j < J; ++j) {
      ev.r[j][n] = ch.g_r_hat[j].conjugate().cwiseProduct(hs);
      ev.r_gram[j][n] = ev.r[j][n] * ev.r[j][n].adjoint();
    }
  }
  return ev;
}

CMat lift_profile(const CVec& u) {
  const CVec v = u.conjugate();
  return v * v.adjoint();
}

RISSubproblemState RISSubproblemState::from_matrices(const CMat& V_t, const CMat& V_r,
                                                     const EffectiveVectors& ev) {
  const int K = static_cast<int>(ev.t.size());
  if (V_t.rows() != V_r.rows() || (K > 0 && V_t.rows() != ev.t[0][0].size())) {
    throw DimensionError("RISSubproblemState: matrix size does not match RIS");
  }
  RISSubproblemState st;
  st.V_t = V_t;
  st.V_r = V_r;
  st.A_c.resize(K);
  st.B_c.resize(K);
  st.A_p.resize(K);
  st.B_p.resize(K);
  const int ns = ev.n_streams();
  for (int k = 0; k < K; ++k) {
    double interf_all = 0.0;
    for (int n = 1; n < ns; ++n) interf_all += std::max(0.0, quad(V_t, ev.t[k][n]));
    const double own = std::max(0.0, quad(V_t, ev.t[k][1 + k]));
    st.A_c[k] = 1.0 / std::max(kTraceFloor, quad(V_t, ev.t[k][0]));
    st.B_c[k] = interf_all + 1.0;
    st.A_p[k] = 1.0 / std::max(kTraceFloor, own);
    st.B_p[k] = interf_all - own + 1.0;
  }
  return st;
}

RISSubproblemState RISSubproblemState::from_profile(const RISProfile& ris, const EffectiveVectors& ev) {
  return from_matrices(lift_profile(ris.u_t()), lift_profile(ris.u_r()), ev);
}

double energy_bound(const CMat& V_r, const EffectiveVectors& ev) {
  const RVec d = V_r.diagonal().real();
  double e = 0.0;
  for (size_t j = 0; j < ev.r.size(); ++j) {
    for (size_t n = 0; n < ev.r[j].size(); ++n) {
      e += quad(V_r, ev.r[j][n]) - ev.mu[j] * d.dot(ev.stream_power[n]);
    }
  }
  return e;
}

double matrix_sum_rate(const CMat& V_t, const EffectiveVectors& ev) {
  const RISSubproblemState st = RISSubproblemState::from_matrices(V_t, V_t, ev);
  double rc = std::numeric_limits<double>::infinity(), sum = 0.0;
  for (size_t k = 0; k < st.A_c.size(); ++k) {
    rc = std::min(rc, rate_from_ab(st.A_c[k], st.B_c[k]));
    sum += rate_from_ab(st.A_p[k], st.B_p[k]);
  }
  return rc + sum;
}

double rank_ratio(const CMat& V) {
  const double tr = V.trace().real();
  if (tr <= 0.0) return 0.0;
  Eigen::SelfAdjointEigenSolver<CMat> es(V, Eigen::EigenvaluesOnly);
  return std::clamp(es.eigenvalues()(V.rows() - 1) / tr, 0.0, 1.0);
}

RisProgram build_ris_program(const RISSubproblemState& state, const EffectiveVectors& ev,
                             const RVec& alpha, const ScenarioConfig& cfg) {
  const int K = static_cast<int>(ev.t.size()), J = static_cast<int>(ev.r.size());
  const int M = static_cast<int>(state.V_t.rows());
  const int ns = ev.n_streams();
  if (alpha.size() != K || static_cast<int>(state.A_c.size()) != K || ns != 1 + K + J ||
      state.V_r.rows() != M || ev.t[0][0].size() != M) {
    throw DimensionError("build_ris_program: inconsistent sizes");
  }
  auto finite = [](double v) { return std::isfinite(v); };
  for (int k = 0; k < K; ++k) {
    if (!finite(state.A_c[k]) || !finite(state.B_c[k]) || !finite(state.A_p[k]) || !finite(state.B_p[k]) ||
        !finite(alpha[k])) {
      throw std::domain_error("build_ris_program: non-finite expansion point");
    }
  }
  if (!state.V_t.allFinite() || !state.V_r.allFinite()) {
    throw std::domain_error("build_ris_program: non-finite matrix iterate");
  }

  RisProgram rp;
  ConicProgram& P = rp.prog;
  rp.V_t = P.add_hermitian("V_t", M);
  rp.V_r = P.add_hermitian("V_r", M);
  rp.r_c = P.add_var("r_c");
  rp.gamma = P.add_vars("gamma", K);
  rp.A_c = P.add_vars("A_c", K);
  rp.B_c = P.add_vars("B_c", K);
  rp.A_p = P.add_vars("A_p", K);
  rp.B_p = P.add_vars("B_p", K);

  P.add_hermitian_psd(rp.V_t, "psd.t");
  P.add_hermitian_psd(rp.V_r, "psd.r");
  for (int m = 0; m < M; ++m) {
    P.add_equal(X(rp.V_t.diag_index(m)) + X(rp.V_r.diag_index(m)), 1.0, nm("coupling", m));
  }

  for (int k = 0; k < K; ++k) {
    LinExpr interf_all = 1.0;
    for (int n = 1; n < ns; ++n) interf_all += rp.V_t.re_trace_product(ev.t_gram[k][n]);
    const LinExpr own = rp.V_t.re_trace_product(ev.t_gram[k][1 + k]);

    // 1/A <= received power, B >= interference plus noise
    const double ac0 = state.A_c[k], bc0 = state.B_c[k], ap0 = state.A_p[k], bp0 = state.B_p[k];
    P.add_rotated({LinExpr(1.0)}, X(rp.A_c[k]), ac0 * rp.V_t.re_trace_product(ev.t_gram[k][0]),
                  nm("common_gain", k));
    P.add_geq(X(rp.B_c[k]), (1.0 / bc0) * interf_all, nm("common_interf", k));
    P.add_geq(rate_tangent(X(rp.A_c[k]), X(rp.B_c[k]), ac0, bc0), X(rp.r_c), nm("common_rate", k));

    P.add_rotated({LinExpr(1.0)}, X(rp.A_p[k]), ap0 * own, nm("private_gain", k));
    P.add_geq(X(rp.B_p[k]), (1.0 / bp0) * (interf_all - own), nm("private_interf", k));
    P.add_geq(rate_tangent(X(rp.A_p[k]), X(rp.B_p[k]), ap0, bp0), X(rp.gamma[k]), nm("private_rate", k));

    P.add_geq(alpha[k] * X(rp.r_c), cfg.r_c_min, nm("common_floor", k));
  }

  // worst-case harvested energy: with x = diag(u_r) H s and ||e|| <= nu,
  // |(g + e)^H x|^2 >= |g^H x|^2 - mu ||x||^2 and ||x||^2 = sum_m V_mm |[H s]_m|^2
  LinExpr energy_total;
  for (int j = 0; j < J; ++j) {
    for (int n = 0; n < ns; ++n) {
      LinExpr spread;
      for (int m = 0; m < M; ++m) spread += LinExpr::var(rp.V_r.diag_index(m), ev.stream_power[n][m]);
      const double mu = ev.mu[j];
      const int lam = P.add_var(nm("energy_slack", j, n));
      energy_total += X(lam);
      const std::string label = n == 0       ? nm("energy.common", j)
                                : n <= K     ? nm("energy.private", j, n - 1)
                                             : nm("energy.stream", j, n - 1 - K);
      P.add_geq(rp.V_r.re_trace_product(ev.r_gram[j][n]) - mu * spread, X(lam), label);
    }
  }
  P.add_geq(energy_total, cfg.e_th, "energy.total");

  // e^H V e >= eps Tr V with e the principal eigenvector of the previous iterate
  if (state.eps > 0.0) {
    auto rank_row = [&](const HermitianVar& V, const CMat& prev, const std::string& label) {
      Eigen::SelfAdjointEigenSolver<CMat> es(prev);
      const CVec e = es.eigenvectors().col(M - 1);
      P.add_geq(V.re_trace_product(e * e.adjoint()), state.eps * V.trace(), label);
    };
    rank_row(rp.V_t, state.V_t, "rank.t");
    rank_row(rp.V_r, state.V_r, "rank.r");
  }

  LinExpr obj = X(rp.r_c);
  for (int k = 0; k < K; ++k) obj += X(rp.gamma[k]);
  P.maximize(obj);
  return rp;
}

RISProfile extract_profile(const CMat& V_t, const CMat& V_r) {
  const int M = static_cast<int>(V_t.rows());
  if (V_r.rows() != M) throw DimensionError("extract_profile: size mismatch");
  auto principal = [](const CMat& V) -> CVec {
    Eigen::SelfAdjointEigenSolver<CMat> es(V);
    const int n = static_cast<int>(V.rows());
    return std::sqrt(std::max(0.0, es.eigenvalues()(n - 1))) * es.eigenvectors().col(n - 1);
  };
  const CVec vt = principal(V_t), vr = principal(V_r);
  RISProfile r = RISProfile::uniform(M);
  for (int m = 0; m < M; ++m) {
    const double bt = std::norm(vt[m]), br = std::norm(vr[m]);
    const double sum = bt + br;
    r.beta_t[m] = sum > 0.0 ? bt / sum : 0.5;
    r.beta_r[m] = 1.0 - r.beta_t[m];
    // v = conj(u), so the element phase is -arg(v)
    r.theta_t[m] = vt[m] == cplx(0.0) ? 0.0 : std::remainder(-std::arg(vt[m]), 2.0 * std::numbers::pi);
    r.theta_r[m] = vr[m] == cplx(0.0) ? 0.0 : std::remainder(-std::arg(vr[m]), 2.0 * std::numbers::pi);
    if (r.theta_t[m] < 0.0) r.theta_t[m] += 2.0 * std::numbers::pi;
    if (r.theta_r[m] < 0.0) r.theta_r[m] += 2.0 * std::numbers::pi;
  }
  return r;
}

RisResult sequential_rank_one(const ChannelSet& ch, const PrecoderSet& pre, const ScenarioConfig& cfg,
                              const RISProfile& init, const RisOptions& opt) {
  const EffectiveVectors ev = effective_vectors(ch, pre);
  RISSubproblemState state = RISSubproblemState::from_profile(init, ev);
  state.eps = 0.0;
  state.step = opt.step0;

  RisResult res;
  res.profile = init;
  res.V_t = state.V_t;
  res.V_r = state.V_r;

  // eps = 1 leaves the rank rows without an interior; stop short of it
  // while staying inside the rank tolerance
  const double eps_max = 1.0 - 0.1 * opt.delta_p;
  double prev = matrix_sum_rate(state.V_t, ev);
  CMat last_t = state.V_t, last_r = state.V_r;

  for (int l = 1; l <= opt.max_iter; ++l) {
    const RisProgram rp = build_ris_program(state, ev, pre.alpha, cfg);
    const ConicSolution sol = rp.prog.solve(opt.solver_tol, opt.verbose);
    if (!sol.ok()) {
      res.trace.push_back({l, res.objective, state.eps, state.step, sol.status});
      // without a rank row the failure is not caused by the relaxation
      if (state.eps == 0.0) break;
      state.step *= 0.5;
      if (state.step < opt.step_min) break;
      state.eps = std::min(eps_max, std::min(rank_ratio(last_t), rank_ratio(last_r)) + state.step);
      continue;
    }
    const CMat Vt = sol.value(rp.V_t), Vr = sol.value(rp.V_r);
    const double obj = sol.objective;
    res.solved = true;
    res.objective = obj;
    res.V_t = Vt;
    res.V_r = Vr;
    res.trace.push_back({l, obj, state.eps, state.step, sol.status});
    last_t = Vt;
    last_r = Vr;

    const double ratio = std::min(rank_ratio(Vt), rank_ratio(Vr));
    const bool rank_ok = ratio >= 1.0 - opt.delta_p;
    const bool flat = std::abs(obj - prev) <= opt.obj_tol * std::max(1.0, std::abs(obj));
    prev = obj;
    const double step = state.step;
    const double eps = std::min(eps_max, ratio + step);
    state = RISSubproblemState::from_matrices(Vt, Vr, ev);
    state.step = step;
    state.eps = eps;
    state.iteration = l;
    res.rank_complete = rank_ok;
    if (rank_ok && flat) break;
  }
  if (res.solved) res.profile = extract_profile(res.V_t, res.V_r);
  res.matrix_sum_rate = matrix_sum_rate(res.V_t, ev);
  res.profile_sum_rate = matrix_sum_rate(lift_profile(res.profile.u_t()), ev);
  return res;
}

std::string ris_trace_header() { return "iteration,objective,eps,delta,solver_status"; }

void write_ris_trace(std::ostream& os, const std::vector<RisTraceRow>& rows) {
  os << ris_trace_header() << "\n";
  for (const auto& r : rows) {
    os << r.iteration << "," << format_double(r.objective) << "," << format_double(r.eps) << ","
       << format_double(r.step) << "," << to_string(r.status) << "\n";
  }
}

}  // namespace star_swipt
