#include "star_swipt/precoder_opt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "star_swipt/rng.hpp"

namespace star_swipt {

namespace {

std::string nm(const std::string& base, int i) { return base + "[" + std::to_string(i) + "]"; }
std::string nm(const std::string& base, int i, int j) {
  return base + "[" + std::to_string(i) + "," + std::to_string(j) + "]";
}
std::string nm(const std::string& base, int i, int j, int l) {
  return base + "[" + std::to_string(i) + "," + std::to_string(j) + "," + std::to_string(l) + "]";
}

LinExpr X(int i) { return LinExpr::var(i); }

/// row * x for a constant complex row and complex vector variable.
CLin row_times(const CRow& row, const ComplexVarVec& x) { return dotu(row.transpose(), x.exprs()); }

/// Re{conj(w) z}
LinExpr re_conj_times(cplx w, const CLin& z) { return w.real() * z.re + w.imag() * z.im; }

template <class T>
std::vector<std::vector<T>> grid(int rows, int cols, T v = T{}) {
  return std::vector<std::vector<T>>(rows, std::vector<T>(cols, v));
}

}  // namespace

PrecoderSubproblemState PrecoderSubproblemState::from_design(const PrecoderSet& pre,
                                                             const ChannelSet& ch,
                                                             const RISProfile& ris,
                                                             double leak_den_floor) {
  const int K = ch.n_ir(), J = ch.n_uer();
  if (pre.n_ir() != K || pre.n_uer() != J || pre.n_tx() != ch.n_tx() || ris.size() != ch.n_ris()) {
    throw DimensionError("from_design: design does not match channel set");
  }
  PrecoderSubproblemState st;
  st.pre = pre;
  st.gamma.resize(K);
  st.rho_k.resize(K);
  st.rho_ck.resize(K);
  const CVec ut = ris.u_t(), ur = ris.u_r();
  st.r_c = std::numeric_limits<double>::infinity();
  for (int k = 0; k < K; ++k) {
    const IrSinr s = ir_sinrs(pre, combined_channel(ch.g_t[k], ut, ch.H), k);
    st.rho_ck[k] = s.common;
    st.rho_k[k] = s.priv;
    st.gamma[k] = std::log2(1.0 + s.priv);
    st.r_c = std::min(st.r_c, std::log2(1.0 + s.common));
  }
  const CMat streams = ur.asDiagonal() * (ch.H * pre.stream_matrix());
  st.alpha_c.resize(J);
  st.rho_cj.resize(J);
  st.x_c.resize(J);
  st.v.resize(J);
  st.lam_c.resize(J);
  st.alpha_p = grid<double>(K, J);
  st.rho_kj = grid<double>(K, J);
  st.x_p = grid<double>(K, J);
  st.a = grid<double>(J, K);
  st.lam_p = grid<double>(J, K);
  st.b = grid<double>(J, J);
  st.xi = grid<double>(J, J);
  for (int j = 0; j < J; ++j) {
    const CVec& g = ch.g_r_hat[j];
    auto lo = [&](int n) { return robust_sq_min(g, streams.col(n), ch.nu); };
    auto hi = [&](int n) { return robust_abs_max(g, streams.col(n), ch.nu); };
    st.v[j] = st.lam_c[j] = lo(0);
    double sum_a = 0.0, sum_b = 0.0;
    for (int k = 0; k < K; ++k) sum_a += st.a[j][k] = st.lam_p[j][k] = lo(1 + k);
    for (int jj = 0; jj < J; ++jj) sum_b += st.b[j][jj] = st.xi[j][jj] = lo(1 + K + jj);
    st.x_c[j] = hi(0);
    const double den_c = std::max(sum_a + sum_b + 1.0, leak_den_floor);
    st.rho_cj[j] = st.x_c[j] * st.x_c[j] / den_c;
    st.alpha_c[j] = std::log2(1.0 + st.rho_cj[j]);
    for (int k = 0; k < K; ++k) {
      st.x_p[k][j] = hi(1 + k);
      const double den = std::max(st.v[j] + sum_a - st.a[j][k] + sum_b + 1.0, leak_den_floor);
      st.rho_kj[k][j] = st.x_p[k][j] * st.x_p[k][j] / den;
      st.alpha_p[k][j] = std::log2(1.0 + st.rho_kj[k][j]);
    }
  }
  st.r_sec = std::numeric_limits<double>::infinity();
  for (int k = 0; k < K; ++k)
    for (int j = 0; j < J; ++j)
      st.r_sec = std::min(st.r_sec, pre.alpha[k] * (st.r_c - st.alpha_c[j]) + st.gamma[k] -
                                        st.alpha_p[k][j]);
  return st;
}

ExpansionPoint PrecoderSubproblemState::expansion(double pt_linear, double rho_floor) const {
  const double inv = 1.0 / std::sqrt(pt_linear);
  ExpansionPoint ep;
  const int K = pre.n_ir(), J = pre.n_uer();
  ep.set("r_c", r_c);
  ep.set("p_c", CVec(inv * pre.p_c));
  for (int k = 0; k < K; ++k) {
    ep.set(nm("alpha", k), pre.alpha[k]);
    ep.set(nm("rho_k", k), std::max(rho_k[k], rho_floor));
    ep.set(nm("rho_ck", k), std::max(rho_ck[k], rho_floor));
    ep.set(nm("p", k), CVec(inv * pre.p[k]));
    for (int j = 0; j < J; ++j) ep.set(nm("alpha_p", k, j), alpha_p[k][j]);
  }
  for (int j = 0; j < J; ++j) {
    ep.set(nm("alpha_c", j), alpha_c[j]);
    ep.set(nm("f", j), CVec(inv * pre.f[j]));
  }
  ep.validate();
  return ep;
}

PrecoderProgram build_precoder_program(const PrecoderSubproblemState& state, const ChannelSet& ch,
                                       const RISProfile& ris, const ScenarioConfig& cfg,
                                       PrecoderMode mode, const PrecoderOptions& opt) {
  const int K = ch.n_ir(), J = ch.n_uer(), N = ch.n_tx(), M = ch.n_ris();
  if (state.pre.n_ir() != K || state.pre.n_uer() != J || state.pre.n_tx() != N ||
      ris.size() != M || static_cast<int>(state.alpha_p.size()) != K ||
      static_cast<int>(state.alpha_c.size()) != J) {
    throw DimensionError("build_precoder_program: state does not match channel set");
  }
  const double pt = cfg.pt_linear();
  const double sq = std::sqrt(pt);
  const ExpansionPoint ep = state.expansion(pt, opt.rho_floor);
  const double ln2 = std::numbers::ln2;

  PrecoderProgram pp;
  pp.scale = sq;
  ConicProgram& P = pp.prog;
  pp.p_c = P.add_complex("p_c", N);
  for (int k = 0; k < K; ++k) pp.p.push_back(P.add_complex(nm("p", k), N));
  for (int j = 0; j < J; ++j) pp.f.push_back(P.add_complex(nm("f", j), N));
  pp.alpha = P.add_vars("alpha", K);
  pp.r_sec = P.add_var("r_sec");
  pp.r_c = P.add_var("r_c");
  pp.gamma = P.add_vars("gamma", K);
  pp.rho_k = P.add_vars("rho_k", K);
  pp.rho_ck = P.add_vars("rho_ck", K);
  pp.alpha_c = P.add_vars("alpha_c", J);
  pp.rho_cj = P.add_vars("rho_cj", J);
  pp.x_c = P.add_vars("x_c", J);
  pp.v = P.add_vars("v", J);
  pp.lam_c = P.add_vars("lam_c", J);
  for (int k = 0; k < K; ++k) {
    pp.alpha_p.push_back(P.add_vars(nm("alpha_p", k), J));
    pp.rho_kj.push_back(P.add_vars(nm("rho_kj", k), J));
    pp.x_p.push_back(P.add_vars(nm("x_p", k), J));
  }
  for (int j = 0; j < J; ++j) {
    pp.a.push_back(P.add_vars(nm("a", j), K));
    pp.lam_p.push_back(P.add_vars(nm("lam_p", j), K));
    pp.b.push_back(P.add_vars(nm("b", j), J));
    pp.xi.push_back(P.add_vars(nm("xi", j), J));
  }
  LinExpr shift;
  if (mode == PrecoderMode::restoration) {
    pp.s = P.add_var("s");
    shift = X(pp.s);
  }

  // channels in program units
  const CVec ut = ris.u_t(), ur = ris.u_r();
  std::vector<CRow> h(K);
  for (int k = 0; k < K; ++k) h[k] = sq * combined_channel(ch.g_t[k], ut, ch.H);
  const CMat B = sq * (ur.asDiagonal() * ch.H);
  std::vector<CRow> c(J);
  std::vector<PsdSplit> split(J);
  for (int j = 0; j < J; ++j) {
    c[j] = ch.g_r_hat[j].adjoint() * B;
    const double mu = robust_mu(ch.g_r_hat[j], ch.nu);
    split[j] = psd_split(CMat(c[j].adjoint() * c[j] - mu * B.adjoint() * B));
  }

  std::vector<std::pair<const ComplexVarVec*, std::string>> streams;
  streams.emplace_back(&pp.p_c, "p_c");
  for (int k = 0; k < K; ++k) streams.emplace_back(&pp.p[k], nm("p", k));
  for (int j = 0; j < J; ++j) streams.emplace_back(&pp.f[j], nm("f", j));

  // total power on the unit ball
  {
    std::vector<LinExpr> all;
    for (const auto& [x, name] : streams) {
      auto fl = flatten(x->exprs());
      all.insert(all.end(), fl.begin(), fl.end());
    }
    P.add_soc(LinExpr(1.0), all, "power");
  }

  // common-rate shares on the simplex
  {
    LinExpr sum;
    for (int k = 0; k < K; ++k) {
      sum += X(pp.alpha[k]);
      P.add_nonneg(X(pp.alpha[k]), nm("shares.nonneg", k));
    }
    P.add_equal(sum, 1.0, "shares.sum");
  }

  // nonnegative auxiliaries
  P.add_nonneg(X(pp.r_c), "slack.r_c");
  for (int k = 0; k < K; ++k) {
    P.add_nonneg(X(pp.gamma[k]), nm("slack.gamma", k));
    P.add_nonneg(X(pp.rho_k[k]), nm("slack.rho_k", k));
    P.add_nonneg(X(pp.rho_ck[k]), nm("slack.rho_ck", k));
    for (int j = 0; j < J; ++j) P.add_nonneg(X(pp.alpha_p[k][j]), nm("slack.alpha_p", k, j));
  }
  for (int j = 0; j < J; ++j) P.add_nonneg(X(pp.alpha_c[j]), nm("slack.alpha_c", j));

  // secrecy lower bound: alpha_k (R_c - alpha_c,j) + gamma_k - alpha_p,k,jj >= r_sec.
  // The common and private worst cases may sit at different UERs, so every
  // pair (j, jj) is bounded.
  const double r0 = ep.scalar("r_c");
  for (int k = 0; k < K && mode == PrecoderMode::spca; ++k) {
    const double a0 = ep.scalar(nm("alpha", k));
    for (int j = 0; j < J; ++j) {
      const double c0 = ep.scalar(nm("alpha_c", j));
      const LinExpr al = X(pp.alpha[k]), rc = X(pp.r_c), ac = X(pp.alpha_c[j]);
      const LinExpr common = 0.5 * (a0 + r0) * (al + rc) - 0.25 * (a0 + r0) * (a0 + r0) -
                             0.25 * (a0 - c0) * (a0 - c0) + 0.5 * (a0 - c0) * (al - ac);
      for (int jj = 0; jj < J; ++jj) {
        P.add_sq_norm_le({0.5 * (al - rc), 0.5 * (al + ac)},
                         common + X(pp.gamma[k]) - X(pp.alpha_p[k][jj]) - X(pp.r_sec),
                         J == 1 ? nm("secrecy", k, j) : nm("secrecy", k, j, jj));
      }
    }
  }
  for (int j = 0; j < J; ++j) {
    P.add_geq(X(pp.r_c), X(pp.alpha_c[j]), nm("common_cap", j));
    for (int k = 0; k < K; ++k) P.add_geq(X(pp.gamma[k]), X(pp.alpha_p[k][j]), nm("private_cap", k, j));
  }

  // 1 + rho <= 2^x through its tangent at x0
  auto exp_tangent = [&](int x, double x0, int rho, const std::string& label) {
    const double e0 = std::exp2(x0);
    P.add_nonneg(e0 * (1.0 + ln2 * (X(x) - x0)) - 1.0 - X(rho) + shift, label);
  };
  // |c s| + nu ||B s|| <= x; with nu = 0 only the nominal amplitude remains
  auto robust_amplitude = [&](int j, const ComplexVarVec& s, int x, const std::string& label) {
    if (ch.nu == 0.0) {
      P.add_soc(X(x), flatten({row_times(c[j], s)}), label);
      return;
    }
    const int t_abs = P.add_var(label + ".abs");
    const int t_norm = P.add_var(label + ".norm");
    P.add_soc(X(t_abs), flatten({row_times(c[j], s)}), label);
    std::vector<CLin> bs;
    for (int m = 0; m < M; ++m) bs.push_back(row_times(ch.nu * B.row(m), s));
    P.add_soc(X(t_norm), flatten(bs), label);
    P.add_geq(X(x), X(t_abs) + X(t_norm), label);
  };
  // target <= concave lower surrogate of s^H Q_j s, expanded at s0
  auto quad_lower = [&](int j, const ComplexVarVec& s, const CVec& s0, const LinExpr& target,
                        const std::string& label) {
    const PsdSplit& sp = split[j];
    const CVec q0 = sp.pos * s0;
    const LinExpr affine = 2.0 * re_inner(q0, s.exprs()) - q0.dot(s0).real();
    if (sp.neg_factor.cols() == 0) {
      P.add_geq(affine, target, label);
      return;
    }
    std::vector<CLin> ls;
    for (int i = 0; i < sp.neg_factor.cols(); ++i) ls.push_back(dotu(sp.neg_factor.col(i).conjugate(), s.exprs()));
    P.add_sq_norm_le(flatten(ls), affine - target, label);
  };

  LinExpr energy_total;
  for (int j = 0; j < J; ++j) {
    LinExpr sum_a, sum_b;
    for (int k = 0; k < K; ++k) sum_a += X(pp.a[j][k]);
    for (int jj = 0; jj < J; ++jj) sum_b += X(pp.b[j][jj]);

    // common-stream leakage at UER j
    exp_tangent(pp.alpha_c[j], ep.scalar(nm("alpha_c", j)), pp.rho_cj[j], nm("leak_c.exp", j));
    P.add_quad_over_lin(X(pp.x_c[j]), sum_a + sum_b + 1.0 + shift, X(pp.rho_cj[j]), nm("leak_c.ratio", j));
    robust_amplitude(j, pp.p_c, pp.x_c[j], nm("leak_c.robust", j));
    for (int k = 0; k < K; ++k)
      quad_lower(j, pp.p[k], ep.vector(nm("p", k)), X(pp.a[j][k]), nm("leak_c.interf_p", j, k));
    for (int jj = 0; jj < J; ++jj)
      quad_lower(j, pp.f[jj], ep.vector(nm("f", jj)), X(pp.b[j][jj]), nm("leak_c.interf_f", j, jj));

    // private-stream leakage at UER j
    for (int k = 0; k < K; ++k) {
      exp_tangent(pp.alpha_p[k][j], ep.scalar(nm("alpha_p", k, j)), pp.rho_kj[k][j], nm("leak_p.exp", k, j));
      P.add_quad_over_lin(X(pp.x_p[k][j]), X(pp.v[j]) + sum_a - X(pp.a[j][k]) + sum_b + 1.0 + shift,
                          X(pp.rho_kj[k][j]), nm("leak_p.ratio", k, j));
      robust_amplitude(j, pp.p[k], pp.x_p[k][j], nm("leak_p.robust", k, j));
    }
    quad_lower(j, pp.p_c, ep.vector("p_c"), X(pp.v[j]), nm("leak_p.common", j));

    // worst-case harvested energy at UER j
    quad_lower(j, pp.p_c, ep.vector("p_c"), X(pp.lam_c[j]), nm("energy.common", j));
    energy_total += X(pp.lam_c[j]);
    for (int k = 0; k < K; ++k) {
      quad_lower(j, pp.p[k], ep.vector(nm("p", k)), X(pp.lam_p[j][k]), nm("energy.private", j, k));
      energy_total += X(pp.lam_p[j][k]);
    }
    for (int jj = 0; jj < J; ++jj) {
      quad_lower(j, pp.f[jj], ep.vector(nm("f", jj)), X(pp.xi[j][jj]), nm("energy.stream", j, jj));
      energy_total += X(pp.xi[j][jj]);
    }
  }
  P.add_geq(energy_total + shift, cfg.e_th, "energy.total");

  // 2^x <= 1 + rho through log2(y) >= log2(y0) + (1 - y0/y)/ln2, tight at y = y0
  auto log_bound = [&](const LinExpr& x, int rho, double rho0, const std::string& label) {
    const double y0 = 1.0 + rho0;
    P.add_rotated({LinExpr(std::sqrt(y0))}, 1.0 + std::log(y0) - ln2 * x, 1.0 + X(rho), label);
  };
  // sum |h s|^2 + 1 <= |h s_own|^2 / rho via its affine under-estimator
  auto sinr_bound = [&](int k, const ComplexVarVec& own, const std::string& own_name, int rho,
                        double rho0, const std::vector<const ComplexVarVec*>& others,
                        const std::string& label) {
    const cplx w0 = (h[k] * ep.vector(own_name))(0);
    const LinExpr psi = (2.0 / rho0) * re_conj_times(w0, row_times(h[k], own)) -
                        (std::norm(w0) / (rho0 * rho0)) * X(rho);
    std::vector<CLin> interf;
    for (const auto* o : others) interf.push_back(row_times(h[k], *o));
    P.add_sq_norm_le(flatten(interf), psi - 1.0 + shift, label);
  };

  for (int k = 0; k < K; ++k) {
    const double rk0 = ep.scalar(nm("rho_k", k));
    const double rck0 = ep.scalar(nm("rho_ck", k));
    log_bound(X(pp.gamma[k]), pp.rho_k[k], rk0, nm("rate_p.exp", k));
    std::vector<const ComplexVarVec*> others, all;
    for (int kk = 0; kk < K; ++kk) {
      all.push_back(&pp.p[kk]);
      if (kk != k) others.push_back(&pp.p[kk]);
    }
    for (int j = 0; j < J; ++j) {
      others.push_back(&pp.f[j]);
      all.push_back(&pp.f[j]);
    }
    sinr_bound(k, pp.p[k], nm("p", k), pp.rho_k[k], rk0, others, nm("rate_p.sinr", k));
    log_bound(X(pp.r_c), pp.rho_ck[k], rck0, nm("rate_c.exp", k));
    sinr_bound(k, pp.p_c, "p_c", pp.rho_ck[k], rck0, all, nm("rate_c.sinr", k));

    // alpha_k R_c >= r_c
    const double a0 = ep.scalar(nm("alpha", k));
    const LinExpr al = X(pp.alpha[k]), rc = X(pp.r_c);
    P.add_sq_norm_le({0.5 * (al - rc)},
                     0.5 * (a0 + r0) * (al + rc) - 0.25 * (a0 + r0) * (a0 + r0) - cfg.r_c_min + shift,
                     nm("common_floor", k));
  }

  if (mode == PrecoderMode::restoration) {
    P.add_geq(X(pp.s), opt.s_floor, "restoration.floor");
    P.add_equal(X(pp.r_sec), 0.0, "restoration.r_sec");
    P.minimize(X(pp.s));
  } else {
    P.maximize(X(pp.r_sec));
  }
  return pp;
}

PrecoderSubproblemState read_precoder_solution(const PrecoderProgram& pp, const ConicSolution& sol,
                                               double pt_linear) {
  const int K = static_cast<int>(pp.p.size()), J = static_cast<int>(pp.f.size());
  PrecoderSubproblemState st;
  st.pre = PrecoderSet::zeros(pp.p_c.n, K, J);
  st.pre.p_c = pp.scale * sol.value(pp.p_c);
  for (int k = 0; k < K; ++k) st.pre.p[k] = pp.scale * sol.value(pp.p[k]);
  for (int j = 0; j < J; ++j) st.pre.f[j] = pp.scale * sol.value(pp.f[j]);
  const double power = st.pre.power();
  if (power > pt_linear) st.pre = st.pre.scaled(std::sqrt(pt_linear / power));
  double sum = 0.0;
  for (int k = 0; k < K; ++k) sum += st.pre.alpha[k] = std::max(0.0, sol.value(pp.alpha[k]));
  if (sum > 0.0) st.pre.alpha /= sum;

  auto vals = [&](const std::vector<int>& idx) {
    std::vector<double> out;
    for (int i : idx) out.push_back(sol.value(i));
    return out;
  };
  auto vals2 = [&](const std::vector<std::vector<int>>& idx) {
    std::vector<std::vector<double>> out;
    for (const auto& row : idx) out.push_back(vals(row));
    return out;
  };
  st.r_sec = sol.value(pp.r_sec);
  st.r_c = sol.value(pp.r_c);
  st.gamma = vals(pp.gamma);
  st.rho_k = vals(pp.rho_k);
  st.rho_ck = vals(pp.rho_ck);
  st.alpha_c = vals(pp.alpha_c);
  st.rho_cj = vals(pp.rho_cj);
  st.x_c = vals(pp.x_c);
  st.v = vals(pp.v);
  st.lam_c = vals(pp.lam_c);
  st.alpha_p = vals2(pp.alpha_p);
  st.rho_kj = vals2(pp.rho_kj);
  st.x_p = vals2(pp.x_p);
  st.a = vals2(pp.a);
  st.b = vals2(pp.b);
  st.lam_p = vals2(pp.lam_p);
  st.xi = vals2(pp.xi);
  st.s = pp.s >= 0 ? sol.value(pp.s) : 0.0;
  st.feasible = pp.s < 0 || st.s <= 0.0;
  return st;
}

PrecoderSet random_precoders(const ChannelSet& ch, double pt_linear, std::uint64_t seed) {
  const int K = ch.n_ir(), J = ch.n_uer(), N = ch.n_tx();
  PrecoderSet p = PrecoderSet::zeros(N, K, J);
  Rng rng(seed);
  const double norm = std::sqrt(pt_linear / (K + J + 1));
  auto draw = [&](CVec& v) {
    for (int n = 0; n < N; ++n) v[n] = rng.complex_normal();
    v *= norm / v.norm();
  };
  draw(p.p_c);
  for (auto& v : p.p) draw(v);
  for (auto& v : p.f) draw(v);
  return p;
}

RestorationResult fipsa(const ChannelSet& ch, const RISProfile& ris, const ScenarioConfig& cfg,
                        const PrecoderSubproblemState& init, const PrecoderOptions& opt) {
  RestorationResult res;
  // The bounded-error interference terms can be negative at an arbitrary
  // start, which sends the leakage expansion far up the exponential tangent.
  // The true denominator is at least the unit noise power.
  res.state = PrecoderSubproblemState::from_design(init.pre, ch, ris, 1.0);
  res.state.history = init.history;
  res.state.feasible = false;
  const double pt = cfg.pt_linear();
  double prev = std::numeric_limits<double>::infinity();
  for (int m = 1; m <= opt.m_max; ++m) {
    const PrecoderProgram pp = build_precoder_program(res.state, ch, ris, cfg, PrecoderMode::restoration, opt);
    const ConicSolution sol = pp.prog.solve(opt.solver_tol, opt.verbose);
    if (!sol.ok()) {
      res.trace.push_back({m, res.state.r_sec, res.state.s, sol.status});
      break;
    }
    PrecoderSubproblemState next = read_precoder_solution(pp, sol, pt);
    next.iteration = m;
    next.history = res.state.history;
    res.state = std::move(next);
    res.trace.push_back({m, res.state.r_sec, res.state.s, sol.status});
    if (res.state.s <= 0.0 || std::abs(res.state.s - prev) < opt.delta_e) break;
    prev = res.state.s;
  }
  res.state.feasible = res.state.s <= 0.0 && !res.trace.empty() &&
                       (res.trace.back().status == SolveStatus::optimal ||
                        res.trace.back().status == SolveStatus::near_optimal);
  return res;
}

namespace {

// Auxiliaries reset to the exact values of the precoders. Every surrogate is
// tight at its expansion point and the solver's auxiliaries are one-sided
// bounds of these values, so the reset point stays feasible and no worse.
PrecoderSubproblemState tightened(const PrecoderSubproblemState& st, const ChannelSet& ch, const RISProfile& ris) {
  PrecoderSubproblemState out = PrecoderSubproblemState::from_design(st.pre, ch, ris);
  out.r_sec = st.r_sec;
  out.s = st.s;
  out.iteration = st.iteration;
  out.history = st.history;
  out.feasible = st.feasible;
  return out;
}

}  // namespace

SpcaResult spca_precoders(const ChannelSet& ch, const RISProfile& ris, const ScenarioConfig& cfg,
                          const PrecoderSubproblemState& init, const PrecoderOptions& opt) {
  SpcaResult res;
  res.state = opt.tighten ? tightened(init, ch, ris) : init;
  res.outcome = PrecoderOutcome::iteration_cap;
  const double pt = cfg.pt_linear();
  double prev = std::numeric_limits<double>::quiet_NaN();
  for (int i = 1; i <= opt.n_max; ++i) {
    const PrecoderProgram pp = build_precoder_program(res.state, ch, ris, cfg, PrecoderMode::spca, opt);
    const ConicSolution sol = pp.prog.solve(opt.solver_tol, opt.verbose);
    if (!sol.ok()) {
      res.trace.push_back({i, res.state.r_sec, 0.0, sol.status});
      if (res.restarts > 0) {
        res.outcome = PrecoderOutcome::subproblem_failed;
        break;
      }
      ++res.restarts;
      RestorationResult rr = fipsa(ch, ris, cfg, res.state, opt);
      if (!rr.state.feasible) {
        res.outcome = PrecoderOutcome::subproblem_failed;
        break;
      }
      rr.state.history = res.state.history;
      res.state = opt.tighten ? tightened(rr.state, ch, ris) : std::move(rr.state);
      continue;
    }
    PrecoderSubproblemState next = read_precoder_solution(pp, sol, pt);
    if (opt.tighten) next = tightened(next, ch, ris);
    next.iteration = i;
    next.history = res.state.history;
    next.history.push_back(next.r_sec);
    next.feasible = true;
    res.state = std::move(next);
    res.trace.push_back({i, res.state.r_sec, 0.0, sol.status});
    if (!std::isnan(prev) && std::abs(res.state.r_sec - prev) < opt.delta_i) {
      res.outcome = PrecoderOutcome::converged;
      break;
    }
    prev = res.state.r_sec;
  }
  return res;
}

std::string precoder_trace_header() { return "iteration,r_sec,s,solver_status"; }

void write_precoder_trace(std::ostream& os, const std::vector<PrecoderTraceRow>& rows) {
  os << precoder_trace_header() << "\n";
  for (const auto& r : rows) {
    os << r.iteration << "," << format_double(r.r_sec) << "," << format_double(r.s) << ","
       << to_string(r.status) << "\n";
  }
}

}  // namespace star_swipt
