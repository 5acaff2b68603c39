#include "star_swipt/oracle.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "star_swipt/kernels.hpp"
#include "star_swipt/rng.hpp"
#include "star_swipt/surrogates.hpp"

namespace star_swipt::oracle {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double rate(double signal, double interference) { return std::log2(1.0 + signal / (interference + 1.0)); }

// Channel estimates plus n - 1 ball draws; draw 0 is the estimate itself.
std::vector<CVec> ball_draws(const CVec& g_hat, double nu, int n, std::uint64_t seed) {
  std::vector<CVec> out;
  if (n <= 0) return out;
  out.reserve(n);
  out.push_back(g_hat);
  Rng rng(seed);
  for (int s = 1; s < n; ++s) out.push_back(g_hat + sample_uncertainty(g_hat, nu, rng));
  return out;
}

// g^H diag(u) H written as an explicit sum over elements.
CRow cascade(const CVec& g, const CVec& u, const CMat& H) {
  CRow h = CRow::Zero(H.cols());
  for (Eigen::Index m = 0; m < H.rows(); ++m) h += std::conj(g[m]) * u[m] * H.row(m);
  return h;
}

CVec profile_side(const RVec& beta, const RVec& theta) {
  CVec u(beta.size());
  for (Eigen::Index m = 0; m < beta.size(); ++m) u[m] = std::sqrt(std::max(0.0, beta[m])) * std::polar(1.0, theta[m]);
  return u;
}

}  // namespace

SampledEvaluation sampled_evaluation(const PrecoderSet& pre, const RISProfile& ris, const ChannelSet& ch,
                                     int n_ball_samples, std::uint64_t seed) {
  const int K = ch.n_ir(), J = ch.n_uer();
  if (pre.n_ir() != K || pre.n_uer() != J || pre.n_tx() != ch.n_tx() || ris.size() != ch.n_ris()) {
    throw DimensionError("sampled_evaluation: design does not match channel set");
  }
  const CVec ut = profile_side(ris.beta_t, ris.theta_t);
  const CVec ur = profile_side(ris.beta_r, ris.theta_r);
  // streams ordered [common, private 1..K, energy 1..J]
  std::vector<const CVec*> streams{&pre.p_c};
  for (const auto& v : pre.p) streams.push_back(&v);
  for (const auto& v : pre.f) streams.push_back(&v);
  const int ns = static_cast<int>(streams.size());

  auto powers = [&](const CRow& h) {
    std::vector<double> pw(ns);
    for (int n = 0; n < ns; ++n) pw[n] = std::norm(h.dot(streams[n]->conjugate()));
    return pw;
  };
  auto total = [](const std::vector<double>& pw, int from, int count) {
    double s = 0.0;
    for (int i = from; i < from + count; ++i) s += pw[i];
    return s;
  };

  SampledEvaluation e;
  e.r_ck.resize(K);
  e.r_k.resize(K);
  for (int k = 0; k < K; ++k) {
    const auto pw = powers(cascade(ch.g_t[k], ut, ch.H));
    const double priv = total(pw, 1, K), en = total(pw, 1 + K, J);
    e.r_ck[k] = rate(pw[0], priv + en);
    e.r_k[k] = rate(pw[1 + k], priv - pw[1 + k] + en);
  }
  e.r_c = K > 0 ? *std::min_element(e.r_ck.begin(), e.r_ck.end()) : 0.0;

  e.leak_p.assign(K, 0.0);
  for (int j = 0; j < J; ++j) {
    double q_min = std::numeric_limits<double>::infinity();
    for (const CVec& g : ball_draws(ch.g_r_hat[j], ch.nu, n_ball_samples, derive_seed(seed, j))) {
      const auto pw = powers(cascade(g, ur, ch.H));
      const double all = total(pw, 0, ns);
      q_min = std::min(q_min, all);
      e.leak_c = std::max(e.leak_c, rate(pw[0], all - pw[0]));
      for (int k = 0; k < K; ++k) e.leak_p[k] = std::max(e.leak_p[k], rate(pw[1 + k], all - pw[1 + k]));
    }
    if (n_ball_samples > 0) e.energy_min += q_min;
  }
  e.secrecy.resize(K);
  for (int k = 0; k < K; ++k) {
    e.secrecy[k] = pre.alpha[k] * std::max(0.0, e.r_c - e.leak_c) + std::max(0.0, e.r_k[k] - e.leak_p[k]);
  }
  e.r_sec = K > 0 ? *std::min_element(e.secrecy.begin(), e.secrecy.end()) : 0.0;
  return e;
}

bool Certificate::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

std::string Certificate::failures() const {
  std::string out;
  for (const auto& c : checks) {
    if (c.pass) continue;
    if (!out.empty()) out += ';';
    out += c.name;
  }
  return out;
}

Certificate certify_design(const PrecoderSet& pre, const RISProfile& ris, const ChannelSet& ch,
                           const ScenarioConfig& cfg, int n_ball_samples, std::uint64_t seed, double r_c) {
  Certificate cert;
  auto add = [&](std::string name, bool ok, double value, double bound) {
    cert.checks.push_back({std::move(name), ok, value, bound});
  };

  const int M = ch.n_ris();
  bool ris_ok = ris.beta_t.size() == M && ris.beta_r.size() == M && ris.theta_t.size() == M &&
                ris.theta_r.size() == M;
  double coupling = 0.0;
  if (ris_ok) {
    for (int m = 0; m < M; ++m) {
      coupling = std::max(coupling, std::abs(ris.beta_t[m] + ris.beta_r[m] - 1.0));
      const bool in_range = ris.beta_t[m] >= 0.0 && ris.beta_t[m] <= 1.0 && ris.beta_r[m] >= 0.0 &&
                            ris.beta_r[m] <= 1.0 && ris.theta_t[m] >= 0.0 && ris.theta_t[m] < kTwoPi &&
                            ris.theta_r[m] >= 0.0 && ris.theta_r[m] < kTwoPi;
      ris_ok = ris_ok && in_range;
    }
  }
  add("ris.range", ris_ok, ris_ok ? 1.0 : 0.0, 1.0);
  add("ris.coupling", ris_ok && coupling <= 1e-12, coupling, 1e-12);

  const bool shapes = pre.n_ir() == ch.n_ir() && pre.n_uer() == ch.n_uer() && pre.n_tx() == ch.n_tx() &&
                      pre.alpha.size() == ch.n_ir();
  add("shape", shapes, shapes ? 1.0 : 0.0, 1.0);
  if (!shapes || !ris_ok) return cert;

  const double power = pre.power();
  add("power", std::isfinite(power) && power <= cfg.pt_linear() + 1e-6, power, cfg.pt_linear() + 1e-6);

  const double share_sum = pre.alpha.sum();
  const double share_min = pre.alpha.size() ? pre.alpha.minCoeff() : 0.0;
  add("shares.nonneg", share_min >= -1e-9, share_min, -1e-9);
  add("shares.sum", std::abs(share_sum - 1.0) <= 1e-9, share_sum, 1.0);

  const SampledEvaluation e = sampled_evaluation(pre, ris, ch, n_ball_samples, seed);
  const double claimed = std::isnan(r_c) ? e.r_c : r_c;
  add("common_rate", claimed <= e.r_c + 1e-6, claimed, e.r_c + 1e-6);
  for (int k = 0; k < ch.n_ir(); ++k) {
    const double share = pre.alpha[k] * claimed;
    add("common_floor[" + std::to_string(k) + "]", share >= cfg.r_c_min - 1e-6, share, cfg.r_c_min - 1e-6);
  }
  add("energy", e.energy_min >= cfg.e_th - 1e-3, e.energy_min, cfg.e_th - 1e-3);
  return cert;
}

bool AuditReport::pass(double tangency_tol) const {
  return std::all_of(operators.begin(), operators.end(),
                     [&](const OperatorAudit& o) { return o.pass(tangency_tol); });
}

namespace {

// Rounding allowance when comparing a bound with its target.
constexpr double kRoundoff = 1e-12;

struct AuditAcc {
  OperatorAudit a;
  explicit AuditAcc(std::string name) { a.name = std::move(name); }
  // excess > 0 means the bound is on the wrong side of the target
  void bound(double excess, double scale) {
    ++a.samples;
    const double rel = excess / std::max(1.0, std::abs(scale));
    if (rel > kRoundoff) {
      ++a.violations;
      a.worst_violation = std::max(a.worst_violation, rel);
    }
  }
  void tangent(double value, double target) {
    a.tangency_residual = std::max(a.tangency_residual, std::abs(value - target) / std::max(1.0, std::abs(target)));
  }
};

CVec random_cvec(Rng& rng, int n, double scale = 1.0) {
  CVec v(n);
  for (int i = 0; i < n; ++i) v[i] = scale * rng.complex_normal();
  return v;
}

}  // namespace

AuditReport surrogate_audit(int n_samples, std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  AuditReport rep;
  if (n_samples <= 0) return rep;
  Rng rng(seed);
  auto unif = [&](double lo, double hi) { return lo + (hi - lo) * rng.uniform(); };
  auto dim = [&] { return 1 + static_cast<int>(rng.uniform() * 6.0); };

  AuditAcc tl("theta_lower"), tu("theta_upper"), gl("gamma_lower"), pl("psi_lower"), am("robust_abs_max"),
      sq("robust_sq_bounds"), ps("psd_split_quad_lower");
  for (int i = 0; i < n_samples; ++i) {
    {
      const double x = unif(-10, 10), y = unif(-10, 10), x0 = unif(-10, 10), y0 = unif(-10, 10);
      tl.bound(theta_lower(x, y, x0, y0) - x * y, x * y);
      tl.tangent(theta_lower(x0, y0, x0, y0), x0 * y0);
      tu.bound(x * y - theta_upper(x, y, x0, y0), x * y);
      tu.tangent(theta_upper(x0, y0, x0, y0), x0 * y0);
    }
    {
      const double x = unif(-10, 10), x0 = unif(-10, 10);
      gl.bound(gamma_lower(x, x0) - std::exp2(x), std::exp2(x));
      gl.tangent(gamma_lower(x0, x0), std::exp2(x0));
    }
    {
      const int n = dim();
      const CVec h = random_cvec(rng, n), u = random_cvec(rng, n), u0 = random_cvec(rng, n);
      const double x = unif(0.1, 10), x0 = unif(0.1, 10);
      cplx hu = 0.0, hu0 = 0.0;
      for (int m = 0; m < n; ++m) {
        hu += std::conj(h[m]) * u[m];
        hu0 += std::conj(h[m]) * u0[m];
      }
      const double target = std::norm(hu) / x;
      pl.bound(psi_lower(u, x, u0, x0, h) - target, target);
      pl.tangent(psi_lower(u0, x0, u0, x0, h), std::norm(hu0) / x0);
    }
    {
      const int n = dim();
      const CVec g = random_cvec(rng, n), u = random_cvec(rng, n);
      const double sigma = unif(0.0, 1.0) * g.norm();
      const CVec dg = sample_uncertainty(g, sigma, rng);
      cplx inner = 0.0, nominal = 0.0;
      for (int m = 0; m < n; ++m) {
        inner += std::conj(g[m] + dg[m]) * u[m];
        nominal += std::conj(g[m]) * u[m];
      }
      const double hi = robust_abs_max(g, u, sigma);
      am.bound(std::abs(inner) - hi, hi);
      // the maximizing error aligns with u and with the phase of g^H u
      const CVec worst = (sigma / u.norm()) * std::polar(1.0, -std::arg(nominal)) * u;
      cplx attained = 0.0;
      for (int m = 0; m < n; ++m) attained += std::conj(g[m] + worst[m]) * u[m];
      am.tangent(hi, std::abs(attained));

      const double sampled = std::norm(inner);
      sq.bound(robust_sq_min(g, u, sigma) - sampled, sampled);
      sq.bound(sampled - robust_sq_max(g, u, sigma), sampled);
      sq.tangent(robust_sq_min(g, u, 0.0), std::norm(nominal));
      sq.tangent(robust_sq_max(g, u, 0.0), std::norm(nominal));
    }
    {
      const int n = dim();
      CMat B(n, n);
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) B(r, c) = rng.complex_normal();
      const CMat A = 0.5 * (B + B.adjoint());
      const CVec u = random_cvec(rng, n), u0 = random_cvec(rng, n);
      const PsdSplit split = psd_split(A);
      const double target = (u.adjoint() * A * u)(0).real();
      ps.bound(psd_split_quad_lower(u, u0, split) - target, target);
      ps.tangent(psd_split_quad_lower(u0, u0, split), (u0.adjoint() * A * u0)(0).real());
    }
  }
  rep.operators = {tl.a, tu.a, gl.a, pl.a, am.a, sq.a, ps.a};
  rep.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

std::string audit_csv_header() { return "operator,samples,violations,worst_violation,tangency_residual,pass"; }

void write_audit_csv(std::ostream& os, const AuditReport& report) {
  os << audit_csv_header() << "\n";
  for (const auto& o : report.operators) {
    os << o.name << "," << o.samples << "," << o.violations << "," << format_double(o.worst_violation) << ","
       << format_double(o.tangency_residual) << "," << (o.pass() ? 1 : 0) << "\n";
  }
}

namespace {

// Fixed-size arithmetic for the tiny grid: at most two antennas and two
// elements, unused entries zero.
using C2 = std::array<cplx, 2>;

cplx dot(const C2& row, const C2& s) { return row[0] * s[0] + row[1] * s[1]; }

struct Streams {
  std::array<C2, 3> s{};  // common, private, energy
};

struct RisCell {
  RVec beta_t, theta_t, theta_r;
  C2 ht{};                // IR cascade g_t^H diag(u_t) H
  std::array<C2, 2> B{};  // rows of diag(u_r) H
  std::vector<C2> q;      // per draw: g^H diag(u_r) H, draw 0 the estimate
};

struct Score {
  double upper = std::numeric_limits<double>::quiet_NaN();  // error-free objective
  double lower = std::numeric_limits<double>::quiet_NaN();  // closed-form worst-case objective
};

}  // namespace

GridResult grid_search_tiny(const ChannelSet& ch, const ScenarioConfig& cfg, int density, int n_ball_samples,
                            std::uint64_t seed) {
  const int N = ch.n_tx(), M = ch.n_ris();
  if (ch.n_ir() != 1 || ch.n_uer() != 1 || N > 2 || M > 2 || N < 1 || M < 1) {
    throw DimensionError("grid_search_tiny: needs K = J = 1, N_T <= 2, M <= 2");
  }
  if (density < 1) throw std::invalid_argument("grid_search_tiny: density must be positive");
  if (n_ball_samples < 1) throw std::invalid_argument("grid_search_tiny: need at least one ball sample");
  const double pt = cfg.pt_linear();
  const double nu = ch.nu;

  // Precoder codebook.
  std::vector<C2> dirs;
  std::vector<Streams> pres;
  if (density == 1) {
    Streams s;
    for (auto& v : s.s) v = {std::sqrt(pt / 3.0), 0.0};
    pres.push_back(s);
  } else {
    for (int i = 0; i <= density; ++i) {
      const double a = 0.5 * std::numbers::pi * i / density;
      const bool mixed = N == 2 && i > 0 && i < density;
      if (N == 1 && i > 0) break;
      for (int p = 0; p < (mixed ? 4 : 1); ++p) {
        const cplx second = N == 2 ? std::sin(a) * std::polar(1.0, 0.5 * std::numbers::pi * p) : 0.0;
        dirs.push_back({std::cos(a), second});
      }
    }
    const std::vector<C2> none{C2{}};
    for (int nc = 0; nc <= density; ++nc)
      for (int np = 0; np + nc <= density; ++np)
        for (int nf = 0; nf + np + nc <= density; ++nf) {
          const double amp[3] = {std::sqrt(pt * nc / density), std::sqrt(pt * np / density),
                                 std::sqrt(pt * nf / density)};
          const auto& dc = nc ? dirs : none;
          const auto& dp = np ? dirs : none;
          const auto& df = nf ? dirs : none;
          for (const C2& a : dc)
            for (const C2& b : dp)
              for (const C2& c : df) {
                Streams s;
                const C2* d[3] = {&a, &b, &c};
                for (int n = 0; n < 3; ++n) s.s[n] = {amp[n] * (*d[n])[0], amp[n] * (*d[n])[1]};
                pres.push_back(s);
              }
        }
  }

  // STAR-RIS grid. A common phase on one side rotates every cascade on that
  // side by the same unit factor, so element 0 keeps phase zero.
  const std::vector<double> betas = density == 1 ? std::vector<double>{0.5} : std::vector<double>{0, .25, .5, .75, 1};
  const int n_phase = density == 1 ? 1 : 4;
  const std::vector<CVec> draws = ball_draws(ch.g_r_hat[0], nu, n_ball_samples, derive_seed(seed, 0));
  std::vector<RisCell> cells;
  const int n_beta = static_cast<int>(betas.size());
  const int beta_combos = M == 2 ? n_beta * n_beta : n_beta;
  const int phase_combos = M == 2 ? n_phase * n_phase : 1;
  for (int bc = 0; bc < beta_combos; ++bc)
    for (int pc = 0; pc < phase_combos; ++pc) {
      RisCell c;
      c.beta_t = RVec::Zero(M);
      c.theta_t = RVec::Zero(M);
      c.theta_r = RVec::Zero(M);
      c.beta_t[0] = betas[bc % n_beta];
      if (M == 2) {
        c.beta_t[1] = betas[bc / n_beta];
        c.theta_t[1] = 0.5 * std::numbers::pi * (pc % n_phase);
        c.theta_r[1] = 0.5 * std::numbers::pi * (pc / n_phase);
      }
      for (int m = 0; m < M; ++m) {
        const cplx ut = std::sqrt(c.beta_t[m]) * std::polar(1.0, c.theta_t[m]);
        const cplx ur = std::sqrt(1.0 - c.beta_t[m]) * std::polar(1.0, c.theta_r[m]);
        for (int n = 0; n < N; ++n) {
          c.ht[n] += std::conj(ch.g_t[0][m]) * ut * ch.H(m, n);
          c.B[m][n] = ur * ch.H(m, n);
        }
      }
      c.q.reserve(draws.size());
      for (const CVec& g : draws) {
        C2 row{};
        for (int m = 0; m < M; ++m)
          for (int n = 0; n < N; ++n) row[n] += std::conj(g[m]) * c.B[m][n];
        c.q.push_back(row);
      }
      cells.push_back(std::move(c));
    }

  const long n_pre = static_cast<long>(pres.size());
  const long n_cells = static_cast<long>(cells.size()) * n_pre;
  GridResult res;
  res.cells = n_cells;

  // Rates at the IR shared by every bound; NaN when the common-rate floor fails.
  auto ir_rates = [&](const RisCell& c, const Streams& s, double& rc, double& rp) {
    const double tc = std::norm(dot(c.ht, s.s[0])), tp = std::norm(dot(c.ht, s.s[1])),
                 tf = std::norm(dot(c.ht, s.s[2]));
    rc = rate(tc, tp + tf);
    rp = rate(tp, tf);
    return rc >= cfg.r_c_min;
  };

  auto score = [&](long i) {
    const RisCell& c = cells[i / n_pre];
    const Streams& s = pres[i % n_pre];
    Score sc;
    double rc = 0.0, rp = 0.0;
    if (!ir_rates(c, s, rc, rp)) return sc;
    double e[3], spread[3];
    for (int n = 0; n < 3; ++n) {
      e[n] = std::abs(dot(c.q[0], s.s[n]));
      const cplx b0 = dot(c.B[0], s.s[n]), b1 = M == 2 ? dot(c.B[1], s.s[n]) : 0.0;
      spread[n] = nu * std::sqrt(std::norm(b0) + std::norm(b1));
    }
    auto objective = [&](const double* hi, const double* lo) {
      const double lc = rate(hi[0], lo[1] + lo[2]);
      const double lp = rate(hi[1], lo[0] + lo[2]);
      return std::max(0.0, rc - lc) + std::max(0.0, rp - lp);
    };
    const double nom[3] = {e[0] * e[0], e[1] * e[1], e[2] * e[2]};
    if (nom[0] + nom[1] + nom[2] < cfg.e_th) return sc;
    sc.upper = objective(nom, nom);
    double hi[3], lo[3];
    for (int n = 0; n < 3; ++n) {
      hi[n] = (e[n] + spread[n]) * (e[n] + spread[n]);
      const double d = std::max(0.0, e[n] - spread[n]);
      lo[n] = d * d;
    }
    if (lo[0] + lo[1] + lo[2] >= cfg.e_th) sc.lower = objective(hi, lo);
    return sc;
  };

  auto sampled = [&](long i) {
    const RisCell& c = cells[i / n_pre];
    const Streams& s = pres[i % n_pre];
    double rc = 0.0, rp = 0.0;
    if (!ir_rates(c, s, rc, rp)) return std::numeric_limits<double>::quiet_NaN();
    double lc = 0.0, lp = 0.0, qmin = std::numeric_limits<double>::infinity();
    for (const C2& q : c.q) {
      const double pc = std::norm(dot(q, s.s[0])), pp = std::norm(dot(q, s.s[1])), pf = std::norm(dot(q, s.s[2]));
      qmin = std::min(qmin, pc + pp + pf);
      lc = std::max(lc, rate(pc, pp + pf));
      lp = std::max(lp, rate(pp, pc + pf));
    }
    if (qmin < cfg.e_th) return std::numeric_limits<double>::quiet_NaN();
    return std::max(0.0, rc - lc) + std::max(0.0, rp - lp);
  };

  // Pass 1: both bounds for every cell. The best closed-form value is
  // attained by a cell whose sampled value is at least as large.
  std::vector<double> upper(n_cells);
  const kernels::ArgMax lower_best = kernels::parallel_argmax(
      n_cells,
      [&](long i) {
        const Score sc = score(i);
        upper[i] = sc.upper;
        return sc.lower;
      },
      kernels::Exec::parallel);

  // Pass 2: sampled evaluation in order of decreasing upper bound until no
  // remaining cell can beat the incumbent.
  const double floor = lower_best.index >= 0 ? lower_best.value : -std::numeric_limits<double>::infinity();
  std::vector<long> order;
  for (long i = 0; i < n_cells; ++i) {
    if (!std::isnan(upper[i]) && (upper[i] > floor || i == lower_best.index)) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(), [&](long a, long b) { return upper[a] > upper[b]; });

  long best = -1;
  double best_value = -std::numeric_limits<double>::infinity();
  constexpr long kChunk = 256;
  for (long start = 0; start < static_cast<long>(order.size()); start += kChunk) {
    if (best >= 0 && upper[order[start]] <= best_value) break;
    const long len = std::min<long>(kChunk, static_cast<long>(order.size()) - start);
    const kernels::ArgMax am = kernels::parallel_argmax(
        len, [&](long i) { return sampled(order[start + i]); }, kernels::Exec::parallel);
    res.evaluated += len;
    if (am.index >= 0 && am.value > best_value) {
      best_value = am.value;
      best = order[start + am.index];
    }
  }
  if (best < 0) return res;

  const RisCell& c = cells[best / n_pre];
  const Streams& s = pres[best % n_pre];
  res.found = true;
  res.r_sec = best_value;
  res.ris.beta_t = c.beta_t;
  res.ris.beta_r = (RVec::Ones(M) - c.beta_t).eval();
  res.ris.theta_t = c.theta_t;
  res.ris.theta_r = c.theta_r;
  res.pre = PrecoderSet::zeros(N, 1, 1);
  for (int n = 0; n < N; ++n) {
    res.pre.p_c[n] = s.s[0][n];
    res.pre.p[0][n] = s.s[1][n];
    res.pre.f[0][n] = s.s[2][n];
  }
  res.pre.alpha[0] = 1.0;
  return res;
}

}  // namespace star_swipt::oracle
