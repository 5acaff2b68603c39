#include "doctest.h"

#include <cmath>

#include "star_swipt/kernels.hpp"
#include "star_swipt/rates.hpp"
#include "star_swipt/rng.hpp"

using namespace star_swipt;

namespace {

CVec random_cvec(Rng& rng, int n, double scale = 1.0) {
  CVec v(n);
  for (int i = 0; i < n; ++i) v[i] = scale * rng.complex_normal();
  return v;
}

PrecoderSet random_precoders(Rng& rng, int nt, int K, int J) {
  PrecoderSet p = PrecoderSet::zeros(nt, K, J);
  p.p_c = random_cvec(rng, nt);
  for (auto& v : p.p) v = random_cvec(rng, nt);
  for (auto& v : p.f) v = random_cvec(rng, nt);
  return p;
}

RISProfile random_profile(Rng& rng, int m) {
  RISProfile r = RISProfile::uniform(m);
  for (int i = 0; i < m; ++i) {
    r.beta_t[i] = rng.uniform();
    r.beta_r[i] = 1.0 - r.beta_t[i];
    r.theta_t[i] = 2.0 * M_PI * rng.uniform();
    r.theta_r[i] = 2.0 * M_PI * rng.uniform();
  }
  return r;
}

ChannelSet random_channels(Rng& rng, int nt, int m, int K, int J, double nu) {
  ChannelSet ch;
  ch.H = CMat(m, nt);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < nt; ++j) ch.H(i, j) = rng.complex_normal();
  for (int k = 0; k < K; ++k) ch.g_t.push_back(random_cvec(rng, m));
  for (int j = 0; j < J; ++j) ch.g_r_hat.push_back(random_cvec(rng, m));
  ch.nu = nu;
  return ch;
}

}  // namespace

TEST_CASE("combined channel: unit coefficients select a row of H") {
  Rng rng(1);
  CMat H(3, 2);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 2; ++j) H(i, j) = rng.complex_normal();
  const CVec e1 = CVec::Unit(3, 0);
  const CRow h = combined_channel(e1, CVec::Ones(3), H);
  CHECK((h - H.row(0)).norm() < 1e-15);
  CHECK(combined_channel(e1, CVec::Zero(3), H).isZero());
  CHECK_THROWS_AS(combined_channel(CVec::Ones(2), CVec::Ones(3), H), DimensionError);
}

TEST_CASE("combined channel matches element-by-element summation") {
  Rng rng(2);
  const int M = 3, N = 2;
  CMat H(M, N);
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < N; ++j) H(i, j) = rng.complex_normal();
  const CVec g = random_cvec(rng, M), u = random_cvec(rng, M);
  const CRow h = combined_channel(g, u, H);
  for (int n = 0; n < N; ++n) {
    cplx acc = 0.0;
    for (int m = 0; m < M; ++m) acc += std::conj(g[m]) * u[m] * H(m, n);
    CHECK(std::abs(h[n] - acc) < 1e-12);
  }
}

TEST_CASE("ir sinrs: zero precoders and the single-user case") {
  const PrecoderSet z = PrecoderSet::zeros(2, 2, 1);
  CRow h(2);
  h << 1.0, 0.5;
  const IrSinr s0 = ir_sinrs(z, h, 0);
  CHECK(s0.common == 0.0);
  CHECK(s0.priv == 0.0);
  PrecoderSet one = PrecoderSet::zeros(2, 1, 1);
  one.p[0] << 1.0, 0.0;
  CRow e(2);
  e << 1.0, 0.0;
  const IrSinr s1 = ir_sinrs(one, e, 0);
  CHECK(s1.priv == doctest::Approx(1.0));
  CHECK(std::log2(1.0 + s1.priv) == doctest::Approx(1.0));
}

TEST_CASE("ir sinrs agree with a literal transcription") {
  Rng rng(3);
  const int nt = 3, K = 2, J = 1;
  const PrecoderSet p = random_precoders(rng, nt, K, J);
  const CRow h = random_cvec(rng, nt).transpose();
  for (int k = 0; k < K; ++k) {
    const IrSinr s = ir_sinrs(p, h, k);
    double ip = 0.0, other = 0.0, en = 0.0;
    for (int kk = 0; kk < K; ++kk) {
      const double g = std::norm(h.dot(p.p[kk].conjugate()));
      ip += g;
      if (kk != k) other += g;
    }
    for (int j = 0; j < J; ++j) en += std::norm(h.dot(p.f[j].conjugate()));
    const double c = std::norm(h.dot(p.p_c.conjugate()));
    const double own = std::norm(h.dot(p.p[k].conjugate()));
    CHECK(s.common == doctest::Approx(c / (ip + en + 1.0)).epsilon(1e-12));
    // the private denominator never contains the common stream
    CHECK(s.priv == doctest::Approx(own / (other + en + 1.0)).epsilon(1e-12));
  }
}

TEST_CASE("harvested energy: zero, unit gains, and independent evaluation") {
  CRow h(3);
  h << 1.0, 0.0, 0.0;
  CHECK(harvested_energy(PrecoderSet::zeros(3, 2, 2), h) == 0.0);
  // every stream along e1 with unit gain: Q = 1 + K + J
  PrecoderSet p = PrecoderSet::zeros(3, 2, 2);
  p.p_c = CVec::Unit(3, 0);
  for (auto& v : p.p) v = CVec::Unit(3, 0);
  for (auto& v : p.f) v = CVec::Unit(3, 0);
  CHECK(harvested_energy(p, h) == doctest::Approx(5.0));
  Rng rng(4);
  const PrecoderSet q = random_precoders(rng, 3, 2, 1);
  const CRow g = random_cvec(rng, 3).transpose();
  const CMat S = q.stream_matrix();
  CHECK(harvested_energy(q, g) == doctest::Approx((g * S).squaredNorm()).epsilon(1e-12));
}

TEST_CASE("worst-case secrecy: zero radius makes sampled and closed form agree") {
  Rng rng(5);
  const ChannelSet ch = random_channels(rng, 3, 4, 2, 2, 0.0);
  const PrecoderSet p = random_precoders(rng, 3, 2, 2);
  const RISProfile ris = random_profile(rng, 4);
  const RateReport r = worst_case_secrecy(p, ris, ch, 50, 9);
  for (int j = 0; j < 2; ++j) {
    CHECK(std::abs(r.leak_c[j] - r.leak_c_sampled[j]) < 1e-9);
    for (int k = 0; k < 2; ++k) CHECK(std::abs(r.leak_p[k][j] - r.leak_p_sampled[k][j]) < 1e-9);
  }
  CHECK(r.r_c == *std::min_element(r.r_ck.begin(), r.r_ck.end()));
  CHECK(std::abs(r.energy_worst - r.energy_sampled) < 1e-9 * (1.0 + r.energy_worst));
}

TEST_CASE("worst-case secrecy: closed-form leakage dominates sampled leakage") {
  Rng rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    const ChannelSet ch = random_channels(rng, 2, 3, 2, 2, 0.3);
    const PrecoderSet p = random_precoders(rng, 2, 2, 2);
    const RISProfile ris = random_profile(rng, 3);
    const RateReport r = worst_case_secrecy(p, ris, ch, 2000, 100 + trial);
    CHECK(r.bound_dominates);
    CHECK(r.r_sec <= r.r_sec_sampled + 1e-12);
    CHECK(r.energy_worst <= r.energy_sampled + 1e-12);
    for (double s : r.secrecy) CHECK(s >= 0.0);
  }
}

TEST_CASE("worst-case secrecy: leakage above the rate clamps to zero") {
  // IR channel is tiny, UER channel is strong: everything leaks
  Rng rng(7);
  ChannelSet ch = random_channels(rng, 2, 2, 1, 1, 0.0);
  ch.g_t[0] *= 1e-6;
  ch.g_r_hat[0] *= 10.0;
  PrecoderSet p = random_precoders(rng, 2, 1, 1);
  const RateReport r = worst_case_secrecy(p, RISProfile::uniform(2), ch, 10, 1);
  CHECK(r.secrecy[0] == 0.0);
  CHECK(r.r_sec == 0.0);
}

TEST_CASE("worst-case secrecy is nonincreasing in the uncertainty radius") {
  Rng rng(8);
  ChannelSet ch = random_channels(rng, 3, 4, 2, 2, 0.0);
  const PrecoderSet p = random_precoders(rng, 3, 2, 2);
  const RISProfile ris = random_profile(rng, 4);
  double prev_closed = 1e300, prev_sampled = 1e300;
  for (double nu : {0.0, 0.01, 0.05, 0.2, 0.5}) {
    ch.nu = nu;
    const RateReport r = worst_case_secrecy(p, ris, ch, 500, 3);
    CHECK(r.r_sec <= prev_closed + 1e-12);
    prev_closed = r.r_sec;
    // sampled: nested balls share the draws' directions, radius scales
    CHECK(r.r_sec_sampled <= prev_sampled + 1e-12);
    prev_sampled = r.r_sec_sampled;
  }
}

TEST_CASE("csv row has one field per header column") {
  Rng rng(9);
  const ChannelSet ch = random_channels(rng, 2, 2, 2, 2, 0.1);
  const RateReport r = worst_case_secrecy(random_precoders(rng, 2, 2, 2), RISProfile::uniform(2), ch, 10, 1);
  const std::string head = rate_report_header(2, 2);
  const std::string row = to_csv_row(r);
  CHECK(std::count(head.begin(), head.end(), ',') == std::count(row.begin(), row.end(), ','));
  CHECK(format_double(1.0 / 3.0) == "0.333333333");
}

TEST_CASE("sampling kernel: serial reference equals the parallel kernel") {
  Rng rng(10);
  const int m = 6;
  CMat streams(m, 5);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < 5; ++j) streams(i, j) = rng.complex_normal();
  const CVec g = random_cvec(rng, m);
  for (int n : {0, 1, 127, 128, 129, 1000}) {
    const auto a = kernels::sampled_uer_worst(streams, 2, g, 0.2, n, 77, kernels::Exec::serial);
    const auto b = kernels::sampled_uer_worst(streams, 2, g, 0.2, n, 77, kernels::Exec::parallel);
    CHECK(a.leak_c == b.leak_c);
    CHECK(a.leak_p == b.leak_p);
    CHECK(a.energy_min == b.energy_min);
  }
}

TEST_CASE("argmax kernel: serial and parallel agree including ties") {
  auto f = [](long i) { return static_cast<double>((i * 37) % 101); };
  const auto a = kernels::parallel_argmax(1000, f, kernels::Exec::serial);
  const auto b = kernels::parallel_argmax(1000, f, kernels::Exec::parallel);
  CHECK(a.index == b.index);
  CHECK(a.value == 100.0);
}

TEST_CASE("ris profile invariants") {
  RISProfile r = RISProfile::uniform(3);
  r.validate();
  CHECK(r.u_t().cwiseAbs2().isApprox(RVec::Constant(3, 0.5)));
  r.beta_t[0] = 0.7;
  CHECK_THROWS(r.validate());
}
