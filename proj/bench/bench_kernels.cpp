// Serial against OpenMP timings of the sampling and search kernels.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include <omp.h>

#include "star_swipt/kernels.hpp"
#include "star_swipt/rates.hpp"
#include "star_swipt/scenario.hpp"

using namespace star_swipt;

namespace {

using Clock = std::chrono::steady_clock;

template <class F>
double best_ms(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = Clock::now();
    f();
    best = std::min(best, std::chrono::duration<double, std::milli>(Clock::now() - t0).count());
  }
  return best;
}

void row(const char* name, double serial, double parallel, bool same) {
  std::printf("%-22s serial %10.3f ms  parallel %10.3f ms  speedup %6.2f  %s\n", name, serial, parallel,
              serial / parallel, same ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  const int samples = argc > 1 ? std::atoi(argv[1]) : 100000;
  const int reps = argc > 2 ? std::atoi(argv[2]) : 5;
  std::printf("threads %d, samples %d, best of %d\n", omp_get_max_threads(), samples, reps);

  ScenarioConfig cfg;
  cfg.seed = 1;
  const ChannelSet ch = synthesize_channels(cfg);
  PrecoderSet pre = PrecoderSet::zeros(cfg.n_tx, cfg.n_ir, cfg.n_uer);
  const double amp = std::sqrt(cfg.pt_linear() / (1 + cfg.n_ir + cfg.n_uer) / cfg.n_tx);
  pre.p_c.setConstant(amp);
  for (auto& v : pre.p) v.setConstant(amp);
  for (auto& v : pre.f) v.setConstant(amp);
  const RISProfile ris = RISProfile::uniform(cfg.n_ris);
  const CMat streams = ris.u_r().asDiagonal() * (ch.H * pre.stream_matrix());

  kernels::UerWorst ws, wp;
  const double ts = best_ms(reps, [&] {
    ws = kernels::sampled_uer_worst(streams, cfg.n_ir, ch.g_r_hat[0], ch.nu, samples, 7, kernels::Exec::serial);
  });
  const double tp = best_ms(reps, [&] {
    wp = kernels::sampled_uer_worst(streams, cfg.n_ir, ch.g_r_hat[0], ch.nu, samples, 7, kernels::Exec::parallel);
  });
  row("sampled_uer_worst", ts, tp,
      ws.leak_c == wp.leak_c && ws.energy_min == wp.energy_min && ws.leak_p == wp.leak_p);

  const long n = 200L * samples;
  auto f = [](long i) { return std::sin(1e-3 * static_cast<double>(i)) * std::cos(3e-7 * static_cast<double>(i)); };
  kernels::ArgMax as, ap;
  const double ss = best_ms(reps, [&] { as = kernels::parallel_argmax(n, f, kernels::Exec::serial); });
  const double sp = best_ms(reps, [&] { ap = kernels::parallel_argmax(n, f, kernels::Exec::parallel); });
  row("parallel_argmax", ss, sp, as.index == ap.index && as.value == ap.value);
  return 0;
}
