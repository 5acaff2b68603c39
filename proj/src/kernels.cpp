#include "star_swipt/kernels.hpp"

#include <algorithm>
#include <cmath>

#include "star_swipt/rng.hpp"
#include "star_swipt/scenario.hpp"

namespace star_swipt::kernels {
namespace {

struct Acc {
  double leak_c = 0.0;
  std::vector<double> leak_p;
  double energy_min = std::numeric_limits<double>::infinity();

  explicit Acc(int k) : leak_p(k, 0.0) {}
  void merge(const Acc& o) {
    leak_c = std::max(leak_c, o.leak_c);
    for (std::size_t i = 0; i < leak_p.size(); ++i) leak_p[i] = std::max(leak_p[i], o.leak_p[i]);
    energy_min = std::min(energy_min, o.energy_min);
  }
};

// One random block of draws.
void run_block(const CMat& streams, int n_ir, const CVec& g_hat, double nu, int begin, int end,
               std::uint64_t seed, int block, Acc& acc) {
  Rng rng(derive_seed(seed, static_cast<std::uint64_t>(block)));
  const int ns = static_cast<int>(streams.cols());
  RVec pw(ns);
  for (int i = begin; i < end; ++i) {
    const CVec g = g_hat + sample_uncertainty(g_hat, nu, rng);
    // |g^H s_n|^2 for every stream
    pw = (g.adjoint() * streams).cwiseAbs2().transpose();
    const double total = pw.sum();
    const double priv_sum = pw.segment(1, n_ir).sum();
    const double energy_sum = pw.tail(ns - 1 - n_ir).sum();
    acc.energy_min = std::min(acc.energy_min, total);
    acc.leak_c = std::max(acc.leak_c, std::log2(1.0 + pw[0] / (priv_sum + energy_sum + 1.0)));
    for (int k = 0; k < n_ir; ++k) {
      const double den = total - pw[1 + k] + 1.0;
      acc.leak_p[k] = std::max(acc.leak_p[k], std::log2(1.0 + pw[1 + k] / den));
    }
  }
}

}  // namespace

UerWorst sampled_uer_worst(const CMat& streams, int n_ir, const CVec& g_hat, double nu,
                           int n_samples, std::uint64_t seed, Exec exec) {
  if (streams.rows() != g_hat.size()) throw DimensionError("sampled_uer_worst: length mismatch");
  if (streams.cols() < 1 + n_ir) throw DimensionError("sampled_uer_worst: too few streams");
  const int n_blocks = (std::max(n_samples, 0) + kSampleBlock - 1) / kSampleBlock;
  Acc total(n_ir);
  if (exec == Exec::serial) {
    for (int b = 0; b < n_blocks; ++b) {
      run_block(streams, n_ir, g_hat, nu, b * kSampleBlock,
                std::min(n_samples, (b + 1) * kSampleBlock), seed, b, total);
    }
  } else {
#pragma omp parallel
    {
      Acc local(n_ir);
#pragma omp for schedule(static) nowait
      for (int b = 0; b < n_blocks; ++b) {
        run_block(streams, n_ir, g_hat, nu, b * kSampleBlock,
                  std::min(n_samples, (b + 1) * kSampleBlock), seed, b, local);
      }
#pragma omp critical(star_swipt_uer_worst)
      total.merge(local);
    }
  }
  UerWorst out;
  out.leak_c = total.leak_c;
  out.leak_p = std::move(total.leak_p);
  out.energy_min = n_samples > 0 ? total.energy_min : 0.0;
  return out;
}

}  // namespace star_swipt::kernels
