#pragma once

#include <cstdint>
#include <vector>

#include "star_swipt/types.hpp"

// Hot loops with an OpenMP implementation and a serial reference. Both
// produce bitwise-identical results: random draws come from fixed-size
// blocks with their own derived seeds, and the reductions are max/min.
namespace star_swipt::kernels {

enum class Exec { serial, parallel };

/// Draws per random block; a block is the unit of work distribution.
inline constexpr int kSampleBlock = 128;

struct UerWorst {
  double leak_c = 0.0;           // max common-stream eavesdropper rate
  std::vector<double> leak_p;    // per private stream
  double energy_min = 0.0;       // min harvested energy
};

/// Sampled worst case at one UER. `streams` holds one column per stream,
/// ordered [common, private_1..K, energy_1..J], each already mapped through
/// the reflection coefficients: diag(u_r) H s. Each draw perturbs g_hat by a
/// uniform point of the radius-nu ball.
UerWorst sampled_uer_worst(const CMat& streams, int n_ir, const CVec& g_hat, double nu,
                           int n_samples, std::uint64_t seed, Exec exec = Exec::parallel);

/// Evaluates f(i) for i in [0, n) and returns the index of the largest
/// value (lowest index on ties) and the value. Values that are NaN are skipped.
struct ArgMax {
  long index = -1;
  double value = 0.0;
};

template <class F>
ArgMax parallel_argmax(long n, F&& f, Exec exec);

}  // namespace star_swipt::kernels

#include "star_swipt/kernels_impl.hpp"
