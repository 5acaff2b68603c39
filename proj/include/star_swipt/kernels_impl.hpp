#pragma once

#include <cmath>
#include <limits>

#include <omp.h>

namespace star_swipt::kernels {

namespace detail {
inline bool better(double v, long i, double best, long best_i) {
  return v > best || (v == best && best_i >= 0 && i < best_i);
}
}  // namespace detail

template <class F>
ArgMax parallel_argmax(long n, F&& f, Exec exec) {
  ArgMax out;
  out.value = -std::numeric_limits<double>::infinity();
  if (exec == Exec::serial) {
    for (long i = 0; i < n; ++i) {
      const double v = f(i);
      if (!std::isnan(v) && detail::better(v, i, out.value, out.index)) {
        out.value = v;
        out.index = i;
      }
    }
    return out;
  }
#pragma omp parallel
  {
    ArgMax local;
    local.value = -std::numeric_limits<double>::infinity();
#pragma omp for schedule(dynamic, 16) nowait
    for (long i = 0; i < n; ++i) {
      const double v = f(i);
      if (!std::isnan(v) && detail::better(v, i, local.value, local.index)) {
        local.value = v;
        local.index = i;
      }
    }
#pragma omp critical(star_swipt_argmax)
    {
      if (local.index >= 0 &&
          (out.index < 0 || local.value > out.value ||
           (local.value == out.value && local.index < out.index))) {
        out = local;
      }
    }
  }
  return out;
}

}  // namespace star_swipt::kernels
