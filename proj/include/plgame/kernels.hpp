#pragma once

// Sample-reduction kernels behind the diagnostics estimators.
//
// Each estimator evaluates a ratio at pre-generated samples and keeps the
// extremum. The OpenMP version splits the index range across threads and
// merges per-thread extrema with a (value, index) tie-break, so its result is
// bit-identical to the serial reference for any thread count.

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace plgame::kernels {

enum class Execution { Serial, Parallel };

struct Extremum {
  double value = std::numeric_limits<double>::quiet_NaN();
  std::size_t index = 0;
  std::size_t admissible = 0;  // samples that produced a ratio
  std::optional<std::size_t> failed_index;  // first sample with a non-finite ratio

  bool found() const noexcept { return admissible > 0; }
};

namespace detail {

template <bool Minimize>
inline bool better(double v, std::size_t i, const Extremum& cur) {
  if (cur.admissible == 0) return true;
  if (v == cur.value) return i < cur.index;
  return Minimize ? v < cur.value : v > cur.value;
}

template <bool Minimize>
inline void merge(Extremum& into, const Extremum& other) {
  if (other.admissible > 0 && better<Minimize>(other.value, other.index, into)) {
    into.value = other.value;
    into.index = other.index;
  }
  into.admissible += other.admissible;
  if (other.failed_index && (!into.failed_index || *other.failed_index < *into.failed_index)) {
    into.failed_index = other.failed_index;
  }
}

template <bool Minimize, class RatioFn>
inline void visit(Extremum& acc, std::size_t i, RatioFn& ratio) {
  const std::optional<double> r = ratio(i);
  if (!r) return;
  if (!std::isfinite(*r)) {
    if (!acc.failed_index || i < *acc.failed_index) acc.failed_index = i;
    return;
  }
  if (better<Minimize>(*r, i, acc)) {
    acc.value = *r;
    acc.index = i;
  }
  ++acc.admissible;
}

template <bool Minimize, class RatioFn>
Extremum reduce_serial(std::size_t n, RatioFn&& ratio) {
  Extremum acc;
  for (std::size_t i = 0; i < n; ++i) visit<Minimize>(acc, i, ratio);
  return acc;
}

template <bool Minimize, class RatioFn>
Extremum reduce_parallel(std::size_t n, RatioFn&& ratio) {
#ifdef _OPENMP
  Extremum total;
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel
  {
    Extremum local;
#pragma omp for schedule(static) nowait
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      visit<Minimize>(local, static_cast<std::size_t>(i), ratio);
    }
#pragma omp critical(plgame_kernel_merge)
    merge<Minimize>(total, local);
  }
  return total;
#else
  return reduce_serial<Minimize>(n, ratio);
#endif
}

}  // namespace detail

/// Minimum of ratio(i) over i in [0, n). ratio returns nullopt for excluded
/// samples; non-finite values are recorded in failed_index.
template <class RatioFn>
Extremum min_ratio(std::size_t n, RatioFn&& ratio, Execution exec) {
  return exec == Execution::Parallel ? detail::reduce_parallel<true>(n, ratio)
                                     : detail::reduce_serial<true>(n, ratio);
}

template <class RatioFn>
Extremum max_ratio(std::size_t n, RatioFn&& ratio, Execution exec) {
  return exec == Execution::Parallel ? detail::reduce_parallel<false>(n, ratio)
                                     : detail::reduce_serial<false>(n, ratio);
}

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace plgame::kernels
