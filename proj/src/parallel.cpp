#include "hpk/parallel.hpp"

#include <exception>
#include <mutex>

#include "hpk/kernels.hpp"
#include "hpk/sampling.hpp"

namespace hpk::par {

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void for_each_index(std::size_t n, int jobs, const std::function<void(std::size_t)>& f) {
  if (jobs <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::exception_ptr first;
  std::mutex mu;
  const long long count = static_cast<long long>(n);
  HPK_OMP(parallel for schedule(dynamic, 1) num_threads(jobs))
  for (long long i = 0; i < count; ++i) {
    try {
      f(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(mu);
      if (!first) first = std::current_exception();
    }
  }
  if (first) std::rethrow_exception(first);
}

std::vector<double> kernel_table_serial(const FiniteKernel& k, const std::vector<double>& grid) {
  const std::size_t G = grid.size();
  std::vector<double> out(G * G);
  for (std::size_t i = 0; i < G; ++i)
    for (std::size_t j = 0; j < G; ++j) out[i * G + j] = k.eval(grid[i], grid[j]);
  return out;
}

std::vector<double> kernel_table_parallel(const FiniteKernel& k, const std::vector<double>& grid,
                                          int jobs) {
  const std::size_t G = grid.size();
  std::vector<double> out(G * G);
  for_each_index(G, jobs, [&](std::size_t i) {
    for (std::size_t j = 0; j < G; ++j) out[i * G + j] = k.eval(grid[i], grid[j]);
  });
  return out;
}

std::vector<Configuration> sample_batch_serial(const ProjectionSampler& sampler, std::uint64_t seed,
                                               int draws) {
  std::vector<Configuration> out(draws);
  for (int i = 0; i < draws; ++i) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(i));
    out[i] = sampler.draw(rng);
  }
  return out;
}

std::vector<Configuration> sample_batch_parallel(const ProjectionSampler& sampler,
                                                 std::uint64_t seed, int draws, int jobs) {
  std::vector<Configuration> out(draws);
  for_each_index(static_cast<std::size_t>(draws), jobs, [&](std::size_t i) {
    Rng rng = Rng::stream(seed, i);
    out[i] = sampler.draw(rng);
  });
  return out;
}

}  // namespace hpk::par
