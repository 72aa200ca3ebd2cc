#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#define HPK_PRAGMA(x) _Pragma(#x)
#define HPK_OMP(directive) HPK_PRAGMA(omp directive)
#else
#define HPK_OMP(directive)
#endif

namespace hpk {
class FiniteKernel;
class ProjectionSampler;
struct Configuration;
}  // namespace hpk

namespace hpk::par {

int max_threads();

// f(i) for i in [0, n). With jobs > 1 the iterations are spread over an OpenMP
// team; callers write results by index so the output does not depend on the
// schedule. The first exception thrown by any iteration is rethrown.
void for_each_index(std::size_t n, int jobs, const std::function<void(std::size_t)>& f);

// Kernel table K(grid[i], grid[j]) in row-major order.
std::vector<double> kernel_table_serial(const FiniteKernel& k, const std::vector<double>& grid);
std::vector<double> kernel_table_parallel(const FiniteKernel& k, const std::vector<double>& grid,
                                          int jobs);

// Draw i uses Rng::stream(seed, i) in both variants.
std::vector<Configuration> sample_batch_serial(const ProjectionSampler& sampler, std::uint64_t seed,
                                               int draws);
std::vector<Configuration> sample_batch_parallel(const ProjectionSampler& sampler,
                                                 std::uint64_t seed, int draws, int jobs);

}  // namespace hpk::par
