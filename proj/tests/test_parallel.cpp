#include <atomic>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "hpk/kernels.hpp"
#include "hpk/parallel.hpp"
#include "hpk/sampling.hpp"

using namespace hpk;

TEST_CASE("kernel tables: serial and parallel agree bitwise") {
  const FiniteKernel k(HPParam::make(0.5), 12);
  std::vector<double> grid;
  for (int i = 0; i < 37; ++i) grid.push_back(-3.0 + 0.17 * i);
  const auto a = par::kernel_table_serial(k, grid);
  REQUIRE(a.size() == grid.size() * grid.size());
  for (int jobs : {1, 2, 4}) CHECK(par::kernel_table_parallel(k, grid, jobs) == a);
  CHECK(a[3 * grid.size() + 5] == k.eval(grid[3], grid[5]));
}

TEST_CASE("sample batches: serial and parallel agree") {
  const FiniteKernel k(HPParam::make(0.0), 6);
  const ProjectionSampler sampler(k, SamplerConfig{});
  const auto a = par::sample_batch_serial(sampler, 9, 25);
  REQUIRE(a.size() == 25);
  for (int jobs : {2, 3}) {
    const auto b = par::sample_batch_parallel(sampler, 9, 25, jobs);
    REQUIRE(b.size() == a.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(b[i].points == a[i].points);
  }
}

TEST_CASE("for_each_index covers every index once and propagates exceptions") {
  std::vector<std::atomic<int>> hits(1000);
  par::for_each_index(hits.size(), 3, [&](std::size_t i) { hits[i]++; });
  for (auto& h : hits) CHECK(h.load() == 1);
  CHECK(par::max_threads() >= 1);
  for (int jobs : {1, 4})
    CHECK_THROWS_AS(par::for_each_index(100, jobs,
                                        [](std::size_t i) {
                                          if (i == 57) throw std::runtime_error("boom");
                                        }),
                    std::runtime_error);
  par::for_each_index(0, 2, [](std::size_t) { FAIL("called on empty range"); });
}
