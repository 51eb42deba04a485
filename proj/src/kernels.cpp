#include "monoracle/kernels.hpp"

#include <cmath>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace monoracle {

namespace {

constexpr std::size_t kBlock = 512;

void accumulate_block(std::span<const double> xs, const FrequencyGrid& grid,
                      std::size_t begin, std::size_t end, double* re, double* im)
{
  const double h = grid.bin_width();
  const double omega0 = grid.midpoint(begin);
  for (double x : xs) {
    const double a0 = omega0 * x;
    double zr = std::cos(a0);
    double zi = std::sin(a0);
    const double sr = std::cos(h * x);
    const double si = std::sin(h * x);
    for (std::size_t k = begin; k < end; ++k) {
      re[k] += zr;
      im[k] += zi;
      const double next_r = zr * sr - zi * si;
      zi = zr * si + zi * sr;
      zr = next_r;
    }
  }
}

} // namespace

int effective_threads()
{
#ifdef _OPENMP
  int threads = omp_get_max_threads();
  if (const char* env = std::getenv("MONORACLE_THREADS")) {
    const int requested = std::atoi(env);
    if (requested > 0 && requested < threads)
      threads = requested;
  }
  return threads;
#else
  return 1;
#endif
}

CfSums cf_sums_serial(std::span<const double> xs, const FrequencyGrid& grid)
{
  CfSums sums;
  sums.re.assign(grid.bins, 0.0);
  sums.im.assign(grid.bins, 0.0);
  for (std::size_t begin = 0; begin < grid.bins; begin += kBlock) {
    const std::size_t end = std::min(begin + kBlock, grid.bins);
    accumulate_block(xs, grid, begin, end, sums.re.data(), sums.im.data());
  }
  return sums;
}

CfSums cf_sums_parallel(std::span<const double> xs, const FrequencyGrid& grid)
{
  CfSums sums;
  sums.re.assign(grid.bins, 0.0);
  sums.im.assign(grid.bins, 0.0);
  const std::size_t blocks = (grid.bins + kBlock - 1) / kBlock;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(effective_threads())
#endif
  for (std::size_t block = 0; block < blocks; ++block) {
    const std::size_t begin = block * kBlock;
    const std::size_t end = std::min(begin + kBlock, grid.bins);
    accumulate_block(xs, grid, begin, end, sums.re.data(), sums.im.data());
  }
  return sums;
}

CfSums cf_sums(std::span<const double> xs, const FrequencyGrid& grid)
{
#ifdef _OPENMP
  return cf_sums_parallel(xs, grid);
#else
  return cf_sums_serial(xs, grid);
#endif
}

namespace {

double kde_point(std::span<const double> xs, const KernelJumps& jumps, double point)
{
  double acc = 0.0;
  for (double x : xs)
    acc += evaluate_jumps(jumps, x - point);
  return acc / static_cast<double>(xs.size());
}

} // namespace

std::vector<double> kde_eval_serial(std::span<const double> xs, const KernelJumps& jumps,
                                    std::span<const double> points)
{
  std::vector<double> out(points.size());
  for (std::size_t p = 0; p < points.size(); ++p)
    out[p] = kde_point(xs, jumps, points[p]);
  return out;
}

std::vector<double> kde_eval_parallel(std::span<const double> xs, const KernelJumps& jumps,
                                      std::span<const double> points)
{
  std::vector<double> out(points.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(effective_threads())
#endif
  for (std::size_t p = 0; p < points.size(); ++p)
    out[p] = kde_point(xs, jumps, points[p]);
  return out;
}

std::vector<double> kde_eval(std::span<const double> xs, const KernelJumps& jumps,
                             std::span<const double> points)
{
#ifdef _OPENMP
  return kde_eval_parallel(xs, jumps, points);
#else
  return kde_eval_serial(xs, jumps, points);
#endif
}

} // namespace monoracle
