// Compares the serial reference kernels against the OpenMP variants: wall
// time, speedup, and a bit-exactness check (the parallel versions are
// constructed to produce identical output for any thread count).

#include "monoracle/densities.hpp"
#include "monoracle/grid.hpp"
#include "monoracle/kernels.hpp"
#include "monoracle/selector.hpp"

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

namespace {

using Clock = std::chrono::steady_clock;

template <typename F>
double time_ms(F&& fn, int repeats)
{
  const auto start = Clock::now();
  for (int i = 0; i < repeats; ++i)
    fn();
  const auto stop = Clock::now();
  return std::chrono::duration<double, std::milli>(stop - start).count() / repeats;
}

bool bit_equal(const std::vector<double>& a, const std::vector<double>& b)
{
  if (a.size() != b.size())
    return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i])
      return false;
  return true;
}

} // namespace

int main(int argc, char** argv)
{
  std::size_t n = 2000;
  std::size_t points = 2000;
  int repeats = 3;
  if (argc > 1)
    n = static_cast<std::size_t>(std::stoul(argv[1]));
  if (argc > 2)
    points = static_cast<std::size_t>(std::stoul(argv[2]));
  if (argc > 3)
    repeats = std::stoi(argv[3]);

  using namespace monoracle;
  const DensityModel model = DensityModel::parse("gaussian:0,1");
  const SampleSet sample = draw_sample(model, n, 20240901);
  const FrequencyGrid grid = build_grid(64.0, 6);

  std::printf("threads: %d\n", effective_threads());
  std::printf("%-24s %12s %12s %9s %10s\n", "kernel", "serial(ms)", "openmp(ms)", "speedup",
              "bit-equal");

  {
    CfSums serial, parallel;
    const double ts = time_ms([&] { serial = cf_sums_serial(sample.values, grid); }, repeats);
    const double tp =
        time_ms([&] { parallel = cf_sums_parallel(sample.values, grid); }, repeats);
    const bool equal = bit_equal(serial.re, parallel.re) && bit_equal(serial.im, parallel.im);
    std::printf("%-24s %12.2f %12.2f %8.2fx %10s\n", "empirical_spectrum", ts, tp, ts / tp,
                equal ? "yes" : "NO");
  }

  {
    const SpectralKernel kernel = minimax_kernel(2.0, grid);
    const KernelJumps jumps = jump_profile(kernel);
    std::vector<double> eval_points(points);
    for (std::size_t i = 0; i < points; ++i)
      eval_points[i] = -4.0 + 8.0 * static_cast<double>(i) / static_cast<double>(points);
    std::vector<double> serial, parallel;
    const double ts =
        time_ms([&] { serial = kde_eval_serial(sample.values, jumps, eval_points); }, repeats);
    const double tp = time_ms(
        [&] { parallel = kde_eval_parallel(sample.values, jumps, eval_points); }, repeats);
    std::printf("%-24s %12.2f %12.2f %8.2fx %10s\n", "density_estimate", ts, tp, ts / tp,
                bit_equal(serial, parallel) ? "yes" : "NO");
  }

  return 0;
}
