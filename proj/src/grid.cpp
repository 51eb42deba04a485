#include "monoracle/grid.hpp"

#include <numbers>
#include <sstream>
#include <stdexcept>

namespace monoracle {

FrequencyGrid build_grid(double band_limit, int resolution)
{
  if (!(band_limit > 0.0))
    throw std::invalid_argument("band limit W must be positive");
  if (resolution < 0)
    throw std::invalid_argument("resolution t must be non-negative");

  const double scaled = std::ldexp(band_limit, resolution);
  const double rounded = std::round(scaled);
  if (rounded < 1.0 || std::abs(scaled - rounded) > 1e-9 * std::max(1.0, scaled)) {
    std::ostringstream msg;
    msg << "W * 2^t must be a positive integer; got W = " << band_limit
        << ", t = " << resolution << " (W * 2^t = " << scaled << ")";
    throw std::invalid_argument(msg.str());
  }

  FrequencyGrid grid;
  grid.band_limit = band_limit;
  grid.resolution = resolution;
  grid.bins = static_cast<std::size_t>(rounded);
  return grid;
}

FrequencyGrid refine_grid(const FrequencyGrid& grid, int extra_levels)
{
  if (extra_levels < 0)
    throw std::invalid_argument("extra_levels must be non-negative");
  return build_grid(grid.band_limit, grid.resolution + extra_levels);
}

void validate_kernel(const SpectralKernel& kernel)
{
  const std::size_t m = kernel.grid.bins;
  if (kernel.v.size() != m)
    throw std::invalid_argument("kernel value vector does not match grid bin count");
  if (m == 0)
    throw std::invalid_argument("kernel grid has no bins");
  if (kernel.v.front() != 1.0)
    throw std::invalid_argument("kernel transform must satisfy v[0] = 1");
  for (std::size_t k = 0; k < m; ++k) {
    const double value = kernel.v[k];
    if (!(value >= 0.0 && value <= 1.0))
      throw std::invalid_argument("kernel transform values must lie in [0, 1]");
    if (k + 1 < m && kernel.v[k] < kernel.v[k + 1])
      throw std::invalid_argument("kernel transform must be nonincreasing");
  }
}

SpectralKernel make_kernel(FrequencyGrid grid, std::vector<double> v)
{
  SpectralKernel kernel{ grid, std::move(v) };
  validate_kernel(kernel);
  return kernel;
}

SpectralKernel refine_kernel(const SpectralKernel& kernel, int extra_levels)
{
  const FrequencyGrid fine = refine_grid(kernel.grid, extra_levels);
  const std::size_t factor = std::size_t{ 1 } << extra_levels;
  std::vector<double> values(fine.bins);
  for (std::size_t k = 0; k < fine.bins; ++k)
    values[k] = kernel.v[k / factor];
  return SpectralKernel{ fine, std::move(values) };
}

double kernel_l2_norm_sq(const SpectralKernel& kernel)
{
  const double h = kernel.grid.bin_width();
  double acc = 0.0;
  for (double value : kernel.v)
    acc += value * value;
  return acc * h / std::numbers::pi;
}

KernelJumps jump_profile(const SpectralKernel& kernel)
{
  const std::size_t m = kernel.grid.bins;
  const double h = kernel.grid.bin_width();
  KernelJumps jumps;
  jumps.omega.reserve(m);
  jumps.delta.reserve(m);
  double mass = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    mass += kernel.v[k];
    const double next = (k + 1 < m) ? kernel.v[k + 1] : 0.0;
    const double delta = kernel.v[k] - next;
    if (delta != 0.0) {
      jumps.omega.push_back(kernel.grid.edge(k + 1));
      jumps.delta.push_back(delta);
    }
  }
  jumps.value_at_zero = mass * h / std::numbers::pi;
  return jumps;
}

double evaluate_jumps(const KernelJumps& jumps, double x)
{
  if (x == 0.0)
    return jumps.value_at_zero;
  double acc = 0.0;
  for (std::size_t j = 0; j < jumps.omega.size(); ++j)
    acc += jumps.delta[j] * std::sin(jumps.omega[j] * x);
  return acc / (std::numbers::pi * x);
}

double evaluate_kernel(const SpectralKernel& kernel, double x)
{
  return evaluate_jumps(jump_profile(kernel), x);
}

std::vector<double> transform_prefix_integral(const SpectralKernel& kernel)
{
  const double h = kernel.grid.bin_width();
  std::vector<double> prefix(kernel.grid.bins + 1, 0.0);
  for (std::size_t k = 0; k < kernel.grid.bins; ++k)
    prefix[k + 1] = prefix[k] + kernel.v[k] * h;
  return prefix;
}

} // namespace monoracle
