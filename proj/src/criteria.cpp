#include "monoracle/criteria.hpp"

#include "monoracle/kernels.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace monoracle {

namespace {

constexpr double kPi = std::numbers::pi;

void require_matching_grid(const SpectralKernel& kernel, const EmpiricalSpectrum& spectrum)
{
  if (!(kernel.grid == spectrum.grid))
    throw std::invalid_argument("kernel grid and spectrum grid do not match");
}

} // namespace

EmpiricalSpectrum empirical_spectrum(const SampleSet& sample, const FrequencyGrid& grid)
{
  if (sample.values.empty())
    throw std::invalid_argument("empirical spectrum requires a non-empty sample");
  const CfSums sums = cf_sums(sample.values, grid);
  EmpiricalSpectrum spectrum;
  spectrum.grid = grid;
  spectrum.n = sample.values.size();
  spectrum.s_sq.resize(grid.bins);
  for (std::size_t k = 0; k < grid.bins; ++k)
    spectrum.s_sq[k] = sums.re[k] * sums.re[k] + sums.im[k] * sums.im[k];
  return spectrum;
}

void validate_spectrum(const EmpiricalSpectrum& spectrum)
{
  if (spectrum.s_sq.size() != spectrum.grid.bins)
    throw std::invalid_argument("spectrum length does not match grid bin count");
  if (spectrum.n == 0)
    throw std::invalid_argument("spectrum sample size must be positive");
  const double cap =
      static_cast<double>(spectrum.n) * static_cast<double>(spectrum.n) * (1.0 + 1e-3);
  for (double s : spectrum.s_sq)
    if (!(s >= 0.0 && s <= cap))
      throw std::invalid_argument("spectrum values must lie in [0, n^2]");
}

EmpiricalSpectrum coarsen_spectrum(const EmpiricalSpectrum& spectrum, int levels)
{
  if (levels < 0)
    throw std::invalid_argument("coarsen levels must be non-negative");
  if (levels == 0)
    return spectrum;
  const std::size_t factor = std::size_t{ 1 } << levels;
  if (spectrum.grid.bins % factor != 0)
    throw std::invalid_argument("spectrum cannot be coarsened below one bin");
  EmpiricalSpectrum coarse;
  coarse.grid = build_grid(spectrum.grid.band_limit, spectrum.grid.resolution - levels);
  coarse.n = spectrum.n;
  coarse.s_sq.resize(coarse.grid.bins);
  for (std::size_t k = 0; k < coarse.grid.bins; ++k) {
    double acc = 0.0;
    for (std::size_t j = 0; j < factor; ++j)
      acc += spectrum.s_sq[k * factor + j];
    coarse.s_sq[k] = acc / static_cast<double>(factor);
  }
  return coarse;
}

double cv_value(const SpectralKernel& kernel, const EmpiricalSpectrum& spectrum)
{
  if (spectrum.n < 2)
    throw std::invalid_argument("cross-validation requires n >= 2");
  require_matching_grid(kernel, spectrum);
  const double n = static_cast<double>(spectrum.n);
  const double pair_factor = 2.0 / (n * (n - 1.0));
  const double h = kernel.grid.bin_width();
  double acc = 0.0;
  for (std::size_t k = 0; k < kernel.grid.bins; ++k) {
    const double v = kernel.v[k];
    const double s = spectrum.s_sq[k];
    acc += v * v * s / (n * n) - pair_factor * v * (s - n);
  }
  return acc * h / kPi;
}

double mise_value(const SpectralKernel& kernel, const DensityModel& model, std::size_t n)
{
  if (n == 0)
    throw std::invalid_argument("mise requires n >= 1");
  const double h = kernel.grid.bin_width();
  const double inv_n = 1.0 / static_cast<double>(n);
  double acc = 0.0;
  for (std::size_t k = 0; k < kernel.grid.bins; ++k) {
    const double v = kernel.v[k];
    const double g = model.cf_power(kernel.grid.midpoint(k));
    acc += g * (1.0 - v) * (1.0 - v) + v * v * (1.0 - g) * inv_n;
  }
  return acc * h / kPi + model.tail_energy(kernel.grid.band_limit);
}

double ise_value(const SpectralKernel& kernel, const SampleSet& sample,
                 const DensityModel& model)
{
  if (sample.values.empty())
    throw std::invalid_argument("ise requires a non-empty sample");
  const CfSums sums = cf_sums(sample.values, kernel.grid);
  const double n = static_cast<double>(sample.values.size());
  const double h = kernel.grid.bin_width();
  double acc = 0.0;
  for (std::size_t k = 0; k < kernel.grid.bins; ++k) {
    const double v = kernel.v[k];
    const auto fhat = model.cf(kernel.grid.midpoint(k));
    const double dr = v * sums.re[k] / n - fhat.real();
    const double di = v * sums.im[k] / n - fhat.imag();
    acc += dr * dr + di * di;
  }
  return acc * h / kPi + model.tail_energy(kernel.grid.band_limit);
}

std::vector<double> estimate_density(const SpectralKernel& kernel, const SampleSet& sample,
                                     std::span<const double> points)
{
  if (sample.values.empty())
    throw std::invalid_argument("density estimate requires a non-empty sample");
  return kde_eval(sample.values, jump_profile(kernel), points);
}

double low_frequency_bias(const SpectralKernel& kernel, const DensityModel& model, double x)
{
  const double h = kernel.grid.bin_width();
  double acc = 0.0;
  for (std::size_t k = 0; k < kernel.grid.bins; ++k) {
    const double omega = kernel.grid.midpoint(k);
    const auto fhat = model.cf(omega);
    const double real_part = fhat.real() * std::cos(omega * x) + fhat.imag() * std::sin(omega * x);
    acc += (kernel.v[k] - 1.0) * real_part;
  }
  return acc * h / kPi;
}

double convolved_density(const SpectralKernel& kernel, const DensityModel& model, double x)
{
  const double h = kernel.grid.bin_width();
  double acc = 0.0;
  for (std::size_t k = 0; k < kernel.grid.bins; ++k) {
    const double omega = kernel.grid.midpoint(k);
    const auto fhat = model.cf(omega);
    const double real_part = fhat.real() * std::cos(omega * x) + fhat.imag() * std::sin(omega * x);
    acc += kernel.v[k] * real_part;
  }
  return acc * h / kPi;
}

double expected_pair_kernel(const SpectralKernel& kernel, const DensityModel& model)
{
  const double h = kernel.grid.bin_width();
  double acc = 0.0;
  for (std::size_t k = 0; k < kernel.grid.bins; ++k)
    acc += kernel.v[k] * model.cf_power(kernel.grid.midpoint(k));
  return acc * h / kPi;
}

double u_statistic(const SpectralKernel& kernel, const DensityModel& model, double x,
                   double y)
{
  return evaluate_kernel(kernel, x - y) - convolved_density(kernel, model, x) -
         convolved_density(kernel, model, y) + expected_pair_kernel(kernel, model);
}

} // namespace monoracle
