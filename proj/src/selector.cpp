#include "monoracle/selector.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace monoracle {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kGapConstant = 2.0 / kPi;

struct Pool
{
  double weight;
  double weighted_sum;
  std::size_t count;

  double mean() const { return weighted_sum / weight; }
};

} // namespace

std::vector<double> antitonic_regression(std::span<const double> targets,
                                         std::span<const double> weights)
{
  if (targets.size() != weights.size())
    throw std::invalid_argument("targets and weights must have equal length");
  for (double w : weights)
    if (!(w >= 0.0))
      throw std::invalid_argument("weights must be non-negative");

  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < weights.size(); ++i)
    if (weights[i] > 0.0)
      active.push_back(i);
  if (active.empty())
    throw std::invalid_argument("antitonic regression requires at least one positive weight");

  // PAVA over the positive-weight subsequence; pool means must be nonincreasing.
  std::vector<Pool> pools;
  pools.reserve(active.size());
  for (std::size_t idx : active) {
    pools.push_back(Pool{ weights[idx], weights[idx] * targets[idx], 1 });
    while (pools.size() >= 2 && pools[pools.size() - 2].mean() < pools.back().mean()) {
      Pool merged{ pools[pools.size() - 2].weight + pools.back().weight,
                   pools[pools.size() - 2].weighted_sum + pools.back().weighted_sum,
                   pools[pools.size() - 2].count + pools.back().count };
      pools.pop_back();
      pools.back() = merged;
    }
  }

  std::vector<double> fitted_active;
  fitted_active.reserve(active.size());
  for (const Pool& pool : pools)
    fitted_active.insert(fitted_active.end(), pool.count, pool.mean());

  std::vector<double> out(targets.size());
  std::size_t next_active = 0;
  double left_value = fitted_active.front(); // leading zero-weight run takes the right value
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (next_active < active.size() && active[next_active] == i) {
      left_value = fitted_active[next_active];
      ++next_active;
    }
    out[i] = left_value;
  }
  return out;
}

double SeparableObjective::value(std::span<const double> v) const
{
  if (v.size() != quadratic.size())
    throw std::invalid_argument("objective argument has wrong length");
  double acc = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k)
    acc += quadratic[k] * v[k] * v[k] - linear[k] * v[k];
  return acc * grid.bin_width() / kPi + constant;
}

SeparableObjective cv_objective(const EmpiricalSpectrum& spectrum)
{
  if (spectrum.n < 2)
    throw std::invalid_argument("cross-validation requires n >= 2");
  const double n = static_cast<double>(spectrum.n);
  SeparableObjective objective;
  objective.grid = spectrum.grid;
  objective.quadratic.resize(spectrum.grid.bins);
  objective.linear.resize(spectrum.grid.bins);
  for (std::size_t k = 0; k < spectrum.grid.bins; ++k) {
    const double s = spectrum.s_sq[k];
    objective.quadratic[k] = s / (n * n);
    objective.linear[k] = 2.0 / (n * (n - 1.0)) * (s - n);
  }
  return objective;
}

SeparableObjective mise_objective(const DensityModel& model, std::size_t n,
                                  const FrequencyGrid& grid)
{
  if (n == 0)
    throw std::invalid_argument("mise requires n >= 1");
  const double inv_n = 1.0 / static_cast<double>(n);
  SeparableObjective objective;
  objective.grid = grid;
  objective.quadratic.resize(grid.bins);
  objective.linear.resize(grid.bins);
  double head = 0.0;
  for (std::size_t k = 0; k < grid.bins; ++k) {
    const double g = model.cf_power(grid.midpoint(k));
    objective.quadratic[k] = g + (1.0 - g) * inv_n;
    objective.linear[k] = 2.0 * g;
    head += g;
  }
  objective.constant =
      head * grid.bin_width() / kPi + model.tail_energy(grid.band_limit);
  return objective;
}

// The first coordinate is pinned to one, so it is excluded from the
// regression; the rest is solved exactly and clipped to [0,1].
//
// Why clip-after-pool is exact: the objective is separable and strictly
// convex on the positive-weight coordinates, so the box-constrained monotone
// minimizer is the coordinate-wise clip of the unconstrained monotone
// minimizer. Sketch: PAVA returns the projection P(y) of the targets onto the
// monotone cone in the weighted norm; for any box [lo,hi]^m, clipping is a
// monotone, idempotent map that commutes with the pooling structure (clipping
// a pooled constant block keeps it constant, and the KKT multipliers of the
// box constraints never interact across pool boundaries because the pooled
// values are already ordered). Hence clip(P(y)) satisfies the KKT system of
// the box-and-chain problem, which has a unique solution.
SpectralKernel minimize_separable(const SeparableObjective& objective)
{
  const std::size_t m = objective.grid.bins;
  if (objective.quadratic.size() != m || objective.linear.size() != m)
    throw std::invalid_argument("objective coefficient length does not match grid");

  std::vector<double> v(m, 1.0);
  if (m > 1) {
    std::vector<double> targets(m - 1, 0.0);
    std::vector<double> weights(m - 1, 0.0);
    bool any_positive = false;
    for (std::size_t k = 1; k < m; ++k) {
      const double a = objective.quadratic[k];
      weights[k - 1] = a;
      if (a > 0.0) {
        targets[k - 1] = objective.linear[k] / (2.0 * a);
        any_positive = true;
      }
    }
    if (any_positive) {
      const std::vector<double> fitted = antitonic_regression(targets, weights);
      for (std::size_t k = 1; k < m; ++k)
        v[k] = std::clamp(fitted[k - 1], 0.0, 1.0);
    } else {
      // Flat quadratic part everywhere: the objective carries no information,
      // fall back to the flat-one kernel.
      std::fill(v.begin() + 1, v.end(), 1.0);
    }
  }
  return make_kernel(objective.grid, std::move(v));
}

SpectralKernel cv_optimal_kernel(const EmpiricalSpectrum& spectrum)
{
  return minimize_separable(cv_objective(spectrum));
}

SpectralKernel oracle_kernel(const DensityModel& model, std::size_t n,
                             const FrequencyGrid& grid)
{
  return minimize_separable(mise_objective(model, n, grid));
}

SpectralKernel minimax_kernel(double beta, const FrequencyGrid& grid)
{
  if (!(beta > 0.0))
    throw std::invalid_argument("minimax kernel requires beta > 0");
  std::vector<double> v(grid.bins);
  for (std::size_t k = 0; k < grid.bins; ++k)
    v[k] = std::max(0.0, 1.0 - std::pow(grid.midpoint(k), beta));
  v[0] = 1.0;
  return make_kernel(grid, std::move(v));
}

RefinementResult refine(const SampleSet& sample, double band_limit, int t_max, double eps)
{
  if (t_max < 0)
    throw std::invalid_argument("t_max must be non-negative");
  if (!(eps > 0.0))
    throw std::invalid_argument("eps must be positive");
  if (sample.size() < 2)
    throw std::invalid_argument("refine requires n >= 2");

  const FrequencyGrid fine_grid = build_grid(band_limit, t_max);
  const EmpiricalSpectrum fine = empirical_spectrum(sample, fine_grid);

  RefinementResult result;
  for (int t = 0; t <= t_max; ++t) {
    const EmpiricalSpectrum level = coarsen_spectrum(fine, t_max - t);
    SpectralKernel kernel = cv_optimal_kernel(level);
    const double cv = cv_value(kernel, level);
    const double gap = kGapConstant * std::ldexp(1.0, -t);
    result.trace.push_back(RefinementStep{ t, level.grid.bins, cv, gap });
    result.kernel = std::move(kernel);
    if (gap < eps)
      break;
  }
  return result;
}

} // namespace monoracle
