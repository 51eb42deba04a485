#pragma once

#include "monoracle/criteria.hpp"
#include "monoracle/densities.hpp"
#include "monoracle/grid.hpp"

#include <span>
#include <vector>

namespace monoracle {

//! Weighted least-squares projection onto nonincreasing sequences
//! (pool-adjacent-violators). Zero-weight entries are absorbed into the
//! neighboring pools without influencing pool means; they take the fitted
//! value of the nearest positive-weight entry to the left (the larger
//! admissible value), or to the right when no left neighbor exists.
std::vector<double> antitonic_regression(std::span<const double> targets,
                                         std::span<const double> weights);

//! Separable objective sum_k (a_k v_k^2 - b_k v_k) * 2^-t / pi + constant.
struct SeparableObjective
{
  FrequencyGrid grid;
  std::vector<double> quadratic; // a_k >= 0
  std::vector<double> linear;    // b_k
  double constant{ 0.0 };

  double value(std::span<const double> v) const;
};

SeparableObjective cv_objective(const EmpiricalSpectrum& spectrum);
SeparableObjective mise_objective(const DensityModel& model, std::size_t n,
                                  const FrequencyGrid& grid);

//! Exact minimizer of a separable objective over
//! { v nonincreasing, v in [0,1]^m, v_0 = 1 }.
SpectralKernel minimize_separable(const SeparableObjective& objective);

//! Exact CV minimizer over the discretized monotone class on spectrum.grid.
SpectralKernel cv_optimal_kernel(const EmpiricalSpectrum& spectrum);

//! Monotone oracle: exact MISE minimizer for (model, n) on the given grid.
SpectralKernel oracle_kernel(const DensityModel& model, std::size_t n,
                             const FrequencyGrid& grid);

//! Minimax kernel with transform (1 - |w|^beta)_+ sampled at bin midpoints.
SpectralKernel minimax_kernel(double beta, const FrequencyGrid& grid);

struct RefinementStep
{
  int resolution{ 0 };
  std::size_t bins{ 0 };
  double cv{ 0.0 };
  double guaranteed_gap{ 0.0 }; // (2/pi) * 2^-t
};

struct RefinementResult
{
  SpectralKernel kernel;
  std::vector<RefinementStep> trace;
};

//! Dyadic refinement: solves the CV program at t = 0, 1, ... until the
//! guaranteed gap (2/pi) 2^-t drops below eps or t reaches t_max. All
//! criterion values in the trace share the finest grid's quadrature, so the
//! reported CV sequence is nonincreasing.
RefinementResult refine(const SampleSet& sample, double band_limit, int t_max, double eps);

} // namespace monoracle
