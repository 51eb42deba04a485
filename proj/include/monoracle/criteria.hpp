#pragma once

#include "monoracle/densities.hpp"
#include "monoracle/grid.hpp"

#include <optional>
#include <span>
#include <vector>

namespace monoracle {

//! |S(w_k)|^2 at the bin midpoints, with S(w) = sum_j e^{i w X_j}.
struct EmpiricalSpectrum
{
  FrequencyGrid grid;
  std::vector<double> s_sq;
  std::size_t n{ 0 };
};

EmpiricalSpectrum empirical_spectrum(const SampleSet& sample, const FrequencyGrid& grid);

void validate_spectrum(const EmpiricalSpectrum& spectrum);

//! Average the fine spectrum over blocks of bins; the coarse values are bin
//! means of |S|^2, so criteria evaluated on the result equal the fine-grid
//! quadrature restricted to piecewise-constant kernels at the coarse level.
EmpiricalSpectrum coarsen_spectrum(const EmpiricalSpectrum& spectrum, int levels);

//! Cross-validation criterion for a band-limited step kernel:
//!   CV = (1/pi) sum_k 2^-t [ v_k^2 s_k / n^2 - 2/(n(n-1)) v_k (s_k - n) ].
double cv_value(const SpectralKernel& kernel, const EmpiricalSpectrum& spectrum);

//! Exact expected L2 risk of the kernel estimator under `model`:
//!   (1/pi) sum_k 2^-t [ g_k (1-v_k)^2 + v_k^2 (1-g_k)/n ] + tail_energy(W),
//! with g_k = |fhat(w_k)|^2 at the bin midpoints.
double mise_value(const SpectralKernel& kernel, const DensityModel& model, std::size_t n);

//! Realized integrated squared error for one sample.
double ise_value(const SpectralKernel& kernel, const SampleSet& sample,
                 const DensityModel& model);

//! Kernel density estimate at the given points.
std::vector<double> estimate_density(const SpectralKernel& kernel, const SampleSet& sample,
                                     std::span<const double> points);

//! Low-frequency bias component b_K(x) + h_f(x)
//!   = (1/pi) sum_k 2^-t (v_k - 1) Re[ fhat(w_k) e^{-i w_k x} ].
double low_frequency_bias(const SpectralKernel& kernel, const DensityModel& model, double x);

//! Degenerate U-statistic kernel
//!   U_K(x,y) = K(x-y) - (f*K)(x) - (f*K)(y) + E[K(X-Y)].
double u_statistic(const SpectralKernel& kernel, const DensityModel& model, double x,
                   double y);

//! (f*K)(x) via midpoint quadrature on the kernel grid.
double convolved_density(const SpectralKernel& kernel, const DensityModel& model, double x);

//! E[K(X-Y)] = (1/pi) sum_k 2^-t v_k |fhat(w_k)|^2.
double expected_pair_kernel(const SpectralKernel& kernel, const DensityModel& model);

struct RiskReport
{
  std::optional<double> cv;
  std::optional<double> ise;
  std::optional<double> mise;
  std::size_t n{ 0 };
  double tail_correction{ 0.0 };
  FrequencyGrid grid;
};

} // namespace monoracle
