#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

namespace monoracle {

//! Dyadic discretization of the frequency band [0, W).
//!
//! Bin k covers [2^-t * k, 2^-t * (k+1)), k = 0..m-1, with m = W * 2^t.
//! W is restricted so that m is an exact positive integer.
struct FrequencyGrid
{
  double band_limit{ 1.0 };   // W
  int resolution{ 0 };        // t
  std::size_t bins{ 1 };      // m = W * 2^t

  double bin_width() const { return std::ldexp(1.0, -resolution); }
  double edge(std::size_t k) const { return bin_width() * static_cast<double>(k); }
  double midpoint(std::size_t k) const
  {
    return bin_width() * (static_cast<double>(k) + 0.5);
  }

  bool operator==(const FrequencyGrid& other) const
  {
    return band_limit == other.band_limit && resolution == other.resolution &&
           bins == other.bins;
  }
};

FrequencyGrid build_grid(double band_limit, int resolution);

//! Refine a grid by `extra_levels` dyadic steps (each step doubles the bin count).
FrequencyGrid refine_grid(const FrequencyGrid& grid, int extra_levels);

//! Band-limited kernel represented by its Fourier transform.
//!
//! v[k] is the value of the (even, real) Fourier transform on bin k; the
//! transform is extended symmetrically to negative frequencies and vanishes
//! outside [-W, W]. Admissible kernels have v nonincreasing, v in [0,1] and
//! v[0] = 1, which pins the total mass of the kernel to one.
struct SpectralKernel
{
  FrequencyGrid grid;
  std::vector<double> v;
};

//! Validating constructor; throws std::invalid_argument on any violation.
SpectralKernel make_kernel(FrequencyGrid grid, std::vector<double> v);

//! Throws std::invalid_argument unless the class invariants hold.
void validate_kernel(const SpectralKernel& kernel);

//! Exact refinement to a finer grid (each bin value is repeated).
SpectralKernel refine_kernel(const SpectralKernel& kernel, int extra_levels);

//! ||K||_2^2 = (1/pi) * sum_k v_k^2 * 2^-t  (symmetric extension folded in).
double kernel_l2_norm_sq(const SpectralKernel& kernel);

//! Downward jumps of the step transform; K(x) = sum_j delta_j sin(omega_j x) / (pi x).
struct KernelJumps
{
  std::vector<double> omega;   // right edge of each jump
  std::vector<double> delta;   // jump size (v_k - v_{k+1}, final jump to zero at W)
  double value_at_zero{ 0.0 }; // K(0) = (1/pi) * sum_k v_k * 2^-t
};

KernelJumps jump_profile(const SpectralKernel& kernel);

double evaluate_jumps(const KernelJumps& jumps, double x);

//! Exact inverse Fourier transform of the step transform at a point.
double evaluate_kernel(const SpectralKernel& kernel, double x);

//! Prefix integrals of the transform: result[k] = int_0^{edge(k)} Khat.
std::vector<double> transform_prefix_integral(const SpectralKernel& kernel);

} // namespace monoracle
