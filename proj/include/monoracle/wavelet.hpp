#pragma once

#include "monoracle/criteria.hpp"
#include "monoracle/densities.hpp"
#include "monoracle/grid.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace monoracle {

struct WaveletIndex
{
  int s{ 0 };
  long t{ 0 };
};

//! One constant piece of a spectral Haar element on the positive half-axis;
//! all elements are even, so integrals over R are twice the one-sided sums.
struct HaarPiece
{
  double lo{ 0.0 };
  double hi{ 0.0 };
  double value{ 0.0 };
};

struct HaarElement
{
  WaveletIndex index;
  bool mother{ false };
  std::array<HaarPiece, 2> pieces{};
  int piece_count{ 0 };
};

double haar_value(const HaarElement& element, double omega);
double haar_inner_product(const HaarElement& a, const HaarElement& b);

//! Spectral Haar-type basis: fathers (0,1),(0,2),(-1,2),...,(-d_n,2); mothers
//! with s = -1..-d_n at t = 2..2^s W and s = 0..mother_scale_cap at
//! t = 1..2^s W. Rows whose index range is empty at deep negative scales are
//! skipped; the basis is rejected if the first mother row is already empty.
struct SpectralHaarBasis
{
  double band_limit{ 0.0 };
  int depth{ 0 };            // d_n
  int mother_scale_cap{ 0 }; // largest non-negative mother scale enumerated
  std::vector<HaarElement> fathers;
  std::vector<HaarElement> mothers;
};

SpectralHaarBasis build_haar_basis(double band_limit, int depth, int mother_scale_cap);

struct Coefficient
{
  WaveletIndex index;
  double value{ 0.0 };
};

//! Coefficients of a kernel (or bias) against a wavelet basis. Entries are
//! ordered like the basis elements, so reconstruction is a plain zip.
struct CoefficientSet
{
  std::vector<Coefficient> alphas;
  std::vector<Coefficient> betas;
  std::string source;
  double truncation_error{ 0.0 };
};

CoefficientSet kernel_coefficients(const SpectralKernel& kernel,
                                   const SpectralHaarBasis& basis);

double reconstruct_transform(const CoefficientSet& coefficients,
                             const SpectralHaarBasis& basis, double omega);

struct BoundRow
{
  std::string family; // "father", "mother_negative", "mother_nonnegative", ...
  int scale{ 0 };
  double value{ 0.0 };
  double bound{ 0.0 };
  double slack{ 0.0 }; // bound - value
  bool violated{ false };
};

struct LemmaReport
{
  std::string name;
  std::vector<BoundRow> rows;

  int violations() const;
};

//! Coefficient bounds for admissible kernels: the father block is bounded by
//! sqrt(d_n + 2) * sqrt(2 pi int K^2), each negative-scale mother row by
//! sqrt(2 pi int K^2) and each non-negative row by 2^{(-s+1)/2}.
LemmaReport check_lemma1(const SpectralKernel& kernel, const SpectralHaarBasis& basis);

//! Density-adapted basis built from F(w) = int_{-w}^{w} |fhat|^2. Breakpoints
//! are the dyadic quantiles of the spectral mass; pieces are stored as index
//! ranges into the shared breakpoint array, so equal-mass structure is exact.
struct FPiece
{
  std::size_t lo_index{ 0 };
  std::size_t hi_index{ 0 };
  double sign{ 1.0 };
};

struct FElement
{
  WaveletIndex index;
  bool mother{ false };
  double norm{ 0.0 };
  std::array<FPiece, 2> pieces{};
  int piece_count{ 0 };
};

struct FAdaptedBasis
{
  DensityModel model;
  double band_limit{ 0.0 };
  int depth{ 0 };       // s_n
  int scale_cap{ 0 };   // largest mother scale enumerated (>= depth)
  int index_scale{ 0 }; // S: breakpoints at targets j * 2^-S * F_n
  double half_mass{ 0.0 }; // G_W = int_0^W |fhat|^2 (one-sided), F_n = 2 G_W
  std::vector<double> breakpoints; // size 2^S + 1, breakpoints[0] = 0, last = W
  std::vector<FElement> fathers;
  std::vector<FElement> mothers;

  double piece_lo(const FPiece& piece) const { return breakpoints[piece.lo_index]; }
  double piece_hi(const FPiece& piece) const { return breakpoints[piece.hi_index]; }
  //! One-sided spectral mass of a piece, exact by construction.
  double piece_mass(const FPiece& piece) const
  {
    return static_cast<double>(piece.hi_index - piece.lo_index) *
           std::ldexp(half_mass, -index_scale);
  }
};

FAdaptedBasis build_f_basis(const DensityModel& model, double band_limit, int depth,
                            int scale_cap);

//! <a, b> over R computed from the exact piece masses.
double f_inner_product(const FAdaptedBasis& basis, const FElement& a, const FElement& b);

//! Coefficient bounds of the low-frequency bias fhat (Khat - 1) on the band:
//! father block <= sqrt(s_n + 1) sqrt(2 pi int b_K^2), mother rows below s_n
//! <= 2 sqrt(2 pi int b_K^2), rows at or above s_n <= 2 * 2^{-s/2} ||f||_2.
LemmaReport check_lemma3(const SpectralKernel& kernel, const DensityModel& model,
                         const FAdaptedBasis& basis);

//! Coefficients of the bias against the f-adapted basis (exposed for tests).
CoefficientSet bias_coefficients(const SpectralKernel& kernel, const DensityModel& model,
                                 const FAdaptedBasis& basis);

struct ExceedanceRow
{
  std::string family; // "haar_father", "haar_mother", "f_father", "f_mother"
  WaveletIndex index;
  double threshold{ 0.0 };
  double frequency{ 0.0 };
};

struct FavorableEventReport
{
  double lambda{ 0.0 };
  std::size_t n{ 0 };
  int reps{ 0 };
  std::uint64_t seed{ 0 };
  int depth{ 0 }; // d_n = s_n = ceil(ln n)
  double probe_band{ 0.0 };
  std::vector<ExceedanceRow> u_statistic_rows; // basic degenerate U-statistics
  std::vector<ExceedanceRow> partial_sum_rows; // centered partial sums

  bool all_zero() const;
  bool any_positive() const;
};

//! Empirical exceedance frequencies of the favorable-event thresholds over
//! `reps` seeded replications. The probe set holds every father plus all
//! mothers with scale s <= 3 of both bases.
FavorableEventReport favorable_event_frequencies(const DensityModel& model, std::size_t n,
                                                 double lambda, int reps,
                                                 std::uint64_t seed,
                                                 double probe_band = 16.0);

int depth_for_sample_size(std::size_t n); // ceil(ln n)

} // namespace monoracle
