#include "monoracle/wavelet.hpp"

#include "monoracle/kernels.hpp"
#include "monoracle/quadrature.hpp"
#include "monoracle/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace monoracle {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kBoundTolerance = 1e-8; // quadrature tolerance folded into bounds

double pow2(double exponent)
{
  return std::exp2(exponent);
}

} // namespace

int depth_for_sample_size(std::size_t n)
{
  if (n < 2)
    throw std::invalid_argument("depth requires n >= 2");
  return std::max(1, static_cast<int>(std::ceil(std::log(static_cast<double>(n)))));
}

double haar_value(const HaarElement& element, double omega)
{
  const double w = std::abs(omega);
  for (int p = 0; p < element.piece_count; ++p)
    if (w >= element.pieces[p].lo && w < element.pieces[p].hi)
      return element.pieces[p].value;
  return 0.0;
}

double haar_inner_product(const HaarElement& a, const HaarElement& b)
{
  double acc = 0.0;
  for (int i = 0; i < a.piece_count; ++i)
    for (int j = 0; j < b.piece_count; ++j) {
      const double lo = std::max(a.pieces[i].lo, b.pieces[j].lo);
      const double hi = std::min(a.pieces[i].hi, b.pieces[j].hi);
      if (hi > lo)
        acc += (hi - lo) * a.pieces[i].value * b.pieces[j].value;
    }
  return 2.0 * acc; // symmetric extension
}

namespace {

HaarElement make_father(int s, long t)
{
  // phi_st = 2^{(s-1)/2} I(|w| in [2^-s (t-1), 2^-s t))
  const double width_scale = std::ldexp(1.0, -s);
  HaarElement element;
  element.index = WaveletIndex{ s, t };
  element.mother = false;
  element.pieces[0] = HaarPiece{ width_scale * static_cast<double>(t - 1),
                                 width_scale * static_cast<double>(t),
                                 pow2(0.5 * (s - 1)) };
  element.piece_count = 1;
  return element;
}

HaarElement make_mother(int s, long t)
{
  // psi_st = 2^{(s-1)/2} [I_{s+1,2t-1} - I_{s+1,2t}]
  const double half_scale = std::ldexp(1.0, -(s + 1));
  const double value = pow2(0.5 * (s - 1));
  HaarElement element;
  element.index = WaveletIndex{ s, t };
  element.mother = true;
  element.pieces[0] = HaarPiece{ half_scale * static_cast<double>(2 * t - 2),
                                 half_scale * static_cast<double>(2 * t - 1), value };
  element.pieces[1] = HaarPiece{ half_scale * static_cast<double>(2 * t - 1),
                                 half_scale * static_cast<double>(2 * t), -value };
  element.piece_count = 2;
  return element;
}

long mother_row_end(double band_limit, int s)
{
  return static_cast<long>(std::floor(std::ldexp(band_limit, s)));
}

} // namespace

SpectralHaarBasis build_haar_basis(double band_limit, int depth, int mother_scale_cap)
{
  if (!(band_limit > 0.0))
    throw std::invalid_argument("band limit must be positive");
  if (depth < 0)
    throw std::invalid_argument("depth d_n must be non-negative");
  if (mother_scale_cap < 0)
    throw std::invalid_argument("mother scale cap must be non-negative");
  if (depth >= 1 && mother_row_end(band_limit, -1) < 2)
    throw std::invalid_argument("mother index range s=-1 is empty; band limit too small");
  if (mother_row_end(band_limit, 0) < 1)
    throw std::invalid_argument("mother index range s=0 is empty; band limit too small");

  SpectralHaarBasis basis;
  basis.band_limit = band_limit;
  basis.depth = depth;
  basis.mother_scale_cap = mother_scale_cap;

  basis.fathers.push_back(make_father(0, 1));
  basis.fathers.push_back(make_father(0, 2));
  for (int s = 1; s <= depth; ++s)
    basis.fathers.push_back(make_father(-s, 2));

  for (int s = -1; s >= -depth; --s) {
    const long end = mother_row_end(band_limit, s);
    for (long t = 2; t <= end; ++t)
      basis.mothers.push_back(make_mother(s, t));
  }
  for (int s = 0; s <= mother_scale_cap; ++s) {
    const long end = mother_row_end(band_limit, s);
    for (long t = 1; t <= end; ++t)
      basis.mothers.push_back(make_mother(s, t));
  }
  return basis;
}

namespace {

//! Exact prefix integral of the step transform, valid at any real point.
class TransformIntegral
{
public:
  explicit TransformIntegral(const SpectralKernel& kernel)
    : kernel_(kernel)
    , prefix_(transform_prefix_integral(kernel))
  {
  }

  double operator()(double x) const
  {
    if (x <= 0.0)
      return 0.0;
    const double h = kernel_.grid.bin_width();
    if (x >= kernel_.grid.band_limit)
      return prefix_.back();
    const auto k = std::min<std::size_t>(static_cast<std::size_t>(x / h),
                                         kernel_.grid.bins - 1);
    return prefix_[k] + kernel_.v[k] * (x - kernel_.grid.edge(k));
  }

private:
  const SpectralKernel& kernel_;
  std::vector<double> prefix_;
};

double element_against_transform(const HaarElement& element, const TransformIntegral& Kint)
{
  double acc = 0.0;
  for (int p = 0; p < element.piece_count; ++p)
    acc += element.pieces[p].value * (Kint(element.pieces[p].hi) - Kint(element.pieces[p].lo));
  return 2.0 * acc;
}

} // namespace

CoefficientSet kernel_coefficients(const SpectralKernel& kernel,
                                   const SpectralHaarBasis& basis)
{
  if (basis.mother_scale_cap > kernel.grid.resolution)
    throw std::invalid_argument(
        "kernel grid resolution is too coarse for the requested mother scales");

  const TransformIntegral Kint(kernel);
  CoefficientSet coefficients;
  coefficients.source = "kernel";
  coefficients.alphas.reserve(basis.fathers.size());
  coefficients.betas.reserve(basis.mothers.size());

  double energy = 0.0;
  for (const auto& father : basis.fathers) {
    const double value = element_against_transform(father, Kint);
    coefficients.alphas.push_back(Coefficient{ father.index, value });
    energy += value * value;
  }
  for (const auto& mother : basis.mothers) {
    const double value = element_against_transform(mother, Kint);
    coefficients.betas.push_back(Coefficient{ mother.index, value });
    energy += value * value;
  }

  // Coefficients of a step transform vanish exactly at scales at or beyond the
  // grid resolution, so the only residual is mass the basis does not cover.
  const double total = 2.0 * kPi * kernel_l2_norm_sq(kernel);
  coefficients.truncation_error = std::max(0.0, total - energy);
  return coefficients;
}

double reconstruct_transform(const CoefficientSet& coefficients,
                             const SpectralHaarBasis& basis, double omega)
{
  if (coefficients.alphas.size() != basis.fathers.size() ||
      coefficients.betas.size() != basis.mothers.size())
    throw std::invalid_argument("coefficient set does not match basis layout");
  double acc = 0.0;
  for (std::size_t i = 0; i < basis.fathers.size(); ++i)
    acc += coefficients.alphas[i].value * haar_value(basis.fathers[i], omega);
  for (std::size_t i = 0; i < basis.mothers.size(); ++i)
    acc += coefficients.betas[i].value * haar_value(basis.mothers[i], omega);
  return acc;
}

int LemmaReport::violations() const
{
  int count = 0;
  for (const auto& row : rows)
    if (row.violated)
      ++count;
  return count;
}

namespace {

BoundRow make_row(std::string family, int scale, double value, double bound)
{
  BoundRow row;
  row.family = std::move(family);
  row.scale = scale;
  row.value = value;
  row.bound = bound;
  row.slack = bound - value;
  row.violated = value > bound + kBoundTolerance;
  return row;
}

} // namespace

LemmaReport check_lemma1(const SpectralKernel& kernel, const SpectralHaarBasis& basis)
{
  const CoefficientSet coefficients = kernel_coefficients(kernel, basis);
  const double transform_energy = 2.0 * kPi * kernel_l2_norm_sq(kernel);

  LemmaReport report;
  report.name = "lemma1";

  double father_sum = 0.0;
  for (const auto& alpha : coefficients.alphas)
    father_sum += std::abs(alpha.value);
  report.rows.push_back(make_row("father", 0, father_sum,
                                 std::sqrt(static_cast<double>(basis.depth) + 2.0) *
                                     std::sqrt(transform_energy)));

  // Row sums per mother scale.
  for (int s = -1; s >= -basis.depth; --s) {
    double row_sum = 0.0;
    bool seen = false;
    for (const auto& beta : coefficients.betas)
      if (beta.index.s == s) {
        row_sum += std::abs(beta.value);
        seen = true;
      }
    if (seen)
      report.rows.push_back(
          make_row("mother_negative", s, row_sum, std::sqrt(transform_energy)));
  }
  for (int s = 0; s <= basis.mother_scale_cap; ++s) {
    double row_sum = 0.0;
    for (const auto& beta : coefficients.betas)
      if (beta.index.s == s)
        row_sum += std::abs(beta.value);
    report.rows.push_back(
        make_row("mother_nonnegative", s, row_sum, pow2(0.5 * (1 - s))));
  }
  return report;
}

FAdaptedBasis build_f_basis(const DensityModel& model, double band_limit, int depth,
                            int scale_cap)
{
  if (!(band_limit > 0.0))
    throw std::invalid_argument("band limit must be positive");
  if (depth < 1)
    throw std::invalid_argument("f-adapted basis requires depth s_n >= 1");
  scale_cap = std::max(scale_cap, depth);

  FAdaptedBasis basis;
  basis.model = model;
  basis.band_limit = band_limit;
  basis.depth = depth;
  basis.scale_cap = scale_cap;
  basis.index_scale = scale_cap + 1;

  const double half_mass = model.cf_power_integral(0.0, band_limit);
  if (!(half_mass > 0.0))
    throw std::invalid_argument("spectral mass on the band vanishes");
  basis.half_mass = half_mass;

  const std::size_t count = std::size_t{ 1 } << basis.index_scale;
  basis.breakpoints.assign(count + 1, 0.0);
  basis.breakpoints[count] = band_limit;
  const double unit = std::ldexp(half_mass, -basis.index_scale);
  for (std::size_t j = 1; j < count; ++j) {
    const double target = unit * static_cast<double>(j);
    double lo = basis.breakpoints[j - 1];
    double lo_mass = unit * static_cast<double>(j - 1);
    double hi = band_limit;
    // Leftmost root of G(x) = target; bisection to floating-point exhaustion.
    while (true) {
      const double mid = 0.5 * (lo + hi);
      if (!(mid > lo) || !(mid < hi))
        break;
      const double value = lo_mass + model.cf_power_integral(lo, mid);
      if (value < target) {
        lo = mid;
        lo_mass = value;
      } else {
        hi = mid;
      }
    }
    basis.breakpoints[j] = hi;
    const double achieved = model.cf_power_integral(0.0, hi);
    if (std::abs(achieved - target) > 1e-9 * half_mass) {
      std::ostringstream msg;
      msg << "degenerate breakpoint: F is not strictly increasing at target "
          << target / half_mass << " * F_n (reached " << achieved / half_mass << ")";
      throw std::runtime_error(msg.str());
    }
  }

  const auto father_piece = [&](int s, long t) {
    const std::size_t stride = std::size_t{ 1 } << (basis.index_scale - s);
    return FPiece{ static_cast<std::size_t>(t - 1) * stride,
                   static_cast<std::size_t>(t) * stride, 1.0 };
  };

  for (int s = 1; s <= depth; ++s) {
    FElement element;
    element.index = WaveletIndex{ s, (long{ 1 } << s) - 1 };
    element.mother = false;
    element.norm = pow2(0.5 * s) / std::sqrt(2.0 * half_mass);
    element.pieces[0] = father_piece(s, element.index.t);
    element.piece_count = 1;
    basis.fathers.push_back(element);
  }
  {
    FElement element;
    element.index = WaveletIndex{ depth, long{ 1 } << depth };
    element.mother = false;
    element.norm = pow2(0.5 * depth) / std::sqrt(2.0 * half_mass);
    element.pieces[0] = father_piece(depth, element.index.t);
    element.piece_count = 1;
    basis.fathers.push_back(element);
  }

  for (int s = 1; s <= scale_cap; ++s) {
    const long end = (s < depth) ? (long{ 1 } << s) - 1 : (long{ 1 } << s);
    const std::size_t stride = std::size_t{ 1 } << (basis.index_scale - s - 1);
    for (long t = 1; t <= end; ++t) {
      FElement element;
      element.index = WaveletIndex{ s, t };
      element.mother = true;
      element.norm = pow2(0.5 * s) / std::sqrt(2.0 * half_mass);
      element.pieces[0] = FPiece{ static_cast<std::size_t>(2 * t - 2) * stride,
                                  static_cast<std::size_t>(2 * t - 1) * stride, 1.0 };
      element.pieces[1] = FPiece{ static_cast<std::size_t>(2 * t - 1) * stride,
                                  static_cast<std::size_t>(2 * t) * stride, -1.0 };
      element.piece_count = 2;
      basis.mothers.push_back(element);
    }
  }
  return basis;
}

double f_inner_product(const FAdaptedBasis& basis, const FElement& a, const FElement& b)
{
  const double unit = std::ldexp(basis.half_mass, -basis.index_scale);
  double acc = 0.0;
  for (int i = 0; i < a.piece_count; ++i)
    for (int j = 0; j < b.piece_count; ++j) {
      const std::size_t lo = std::max(a.pieces[i].lo_index, b.pieces[j].lo_index);
      const std::size_t hi = std::min(a.pieces[i].hi_index, b.pieces[j].hi_index);
      if (hi > lo)
        acc += a.pieces[i].sign * b.pieces[j].sign *
               static_cast<double>(hi - lo) * unit;
    }
  return 2.0 * acc * a.norm * b.norm;
}

namespace {

//! Integrals of |fhat|^2 (Khat - 1) over breakpoint intervals, resolved
//! against the kernel's bins through cumulative spectral-mass tables.
class BiasIntegrator
{
public:
  BiasIntegrator(const SpectralKernel& kernel, const DensityModel& model,
                 const FAdaptedBasis& basis)
    : kernel_(kernel)
    , basis_(basis)
  {
    const std::size_t m = kernel.grid.bins;
    mass_edges_.assign(m + 1, 0.0);
    for (std::size_t k = 0; k < m; ++k)
      mass_edges_[k + 1] =
          mass_edges_[k] +
          model.cf_power_integral(kernel.grid.edge(k), kernel.grid.edge(k + 1));
    weighted_prefix_.assign(m + 1, 0.0);
    for (std::size_t k = 0; k < m; ++k)
      weighted_prefix_[k + 1] =
          weighted_prefix_[k] +
          (kernel.v[k] - 1.0) * (mass_edges_[k + 1] - mass_edges_[k]);
  }

  //! int over [breakpoint j_lo, breakpoint j_hi) of |fhat|^2 (Khat - 1).
  double over_piece(const FPiece& piece) const
  {
    const double unit = std::ldexp(basis_.half_mass, -basis_.index_scale);
    const double p = basis_.breakpoints[piece.lo_index];
    const double q = basis_.breakpoints[piece.hi_index];
    const double mass_p = unit * static_cast<double>(piece.lo_index);
    const double mass_q = unit * static_cast<double>(piece.hi_index);
    const std::size_t kp = bin_of(p);
    const std::size_t kq = bin_of(q);
    if (kp == kq)
      return (kernel_.v[kp] - 1.0) * (mass_q - mass_p);
    double acc = (kernel_.v[kp] - 1.0) * (mass_edges_[kp + 1] - mass_p);
    acc += weighted_prefix_[kq] - weighted_prefix_[kp + 1];
    acc += (kernel_.v[kq] - 1.0) * (mass_q - mass_edges_[kq]);
    return acc;
  }

  double band_mass(std::size_t k) const { return mass_edges_[k + 1] - mass_edges_[k]; }

private:
  std::size_t bin_of(double x) const
  {
    const double h = kernel_.grid.bin_width();
    return std::min<std::size_t>(static_cast<std::size_t>(x / h), kernel_.grid.bins - 1);
  }

  const SpectralKernel& kernel_;
  const FAdaptedBasis& basis_;
  std::vector<double> mass_edges_;
  std::vector<double> weighted_prefix_;
};

} // namespace

CoefficientSet bias_coefficients(const SpectralKernel& kernel, const DensityModel& model,
                                 const FAdaptedBasis& basis)
{
  if (kernel.grid.band_limit != basis.band_limit)
    throw std::invalid_argument("kernel band limit does not match basis band limit");
  const BiasIntegrator integrator(kernel, model, basis);

  CoefficientSet coefficients;
  coefficients.source = "bias";
  const auto coefficient = [&](const FElement& element) {
    double acc = 0.0;
    for (int p = 0; p < element.piece_count; ++p)
      acc += element.pieces[p].sign * integrator.over_piece(element.pieces[p]);
    return 2.0 * element.norm * acc;
  };
  for (const auto& father : basis.fathers)
    coefficients.alphas.push_back(Coefficient{ father.index, coefficient(father) });
  for (const auto& mother : basis.mothers)
    coefficients.betas.push_back(Coefficient{ mother.index, coefficient(mother) });
  return coefficients;
}

LemmaReport check_lemma3(const SpectralKernel& kernel, const DensityModel& model,
                         const FAdaptedBasis& basis)
{
  const CoefficientSet coefficients = bias_coefficients(kernel, model, basis);

  // int b_K^2 = (1/pi) int_band |fhat|^2 (1-Khat)^2 + tail energy.
  const BiasIntegrator integrator(kernel, model, basis);
  double band = 0.0;
  for (std::size_t k = 0; k < kernel.grid.bins; ++k) {
    const double deficit = 1.0 - kernel.v[k];
    band += deficit * deficit * integrator.band_mass(k);
  }
  const double bias_l2_sq = band / kPi + model.tail_energy(kernel.grid.band_limit);
  const double bias_energy = 2.0 * kPi * bias_l2_sq;

  LemmaReport report;
  report.name = "lemma3";

  double father_sum = 0.0;
  for (const auto& alpha : coefficients.alphas)
    father_sum += std::abs(alpha.value);
  report.rows.push_back(make_row("father", 0, father_sum,
                                 std::sqrt(static_cast<double>(basis.depth) + 1.0) *
                                     std::sqrt(bias_energy)));

  for (int s = 1; s <= basis.scale_cap; ++s) {
    double row_sum = 0.0;
    for (const auto& beta : coefficients.betas)
      if (beta.index.s == s)
        row_sum += std::abs(beta.value);
    if (s < basis.depth)
      report.rows.push_back(
          make_row("mother_below_sn", s, row_sum, 2.0 * std::sqrt(bias_energy)));
    else
      report.rows.push_back(make_row("mother_at_or_above_sn", s, row_sum,
                                     2.0 * pow2(-0.5 * s) * model.l2_norm()));
  }
  return report;
}

bool FavorableEventReport::all_zero() const
{
  for (const auto& row : u_statistic_rows)
    if (row.frequency > 0.0)
      return false;
  for (const auto& row : partial_sum_rows)
    if (row.frequency > 0.0)
      return false;
  return true;
}

bool FavorableEventReport::any_positive() const
{
  return !all_zero();
}

namespace {

struct ProbeRanges
{
  std::size_t lo[2];
  std::size_t hi[2];
  double value[2];
  int count;
};

double percentile_abs(const std::vector<double>& xs, double q)
{
  std::vector<double> magnitudes(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i)
    magnitudes[i] = std::abs(xs[i]);
  const std::size_t pos =
      std::min(magnitudes.size() - 1,
               static_cast<std::size_t>(q * static_cast<double>(magnitudes.size())));
  std::nth_element(magnitudes.begin(), magnitudes.begin() + pos, magnitudes.end());
  return magnitudes[pos];
}

} // namespace

FavorableEventReport favorable_event_frequencies(const DensityModel& model, std::size_t n,
                                                 double lambda, int reps,
                                                 std::uint64_t seed, double probe_band)
{
  if (reps < 1)
    throw std::invalid_argument("favorable-event check requires reps >= 1");
  if (n < 2)
    throw std::invalid_argument("favorable-event check requires n >= 2");
  if (!(lambda > 0.0))
    throw std::invalid_argument("lambda must be positive");

  const int depth = depth_for_sample_size(n);
  const int probe_mother_cap = 3;
  const SpectralHaarBasis haar = build_haar_basis(probe_band, depth, probe_mother_cap);
  const FAdaptedBasis fbasis = build_f_basis(model, probe_band, depth, depth);

  std::vector<const FElement*> f_probe;
  for (const auto& father : fbasis.fathers)
    f_probe.push_back(&father);
  for (const auto& mother : fbasis.mothers)
    if (mother.index.s <= probe_mother_cap)
      f_probe.push_back(&mother);

  const double extent = std::max(probe_band, std::ldexp(1.0, depth + 1));
  const int fine_resolution = 6;
  const FrequencyGrid fine = build_grid(extent, fine_resolution);
  const double h = fine.bin_width();

  // Model quantities on the fine grid are replication independent.
  std::vector<double> f_re(fine.bins), f_im(fine.bins), f_pow(fine.bins);
  for (std::size_t k = 0; k < fine.bins; ++k) {
    const auto fhat = model.cf(fine.midpoint(k));
    f_re[k] = fhat.real();
    f_im[k] = fhat.imag();
    f_pow[k] = model.cf_power(fine.midpoint(k));
  }
  std::vector<double> prefix_pow(fine.bins + 1, 0.0);
  for (std::size_t k = 0; k < fine.bins; ++k)
    prefix_pow[k + 1] = prefix_pow[k] + f_pow[k] * h;

  std::vector<const HaarElement*> haar_probe;
  for (const auto& father : haar.fathers)
    haar_probe.push_back(&father);
  for (const auto& mother : haar.mothers)
    haar_probe.push_back(&mother);

  std::vector<ProbeRanges> haar_ranges(haar_probe.size());
  for (std::size_t e = 0; e < haar_probe.size(); ++e) {
    const HaarElement& element = *haar_probe[e];
    ProbeRanges ranges{};
    ranges.count = element.piece_count;
    for (int p = 0; p < element.piece_count; ++p) {
      ranges.lo[p] = static_cast<std::size_t>(std::llround(element.pieces[p].lo / h));
      ranges.hi[p] = static_cast<std::size_t>(std::llround(element.pieces[p].hi / h));
      ranges.value[p] = element.pieces[p].value;
    }
    haar_ranges[e] = ranges;
  }

  const auto range_integral = [](const ProbeRanges& ranges, const std::vector<double>& prefix) {
    double acc = 0.0;
    for (int p = 0; p < ranges.count; ++p)
      acc += ranges.value[p] * (prefix[ranges.hi[p]] - prefix[ranges.lo[p]]);
    return acc;
  };

  std::vector<double> haar_expectation(haar_probe.size());
  for (std::size_t e = 0; e < haar_probe.size(); ++e)
    haar_expectation[e] = range_integral(haar_ranges[e], prefix_pow) / kPi;

  std::vector<double> f_expectation(f_probe.size());
  const double unit = std::ldexp(fbasis.half_mass, -fbasis.index_scale);
  for (std::size_t e = 0; e < f_probe.size(); ++e) {
    const FElement& element = *f_probe[e];
    double acc = 0.0;
    for (int p = 0; p < element.piece_count; ++p)
      acc += element.pieces[p].sign * fbasis.piece_mass(element.pieces[p]);
    f_expectation[e] = element.norm * acc / kPi;
    (void)unit;
  }

  const double nd = static_cast<double>(n);
  const double log_n = std::log(nd);
  const double u_threshold_low = lambda * std::pow(log_n, 1.5) / nd;
  const double sum_threshold_low = lambda * log_n / std::sqrt(nd);

  const auto haar_threshold = [&](const HaarElement& element) {
    if (element.mother && element.index.s >= 0)
      return (lambda * log_n + static_cast<double>(element.index.s)) / nd;
    return u_threshold_low;
  };
  const auto f_threshold = [&](const FElement& element) {
    if (element.mother && element.index.s >= fbasis.depth)
      return (lambda * log_n + static_cast<double>(element.index.s)) / std::sqrt(nd);
    return sum_threshold_low;
  };

  std::vector<int> haar_exceed(haar_probe.size(), 0);
  std::vector<int> f_exceed(f_probe.size(), 0);
  std::vector<std::vector<char>> haar_flags(reps), f_flags(reps);

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(effective_threads())
#endif
  for (int rep = 0; rep < reps; ++rep) {
    const std::vector<double> xs = model.sample_values(n, derive_seed(seed, rep));
    const CfSums sums = cf_sums_serial(xs, fine);

    std::vector<double> prefix_u(fine.bins + 1, 0.0);
    std::vector<double> prefix_cross(fine.bins + 1, 0.0);
    for (std::size_t k = 0; k < fine.bins; ++k) {
      const double s_sq = sums.re[k] * sums.re[k] + sums.im[k] * sums.im[k];
      prefix_u[k + 1] = prefix_u[k] + (s_sq - nd) * h;
      // Re[fhat * conj(S)]
      prefix_cross[k + 1] = prefix_cross[k] + (f_re[k] * sums.re[k] + f_im[k] * sums.im[k]) * h;
    }

    std::vector<char> local_haar(haar_probe.size(), 0);
    for (std::size_t e = 0; e < haar_probe.size(); ++e) {
      const double i_pairs = range_integral(haar_ranges[e], prefix_u) / kPi;
      const double i_cross = range_integral(haar_ranges[e], prefix_cross) / kPi;
      const double stat = i_pairs / (nd * (nd - 1.0)) - (2.0 / nd) * i_cross +
                          haar_expectation[e];
      local_haar[e] = std::abs(stat) > haar_threshold(*haar_probe[e]) ? 1 : 0;
    }
    haar_flags[rep] = std::move(local_haar);

    // Partial sums of the f-adapted elements; S is evaluated directly at
    // Gauss nodes because the breakpoints are not grid aligned.
    const double x_scale = std::min(percentile_abs(xs, 0.95), 64.0);
    const double panel = 2.0 / (1.0 + x_scale);
    std::vector<char> local_f(f_probe.size(), 0);
    for (std::size_t e = 0; e < f_probe.size(); ++e) {
      const FElement& element = *f_probe[e];
      double cross = 0.0;
      for (int p = 0; p < element.piece_count; ++p) {
        const double a = fbasis.piece_lo(element.pieces[p]);
        const double b = fbasis.piece_hi(element.pieces[p]);
        const double piece = quad::composite_gauss8(
            [&](double w) {
              double s_re = 0.0, s_im = 0.0;
              for (double x : xs) {
                s_re += std::cos(w * x);
                s_im += std::sin(w * x);
              }
              const auto fhat = model.cf(w);
              return fhat.real() * s_re + fhat.imag() * s_im;
            },
            a, b, panel);
        cross += element.pieces[p].sign * piece;
      }
      const double mean_value = element.norm * cross / (kPi * nd);
      const double stat = mean_value - f_expectation[e];
      local_f[e] = std::abs(stat) > f_threshold(element) ? 1 : 0;
    }
    f_flags[rep] = std::move(local_f);
  }

  for (int rep = 0; rep < reps; ++rep) {
    for (std::size_t e = 0; e < haar_probe.size(); ++e)
      haar_exceed[e] += haar_flags[rep][e];
    for (std::size_t e = 0; e < f_probe.size(); ++e)
      f_exceed[e] += f_flags[rep][e];
  }

  FavorableEventReport report;
  report.lambda = lambda;
  report.n = n;
  report.reps = reps;
  report.seed = seed;
  report.depth = depth;
  report.probe_band = probe_band;
  for (std::size_t e = 0; e < haar_probe.size(); ++e) {
    ExceedanceRow row;
    row.family = haar_probe[e]->mother ? "haar_mother" : "haar_father";
    row.index = haar_probe[e]->index;
    row.threshold = haar_threshold(*haar_probe[e]);
    row.frequency = static_cast<double>(haar_exceed[e]) / static_cast<double>(reps);
    report.u_statistic_rows.push_back(row);
  }
  for (std::size_t e = 0; e < f_probe.size(); ++e) {
    ExceedanceRow row;
    row.family = f_probe[e]->mother ? "f_mother" : "f_father";
    row.index = f_probe[e]->index;
    row.threshold = f_threshold(*f_probe[e]);
    row.frequency = static_cast<double>(f_exceed[e]) / static_cast<double>(reps);
    report.partial_sum_rows.push_back(row);
  }
  return report;
}

} // namespace monoracle
