#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace monoracle {

struct Gaussian
{
  double mean{ 0.0 };
  double sigma{ 1.0 };
};

struct Laplace
{
  double mean{ 0.0 };
  double scale{ 1.0 };
};

struct Cauchy
{
  double location{ 0.0 };
  double scale{ 1.0 };
};

struct Uniform
{
  double lower{ 0.0 };
  double upper{ 1.0 };
};

struct GaussianMixture
{
  std::vector<double> weights;
  std::vector<Gaussian> components;
};

//! Analytic test density with closed-form characteristic function, exact L2
//! norm and a reproducible sampler. The characteristic function convention is
//! fhat(w) = int f(x) e^{iwx} dx.
class DensityModel
{
public:
  DensityModel() = default;
  explicit DensityModel(Gaussian g);
  explicit DensityModel(Laplace l);
  explicit DensityModel(Cauchy c);
  explicit DensityModel(Uniform u);
  explicit DensityModel(GaussianMixture m);

  double pdf(double x) const;
  std::complex<double> cf(double omega) const;
  double cf_power(double omega) const; // |fhat(omega)|^2, closed form

  double l2_norm_sq() const;
  double l2_norm() const;
  double sup_norm() const;

  //! (1/2pi) int_{|w|>W} |fhat|^2 dw; closed form for Gaussian/Laplace/Cauchy,
  //! exact L2 norm minus adaptive quadrature otherwise.
  double tail_energy(double band_limit) const;

  //! One-sided int_a^b |fhat(tau)|^2 dtau, 0 <= a <= b.
  double cf_power_integral(double a, double b) const;

  std::vector<double> sample_values(std::size_t n, std::uint64_t seed) const;

  std::string spec_string() const;
  static DensityModel parse(const std::string& spec);

private:
  std::variant<Gaussian, Laplace, Cauchy, Uniform, GaussianMixture> model_{ Gaussian{} };
};

//! An i.i.d. sample together with the seed that produced it.
struct SampleSet
{
  std::vector<double> values;
  std::uint64_t seed{ 0 };
  std::string model_tag;

  std::size_t size() const { return values.size(); }
};

SampleSet draw_sample(const DensityModel& model, std::size_t n, std::uint64_t seed);

} // namespace monoracle
