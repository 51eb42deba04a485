#include "monoracle/densities.hpp"

#include "monoracle/quadrature.hpp"
#include "monoracle/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace monoracle {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSqrtPi = 1.7724538509055160273;
constexpr double kSqrt2Pi = 2.5066282746310005024;

double sinc(double x)
{
  if (std::abs(x) < 1e-8)
    return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

double gaussian_pdf(const Gaussian& g, double x)
{
  const double z = (x - g.mean) / g.sigma;
  return std::exp(-0.5 * z * z) / (g.sigma * kSqrt2Pi);
}

//! int N(x; m1, s1) N(x; m2, s2) dx = N(m1 - m2; 0, sqrt(s1^2 + s2^2)).
double gaussian_overlap(const Gaussian& a, const Gaussian& b)
{
  const double var = a.sigma * a.sigma + b.sigma * b.sigma;
  const double diff = a.mean - b.mean;
  return std::exp(-0.5 * diff * diff / var) / (kSqrt2Pi * std::sqrt(var));
}

double format_double(char* buffer, std::size_t size, double value, std::string& out)
{
  auto res = std::to_chars(buffer, buffer + size, value);
  out.assign(buffer, res.ptr);
  return value;
}

std::string number_to_string(double value)
{
  char buffer[40];
  std::string out;
  format_double(buffer, sizeof(buffer), value, out);
  return out;
}

double parse_double(const std::string& text)
{
  double value = 0.0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
    throw std::invalid_argument("model spec: cannot parse number '" + text + "'");
  return value;
}

std::pair<double, double> parse_two_params(const std::string& body, const char* kind)
{
  const auto comma = body.find(',');
  if (comma == std::string::npos)
    throw std::invalid_argument(std::string("model spec: ") + kind +
                                " expects two comma-separated parameters");
  return { parse_double(body.substr(0, comma)), parse_double(body.substr(comma + 1)) };
}

} // namespace

DensityModel::DensityModel(Gaussian g)
  : model_(g)
{
  if (!(g.sigma > 0.0))
    throw std::invalid_argument("gaussian sigma must be positive");
}

DensityModel::DensityModel(Laplace l)
  : model_(l)
{
  if (!(l.scale > 0.0))
    throw std::invalid_argument("laplace scale must be positive");
}

DensityModel::DensityModel(Cauchy c)
  : model_(c)
{
  if (!(c.scale > 0.0))
    throw std::invalid_argument("cauchy scale must be positive");
}

DensityModel::DensityModel(Uniform u)
  : model_(u)
{
  if (!(u.upper > u.lower))
    throw std::invalid_argument("uniform requires upper > lower");
}

DensityModel::DensityModel(GaussianMixture m)
  : model_(std::move(m))
{
  const auto& mix = std::get<GaussianMixture>(model_);
  if (mix.weights.empty() || mix.weights.size() != mix.components.size())
    throw std::invalid_argument("mixture weights and components must match and be non-empty");
  double total = 0.0;
  for (double w : mix.weights) {
    if (!(w > 0.0))
      throw std::invalid_argument("mixture weights must be positive");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("mixture weights must sum to one");
  for (const auto& g : mix.components)
    if (!(g.sigma > 0.0))
      throw std::invalid_argument("gaussian sigma must be positive");
}

double DensityModel::pdf(double x) const
{
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Gaussian>) {
          return gaussian_pdf(m, x);
        } else if constexpr (std::is_same_v<T, Laplace>) {
          return std::exp(-std::abs(x - m.mean) / m.scale) / (2.0 * m.scale);
        } else if constexpr (std::is_same_v<T, Cauchy>) {
          const double d = x - m.location;
          return m.scale / (kPi * (d * d + m.scale * m.scale));
        } else if constexpr (std::is_same_v<T, Uniform>) {
          return (x >= m.lower && x <= m.upper) ? 1.0 / (m.upper - m.lower) : 0.0;
        } else {
          double acc = 0.0;
          for (std::size_t j = 0; j < m.weights.size(); ++j)
            acc += m.weights[j] * gaussian_pdf(m.components[j], x);
          return acc;
        }
      },
      model_);
}

std::complex<double> DensityModel::cf(double omega) const
{
  return std::visit(
      [&](const auto& m) -> std::complex<double> {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Gaussian>) {
          const double mag = std::exp(-0.5 * m.sigma * m.sigma * omega * omega);
          return std::polar(mag, m.mean * omega);
        } else if constexpr (std::is_same_v<T, Laplace>) {
          const double mag = 1.0 / (1.0 + m.scale * m.scale * omega * omega);
          return std::polar(mag, m.mean * omega);
        } else if constexpr (std::is_same_v<T, Cauchy>) {
          const double mag = std::exp(-m.scale * std::abs(omega));
          return std::polar(mag, m.location * omega);
        } else if constexpr (std::is_same_v<T, Uniform>) {
          const double half = 0.5 * (m.upper - m.lower);
          const double centre = 0.5 * (m.upper + m.lower);
          return std::polar(sinc(half * omega), centre * omega);
        } else {
          std::complex<double> acc{ 0.0, 0.0 };
          for (std::size_t j = 0; j < m.weights.size(); ++j)
            acc += m.weights[j] * DensityModel(m.components[j]).cf(omega);
          return acc;
        }
      },
      model_);
}

double DensityModel::cf_power(double omega) const
{
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Gaussian>) {
          return std::exp(-m.sigma * m.sigma * omega * omega);
        } else if constexpr (std::is_same_v<T, Laplace>) {
          const double d = 1.0 + m.scale * m.scale * omega * omega;
          return 1.0 / (d * d);
        } else if constexpr (std::is_same_v<T, Cauchy>) {
          return std::exp(-2.0 * m.scale * std::abs(omega));
        } else if constexpr (std::is_same_v<T, Uniform>) {
          const double s = sinc(0.5 * (m.upper - m.lower) * omega);
          return s * s;
        } else {
          // |sum_j w_j e^{i mu_j w} e^{-s_j^2 w^2 / 2}|^2 expanded pairwise.
          double acc = 0.0;
          for (std::size_t a = 0; a < m.weights.size(); ++a) {
            const auto& ga = m.components[a];
            for (std::size_t b = 0; b < m.weights.size(); ++b) {
              const auto& gb = m.components[b];
              const double damp =
                  std::exp(-0.5 * (ga.sigma * ga.sigma + gb.sigma * gb.sigma) * omega * omega);
              acc += m.weights[a] * m.weights[b] * damp *
                     std::cos((ga.mean - gb.mean) * omega);
            }
          }
          return std::max(acc, 0.0);
        }
      },
      model_);
}

double DensityModel::l2_norm_sq() const
{
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Gaussian>) {
          return 1.0 / (2.0 * m.sigma * kSqrtPi);
        } else if constexpr (std::is_same_v<T, Laplace>) {
          return 1.0 / (4.0 * m.scale);
        } else if constexpr (std::is_same_v<T, Cauchy>) {
          return 1.0 / (2.0 * kPi * m.scale);
        } else if constexpr (std::is_same_v<T, Uniform>) {
          return 1.0 / (m.upper - m.lower);
        } else {
          double acc = 0.0;
          for (std::size_t a = 0; a < m.weights.size(); ++a)
            for (std::size_t b = 0; b < m.weights.size(); ++b)
              acc += m.weights[a] * m.weights[b] *
                     gaussian_overlap(m.components[a], m.components[b]);
          return acc;
        }
      },
      model_);
}

double DensityModel::l2_norm() const
{
  return std::sqrt(l2_norm_sq());
}

double DensityModel::sup_norm() const
{
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Gaussian>) {
          return 1.0 / (m.sigma * kSqrt2Pi);
        } else if constexpr (std::is_same_v<T, Laplace>) {
          return 1.0 / (2.0 * m.scale);
        } else if constexpr (std::is_same_v<T, Cauchy>) {
          return 1.0 / (kPi * m.scale);
        } else if constexpr (std::is_same_v<T, Uniform>) {
          return 1.0 / (m.upper - m.lower);
        } else {
          // No closed form; coarse scan plus local ternary refinement.
          double lo = m.components.front().mean;
          double hi = lo;
          double sigma_max = 0.0;
          for (const auto& g : m.components) {
            lo = std::min(lo, g.mean);
            hi = std::max(hi, g.mean);
            sigma_max = std::max(sigma_max, g.sigma);
          }
          lo -= 2.0 * sigma_max;
          hi += 2.0 * sigma_max;
          const int steps = 4096;
          double best_x = lo;
          double best = pdf(lo);
          for (int i = 1; i <= steps; ++i) {
            const double x = lo + (hi - lo) * static_cast<double>(i) / steps;
            const double value = pdf(x);
            if (value > best) {
              best = value;
              best_x = x;
            }
          }
          double a = best_x - (hi - lo) / steps;
          double b = best_x + (hi - lo) / steps;
          for (int iter = 0; iter < 200; ++iter) {
            const double x1 = a + (b - a) / 3.0;
            const double x2 = b - (b - a) / 3.0;
            if (pdf(x1) < pdf(x2))
              a = x1;
            else
              b = x2;
          }
          return pdf(0.5 * (a + b));
        }
      },
      model_);
}

double DensityModel::cf_power_integral(double a, double b) const
{
  if (!(b >= a) || a < 0.0)
    throw std::invalid_argument("cf_power_integral requires 0 <= a <= b");
  if (a == b)
    return 0.0;
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Gaussian>) {
          const double s = m.sigma;
          return kSqrtPi / (2.0 * s) * (std::erf(s * b) - std::erf(s * a));
        } else if constexpr (std::is_same_v<T, Laplace>) {
          const auto anti = [&](double w) {
            const double x = m.scale * w;
            return 0.5 / m.scale * (x / (1.0 + x * x) + std::atan(x));
          };
          return anti(b) - anti(a);
        } else if constexpr (std::is_same_v<T, Cauchy>) {
          const double g2 = 2.0 * m.scale;
          return (std::exp(-g2 * a) - std::exp(-g2 * b)) / g2;
        } else {
          // Uniform and mixtures: smooth bounded integrand, adaptive quadrature.
          return quad::adaptive_simpson([&](double w) { return cf_power(w); }, a, b,
                                        1e-13 * std::max(1.0, b - a));
        }
      },
      model_);
}

double DensityModel::tail_energy(double band_limit) const
{
  if (!(band_limit >= 0.0))
    throw std::invalid_argument("tail_energy requires a non-negative band limit");
  const double W = band_limit;
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Gaussian>) {
          return std::erfc(m.sigma * W) / (2.0 * m.sigma * kSqrtPi);
        } else if constexpr (std::is_same_v<T, Laplace>) {
          const double x = m.scale * W;
          return (kPi / 4.0 - 0.5 * x / (1.0 + x * x) - 0.5 * std::atan(x)) /
                 (kPi * m.scale);
        } else if constexpr (std::is_same_v<T, Cauchy>) {
          return std::exp(-2.0 * m.scale * W) / (2.0 * kPi * m.scale);
        } else {
          const double head = cf_power_integral(0.0, W) / kPi;
          return std::max(l2_norm_sq() - head, 0.0);
        }
      },
      model_);
}

std::vector<double> DensityModel::sample_values(std::size_t n, std::uint64_t seed) const
{
  if (n == 0)
    throw std::invalid_argument("sample size must be positive");
  Rng rng(seed);
  std::vector<double> values(n);
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        for (std::size_t i = 0; i < n; ++i) {
          if constexpr (std::is_same_v<T, Gaussian>) {
            values[i] = m.mean + m.sigma * rng.normal();
          } else if constexpr (std::is_same_v<T, Laplace>) {
            const double u = rng.uniform01() - 0.5;
            const double sign = (u < 0.0) ? -1.0 : 1.0;
            values[i] = m.mean - m.scale * sign * std::log1p(-2.0 * std::abs(u));
          } else if constexpr (std::is_same_v<T, Cauchy>) {
            const double u = rng.uniform01();
            values[i] = m.location + m.scale * std::tan(kPi * (u - 0.5));
          } else if constexpr (std::is_same_v<T, Uniform>) {
            values[i] = m.lower + (m.upper - m.lower) * rng.uniform01();
          } else {
            const double u = rng.uniform01();
            double cum = 0.0;
            std::size_t pick = m.weights.size() - 1;
            for (std::size_t j = 0; j < m.weights.size(); ++j) {
              cum += m.weights[j];
              if (u < cum) {
                pick = j;
                break;
              }
            }
            const auto& g = m.components[pick];
            values[i] = g.mean + g.sigma * rng.normal();
          }
        }
      },
      model_);
  return values;
}

std::string DensityModel::spec_string() const
{
  return std::visit(
      [&](const auto& m) -> std::string {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Gaussian>) {
          return "gaussian:" + number_to_string(m.mean) + "," + number_to_string(m.sigma);
        } else if constexpr (std::is_same_v<T, Laplace>) {
          return "laplace:" + number_to_string(m.mean) + "," + number_to_string(m.scale);
        } else if constexpr (std::is_same_v<T, Cauchy>) {
          return "cauchy:" + number_to_string(m.location) + "," + number_to_string(m.scale);
        } else if constexpr (std::is_same_v<T, Uniform>) {
          return "uniform:" + number_to_string(m.lower) + "," + number_to_string(m.upper);
        } else {
          std::string out = "mix:";
          for (std::size_t j = 0; j < m.weights.size(); ++j) {
            if (j > 0)
              out += "+";
            out += number_to_string(m.weights[j]) + "*gaussian:" +
                   number_to_string(m.components[j].mean) + "," +
                   number_to_string(m.components[j].sigma);
          }
          return out;
        }
      },
      model_);
}

DensityModel DensityModel::parse(const std::string& spec)
{
  const auto colon = spec.find(':');
  if (colon == std::string::npos)
    throw std::invalid_argument(
        "model spec '" + spec +
        "' does not match the grammar kind:params, e.g. gaussian:0,1 | laplace:0,1 | "
        "cauchy:0,1 | uniform:0,1 | mix:0.5*gaussian:-2,1+0.5*gaussian:2,1");
  const std::string kind = spec.substr(0, colon);
  const std::string body = spec.substr(colon + 1);

  if (kind == "gaussian") {
    auto [a, b] = parse_two_params(body, "gaussian");
    return DensityModel(Gaussian{ a, b });
  }
  if (kind == "laplace") {
    auto [a, b] = parse_two_params(body, "laplace");
    return DensityModel(Laplace{ a, b });
  }
  if (kind == "cauchy") {
    auto [a, b] = parse_two_params(body, "cauchy");
    return DensityModel(Cauchy{ a, b });
  }
  if (kind == "uniform") {
    auto [a, b] = parse_two_params(body, "uniform");
    return DensityModel(Uniform{ a, b });
  }
  if (kind == "mix") {
    GaussianMixture mix;
    std::size_t pos = 0;
    while (pos < body.size()) {
      auto plus = body.find('+', pos);
      if (plus == std::string::npos)
        plus = body.size();
      const std::string term = body.substr(pos, plus - pos);
      const auto star = term.find('*');
      if (star == std::string::npos)
        throw std::invalid_argument("model spec: mixture term '" + term +
                                    "' must look like weight*gaussian:mu,sigma");
      const double weight = parse_double(term.substr(0, star));
      const std::string comp = term.substr(star + 1);
      if (comp.rfind("gaussian:", 0) != 0)
        throw std::invalid_argument("model spec: mixture components must be gaussian");
      auto [mu, sigma] = parse_two_params(comp.substr(9), "gaussian");
      mix.weights.push_back(weight);
      mix.components.push_back(Gaussian{ mu, sigma });
      pos = plus + 1;
    }
    return DensityModel(std::move(mix));
  }
  throw std::invalid_argument(
      "model spec: unknown kind '" + kind +
      "'; grammar: gaussian:mu,sigma | laplace:mu,b | cauchy:mu,gamma | uniform:a,b | "
      "mix:w1*gaussian:mu1,s1+w2*gaussian:mu2,s2+...");
}

SampleSet draw_sample(const DensityModel& model, std::size_t n, std::uint64_t seed)
{
  SampleSet sample;
  sample.values = model.sample_values(n, seed);
  sample.seed = seed;
  sample.model_tag = model.spec_string();
  return sample;
}

} // namespace monoracle
