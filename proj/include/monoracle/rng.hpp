#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace monoracle {

inline std::uint64_t splitmix64(std::uint64_t& state)
{
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

//! Derive an independent stream seed from a base seed and a replication index.
//! Changing the number of replications never perturbs earlier streams.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index)
{
  std::uint64_t state = base ^ (0xD1B54A32D192ED03ull * (index + 1));
  splitmix64(state);
  return splitmix64(state);
}

//! Deterministic generator with explicitly coded transforms, so output is
//! identical across platforms and standard library versions.
class Rng
{
public:
  explicit Rng(std::uint64_t seed)
    : state_(seed)
  {
  }

  std::uint64_t next() { return splitmix64(state_); }

  //! Uniform on [0, 1).
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  //! Uniform on (0, 1].
  double uniform01_open_low() { return 1.0 - uniform01(); }

  //! Standard normal via Box-Muller; pairs are cached.
  double normal()
  {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform01_open_low();
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

private:
  std::uint64_t state_;
  double spare_{ 0.0 };
  bool have_spare_{ false };
};

} // namespace monoracle
