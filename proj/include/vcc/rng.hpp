#pragma once

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace vcc {

// Deterministic random substream addressed by (master seed, path of tags).
// Two substreams with the same address produce the same sequence, so every
// Monte Carlo draw can be regenerated independently of scheduling order.
class Substream {
 public:
  Substream(std::uint64_t master_seed, std::initializer_list<std::uint64_t> path);

  double uniform();  // [0, 1)
  double uniform(double lo, double hi);
  double normal();   // N(0, 1)
  // Circularly-symmetric complex Gaussian with E|z|^2 = variance.
  std::complex<double> complex_normal(double variance);

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

// Substream domain tags.
namespace stream {
inline constexpr std::uint64_t kLocation = 0x4c4f43;
inline constexpr std::uint64_t kFading = 0x464144;
inline constexpr std::uint64_t kCsit = 0x435354;
inline constexpr std::uint64_t kCsir = 0x435352;
inline constexpr std::uint64_t kMulticast = 0x4d4343;
inline constexpr std::uint64_t kUnicast = 0x554e43;
}  // namespace stream

}  // namespace vcc
