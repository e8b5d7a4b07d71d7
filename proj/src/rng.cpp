#include "vcc/rng.hpp"

#include <cmath>

namespace vcc {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_key(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  std::uint64_t key = splitmix64(master);
  for (std::uint64_t tag : path) {
    key = splitmix64(key ^ splitmix64(tag + 0x632be59bd9b4e019ULL));
  }
  return key;
}

}  // namespace

Substream::Substream(std::uint64_t master_seed, std::initializer_list<std::uint64_t> path)
    : engine_(derive_key(master_seed, path)) {}

double Substream::uniform() { return uniform_(engine_); }

double Substream::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Substream::normal() { return normal_(engine_); }

std::complex<double> Substream::complex_normal(double variance) {
  const double s = std::sqrt(variance / 2.0);
  const double re = normal();
  const double im = normal();
  return {s * re, s * im};
}

}  // namespace vcc
