#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "vcc/linalg.hpp"

namespace testing_support {

using vcc::CMatrix;
using vcc::Complex;
using vcc::CVector;
using vcc::RVector;

// Independent generator for oracle tests, deliberately not the library's
// substream machinery.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : eng_(seed) {}
  double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }
  Complex cn(double var = 1.0) {
    std::normal_distribution<double> n(0.0, std::sqrt(var / 2.0));
    return {n(eng_), n(eng_)};
  }
  CMatrix matrix(int rows, int cols, double var = 1.0) {
    CMatrix m(rows, cols);
    for (int j = 0; j < cols; ++j) {
      for (int i = 0; i < rows; ++i) m(i, j) = cn(var);
    }
    return m;
  }
  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
};

inline double rel_err(double got, double want) {
  const double scale = std::max(std::abs(want), 1e-300);
  return std::abs(got - want) / scale;
}

inline double max_rel_err(const RVector& got, const RVector& want) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < want.size(); ++i) worst = std::max(worst, rel_err(got(i), want(i)));
  return worst;
}

}  // namespace testing_support
