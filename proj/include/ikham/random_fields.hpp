#ifndef IKHAM_RANDOM_FIELDS_HPP
#define IKHAM_RANDOM_FIELDS_HPP

#include <cmath>
#include <numbers>
#include <random>

#include "ikham/field.hpp"

namespace ikham {

/// Random band-limited field: mean + amplitude * sum_{m=1}^{modes} (a_m cos + b_m sin)(m k0 x) / m^2
/// with a_m, b_m uniform in [-1, 1].
inline Field random_smooth(const Grid& grid, std::mt19937_64& rng, int modes, double amplitude, double mean = 0.0) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double k0 = 2.0 * std::numbers::pi / grid.length();
  Field f = Field::constant(grid, mean);
  for (int m = 1; m <= modes; ++m) {
    const double a = amplitude * u(rng) / (m * m);
    const double b = amplitude * u(rng) / (m * m);
    f += Field::sample(grid, [&](double x) { return a * std::cos(m * k0 * x) + b * std::sin(m * k0 * x); });
  }
  return f;
}

}  // namespace ikham

#endif  // IKHAM_RANDOM_FIELDS_HPP
