#ifndef IKHAM_FIELD_HPP
#define IKHAM_FIELD_HPP

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include "ikham/error.hpp"

namespace ikham {

/// Uniform periodic grid x_j = j L / M on [0, L).
class Grid {
 public:
  Grid(double length, int num_points) : length_(length), num_points_(num_points) {
    if (!(length > 0.0) || !std::isfinite(length)) {
      throw InvalidArgument("grid length must be positive, got " + std::to_string(length));
    }
    if (num_points < 4 || num_points % 2 != 0) {
      throw InvalidArgument("grid size must be even and >= 4, got " + std::to_string(num_points));
    }
  }

  double length() const noexcept { return length_; }
  int size() const noexcept { return num_points_; }
  double spacing() const noexcept { return length_ / num_points_; }
  double node(int j) const noexcept { return j * spacing(); }

  /// Angular wavenumber of Fourier mode index m (0 <= m <= M/2).
  double wavenumber(int m) const noexcept { return 2.0 * std::numbers::pi * m / length_; }

  Eigen::ArrayXd nodes() const {
    return Eigen::ArrayXd::LinSpaced(num_points_, 0.0, length_ - spacing());
  }

  friend bool operator==(const Grid& a, const Grid& b) noexcept {
    return a.length_ == b.length_ && a.num_points_ == b.num_points_;
  }

 private:
  double length_;
  int num_points_;
};

inline Grid make_grid(double length, int num_points) { return Grid(length, num_points); }

/// Real-valued function sampled on a Grid.
class Field {
 public:
  explicit Field(const Grid& grid) : grid_(grid), values_(Eigen::ArrayXd::Zero(grid.size())) {}

  Field(const Grid& grid, Eigen::ArrayXd values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
      throw InvalidArgument("field size does not match grid size");
    }
  }

  static Field constant(const Grid& grid, double c) {
    return Field(grid, Eigen::ArrayXd::Constant(grid.size(), c));
  }

  /// Samples f at the grid nodes.
  template <class F>
  static Field sample(const Grid& grid, F&& f) {
    Eigen::ArrayXd v(grid.size());
    for (int j = 0; j < grid.size(); ++j) v[j] = f(grid.node(j));
    return Field(grid, std::move(v));
  }

  const Grid& grid() const noexcept { return grid_; }
  const Eigen::ArrayXd& values() const noexcept { return values_; }
  Eigen::ArrayXd& values() noexcept { return values_; }
  int size() const noexcept { return grid_.size(); }
  double operator[](int j) const { return values_[j]; }
  double& operator[](int j) { return values_[j]; }

  bool is_finite() const { return values_.allFinite(); }
  double max_abs() const { return values_.abs().maxCoeff(); }
  double min() const { return values_.minCoeff(); }
  double mean() const { return values_.mean(); }

  Field& operator+=(const Field& o) {
    check_same(o);
    values_ += o.values_;
    return *this;
  }
  Field& operator-=(const Field& o) {
    check_same(o);
    values_ -= o.values_;
    return *this;
  }
  Field& operator*=(const Field& o) {
    check_same(o);
    values_ *= o.values_;
    return *this;
  }
  Field& operator*=(double a) {
    values_ *= a;
    return *this;
  }
  Field& operator+=(double a) {
    values_ += a;
    return *this;
  }

  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(Field a, const Field& b) { return a *= b; }
  friend Field operator*(double s, Field a) { return a *= s; }
  friend Field operator*(Field a, double s) { return a *= s; }
  friend Field operator+(Field a, double s) { return a += s; }
  friend Field operator-(Field a) { return a *= -1.0; }

  void check_same(const Field& o) const {
    if (!(grid_ == o.grid_)) throw GridMismatch();
  }

 private:
  Grid grid_;
  Eigen::ArrayXd values_;
};

namespace detail {

inline Eigen::FFT<double>& fft_engine() {
  // Eigen's FFT caches plans internally; one engine per thread keeps that cache private.
  thread_local Eigen::FFT<double> engine = [] {
    Eigen::FFT<double> e;
    e.SetFlag(Eigen::FFT<double>::HalfSpectrum);
    return e;
  }();
  return engine;
}

}  // namespace detail

/// Half spectrum (M/2 + 1 coefficients, unnormalized) of a real field.
inline std::vector<std::complex<double>> forward_transform(const Field& f) {
  std::vector<double> in(f.values().data(), f.values().data() + f.size());
  std::vector<std::complex<double>> out;
  detail::fft_engine().fwd(out, in);
  return out;
}

inline Field inverse_transform(const Grid& grid, const std::vector<std::complex<double>>& spectrum) {
  std::vector<double> out;
  detail::fft_engine().inv(out, spectrum, grid.size());
  return Field(grid, Eigen::Map<const Eigen::ArrayXd>(out.data(), grid.size()));
}

/// Applies a real even Fourier multiplier m(k) mode by mode. The Nyquist mode
/// is multiplied by m(k_{M/2}) like any other mode.
template <class Multiplier>
Field apply_multiplier(const Field& f, Multiplier&& m) {
  auto spec = forward_transform(f);
  for (int k = 0; k < static_cast<int>(spec.size()); ++k) spec[k] *= m(f.grid().wavenumber(k));
  return inverse_transform(f.grid(), spec);
}

/// Spectral derivative; the Nyquist coefficient is dropped so the result stays real.
inline Field deriv(const Field& f) {
  const Grid& g = f.grid();
  auto spec = forward_transform(f);
  const int nyquist = g.size() / 2;
  for (int k = 0; k < static_cast<int>(spec.size()); ++k) {
    spec[k] = (k == nyquist) ? std::complex<double>(0.0) : spec[k] * std::complex<double>(0.0, g.wavenumber(k));
  }
  return inverse_transform(g, spec);
}

/// Trapezoid rule on the periodic cell.
inline double integrate(const Field& f) { return f.grid().spacing() * f.values().sum(); }

inline double inner(const Field& f, const Field& g) {
  f.check_same(g);
  return f.grid().spacing() * (f.values() * g.values()).sum();
}

/// Discrete L2 norm.
inline double norm(const Field& f) { return std::sqrt(inner(f, f)); }

/// Pointwise integer power.
inline Field pow(const Field& f, int q) {
  Eigen::ArrayXd v = Eigen::ArrayXd::Ones(f.size());
  for (int i = 0; i < q; ++i) v *= f.values();
  return Field(f.grid(), std::move(v));
}

}  // namespace ikham

#endif  // IKHAM_FIELD_HPP
