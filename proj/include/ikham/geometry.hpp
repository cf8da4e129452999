#ifndef IKHAM_GEOMETRY_HPP
#define IKHAM_GEOMETRY_HPP

#include <string>
#include <vector>

#include "ikham/field.hpp"

namespace ikham {

/// Choice of vertical polynomial exponents in the velocity-potential ansatz.
/// H1: p_i = 2i (flat bottom only). H2: p_i = i (general bathymetry).
enum class ExpansionCase { H1, H2 };

inline std::string to_string(ExpansionCase c) { return c == ExpansionCase::H1 ? "H1" : "H2"; }

inline ExpansionCase parse_case(const std::string& s) {
  if (s == "H1" || s == "h1") return ExpansionCase::H1;
  if (s == "H2" || s == "h2") return ExpansionCase::H2;
  throw InvalidArgument("unknown expansion case '" + s + "' (expected H1 or H2)");
}

inline std::vector<int> exponents(ExpansionCase c, int order) {
  if (order < 0) throw InvalidArgument("expansion order must be non-negative");
  std::vector<int> p(order + 1);
  for (int i = 0; i <= order; ++i) p[i] = (c == ExpansionCase::H1) ? 2 * i : i;
  return p;
}

struct ExpansionSpec {
  ExpansionCase expansion_case = ExpansionCase::H1;
  int order = 0;
  std::vector<int> p{0};

  ExpansionSpec() = default;
  ExpansionSpec(ExpansionCase c, int n) : expansion_case(c), order(n), p(exponents(c, n)) {}

  int size() const noexcept { return order + 1; }
  int max_exponent() const noexcept { return p.back(); }
};

/// Surface, bathymetry and the derived depth H = 1 + eta - b, with the
/// coefficient fields the IK operators need precomputed once.
class Geometry {
 public:
  Geometry(Field eta, Field b, double delta, double gravity = 1.0, double depth_floor = 1e-3,
           int max_power = 8)
      : eta_(std::move(eta)),
        b_(std::move(b)),
        delta_(delta),
        gravity_(gravity),
        depth_floor_(depth_floor),
        depth_(Field::constant(eta_.grid(), 1.0) + eta_ - b_),
        bx_(deriv(b_)),
        vertical_weight_(Field(eta_.grid())) {
    eta_.check_same(b_);
    if (!(delta > 0.0 && delta <= 1.0)) {
      throw InvalidArgument("delta must lie in (0, 1], got " + std::to_string(delta));
    }
    if (!(gravity > 0.0)) throw InvalidArgument("gravity must be positive");
    if (!(depth_floor > 0.0)) throw InvalidArgument("depth floor c0 must be positive");
    if (!eta_.is_finite() || !b_.is_finite()) throw InvalidArgument("non-finite eta or b");
    const double hmin = depth_.min();
    if (hmin < depth_floor_) throw InvalidGeometry(hmin, depth_floor_);
    vertical_weight_ = bx_ * bx_ + 1.0 / (delta * delta);
    powers_.reserve(max_power + 1);
    powers_.push_back(Field::constant(grid(), 1.0));
    for (int q = 1; q <= max_power; ++q) powers_.push_back(powers_.back() * depth_);
  }

  /// Geometry sized for the powers an expansion needs (up to H^{2 p_N + 1}).
  Geometry(Field eta, Field b, double delta, double gravity, double depth_floor, const ExpansionSpec& spec)
      : Geometry(std::move(eta), std::move(b), delta, gravity, depth_floor, 2 * spec.max_exponent() + 1) {}

  const Grid& grid() const noexcept { return eta_.grid(); }
  const Field& eta() const noexcept { return eta_; }
  const Field& bottom() const noexcept { return b_; }
  const Field& depth() const noexcept { return depth_; }
  /// d b / dx.
  const Field& bottom_slope() const noexcept { return bx_; }
  /// delta^{-2} + (d b / dx)^2.
  const Field& vertical_weight() const noexcept { return vertical_weight_; }
  double delta() const noexcept { return delta_; }
  double gravity() const noexcept { return gravity_; }
  double depth_floor() const noexcept { return depth_floor_; }
  bool flat_bottom() const { return b_.max_abs() == 0.0; }

  /// H^q, served from the cache when available.
  Field power(int q) const {
    if (q < 0) throw InvalidArgument("negative depth power");
    if (q < static_cast<int>(powers_.size())) return powers_[q];
    return ikham::pow(depth_, q);
  }

  /// Same bathymetry and physics on a new surface.
  Geometry with_eta(Field eta) const {
    return Geometry(std::move(eta), b_, delta_, gravity_, depth_floor_, static_cast<int>(powers_.size()) - 1);
  }

  Geometry with_delta(double delta) const {
    return Geometry(eta_, b_, delta, gravity_, depth_floor_, static_cast<int>(powers_.size()) - 1);
  }

 private:
  Field eta_;
  Field b_;
  double delta_;
  double gravity_;
  double depth_floor_;
  Field depth_;
  Field bx_;
  Field vertical_weight_;
  std::vector<Field> powers_;
};

/// Rejects H1 expansions over a non-flat bottom.
inline void check_compatible(const Geometry& geom, const ExpansionSpec& spec) {
  if (spec.expansion_case == ExpansionCase::H1 && !geom.flat_bottom()) {
    throw InvalidArgument("H1 requires flat bottom (b == 0)");
  }
}

}  // namespace ikham

#endif  // IKHAM_GEOMETRY_HPP
