#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace saferoa {

/// Closed interval [lo, hi] with outward-inclusive arithmetic: every
/// operation returns an interval containing the exact real image of its
/// operands. Rounding slop is absorbed by nudging the bounds outward.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  Interval() = default;
  Interval(double l, double h) : lo(l), hi(h) {}

  static Interval point(double v) { return {v, v}; }
  static Interval entire() {
    const double inf = std::numeric_limits<double>::infinity();
    return {-inf, inf};
  }

  bool contains(double v) const { return v >= lo && v <= hi; }
  bool disjoint(double a, double b) const { return hi < a || lo > b; }
  double width() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  /// max(|lo|, |hi|)
  double mag() const { return std::max(std::abs(lo), std::abs(hi)); }
  bool valid() const { return lo <= hi && !std::isnan(lo) && !std::isnan(hi); }
};

Interval operator+(Interval a, Interval b);
Interval operator-(Interval a, Interval b);
Interval operator*(Interval a, Interval b);
Interval operator-(Interval a);
Interval operator+(Interval a, double b);
Interval operator*(double a, Interval b);

Interval sqr(Interval a);
Interval sin(Interval a);
Interval cos(Interval a);
Interval exp(Interval a);
Interval relu(Interval a);
Interval tanh(Interval a);
Interval hull(Interval a, Interval b);

/// Axis-aligned hyper-rectangle [lo, hi] componentwise.
struct Box {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;

  Box() = default;
  Box(Eigen::VectorXd l, Eigen::VectorXd h) : lo(std::move(l)), hi(std::move(h)) {
    if (lo.size() != hi.size()) throw std::invalid_argument("Box: bound dimension mismatch");
    for (int i = 0; i < lo.size(); ++i)
      if (!(lo[i] <= hi[i])) throw std::invalid_argument("Box: lo > hi");
  }

  /// Symmetric box [-radius, radius].
  static Box centered(const Eigen::VectorXd& radius) { return Box(-radius, radius); }

  int dim() const { return static_cast<int>(lo.size()); }
  Interval axis(int i) const { return {lo[i], hi[i]}; }
  Eigen::VectorXd center() const { return 0.5 * (lo + hi); }
  Eigen::VectorXd width() const { return hi - lo; }
  double max_width() const { return dim() == 0 ? 0.0 : (hi - lo).maxCoeff(); }
  int widest_axis() const {
    int best = 0;
    (hi - lo).maxCoeff(&best);
    return best;
  }
  bool contains(const Eigen::VectorXd& x) const {
    for (int i = 0; i < dim(); ++i)
      if (x[i] < lo[i] || x[i] > hi[i]) return false;
    return true;
  }
  std::pair<Box, Box> split(int axis) const {
    Box a = *this, b = *this;
    const double m = 0.5 * (lo[axis] + hi[axis]);
    a.hi[axis] = m;
    b.lo[axis] = m;
    return {a, b};
  }
};

}  // namespace saferoa
