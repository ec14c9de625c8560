#include "saferoa/interval.hpp"

#include <algorithm>

namespace saferoa {

namespace {

const double kInf = std::numeric_limits<double>::infinity();

double down(double x) {
  if (std::isnan(x)) return -kInf;
  return x == -kInf ? x : std::nextafter(x, -kInf);
}

double up(double x) {
  if (std::isnan(x)) return kInf;
  return x == kInf ? x : std::nextafter(x, kInf);
}

// libm transcendentals are good to a couple of ulp; widen by three steps.
double down3(double x) { return down(down(down(x))); }
double up3(double x) { return up(up(up(x))); }

Interval widen(double lo, double hi) {
  if (std::isnan(lo) || std::isnan(hi)) return Interval::entire();
  return {down(lo), up(hi)};
}

}  // namespace

Interval operator+(Interval a, Interval b) { return widen(a.lo + b.lo, a.hi + b.hi); }

Interval operator-(Interval a, Interval b) { return widen(a.lo - b.hi, a.hi - b.lo); }

Interval operator-(Interval a) { return {-a.hi, -a.lo}; }

Interval operator+(Interval a, double b) { return a + Interval::point(b); }

Interval operator*(double a, Interval b) { return Interval::point(a) * b; }

Interval operator*(Interval a, Interval b) {
  // 0 * inf from a degenerate zero factor is an exact zero, not NaN.
  if (a.lo == 0.0 && a.hi == 0.0) return {0.0, 0.0};
  if (b.lo == 0.0 && b.hi == 0.0) return {0.0, 0.0};
  const double c[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
  double lo = kInf, hi = -kInf;
  for (double v : c) {
    if (std::isnan(v)) return Interval::entire();
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return widen(lo, hi);
}

Interval sqr(Interval a) {
  const double m = a.mag();
  double lo = 0.0;
  if (a.lo > 0.0 || a.hi < 0.0) {
    const double s = std::min(std::abs(a.lo), std::abs(a.hi));
    lo = down(s * s);
    if (lo < 0.0) lo = 0.0;
  }
  return {lo, up(m * m)};
}

Interval exp(Interval a) {
  double lo = down3(std::exp(a.lo));
  if (lo < 0.0) lo = 0.0;
  return {lo, up3(std::exp(a.hi))};
}

Interval relu(Interval a) { return {std::max(a.lo, 0.0), std::max(a.hi, 0.0)}; }

Interval tanh(Interval a) {
  double lo = down3(std::tanh(a.lo));
  double hi = up3(std::tanh(a.hi));
  return {std::max(lo, -1.0), std::min(hi, 1.0)};
}

namespace {

// Enclosure for sin over [lo, hi]: endpoint values plus any interior
// critical points pi/2 + k*pi.
Interval sin_enclosure(double lo, double hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || hi - lo >= 2.0 * M_PI)
    return {-1.0, 1.0};
  double vmin = std::min(std::sin(lo), std::sin(hi));
  double vmax = std::max(std::sin(lo), std::sin(hi));
  // first k with pi/2 + k*pi >= lo
  double k = std::ceil((lo - M_PI_2) / M_PI);
  for (; M_PI_2 + k * M_PI <= hi; k += 1.0) {
    // maxima at even k, minima at odd k
    const bool is_max = std::fmod(std::fmod(k, 2.0) + 2.0, 2.0) < 0.5;
    if (is_max)
      vmax = 1.0;
    else
      vmin = -1.0;
  }
  return {std::max(down3(vmin), -1.0), std::min(up3(vmax), 1.0)};
}

// Same scheme for cos; extrema sit at k*pi.
Interval cos_enclosure(double lo, double hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || hi - lo >= 2.0 * M_PI)
    return {-1.0, 1.0};
  double vmin = std::min(std::cos(lo), std::cos(hi));
  double vmax = std::max(std::cos(lo), std::cos(hi));
  double k = std::ceil(lo / M_PI);
  for (; k * M_PI <= hi; k += 1.0) {
    const bool is_max = std::fmod(std::fmod(k, 2.0) + 2.0, 2.0) < 0.5;
    if (is_max)
      vmax = 1.0;
    else
      vmin = -1.0;
  }
  return {std::max(down3(vmin), -1.0), std::min(up3(vmax), 1.0)};
}

}  // namespace

Interval sin(Interval a) { return sin_enclosure(a.lo, a.hi); }

Interval cos(Interval a) { return cos_enclosure(a.lo, a.hi); }

Interval hull(Interval a, Interval b) {
  return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
}

}  // namespace saferoa
