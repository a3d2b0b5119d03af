#include "uds/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace uds {

Segment make_segment(const Point& center, const Point& dir, double half) {
  if (!(half > 0.0)) throw std::invalid_argument("segment half-length must be positive");
  const double n = dir.norm();
  if (std::abs(n - 1.0) > 1e-12) throw std::invalid_argument("segment direction must be a unit vector");
  return Segment{center, dir, half};
}

Eigen::MatrixXd complete_frame(const Point& e) {
  const auto d = e.size();
  Eigen::MatrixXd f(d, d);
  f.col(0) = e;
  Eigen::Index skip = 0;
  for (Eigen::Index i = 1; i < d; ++i)
    if (std::abs(e[i]) > std::abs(e[skip])) skip = i;
  Eigen::Index col = 1;
  for (Eigen::Index i = 0; i < d; ++i) {
    if (i == skip) continue;
    Point v = Point::Unit(d, i);
    for (Eigen::Index c = 0; c < col; ++c) v -= v.dot(f.col(c)) * f.col(c);
    // second pass keeps the frame orthogonal to ~1e-16
    for (Eigen::Index c = 0; c < col; ++c) v -= v.dot(f.col(c)) * f.col(c);
    f.col(col++) = v.normalized();
  }
  return f;
}

bool cube_contains(const OrientedCube& c, const Point& p) {
  const Eigen::VectorXd coords = c.frame.transpose() * (p - c.center);
  const double lim = c.eps + 1e-12 * c.eps;
  return coords.cwiseAbs().maxCoeff() <= lim;
}

double segment_distance(const Point& p, const Segment& s) {
  const double u = std::clamp(s.param(p), -s.half, s.half);
  return (p - s.center - u * s.dir).norm();
}

std::int64_t snapped_floor(double ratio) {
  const double r = std::round(ratio);
  if (std::abs(ratio - r) <= 1e-9 * std::max(1.0, std::abs(ratio))) return static_cast<std::int64_t>(r);
  return static_cast<std::int64_t>(std::floor(ratio));
}

std::int64_t snapped_ceil(double ratio) {
  const double r = std::round(ratio);
  if (std::abs(ratio - r) <= 1e-9 * std::max(1.0, std::abs(ratio))) return static_cast<std::int64_t>(r);
  return static_cast<std::int64_t>(std::ceil(ratio));
}

std::int64_t SegmentGrid::nearest(double u) const {
  if (count <= 1) return 0;
  const double x = (u - first) / spacing;
  // Ties (up to rounding in u) go to the lower index.
  auto i = static_cast<std::int64_t>(std::ceil(x - 0.5 - 1e-9));
  return std::clamp<std::int64_t>(i, 0, count - 1);
}

SegmentGrid segment_grid(double length, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("grid spacing must be positive");
  if (h > length * (1.0 + 1e-12)) throw std::invalid_argument("grid spacing exceeds segment length");
  SegmentGrid g;
  g.count = snapped_floor(length / h) + 1;
  g.spacing = h;
  const double span = static_cast<double>(g.count - 1) * h;
  if (span > length) g.spacing = length / static_cast<double>(g.count - 1);
  g.first = -0.5 * static_cast<double>(g.count - 1) * g.spacing;
  return g;
}

std::vector<Point> separated_points(const Segment& s, double h) {
  const auto g = segment_grid(s.length(), h);
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(g.count));
  for (std::int64_t i = 0; i < g.count; ++i) out.push_back(s.at(g.param(i)));
  return out;
}

std::int64_t cube_cover_count(double length, double w) {
  if (!(w > 0.0) || !(w < length / 2.0)) throw std::invalid_argument("cube width outside (0, length/2)");
  return snapped_ceil(length / (2.0 * w)) + 1;
}

std::vector<OrientedCube> cube_cover(const Segment& l, double w, CoverNote* note) {
  const auto n = cube_cover_count(l.length(), w);
  const Eigen::MatrixXd frame = complete_frame(l.dir);
  std::vector<OrientedCube> cubes;
  cubes.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i + 1 < n; ++i)
    cubes.push_back(OrientedCube{l.at(-l.half + 2.0 * w * static_cast<double>(i)), w, frame});
  cubes.push_back(OrientedCube{l.at(l.half), w, frame});
  if (note) {
    note->count = n;
    note->ratio = l.length() / w;
    note->strict_bound_holds = static_cast<double>(n) < note->ratio;
  }
  return cubes;
}

Interval intersect(const Interval& a, const Interval& b) {
  return Interval{std::max(a.lo, b.lo), std::min(a.hi, b.hi)};
}

Interval tube_interval(const Segment& l, const Segment& axis, double r) {
  auto f = [&](double u) { return segment_distance(l.at(u), axis) - r; };
  // f is convex in u: golden-section for the minimiser, then bisection outwards.
  double lo = -l.half, hi = l.half;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 200 && hi - lo > 1e-17 * l.half; ++it) {
    if (f1 <= f2) {
      hi = x2; x2 = x1; f2 = f1;
      x1 = hi - g * (hi - lo); f1 = f(x1);
    } else {
      lo = x1; x1 = x2; f1 = f2;
      x2 = lo + g * (hi - lo); f2 = f(x2);
    }
  }
  double best = f1 <= f2 ? x1 : x2;
  for (double cand : {-l.half, l.half})
    if (f(cand) < f(best)) best = cand;
  if (f(best) > 0.0) return Interval{};

  auto edge = [&](double inside, double outside) {
    if (f(outside) <= 0.0) return outside;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (inside + outside);
      if (mid == inside || mid == outside) break;
      (f(mid) <= 0.0 ? inside : outside) = mid;
    }
    return inside;
  };
  return Interval{edge(best, -l.half), edge(best, l.half)};
}

}  // namespace uds
