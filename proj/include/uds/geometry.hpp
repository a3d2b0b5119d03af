#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace uds {

using Point = Eigen::VectorXd;

/// Absolute-plus-relative tolerance: 1e-12 scaled by the operand magnitude.
inline double tol(double scale) { return 1e-12 * (scale > 1.0 ? scale : 1.0); }

/// x + [-a, a] e
struct Segment {
  Point center;
  Point dir;
  double half = 0.0;

  double length() const { return 2.0 * half; }
  Point at(double u) const { return center + u * dir; }
  Point lo() const { return at(-half); }
  Point hi() const { return at(half); }
  /// Axial coordinate of the orthogonal projection of p (not clamped).
  double param(const Point& p) const { return (p - center).dot(dir); }
};

Segment make_segment(const Point& center, const Point& dir, double half);

struct OrientedCube {
  Point center;
  double eps = 0.0;
  Eigen::MatrixXd frame;  // columns; frame.col(0) is the generating direction
};

/// Columns form an orthonormal basis whose first column is e.
Eigen::MatrixXd complete_frame(const Point& e);

bool cube_contains(const OrientedCube& c, const Point& p);
double segment_distance(const Point& p, const Segment& s);

/// Uniform grid of spacing h, centred on the segment: floor(L/h)+1 points,
/// leftover length split between both ends. Parameters run over [-a, a].
struct SegmentGrid {
  double first = 0.0;  // axial coordinate of index 0
  double spacing = 0.0;
  std::int64_t count = 0;

  double param(std::int64_t i) const { return first + static_cast<double>(i) * spacing; }
  /// Nearest grid index to axial coordinate u (ties to the lower index).
  std::int64_t nearest(double u) const;
};

/// floor(ratio) with ratios within 1e-9 of an integer snapped to it.
std::int64_t snapped_floor(double ratio);
std::int64_t snapped_ceil(double ratio);

SegmentGrid segment_grid(double length, double h);
std::vector<Point> separated_points(const Segment& s, double h);

/// Number of cubes cube_cover emits for a segment of the given length.
std::int64_t cube_cover_count(double length, double w);

struct CoverNote {
  bool strict_bound_holds = true;  // count < length / w
  std::int64_t count = 0;
  double ratio = 0.0;              // length / w
};

std::vector<OrientedCube> cube_cover(const Segment& l, double w, CoverNote* note = nullptr);

/// Interval {u in [-a, a] : dist(l(u), axis) <= r}; empty when lo > hi.
struct Interval {
  double lo = 0.0;
  double hi = -1.0;
  bool empty() const { return lo > hi; }
  double width() const { return empty() ? 0.0 : hi - lo; }
};

Interval tube_interval(const Segment& l, const Segment& axis, double r);
Interval intersect(const Interval& a, const Interval& b);

// ------------------------------------------------------------ direction nets

/// Maximal 1/s-separated subset of the unit sphere. For d = 2 the net is
/// the uniform angular grid and members are computed on demand.
class DirectionNet {
 public:
  static DirectionNet build(int d, std::int64_t s, std::uint64_t seed, int limit = 0);

  int d() const { return d_; }
  std::int64_t s() const { return s_; }
  std::uint64_t seed() const { return seed_; }
  std::int64_t size() const { return size_; }
  /// Full (unlimited) size before any net_limit cut.
  std::int64_t full_size() const { return full_size_; }
  double separation() const { return 1.0 / static_cast<double>(s_); }
  /// Candidate-pool mesh used to certify maximality (0 for the exact d = 2 grid).
  double pool_mesh() const { return pool_mesh_; }

  Point member(std::int64_t i) const;
  /// Nearest member by Euclidean distance, ties to the lowest index.
  std::int64_t nearest(const Point& e) const;

 private:
  int d_ = 2;
  std::int64_t s_ = 3;
  std::uint64_t seed_ = 0;
  std::int64_t size_ = 0;
  std::int64_t full_size_ = 0;
  std::int64_t angular_n_ = 0;
  double pool_mesh_ = 0.0;
  std::vector<Point> members_;
};

/// Size of the exact d = 2 net: largest n with chord 2 sin(pi/n) >= 1/s.
std::int64_t circle_net_size(std::int64_t s);

}  // namespace uds
