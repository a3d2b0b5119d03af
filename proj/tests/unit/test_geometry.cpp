#include <doctest.h>

#include <cmath>

#include "uds/geometry.hpp"
#include "uds/kernels.hpp"

using namespace uds;

namespace {
Point p2(double x, double y) {
  Point p(2);
  p << x, y;
  return p;
}
}  // namespace

TEST_CASE("cube containment is closed") {
  OrientedCube c{p2(0.3, -0.2), 0.1, complete_frame(p2(0.6, 0.8))};
  CHECK(cube_contains(c, c.center));
  CHECK(cube_contains(c, c.center + 0.1 * c.frame.col(0) + 0.1 * c.frame.col(1)));
  CHECK_FALSE(cube_contains(c, c.center + 0.101 * c.frame.col(1)));
}

TEST_CASE("frames are orthonormal with e first") {
  for (const auto& e : {p2(1, 0), p2(0, 1), p2(0.6, -0.8)}) {
    const auto F = complete_frame(e);
    CHECK((F.col(0) - e).norm() < 1e-15);
    CHECK((F.transpose() * F - Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-14);
  }
  Point e3(3);
  e3 << 1.0, 2.0, 2.0;
  e3 /= 3.0;
  const auto F = complete_frame(e3);
  CHECK((F.transpose() * F - Eigen::MatrixXd::Identity(3, 3)).norm() < 1e-14);
}

TEST_CASE("segment distance") {
  const auto s = make_segment(p2(0, 0), p2(1, 0), 1.0);
  CHECK(segment_distance(p2(0.5, 0), s) == 0.0);
  CHECK(segment_distance(p2(1.7, 0), s) == doctest::Approx(0.7));
  CHECK(segment_distance(p2(0, 0.3), s) == doctest::Approx(0.3));
}

TEST_CASE("separated points") {
  const auto s = make_segment(p2(0, 0), p2(1, 0), 0.5);
  const double h = 1.5 * (16.0 / 81.0) / 4.0;  // Q^j w_k / s_k with j = 1
  CHECK(separated_points(s, h).size() == 14);
  const auto ends = separated_points(s, 1.0);
  REQUIRE(ends.size() == 2);
  CHECK((ends[0] - s.lo()).norm() < 1e-15);
  CHECK((ends[1] - s.hi()).norm() < 1e-15);
  CHECK_THROWS(separated_points(s, 1.5));
}

TEST_CASE("grid nearest breaks ties low") {
  const auto g = segment_grid(1.0, 0.25);
  CHECK(g.count == 5);
  CHECK(g.nearest(g.param(2)) == 2);
  CHECK(g.nearest(0.5 * (g.param(1) + g.param(2))) == 1);
}

TEST_CASE("cube covers") {
  const double w = 16.0 / 81.0;
  CoverNote note;
  const auto s = make_segment(p2(0, 0), p2(1, 0), 0.5);
  CHECK(cube_cover(s, w, &note).size() == 4);
  CHECK(note.strict_bound_holds);
  // Just above 4w the minimal count with centres on l is ceil(L/2w)+1 = 4, not 3.
  CHECK(cube_cover_count(4 * w + 1e-6, w) == 4);
  CHECK(cube_cover_count(4 * w, w) == 3);
  const auto short_l = make_segment(p2(0, 0), p2(1, 0), 1.2 * w);
  CHECK(cube_cover(short_l, w, &note).size() == 3);
  CHECK_FALSE(note.strict_bound_holds);

  auto rng = kernels::seeded(4, 0);
  const auto l = make_segment(p2(0.1, 0.2), p2(0.6, 0.8), 0.37);
  const auto cubes = cube_cover(l, 0.03);
  for (int i = 0; i < 5000; ++i) {
    const auto p = kernels::sample_tube(l, 0.03, rng);
    bool hit = false;
    for (const auto& c : cubes) hit = hit || cube_contains(c, p);
    REQUIRE(hit);
  }
}

TEST_CASE("direction nets") {
  const auto net = DirectionNet::build(2, 4, 0);
  CHECK(net.size() == 25);
  CHECK(net.size() <= 256);
  CHECK(kernels::min_separation_serial(net) >= 0.25 - 1e-12);
  const auto n3 = DirectionNet::build(2, 3, 0);
  CHECK(kernels::covering_radius_serial(n3, 100000, 1) <= 1.0 / 3.0);
  const auto cut = DirectionNet::build(2, 6, 0, 5);
  CHECK(cut.size() == 5);
  CHECK(cut.full_size() > 5);
  const auto d3 = DirectionNet::build(3, 4, 7);
  CHECK(kernels::min_separation_serial(d3) >= 0.25 - 1e-12);
  CHECK(kernels::covering_radius_serial(d3, 20000, 2) <= 0.25 + d3.pool_mesh());
  for (std::int64_t i = 0; i < net.size(); ++i) CHECK(net.nearest(net.member(i)) == i);
}

TEST_CASE("serial and parallel kernels agree") {
  auto rng = kernels::seeded(5, 0);
  std::vector<Point> pts;
  for (int i = 0; i < 20000; ++i) pts.push_back(kernels::random_ball(2, rng));
  for (double eps : {0.1, 0.01, 0.001}) CHECK(kernels::grid_count_serial(pts, eps) == kernels::grid_count_omp(pts, eps));
  const auto net = DirectionNet::build(3, 6, 1);
  CHECK(kernels::min_separation_serial(net) == kernels::min_separation_omp(net));
  CHECK(kernels::covering_radius_serial(net, 4096, 3) == kernels::covering_radius_omp(net, 4096, 3));
  std::vector<Segment> ls;
  for (int i = 0; i < 50; ++i) ls.push_back(make_segment(kernels::random_ball(2, rng), kernels::random_unit(2, rng), 0.2));
  CHECK(kernels::cover_failures_serial(ls, 0.02, 100, 9) == 0);
  CHECK(kernels::cover_failures_omp(ls, 0.02, 100, 9) == 0);
}
