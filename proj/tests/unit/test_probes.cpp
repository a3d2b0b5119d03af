#include <doctest.h>

#include "uds/probes.hpp"

using namespace uds;

namespace {
std::vector<Point> segment_sample(int n) {
  std::vector<Point> pts;
  for (int i = 0; i <= n; ++i) {
    Point p = Point::Zero(2);
    p[0] = -0.5 + static_cast<double>(i) / n;
    pts.push_back(p);
  }
  return pts;
}
}  // namespace

TEST_CASE("a segment is porous in the plane") {
  const auto pts = segment_sample(20000);
  const auto est = probes::porosity_scan(pts, Point::Zero(2), {0.01, 0.05, 0.1}, 256, 1, 0.001, 0.2);
  for (double r : est.ratios) CHECK(r > 0.9);
  CHECK(est.label.find("heuristic") != std::string::npos);
}

TEST_CASE("an isolated point has ratio one") {
  const auto est = probes::porosity_scan({Point::Zero(2)}, Point::Zero(2), {0.05, 0.1}, 64, 2, 0.01, 0.2);
  for (double r : est.ratios) CHECK(r == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("the level-2 family is less porous than l_1") {
  auto spec = presets::default_spec();
  spec.K = 2;
  const Construction c(ParamSchedule::make(spec));
  std::vector<Point> fam;
  for (auto& s : sample_points(c, 1.0, 2, 20000, 3)) fam.push_back(s.x);
  fam.push_back(Point::Zero(2));
  const auto base = segment_sample(20000);
  const std::vector<double> radii = {0.05, 0.1};
  const auto a = probes::porosity_scan(base, Point::Zero(2), radii, 256, 4, 0.01, 0.2);
  const auto b = probes::porosity_scan(fam, Point::Zero(2), radii, 256, 4, 0.01, 0.2);
  for (std::size_t i = 0; i < radii.size(); ++i) CHECK(b.ratios[i] < a.ratios[i]);
}

TEST_CASE("radii outside the window are refused") {
  CHECK_THROWS(probes::porosity_scan({Point::Zero(2)}, Point::Zero(2), {0.5}, 8, 1, 0.01, 0.2));
}

TEST_CASE("hypothesis trial") {
  const Construction c(ParamSchedule::make(presets::lemma_spec()));
  const auto st = probes::uds_hypothesis_trial(c, 0.2, 0.7, 0.2, 20, 9);
  CHECK(st.passes == 20);
  CHECK(st.thresholds.wedge_feasible);
  CHECK_THROWS_AS(probes::uds_hypothesis_trial(c, 0.2, 0.7, 0.2, 5, 9, 1.0), lemmas::DeltaOutOfRange);
}
