#include "uds/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <omp.h>

namespace uds::kernels {

std::mt19937_64 seeded(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

Point random_unit(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Point p(d);
  do {
    for (int i = 0; i < d; ++i) p[i] = n(rng);
  } while (p.norm() < 1e-12);
  return p.normalized();
}

Point random_ball(int d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double r = std::pow(u(rng), 1.0 / d);
  return r * random_unit(d, rng);
}

namespace {

std::vector<std::int64_t> cell_keys(const std::vector<Point>& pts, double eps, bool parallel) {
  const auto n = static_cast<std::int64_t>(pts.size());
  const int d = n ? static_cast<int>(pts[0].size()) : 0;
  std::vector<std::int64_t> keys(static_cast<std::size_t>(n * d));
  const double side = 2.0 * eps;
#pragma omp parallel for schedule(static) if (parallel)
  for (std::int64_t i = 0; i < n; ++i)
    for (int c = 0; c < d; ++c)
      keys[static_cast<std::size_t>(i * d + c)] = static_cast<std::int64_t>(std::floor(pts[static_cast<std::size_t>(i)][c] / side));
  return keys;
}

struct KeyLess {
  const std::vector<std::int64_t>* keys;
  int d;
  bool operator()(std::int64_t a, std::int64_t b) const {
    const auto* ka = keys->data() + a * d;
    const auto* kb = keys->data() + b * d;
    return std::lexicographical_compare(ka, ka + d, kb, kb + d);
  }
};

std::int64_t count_unique(const std::vector<std::int64_t>& keys, const std::vector<std::int64_t>& order, int d) {
  std::int64_t count = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i == 0 || !std::equal(keys.begin() + order[i] * d, keys.begin() + order[i] * d + d,
                              keys.begin() + order[i - 1] * d))
      ++count;
  }
  return count;
}

}  // namespace

std::int64_t grid_count_serial(const std::vector<Point>& pts, double eps) {
  if (pts.empty()) return 0;
  const int d = static_cast<int>(pts[0].size());
  const auto keys = cell_keys(pts, eps, false);
  std::vector<std::int64_t> order(pts.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), KeyLess{&keys, d});
  return count_unique(keys, order, d);
}

std::int64_t grid_count_omp(const std::vector<Point>& pts, double eps) {
  if (pts.empty()) return 0;
  const int d = static_cast<int>(pts[0].size());
  const auto keys = cell_keys(pts, eps, true);
  const auto n = static_cast<std::int64_t>(pts.size());
  std::vector<std::int64_t> order(pts.size());
  std::iota(order.begin(), order.end(), 0);
  const int chunks = std::max(1, omp_get_max_threads());
  std::vector<std::int64_t> bounds(static_cast<std::size_t>(chunks + 1));
  for (int c = 0; c <= chunks; ++c) bounds[static_cast<std::size_t>(c)] = n * c / chunks;
#pragma omp parallel for schedule(static)
  for (int c = 0; c < chunks; ++c)
    std::sort(order.begin() + bounds[static_cast<std::size_t>(c)], order.begin() + bounds[static_cast<std::size_t>(c + 1)],
              KeyLess{&keys, d});
  for (int width = 1; width < chunks; width *= 2) {
#pragma omp parallel for schedule(static)
    for (int c = 0; c < chunks; c += 2 * width) {
      if (c + width >= chunks) continue;
      const auto lo = bounds[static_cast<std::size_t>(c)];
      const auto mid = bounds[static_cast<std::size_t>(c + width)];
      const auto hi = bounds[static_cast<std::size_t>(std::min(c + 2 * width, chunks))];
      std::inplace_merge(order.begin() + lo, order.begin() + mid, order.begin() + hi, KeyLess{&keys, d});
    }
  }
  return count_unique(keys, order, d);
}

Point sample_tube(const Segment& l, double w, std::mt19937_64& rng) {
  const int d = static_cast<int>(l.center.size());
  std::uniform_real_distribution<double> axial(-l.half - w, l.half + w);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  while (true) {
    const double u = axial(rng);
    Point perp;
    do {
      perp = random_unit(d, rng);
      perp -= perp.dot(l.dir) * l.dir;
    } while (perp.norm() < 1e-9);
    perp *= w * std::pow(unit(rng), 1.0 / (d - 1)) / perp.norm();
    const Point p = l.at(u) + perp;
    if (segment_distance(p, l) <= w) return p;
  }
}

namespace {
std::int64_t cover_line(const Segment& line, double w, std::int64_t per_line, std::uint64_t seed, std::uint64_t idx) {
  auto rng = seeded(seed, idx);
  const auto cubes = cube_cover(line, w);
  std::int64_t fail = 0;
  for (std::int64_t s = 0; s < per_line; ++s) {
    const Point p = sample_tube(line, w, rng);
    bool hit = false;
    for (const auto& c : cubes) {
      if (cube_contains(c, p)) {
        hit = true;
        break;
      }
    }
    if (!hit) ++fail;
  }
  return fail;
}
}  // namespace

std::int64_t cover_failures_serial(const std::vector<Segment>& lines, double w, std::int64_t per_line,
                                   std::uint64_t seed) {
  std::int64_t fail = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) fail += cover_line(lines[i], w, per_line, seed, i);
  return fail;
}

std::int64_t cover_failures_omp(const std::vector<Segment>& lines, double w, std::int64_t per_line,
                                std::uint64_t seed) {
  std::int64_t fail = 0;
  const auto n = static_cast<std::int64_t>(lines.size());
#pragma omp parallel for schedule(dynamic) reduction(+ : fail)
  for (std::int64_t i = 0; i < n; ++i)
    fail += cover_line(lines[static_cast<std::size_t>(i)], w, per_line, seed, static_cast<std::uint64_t>(i));
  return fail;
}

double min_separation_serial(const DirectionNet& net) {
  double best = std::numeric_limits<double>::infinity();
  const auto n = net.size();
  for (std::int64_t i = 0; i < n; ++i) {
    const Point a = net.member(i);
    for (std::int64_t j = i + 1; j < n; ++j) best = std::min(best, (a - net.member(j)).norm());
  }
  return best;
}

double min_separation_omp(const DirectionNet& net) {
  double best = std::numeric_limits<double>::infinity();
  const auto n = net.size();
#pragma omp parallel for schedule(dynamic, 16) reduction(min : best)
  for (std::int64_t i = 0; i < n; ++i) {
    const Point a = net.member(i);
    for (std::int64_t j = i + 1; j < n; ++j) best = std::min(best, (a - net.member(j)).norm());
  }
  return best;
}

double covering_radius_serial(const DirectionNet& net, std::int64_t samples, std::uint64_t seed) {
  double worst = 0.0;
  for (std::int64_t i = 0; i < samples; ++i) {
    auto rng = seeded(seed, static_cast<std::uint64_t>(i));
    const Point e = random_unit(net.d(), rng);
    worst = std::max(worst, (net.member(net.nearest(e)) - e).norm());
  }
  return worst;
}

double covering_radius_omp(const DirectionNet& net, std::int64_t samples, std::uint64_t seed) {
  double worst = 0.0;
#pragma omp parallel for schedule(static) reduction(max : worst)
  for (std::int64_t i = 0; i < samples; ++i) {
    auto rng = seeded(seed, static_cast<std::uint64_t>(i));
    const Point e = random_unit(net.d(), rng);
    worst = std::max(worst, (net.member(net.nearest(e)) - e).norm());
  }
  return worst;
}

double min_gap(const std::vector<Point>& pts) {
  if (pts.size() < 2) return std::numeric_limits<double>::infinity();
  const int d = static_cast<int>(pts[0].size());
  // sweep along a generic direction so axis-aligned sets do not degenerate
  Point dir(d);
  for (int i = 0; i < d; ++i) dir[i] = 1.0 / std::sqrt(2.0 + i) + 0.1 * i;
  dir.normalize();
  std::vector<std::pair<double, std::size_t>> proj(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) proj[i] = {pts[i].dot(dir), i};
  std::sort(proj.begin(), proj.end());
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < proj.size(); ++i) {
    for (std::size_t j = i + 1; j < proj.size() && proj[j].first - proj[i].first < best; ++j)
      best = std::min(best, (pts[proj[i].second] - pts[proj[j].second]).norm());
  }
  return best;
}

}  // namespace uds::kernels
