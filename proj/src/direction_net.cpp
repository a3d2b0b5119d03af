#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "uds/geometry.hpp"

namespace uds {

std::int64_t circle_net_size(std::int64_t s) {
  return static_cast<std::int64_t>(
      std::floor(std::numbers::pi / std::asin(1.0 / (2.0 * static_cast<double>(s)))));
}

namespace {

// Points of the cube surface [-1,1]^d on a grid of spacing <= g, pushed to the sphere.
std::vector<Point> sphere_pool(int d, double g) {
  const auto cells = static_cast<int>(std::ceil(2.0 / g));
  const double step = 2.0 / cells;
  std::vector<Point> pool;
  std::vector<int> idx(static_cast<std::size_t>(d - 1), 0);
  for (int axis = 0; axis < d; ++axis) {
    for (double side : {-1.0, 1.0}) {
      std::fill(idx.begin(), idx.end(), 0);
      while (true) {
        Point p(d);
        int c = 0;
        bool dup = false;
        for (int i = 0; i < d; ++i) {
          if (i == axis) {
            p[i] = side;
            continue;
          }
          const int k = idx[static_cast<std::size_t>(c++)];
          p[i] = -1.0 + step * k;
          // faces share edges; keep an edge point only on its lowest face axis
          if ((k == 0 || k == cells) && i < axis) dup = true;
        }
        if (!dup) pool.push_back(p.normalized());
        std::size_t pos = 0;
        while (pos < idx.size() && ++idx[pos] > cells) idx[pos++] = 0;
        if (pos == idx.size()) break;
      }
    }
  }
  return pool;
}

}  // namespace

DirectionNet DirectionNet::build(int d, std::int64_t s, std::uint64_t seed, int limit) {
  if (d < 2) throw std::invalid_argument("direction net needs d >= 2");
  if (s < 3) throw std::invalid_argument("direction net needs s >= 3");
  DirectionNet net;
  net.d_ = d;
  net.s_ = s;
  net.seed_ = seed;
  if (d == 2) {
    net.angular_n_ = circle_net_size(s);
    net.full_size_ = net.angular_n_;
  } else {
    const double sep = 1.0 / static_cast<double>(s);
    const double g = 1.0 / (2.0 * static_cast<double>(s) * std::sqrt(static_cast<double>(d - 1)));
    const auto pool = sphere_pool(d, g);
    net.pool_mesh_ = 0.5 * g * std::sqrt(static_cast<double>(d - 1));
    std::vector<double> gap(pool.size(), std::numeric_limits<double>::infinity());
    std::size_t next = static_cast<std::size_t>(seed % pool.size());
    while (true) {
      net.members_.push_back(pool[next]);
      const Point& m = net.members_.back();
      for (std::size_t i = 0; i < pool.size(); ++i) gap[i] = std::min(gap[i], (pool[i] - m).norm());
      std::size_t best = 0;
      for (std::size_t i = 1; i < pool.size(); ++i)
        if (gap[i] > gap[best]) best = i;
      if (gap[best] < sep) break;
      next = best;
    }
    net.full_size_ = static_cast<std::int64_t>(net.members_.size());
  }
  net.size_ = limit > 0 ? std::min<std::int64_t>(limit, net.full_size_) : net.full_size_;
  if (d > 2) net.members_.resize(static_cast<std::size_t>(net.size_));
  return net;
}

Point DirectionNet::member(std::int64_t i) const {
  if (i < 0 || i >= size_) throw std::out_of_range("direction net index out of range");
  if (d_ == 2) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(angular_n_);
    Point p(2);
    p << std::cos(a), std::sin(a);
    return p;
  }
  return members_[static_cast<std::size_t>(i)];
}

std::int64_t DirectionNet::nearest(const Point& e) const {
  auto scan = [&](auto first, auto last) {
    std::int64_t best = -1;
    double bd = std::numeric_limits<double>::infinity();
    for (auto i = first; i < last; ++i) {
      const double dist = (member(i) - e).norm();
      if (dist < bd) {
        bd = dist;
        best = i;
      }
    }
    return best;
  };
  if (d_ != 2 || size_ < angular_n_) return scan(std::int64_t{0}, size_);
  double a = std::atan2(e[1], e[0]);
  if (a < 0) a += 2.0 * std::numbers::pi;
  const auto base = static_cast<std::int64_t>(std::floor(a / (2.0 * std::numbers::pi) * static_cast<double>(angular_n_)));
  std::int64_t best = -1;
  double bd = std::numeric_limits<double>::infinity();
  for (std::int64_t off = -1; off <= 2; ++off) {
    const std::int64_t i = ((base + off) % angular_n_ + angular_n_) % angular_n_;
    const double dist = (member(i) - e).norm();
    if (dist < bd || (dist == bd && i < best)) {
      bd = dist;
      best = i;
    }
  }
  return best;
}

}  // namespace uds
