#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "uds/geometry.hpp"

// Hot loops with a serial reference and an OpenMP version. Both versions
// return identical results for identical inputs.
namespace uds::kernels {

/// Occupied cells of the axis-aligned grid with cell side 2*eps anchored at the origin.
std::int64_t grid_count_serial(const std::vector<Point>& pts, double eps);
std::int64_t grid_count_omp(const std::vector<Point>& pts, double eps);

/// Uniform point of the closed tube B_w(l).
Point sample_tube(const Segment& l, double w, std::mt19937_64& rng);

/// For each line, per_line random tube points are tested against cube_cover(line, w).
std::int64_t cover_failures_serial(const std::vector<Segment>& lines, double w, std::int64_t per_line,
                                   std::uint64_t seed);
std::int64_t cover_failures_omp(const std::vector<Segment>& lines, double w, std::int64_t per_line,
                                std::uint64_t seed);

/// Smallest pairwise distance between members.
double min_separation_serial(const DirectionNet& net);
double min_separation_omp(const DirectionNet& net);

/// Largest distance from a random unit vector to its nearest member.
double covering_radius_serial(const DirectionNet& net, std::int64_t samples, std::uint64_t seed);
double covering_radius_omp(const DirectionNet& net, std::int64_t samples, std::uint64_t seed);

/// Smallest distance between two distinct points (0 if any coincide).
double min_gap(const std::vector<Point>& pts);

std::mt19937_64 seeded(std::uint64_t seed, std::uint64_t index);
Point random_unit(int d, std::mt19937_64& rng);
Point random_ball(int d, std::mt19937_64& rng);

}  // namespace uds::kernels
