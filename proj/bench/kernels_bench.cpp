// Serial reference vs OpenMP for the hot loops.
#include <benchmark/benchmark.h>

#include "uds/kernels.hpp"

namespace {

using namespace uds;

std::vector<Point> cloud(std::int64_t n) {
  auto rng = kernels::seeded(7, 0);
  std::vector<Point> pts;
  pts.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) pts.push_back(kernels::random_ball(2, rng));
  return pts;
}

std::vector<Segment> lines(std::int64_t n) {
  auto rng = kernels::seeded(9, 0);
  std::vector<Segment> out;
  for (std::int64_t i = 0; i < n; ++i)
    out.push_back(make_segment(kernels::random_ball(2, rng), kernels::random_unit(2, rng), 0.25));
  return out;
}

void BM_GridCountSerial(benchmark::State& st) {
  const auto pts = cloud(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(kernels::grid_count_serial(pts, 1e-3));
}
void BM_GridCountOmp(benchmark::State& st) {
  const auto pts = cloud(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(kernels::grid_count_omp(pts, 1e-3));
}
BENCHMARK(BM_GridCountSerial)->Arg(1 << 16)->Arg(1 << 19);
BENCHMARK(BM_GridCountOmp)->Arg(1 << 16)->Arg(1 << 19);

void BM_CoverSerial(benchmark::State& st) {
  const auto ls = lines(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(kernels::cover_failures_serial(ls, 0.01, 64, 1));
}
void BM_CoverOmp(benchmark::State& st) {
  const auto ls = lines(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(kernels::cover_failures_omp(ls, 0.01, 64, 1));
}
BENCHMARK(BM_CoverSerial)->Arg(256);
BENCHMARK(BM_CoverOmp)->Arg(256);

void BM_SeparationSerial(benchmark::State& st) {
  const auto net = DirectionNet::build(3, st.range(0), 1);
  for (auto _ : st) benchmark::DoNotOptimize(kernels::min_separation_serial(net));
}
void BM_SeparationOmp(benchmark::State& st) {
  const auto net = DirectionNet::build(3, st.range(0), 1);
  for (auto _ : st) benchmark::DoNotOptimize(kernels::min_separation_omp(net));
}
BENCHMARK(BM_SeparationSerial)->Arg(20);
BENCHMARK(BM_SeparationOmp)->Arg(20);

void BM_CoveringSerial(benchmark::State& st) {
  const auto net = DirectionNet::build(2, 500, 1);
  for (auto _ : st) benchmark::DoNotOptimize(kernels::covering_radius_serial(net, st.range(0), 3));
}
void BM_CoveringOmp(benchmark::State& st) {
  const auto net = DirectionNet::build(2, 500, 1);
  for (auto _ : st) benchmark::DoNotOptimize(kernels::covering_radius_omp(net, st.range(0), 3));
}
BENCHMARK(BM_CoveringSerial)->Arg(1 << 14);
BENCHMARK(BM_CoveringOmp)->Arg(1 << 14);

}  // namespace

BENCHMARK_MAIN();
