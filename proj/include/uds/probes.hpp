#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "uds/lemmas.hpp"

namespace uds::probes {

/// Heuristic lower estimate of the porosity constant at x relative to a finite
/// sample of a depth-K truncation. The true set is denser.
struct PorosityEstimate {
  Point x;
  std::vector<double> radii;
  std::vector<double> ratios;  // largest rho / |y - x| found per radius, in [0, 1]
  double max_ratio = 0.0;
  std::int64_t trials = 0;
  std::int64_t sample_size = 0;
  int depth = 0;
  std::string label = "heuristic lower bound relative to the truncation";
};

/// radii must lie in [lo, hi] (typically [10 w_K, w_1]); y is drawn uniformly
/// from B(x, r) with per-trial seeds, so more trials never lower a ratio.
PorosityEstimate porosity_scan(const std::vector<Point>& set, const Point& x, const std::vector<double>& radii,
                               std::int64_t trials, std::uint64_t seed, double lo, double hi, int depth = 0);

struct HypothesisStats {
  double lambda = 0.0, psi = 0.0, eta = 0.0;
  std::int64_t trials = 0;
  std::int64_t passes = 0;
  double worst_slack = 0.0;
  lemmas::Thresholds thresholds;
  lemmas::AuditResult audit;
};

/// Samples x in M_lambda, v_1..v_3 in the closed unit ball and delta in
/// [floor, delta1), runs the wedge construction and records both conclusions.
HypothesisStats uds_hypothesis_trial(const Construction& c, double lambda, double psi, double eta,
                                     std::int64_t trials, std::uint64_t seed, double delta = 0.0);

void to_json(nlohmann::json& j, const PorosityEstimate& p);

}  // namespace uds::probes
