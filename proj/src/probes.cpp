#include "uds/probes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "uds/kernels.hpp"

namespace uds::probes {

PorosityEstimate porosity_scan(const std::vector<Point>& set, const Point& x, const std::vector<double>& radii,
                               std::int64_t trials, std::uint64_t seed, double lo, double hi, int depth) {
  if (trials < 1) throw std::invalid_argument("porosity_scan needs trials >= 1");
  for (double r : radii)
    if (!(r >= lo * (1 - 1e-12) && r <= hi * (1 + 1e-12)))
      throw std::invalid_argument("radius " + std::to_string(r) + " outside the trust window");
  PorosityEstimate est;
  est.x = x;
  est.radii = radii;
  est.trials = trials;
  est.sample_size = static_cast<std::int64_t>(set.size());
  est.depth = depth;
  const int d = static_cast<int>(x.size());
  for (std::size_t ri = 0; ri < radii.size(); ++ri) {
    const double r = radii[ri];
    // x belongs to the set, so dist(y, set) <= |y - x| <= r: only points within 2r matter
    std::vector<Point> near;
    for (const auto& p : set)
      if ((p - x).norm() <= 2.0 * r) near.push_back(p);
    double best = 0.0;
#pragma omp parallel for schedule(static) reduction(max : best)
    for (std::int64_t i = 0; i < trials; ++i) {
      auto rng = kernels::seeded(seed + ri, static_cast<std::uint64_t>(i));
      const Point y = x + r * kernels::random_ball(d, rng);
      const double dy = (y - x).norm();
      if (dy <= 0.0) continue;
      double rho = dy;
      for (const auto& p : near) rho = std::min(rho, (p - y).norm());
      best = std::max(best, std::min(rho / dy, 1.0));
    }
    est.ratios.push_back(best);
    est.max_ratio = std::max(est.max_ratio, best);
  }
  return est;
}

HypothesisStats uds_hypothesis_trial(const Construction& c, double lambda, double psi, double eta,
                                     std::int64_t trials, std::uint64_t seed, double delta) {
  HypothesisStats st;
  st.lambda = lambda;
  st.psi = psi;
  st.eta = eta;
  st.trials = trials;
  st.thresholds = lemmas::delta_thresholds(lambda, psi, eta, c.sched(), c.K());
  lemmas::AuditConfig cfg;
  cfg.lambda = lambda;
  cfg.psi = psi;
  cfg.eta = eta;
  cfg.trials = trials;
  cfg.seed = seed;
  cfg.delta = delta;
  st.audit = lemmas::audit(c, "c3", cfg);
  st.passes = st.audit.passes;
  st.worst_slack = std::numeric_limits<double>::infinity();
  for (const auto& t : st.audit.trials) st.worst_slack = std::min(st.worst_slack, t.worst_slack);
  return st;
}

void to_json(nlohmann::json& j, const PorosityEstimate& p) {
  j = {{"x", std::vector<double>(p.x.data(), p.x.data() + p.x.size())},
       {"radii", p.radii},
       {"ratios", p.ratios},
       {"maxRatio", p.max_ratio},
       {"trials", p.trials},
       {"sampleSize", p.sample_size},
       {"depth", p.depth},
       {"label", p.label}};
}

}  // namespace uds::probes
