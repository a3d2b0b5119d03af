#include "uds/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "uds/kernels.hpp"

namespace uds {

TheoreticalCount theoretical_box_count(const CountLedger& ledger, int k) {
  const auto& lv = ledger.level(k);
  return TheoreticalCount{k, lv.w, lv.exact ? BigReal(lv.cubes) : lv.cubes_estimate, !lv.exact};
}

ClaimReport check_claim(double p, int K, const Construction& c, const CountLedger& ledger) {
  if (!(p > 1.0 && p < 2.0)) throw std::invalid_argument("p outside (1, 2)");
  if (K < 1 || K > static_cast<int>(ledger.levels.size())) throw std::out_of_range("claim horizon beyond the ledger");
  const auto& sc = c.sched();
  const double lq = std::log(sc.Q());
  ClaimReport rep;
  rep.p = p;
  rep.K = K;
  rep.log_H_observed = -std::numeric_limits<double>::infinity();
  for (int k = 1; k <= K; ++k) {
    const auto tc = theoretical_box_count(ledger, k);
    ClaimRow r;
    r.k = k;
    r.count_is_bound = tc.bound;
    const double logC = static_cast<double>(boost::multiprecision::log(tc.count));
    // w_k^p Q^(p s_k) = Q^(-p (E_k - s_k))
    r.log_term = logC - p * static_cast<double>(sc.exponent(k) - sc.s(k)) * lq;
    r.log_term_tilde = logC - p * static_cast<double>(sc.exponent(k) - sc.s_tilde(k)) * lq;
    if (k >= 2) {
      const double s = static_cast<double>(sc.s(k));
      const double M = static_cast<double>(sc.M(k));
      const double E = static_cast<double>(c.net(k).size());
      r.log_factor_count = std::log(2.0 * (M + 1.0)) + M * std::log(4.0 * s * s * E);
      r.log_factor_decay = -(p - 1.0) * s * lq;
      r.log_factor_tilde = p * static_cast<double>(sc.s_tilde(k) - sc.s_tilde(k - 1)) * lq;
      r.log_factor_budget = (p - 1.0) * s * lq / 2.0;
      r.log_ratio = r.log_term_tilde - rep.rows.back().log_term_tilde;
    }
    if (!std::isfinite(r.log_term) || !std::isfinite(r.log_term_tilde)) rep.finite = false;
    rep.log_H_observed = std::max(rep.log_H_observed, r.log_term);
    rep.rows.push_back(r);
  }
  auto tail_ok = [&](int from, auto get) {
    for (int k = std::max(from, 2); k <= K; ++k)
      if (get(rep.rows[static_cast<std::size_t>(k - 1)]) > get(rep.rows[static_cast<std::size_t>(k - 2)])) return false;
    return true;
  };
  const int half = K / 2 + 1;
  rep.bounded_trend = rep.finite && tail_ok(half, [](const ClaimRow& r) { return r.log_term; });
  rep.bounded_trend_tilde = rep.finite && tail_ok(half, [](const ClaimRow& r) { return r.log_term_tilde; });
  rep.non_increasing_from_2 = rep.finite && tail_ok(3, [](const ClaimRow& r) { return r.log_term; });
  return rep;
}

SlopeFit dimension_slope(const std::vector<double>& eps, const std::vector<double>& counts) {
  if (eps.size() != counts.size()) throw std::invalid_argument("scale and count lists differ in length");
  if (eps.size() < 3) throw std::invalid_argument("dimension_slope needs at least 3 scales");
  const auto n = static_cast<double>(eps.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0) || !(counts[i] > 0)) throw std::invalid_argument("scales and counts must be positive");
    const double x = -std::log(eps[i]), y = std::log(counts[i]);
    xs.push_back(x);
    ys.push_back(y);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double den = n * sxx - sx * sx;
  if (!(den > 0)) throw std::invalid_argument("scales must not all coincide");
  SlopeFit f;
  f.slope = (n * sxy - sx * sy) / den;
  f.intercept = (sy - f.slope * sx) / n;
  double ss = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = ys[i] - (f.intercept + f.slope * xs[i]);
    ss += e * e;
  }
  f.residual = std::sqrt(ss / n);
  return f;
}

BoxCountReport empirical_box_count(const std::vector<Point>& pts, std::vector<double> scales,
                                   std::optional<std::pair<double, double>> trust, bool parallel) {
  if (pts.empty()) throw std::invalid_argument("empirical_box_count needs at least one point");
  if (scales.empty()) throw std::invalid_argument("empty scale list");
  for (double e : scales)
    if (!(e > 0)) throw std::invalid_argument("scales must be positive");
  std::sort(scales.begin(), scales.end(), std::greater<>());
  scales.erase(std::unique(scales.begin(), scales.end()), scales.end());

  BoxCountReport rep;
  rep.points = static_cast<std::int64_t>(pts.size());
  rep.scales = scales;
  rep.min_gap = kernels::min_gap(pts);
  Point lo = pts[0], hi = pts[0];
  for (const auto& p : pts) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  rep.diameter = (hi - lo).norm();
  std::vector<double> fe, fc, xe, xc;
  for (double e : scales) {
    const auto n = parallel ? kernels::grid_count_omp(pts, e) : kernels::grid_count_serial(pts, e);
    rep.counts.push_back(n);
    std::string label = "trust";
    if (!(e >= 10.0 * rep.min_gap && e <= rep.diameter))
      label = "excluded";
    else if (trust && !(e >= trust->first * (1 - 1e-12) && e <= trust->second * (1 + 1e-12)))
      label = "extrapolation";
    rep.labels.push_back(label);
    if (label == "trust") {
      fe.push_back(e);
      fc.push_back(static_cast<double>(n));
    }
    if (label != "excluded") {
      xe.push_back(e);
      xc.push_back(static_cast<double>(n));
    }
  }
  if (fe.size() >= 3) {
    rep.fit = dimension_slope(fe, fc);
    rep.fitted = true;
    rep.fit_window = "trust";
  } else if (xe.size() >= 3) {
    rep.fit = dimension_slope(xe, xc);
    rep.fitted = true;
    rep.fit_window = "extrapolation";
  }
  return rep;
}

void to_json(nlohmann::json& j, const ClaimReport& r) {
  auto rows = nlohmann::json::array();
  for (const auto& x : r.rows)
    rows.push_back({{"k", x.k},
                    {"logTerm", x.log_term},
                    {"logTermTilde", x.log_term_tilde},
                    {"countIsBound", x.count_is_bound},
                    {"logFactorCount", x.log_factor_count},
                    {"logFactorDecay", x.log_factor_decay},
                    {"logFactorTilde", x.log_factor_tilde},
                    {"logFactorBudget", x.log_factor_budget},
                    {"logRatio", x.log_ratio}});
  j = {{"p", r.p},
       {"K", r.K},
       {"rows", rows},
       {"finite", r.finite},
       {"boundedTrend", r.bounded_trend},
       {"boundedTrendTilde", r.bounded_trend_tilde},
       {"nonIncreasingFrom2", r.non_increasing_from_2},
       {"logHObserved", r.log_H_observed},
       {"label", r.label}};
}

void to_json(nlohmann::json& j, const BoxCountReport& r) {
  j = {{"source", r.source},     {"points", r.points},       {"scales", r.scales},
       {"counts", r.counts},     {"labels", r.labels},       {"minGap", r.min_gap},
       {"diameter", r.diameter}, {"fitted", r.fitted},       {"fitWindow", r.fit_window},
       {"slope", r.fit.slope},   {"intercept", r.fit.intercept}, {"residual", r.fit.residual}};
}

}  // namespace uds
