#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "uds/hierarchy.hpp"

namespace uds {

/// Upper bound on N_(w_k)(M_1): the ledger's |C_k|, or its recursive bound when
/// the level was not counted exactly.
struct TheoreticalCount {
  int k = 1;
  double w = 0.0;
  BigReal count = 0;
  bool bound = false;  // true: ledger bound, not an exact count
};

TheoreticalCount theoretical_box_count(const CountLedger& ledger, int k);

struct ClaimRow {
  int k = 1;
  double log_term = 0.0;        // log(|C_k| w_k^p Q^(p s_k))
  double log_term_tilde = 0.0;  // log(|C_k| w_k^p Q^(p s~_k))
  bool count_is_bound = false;
  // ratio decomposition against k-1 (k >= 2)
  double log_factor_count = 0.0;   // log 2(M_k+1)(4 s_k^2 |E_k|)^M_k
  double log_factor_decay = 0.0;   // -(p-1) s_k log Q
  double log_factor_tilde = 0.0;   // p (s~_k - s~_(k-1)) log Q
  double log_factor_budget = 0.0;  // (p-1) s_k log Q / 2, the budget the first factor must fit under
  double log_ratio = 0.0;          // observed log_term_tilde(k) - log_term_tilde(k-1)
};

struct ClaimReport {
  double p = 1.5;
  int K = 1;
  std::vector<ClaimRow> rows;
  bool finite = true;
  bool bounded_trend = false;        // non-increasing over the final half of the horizon
  bool bounded_trend_tilde = false;
  bool non_increasing_from_2 = false;
  double log_H_observed = 0.0;       // max log term over the horizon
  std::string label = "trend only";
};

ClaimReport check_claim(double p, int K, const Construction& c, const CountLedger& ledger);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // RMS of log-count residuals
};

/// Least squares of log N against log(1/eps). Needs >= 3 scales.
SlopeFit dimension_slope(const std::vector<double>& eps, const std::vector<double>& counts);

struct BoxCountReport {
  std::string source = "empirical-grid";
  std::vector<double> scales;  // strictly decreasing
  std::vector<std::int64_t> counts;
  std::vector<std::string> labels;  // trust, extrapolation, excluded
  double min_gap = 0.0;
  double diameter = 0.0;  // bounding-box diagonal (upper bound)
  bool fitted = false;
  std::string fit_window;  // "trust" or "extrapolation"
  SlopeFit fit;
  std::int64_t points = 0;
};

/// Occupied cells of the axis-aligned grid with half-width eps. Scales outside
/// [10 min_gap, diameter] are excluded from the fit; scales outside the optional
/// trust window are labelled extrapolation.
BoxCountReport empirical_box_count(const std::vector<Point>& pts, std::vector<double> scales,
                                   std::optional<std::pair<double, double>> trust = std::nullopt,
                                   bool parallel = true);

void to_json(nlohmann::json& j, const ClaimReport& r);
void to_json(nlohmann::json& j, const BoxCountReport& r);

}  // namespace uds
