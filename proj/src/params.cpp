#include "uds/params.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace uds {

namespace {

constexpr double kFloorSlack = 1e-9;

std::int64_t floor_int(double v) { return static_cast<std::int64_t>(std::floor(v + kFloorSlack)); }

double poly(const std::vector<double>& c, double k) {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * k + *it;
  return acc;
}

std::int64_t table_at(const std::vector<std::int64_t>& t, int k, const char* what) {
  if (static_cast<std::size_t>(k) > t.size()) {
    std::ostringstream os;
    os << what << " table has " << t.size() << " entries but horizon needs k=" << k;
    throw ScheduleError(os.str());
  }
  return t[static_cast<std::size_t>(k - 1)];
}

std::int64_t eval_s(const SRule& r, int k) {
  switch (r.kind) {
    case SRule::Kind::Affine:
    case SRule::Kind::Polynomial:
      return std::max<std::int64_t>(3, floor_int(poly(r.coefficients, k)));
    case SRule::Kind::Table:
      return table_at(r.table, k, "s");
  }
  return 0;
}

std::int64_t eval_M(const MRule& r, std::int64_t s, int k) {
  switch (r.kind) {
    case MRule::Kind::LogFloor:
      return std::max<std::int64_t>(r.min, floor_int(std::log(static_cast<double>(s))));
    case MRule::Kind::Power:
      return std::max<std::int64_t>(r.min, floor_int(std::pow(static_cast<double>(s), r.alpha)));
    case MRule::Kind::SameAsS:
      return s;
    case MRule::Kind::Table:
      return table_at(r.table, k, "M");
  }
  return 0;
}

std::int64_t eval_tilde(const TildeRule& r, std::int64_t s, int k) {
  switch (r.kind) {
    case TildeRule::Kind::SameAsS:
      return s;
    case TildeRule::Kind::Affine:
      return floor_int(r.a * k + r.b);
    case TildeRule::Kind::Table:
      return table_at(r.table, k, "sTilde");
  }
  return 0;
}

bool non_increasing_tail(const std::vector<double>& v) {
  if (v.size() < 2) return true;
  std::size_t start = v.size() / 2;
  if (start == v.size() - 1) start = v.size() - 2;
  for (std::size_t i = start + 1; i < v.size(); ++i) {
    if (v[i] > v[i - 1] * (1.0 + 1e-12) + 1e-300) return false;
  }
  return true;
}

}  // namespace

ParamSchedule ParamSchedule::evaluate(const ScheduleSpec& spec) {
  ParamSchedule p;
  p.spec_ = spec;
  auto& bad = p.violations_;
  if (spec.d < 2) bad.push_back("d >= 2 (got " + std::to_string(spec.d) + ")");
  if (!(spec.Q > 1.0 && spec.Q < 2.0)) {
    std::ostringstream os;
    os << "1 < Q < 2 (got Q=" << spec.Q << ")";
    bad.push_back(os.str());
  }
  if (spec.K < 1) bad.push_back("K >= 1 (got " + std::to_string(spec.K) + ")");
  p.prefix_.push_back(0);
  for (int k = 1; k <= spec.K; ++k) {
    const auto s = eval_s(spec.s, k);
    const auto m = eval_M(spec.M, s, k);
    const auto st = eval_tilde(spec.s_tilde, s, k);
    p.s_.push_back(s);
    p.M_.push_back(m);
    p.s_tilde_.push_back(st);
    p.prefix_.push_back(p.prefix_.back() + s);
    std::ostringstream os;
    if (s < 3 || m < 3 || m > s) {
      os << "3 ≤ M_k ≤ s_k violated at k=" << k << " (M_k=" << m << ", s_k=" << s << ")";
      bad.push_back(os.str());
    }
    if (st < s) {
      std::ostringstream ot;
      ot << "s~_k ≥ s_k violated at k=" << k << " (s~_k=" << st << ", s_k=" << s << ")";
      bad.push_back(ot.str());
    }
  }
  return p;
}

ParamSchedule ParamSchedule::make(const ScheduleSpec& spec) {
  auto p = evaluate(spec);
  if (!p.violations_.empty()) throw ScheduleError(p.violations_.front());
  return p;
}

std::size_t ParamSchedule::check(int k) const {
  if (k < 1 || k > spec_.K) {
    throw std::out_of_range("level " + std::to_string(k) + " outside [1, " +
                            std::to_string(spec_.K) + "]");
  }
  return static_cast<std::size_t>(k - 1);
}

std::int64_t ParamSchedule::exponent(int k) const {
  if (k == 0) return 0;
  return prefix_.at(check(k) + 1);
}

Width ParamSchedule::width(int k) const {
  const auto e = exponent(static_cast<int>(check(k)) + 1);
  return Width{e, std::exp(-static_cast<double>(e) * std::log(spec_.Q))};
}

double ParamSchedule::log_width(int k) const {
  return -static_cast<double>(exponent(static_cast<int>(check(k)) + 1)) * std::log(spec_.Q);
}

double ParamSchedule::q_pow(std::int64_t p) const {
  return std::exp(static_cast<double>(p) * std::log(spec_.Q));
}

ParamSchedule make_schedule(ScheduleKind kind, const std::vector<double>& coefficients, int d,
                            double Q, int K) {
  ScheduleSpec spec;
  spec.d = d;
  spec.Q = Q;
  spec.K = K;
  switch (kind) {
    case ScheduleKind::Polynomial:
      if (coefficients.empty() || coefficients.back() <= 0.0)
        throw ScheduleError("polynomial schedule needs a positive leading coefficient");
      spec.s = SRule{SRule::Kind::Polynomial, coefficients, {}};
      spec.M = MRule{MRule::Kind::Power, 3, 0.5, {}};
      break;
    case ScheduleKind::LinearTilde: {
      if (coefficients.size() < 3)
        throw ScheduleError("linear-tilde schedule needs {a, b, c0, c1, ...}");
      if (coefficients[0] <= 0.0) throw ScheduleError("linear-tilde needs a > 0");
      std::vector<double> c(coefficients.begin() + 2, coefficients.end());
      if (c.back() <= 0.0) throw ScheduleError("s_k polynomial needs a positive leading coefficient");
      spec.s = SRule{SRule::Kind::Polynomial, c, {}};
      spec.s_tilde = TildeRule{TildeRule::Kind::Affine, coefficients[0], coefficients[1], {}};
      spec.M = MRule{};
      break;
    }
    case ScheduleKind::LogM:
      if (coefficients.empty() || coefficients.back() <= 0.0)
        throw ScheduleError("log-M schedule needs a positive leading coefficient");
      spec.s = SRule{SRule::Kind::Polynomial, coefficients, {}};
      spec.M = MRule{};
      break;
  }
  return ParamSchedule::make(spec);
}

ScheduleValidation validate_schedule(const ParamSchedule& sched, int horizon) {
  if (horizon < 1 || horizon > sched.K())
    throw std::out_of_range("horizon must lie in [1, K]");
  ScheduleValidation v;
  v.horizon = horizon;
  v.hard_violations = sched.hard_violations();
  v.hard_pass = v.hard_violations.empty();

  bool s_mono = true, m_mono = true;
  for (int k = 2; k <= horizon; ++k) {
    s_mono = s_mono && sched.s(k) >= sched.s(k - 1);
    m_mono = m_mono && sched.M(k) >= sched.M(k - 1);
  }
  v.s_growth = s_mono && sched.s(horizon) > sched.s(1);
  v.M_growth = m_mono && sched.M(horizon) > sched.M(1);

  v.ml_ratio.name = "M_k*log(s_k)/s_k";
  v.ml_ratio.first_index = 1;
  for (int k = 1; k <= horizon; ++k) {
    const double s = static_cast<double>(sched.s(k));
    v.ml_ratio.values.push_back(static_cast<double>(sched.M(k)) * std::log(s) / s);
  }
  v.tilde_increment.name = "(s~_k - s~_{k-1})/s_k";
  v.tilde_increment.first_index = 2;
  for (int k = 2; k <= horizon; ++k) {
    v.tilde_increment.values.push_back(
        static_cast<double>(sched.s_tilde(k) - sched.s_tilde(k - 1)) /
        static_cast<double>(sched.s(k)));
  }
  v.s_ratio.name = "s_k/s_{k+1}";
  v.s_ratio.first_index = 1;
  for (int k = 1; k < horizon; ++k) {
    v.s_ratio.values.push_back(static_cast<double>(sched.s(k)) / static_cast<double>(sched.s(k + 1)));
  }
  v.ml_ratio.non_increasing_tail = non_increasing_tail(v.ml_ratio.values);
  v.tilde_increment.non_increasing_tail = non_increasing_tail(v.tilde_increment.values);
  // s_k/s_{k+1} -> 1 from below: the tail should be non-decreasing, report via negation.
  {
    std::vector<double> neg;
    for (double x : v.s_ratio.values) neg.push_back(-x);
    v.s_ratio.non_increasing_tail = non_increasing_tail(neg);
  }
  return v;
}

namespace presets {

ScheduleSpec default_spec() {
  ScheduleSpec spec;
  spec.d = 2;
  spec.Q = 1.5;
  spec.s = SRule{SRule::Kind::Affine, {3.0, 1.0}, {}};
  spec.M = MRule{MRule::Kind::LogFloor, 3, 0.5, {}};
  spec.s_tilde = TildeRule{};
  spec.K = 3;
  return spec;
}

ScheduleSpec toy_spec() {
  ScheduleSpec spec = default_spec();
  spec.s = SRule{SRule::Kind::Table, {}, {4, 5, 6}};
  spec.M = MRule{MRule::Kind::Table, 3, 0.5, {3, 3, 3}};
  spec.construction.net_limit = 5;
  spec.construction.j_window = 2;
  return spec;
}

ScheduleSpec lemma_spec() {
  ScheduleSpec spec;
  spec.d = 2;
  spec.Q = 1.00002;
  spec.s = SRule{SRule::Kind::Table, {}, {35000, 130000, 130000}};
  spec.M = MRule{MRule::Kind::Table, 3, 0.5, {9, 9, 9}};
  spec.s_tilde = TildeRule{};
  spec.K = 3;
  return spec;
}

}  // namespace presets

// ---------------------------------------------------------------- JSON

namespace {

nlohmann::json table_json(const std::vector<std::int64_t>& t) {
  return nlohmann::json{{"kind", "table"}, {"values", t}};
}

std::vector<std::int64_t> read_table(const nlohmann::json& j) {
  return j.at("values").get<std::vector<std::int64_t>>();
}

}  // namespace

void to_json(nlohmann::json& j, const ScheduleSpec& spec) {
  j = nlohmann::json::object();
  j["d"] = spec.d;
  j["Q"] = spec.Q;
  switch (spec.s.kind) {
    case SRule::Kind::Affine: {
      const double b = spec.s.coefficients.size() > 0 ? spec.s.coefficients[0] : 0.0;
      const double a = spec.s.coefficients.size() > 1 ? spec.s.coefficients[1] : 0.0;
      j["s"] = {{"kind", "affine"}, {"a", a}, {"b", b}};
      break;
    }
    case SRule::Kind::Polynomial:
      j["s"] = {{"kind", "polynomial"}, {"coefficients", spec.s.coefficients}};
      break;
    case SRule::Kind::Table:
      j["s"] = table_json(spec.s.table);
      break;
  }
  switch (spec.M.kind) {
    case MRule::Kind::LogFloor:
      j["M"] = {{"kind", "logfloor"}, {"min", spec.M.min}};
      break;
    case MRule::Kind::Power:
      j["M"] = {{"kind", "power"}, {"alpha", spec.M.alpha}, {"min", spec.M.min}};
      break;
    case MRule::Kind::SameAsS:
      j["M"] = {{"kind", "same-as-s"}};
      break;
    case MRule::Kind::Table:
      j["M"] = table_json(spec.M.table);
      break;
  }
  switch (spec.s_tilde.kind) {
    case TildeRule::Kind::SameAsS:
      j["sTilde"] = "same-as-s";
      break;
    case TildeRule::Kind::Affine:
      j["sTilde"] = {{"kind", "affine"}, {"a", spec.s_tilde.a}, {"b", spec.s_tilde.b}};
      break;
    case TildeRule::Kind::Table:
      j["sTilde"] = table_json(spec.s_tilde.table);
      break;
  }
  j["K"] = spec.K;
  if (spec.construction != ConstructionOptions{}) {
    j["construction"] = {{"netLimit", spec.construction.net_limit},
                         {"jWindow", spec.construction.j_window},
                         {"netSeed", spec.construction.net_seed}};
  }
}

void from_json(const nlohmann::json& j, ScheduleSpec& spec) {
  spec = ScheduleSpec{};
  spec.d = j.at("d").get<int>();
  spec.Q = j.at("Q").get<double>();
  spec.K = j.at("K").get<int>();

  const auto& s = j.at("s");
  const auto skind = s.at("kind").get<std::string>();
  if (skind == "affine") {
    spec.s = SRule{SRule::Kind::Affine, {s.at("b").get<double>(), s.at("a").get<double>()}, {}};
  } else if (skind == "polynomial") {
    spec.s = SRule{SRule::Kind::Polynomial, s.at("coefficients").get<std::vector<double>>(), {}};
  } else if (skind == "table") {
    spec.s = SRule{SRule::Kind::Table, {}, read_table(s)};
  } else {
    throw ScheduleError("unknown s rule kind '" + skind + "'");
  }

  const auto& m = j.at("M");
  const auto mkind = m.is_string() ? m.get<std::string>() : m.at("kind").get<std::string>();
  if (mkind == "logfloor") {
    spec.M = MRule{MRule::Kind::LogFloor, m.value("min", std::int64_t{3}), 0.5, {}};
  } else if (mkind == "power") {
    spec.M = MRule{MRule::Kind::Power, m.value("min", std::int64_t{3}), m.at("alpha").get<double>(), {}};
  } else if (mkind == "same-as-s") {
    spec.M = MRule{MRule::Kind::SameAsS, 3, 0.5, {}};
  } else if (mkind == "table") {
    spec.M = MRule{MRule::Kind::Table, 3, 0.5, read_table(m)};
  } else {
    throw ScheduleError("unknown M rule kind '" + mkind + "'");
  }

  if (j.contains("sTilde")) {
    const auto& t = j.at("sTilde");
    const auto tkind = t.is_string() ? t.get<std::string>() : t.at("kind").get<std::string>();
    if (tkind == "same-as-s") {
      spec.s_tilde = TildeRule{};
    } else if (tkind == "affine") {
      spec.s_tilde = TildeRule{TildeRule::Kind::Affine, t.at("a").get<double>(), t.at("b").get<double>(), {}};
    } else if (tkind == "table") {
      spec.s_tilde = TildeRule{TildeRule::Kind::Table, 1.0, 0.0, read_table(t)};
    } else {
      throw ScheduleError("unknown sTilde rule kind '" + tkind + "'");
    }
  }
  if (j.contains("construction")) {
    const auto& c = j.at("construction");
    spec.construction.net_limit = c.value("netLimit", 0);
    spec.construction.j_window = c.value("jWindow", 0);
    spec.construction.net_seed = c.value("netSeed", std::uint64_t{0});
  }
}

namespace {
nlohmann::json trend_json(const TrendSeries& t) {
  return {{"name", t.name},
          {"firstIndex", t.first_index},
          {"values", t.values},
          {"nonIncreasingTail", t.non_increasing_tail}};
}
}  // namespace

void to_json(nlohmann::json& j, const ScheduleValidation& v) {
  j = {{"horizon", v.horizon},
       {"hardPass", v.hard_pass},
       {"hardViolations", v.hard_violations},
       {"label", v.label},
       {"trend",
        {{"sGrowth", v.s_growth},
         {"MGrowth", v.M_growth},
         {"mlRatio", trend_json(v.ml_ratio)},
         {"tildeIncrement", trend_json(v.tilde_increment)},
         {"sRatio", trend_json(v.s_ratio)}}}};
}

}  // namespace uds
