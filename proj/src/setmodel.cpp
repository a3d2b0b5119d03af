#include "uds/setmodel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "uds/kernels.hpp"

namespace uds {

namespace {

// Rebuilds the segment designated by a path straight from the schedule and
// nets; deliberately does not call Construction::refine.
struct Resolved {
  Segment seg;
  int level = 1;  // creation level
  int m = 0;      // class at the creation level
};

Resolved resolve(const Construction& c, const LinePath& path) {
  const auto& sc = c.sched();
  Resolved r{Segment{Point::Zero(c.d()), Point::Unit(c.d(), 0), 0.5}, 1, 0};
  int prev_level = 1;
  for (const auto& dir : path) {
    if (dir.level <= prev_level || dir.level > c.K()) throw MalformedChain("path levels must increase within [2, K]");
    if (dir.steps.empty()) throw MalformedChain("empty directive");
    if (static_cast<std::int64_t>(dir.steps.size()) > sc.M(dir.level)) throw MalformedChain("more than M_k steps at one level");
    int prev_j = std::numeric_limits<int>::max();
    const double s = static_cast<double>(sc.s(dir.level));
    for (const auto& st : dir.steps) {
      if (st.j > prev_j || !c.j_allowed(dir.level, st.j)) throw MalformedChain("invalid category entry");
      if (st.net < 0 || st.net >= c.net(dir.level).size()) throw MalformedChain("net index out of range");
      const double half = std::exp(static_cast<double>(st.j - sc.exponent(dir.level)) * std::log(sc.Q()));
      const double h = half / s;
      const double L = 2.0 * r.seg.half;
      const std::int64_t count = snapped_floor(L / h) + 1;
      if (st.grid < 0 || st.grid >= count) throw MalformedChain("grid index out of range");
      const double step = std::min(h, count > 1 ? L / static_cast<double>(count - 1) : h);
      const double u = (static_cast<double>(st.grid) - 0.5 * static_cast<double>(count - 1)) * step;
      r.seg = Segment{r.seg.center + u * r.seg.dir, c.net(dir.level).member(st.net), half};
      prev_j = st.j;
    }
    r.level = dir.level;
    r.m = static_cast<int>(dir.steps.size());
    prev_level = dir.level;
  }
  return r;
}

}  // namespace

WitnessChain with_point(WitnessChain chain, const Point& x) {
  chain.x = x;
  return chain;
}

WitnessReport verify_witness(const Construction& c, const WitnessChain& chain) {
  const auto& sc = c.sched();
  if (chain.K < 1 || chain.K > c.K()) throw MalformedChain("chain depth outside [1, K]");
  if (static_cast<int>(chain.levels.size()) != chain.K) throw MalformedChain("chain must list every level 1..K");
  if (chain.x.size() != c.d()) throw MalformedChain("chain point has wrong dimension");
  WitnessReport rep;
  for (int k = 1; k <= chain.K; ++k) {
    const auto& lv = chain.levels[static_cast<std::size_t>(k - 1)];
    if (lv.k != k) throw MalformedChain("chain levels out of order");
    LevelCheck chk;
    chk.k = k;
    chk.m = lv.m;
    const double wk = sc.width(k).value;
    const double Mk = k == 1 ? 0.0 : static_cast<double>(sc.M(k));
    chk.class_budget = chain.lambda * Mk;
    chk.radius = chain.lambda * wk;
    try {
      const auto r = resolve(c, lv.path);
      const int expect_m = r.level == k ? r.m : 0;
      if (r.level > k) {
        chk.line_ok = false;
        chk.note = "line created above this level";
      } else if (expect_m != lv.m) {
        chk.line_ok = false;
        chk.note = "class does not match path";
      }
      chk.dist = segment_distance(chain.x, r.seg);
    } catch (const MalformedChain& e) {
      chk.line_ok = false;
      chk.note = e.what();
      chk.dist = std::numeric_limits<double>::infinity();
    }
    chk.class_ok = lv.m >= 0 && static_cast<double>(lv.m) <= chk.class_budget + 1e-12;
    chk.dist_ok = chk.dist <= chk.radius + 1e-12 * wk;
    if ((!chk.line_ok || !chk.class_ok || !chk.dist_ok) && rep.ok) {
      rep.ok = false;
      rep.first_failure = k;
    }
    rep.levels.push_back(chk);
  }
  return rep;
}

// ------------------------------------------------------------- membership

namespace {

struct Search {
  const Construction& c;
  Point x;
  double lambda;
  int target;
  int mmax;  // class cap at the target level
  std::int64_t budget;
  std::int64_t used = 0;
  bool exhausted = false;
  std::optional<HLine> found;

  int cap(int lev) const { return lev == target ? mmax : static_cast<int>(c.sched().M(lev)); }

  // Largest distance from l of any line still reachable from (l, lev).
  double reach(const HLine& l, int lev) const {
    const auto& sc = c.sched();
    const int m = l.tag.m;
    double R = 0.0;
    const int jcap = m >= 1 ? l.tag.category.back() : c.j_values(lev).front();
    R += std::max(0, cap(lev) - m) * sc.q_pow(jcap - sc.exponent(lev));
    for (int k = lev + 1; k <= target; ++k)
      R += cap(k) * sc.q_pow(c.j_values(k).front() - sc.exponent(k));
    return R;
  }

  bool explore(const HLine& l, int lev) {
    if (found || exhausted) return true;
    if (budget > 0 && ++used > budget) {
      exhausted = true;
      return true;
    }
    if (budget <= 0) ++used;
    const double radius = lambda * c.w(target);
    const double dist = segment_distance(x, l.geom);
    if (dist > reach(l, lev) + radius + tol(radius)) return false;
    if (lev == target && dist <= radius) {
      found = l;
      return true;
    }
    if (lev < target) explore(c.at_level(l, lev + 1), lev + 1);
    if (found || exhausted) return true;
    if (lev >= 2 && l.tag.m < cap(lev)) {
      const auto& E = c.net(lev);
      for (int j : c.j_values(lev)) {
        if (l.tag.m >= 1 && j > l.tag.category.back()) continue;
        const auto g = c.grid(l, lev, j);
        const double half = c.sched().q_pow(j - c.sched().exponent(lev));
        HLine probe = l;  // reach of a child depends only on its tag
        probe.tag.m = l.tag.m + 1;
        probe.tag.category.push_back(j);
        const double window = half + reach(probe, lev) + radius + tol(radius);
        const double ux = l.geom.param(x);
        const auto lo = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::ceil((ux - window - g.first) / g.spacing)));
        const auto hi = std::min<std::int64_t>(g.count - 1, static_cast<std::int64_t>(std::floor((ux + window - g.first) / g.spacing)));
        for (std::int64_t e = 0; e < E.size(); ++e)
          for (auto i = lo; i <= hi; ++i) {
            explore(c.refine(l, lev, Step{j, e, i}), lev);
            if (found || exhausted) return true;
          }
      }
    }
    return true;
  }
};

}  // namespace

MembershipResult membership(const Construction& c, const Point& x, double lambda, int K, std::int64_t budget) {
  if (K < 1 || K > c.K()) throw std::out_of_range("membership depth outside [1, K]");
  MembershipResult res;
  WitnessChain chain;
  chain.x = x;
  chain.lambda = lambda;
  chain.K = K;
  std::int64_t remaining = budget;
  for (int k = 1; k <= K; ++k) {
    const int mmax = k == 1 ? 0 : static_cast<int>(std::floor(lambda * static_cast<double>(c.sched().M(k)) + 1e-12));
    Search s{c, x, lambda, k, mmax, remaining, 0, false, std::nullopt};
    s.explore(c.root(), 1);
    res.expansions += s.used;
    if (budget > 0) remaining = std::max<std::int64_t>(1, remaining - s.used);
    if (s.found) {
      const HLine l = c.at_level(*s.found, k);
      chain.levels.push_back(ChainLevel{k, l.tag.m, l.path});
      continue;
    }
    res.level = k;
    res.status = s.exhausted ? MembershipStatus::Unknown : MembershipStatus::NotMember;
    return res;
  }
  if (!verify_witness(c, chain).ok) throw std::logic_error("membership produced a chain that fails verification");
  res.status = MembershipStatus::Member;
  res.chain = std::move(chain);
  return res;
}

std::string status_name(MembershipStatus s) {
  switch (s) {
    case MembershipStatus::Member: return "member";
    case MembershipStatus::NotMember: return "not-member-at-level";
    case MembershipStatus::Unknown: return "not found within budget";
  }
  return "?";
}

// --------------------------------------------------------------- sampling

namespace {

struct Tube {
  Segment axis;
  double r;
};

Interval admissible(const Segment& l, const std::vector<Tube>& tubes) {
  Interval I{-l.half, l.half};
  for (const auto& t : tubes) {
    I = intersect(I, tube_interval(l, t.axis, t.r));
    if (I.empty()) break;
  }
  return I;
}

SampledPoint sample_one(const Construction& c, double lambda, int K, std::mt19937_64& rng) {
  const auto& sc = c.sched();
  WitnessChain chain;
  chain.lambda = lambda;
  chain.K = K;
  HLine cur = c.root();
  chain.levels.push_back(ChainLevel{1, 0, {}});
  std::vector<Tube> tubes;
  // radii pulled in by 1e-9 so boundary points verify without tolerance games
  tubes.push_back(Tube{cur.geom, lambda * c.w(1) * (1.0 - 1e-9)});
  for (int k = 2; k <= K; ++k) {
    cur = c.at_level(cur, k);
    const int mmax = static_cast<int>(std::floor(lambda * static_cast<double>(sc.M(k)) + 1e-12));
    const int target = std::uniform_int_distribution<int>(0, mmax)(rng);
    int prev = std::numeric_limits<int>::max();
    for (int step = 0; step < target; ++step) {
      const Interval I = lambda > 0 ? admissible(cur.geom, tubes) : Interval{-cur.geom.half, cur.geom.half};
      std::vector<int> js;
      for (int j : c.j_values(k))
        if (j <= prev) js.push_back(j);
      const int j = js[std::uniform_int_distribution<std::size_t>(0, js.size() - 1)(rng)];
      const auto e = std::uniform_int_distribution<std::int64_t>(0, c.net(k).size() - 1)(rng);
      const auto g = c.grid(cur, k, j);
      const auto lo = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::ceil((I.lo - g.first) / g.spacing)));
      const auto hi = std::min<std::int64_t>(g.count - 1, static_cast<std::int64_t>(std::floor((I.hi - g.first) / g.spacing)));
      if (I.empty() || lo > hi) break;  // no anchor inside the admissible interval
      const auto i = std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
      cur = c.refine(cur, k, Step{j, e, i});
      prev = j;
    }
    chain.levels.push_back(ChainLevel{k, cur.tag.m, cur.path});
    tubes.push_back(Tube{cur.geom, lambda * c.w(k) * (1.0 - 1e-9)});
  }
  Interval I = lambda > 0 ? admissible(cur.geom, tubes) : Interval{-cur.geom.half, cur.geom.half};
  if (I.empty()) I = Interval{0.0, 0.0};
  const double u = std::uniform_real_distribution<double>(I.lo, I.hi)(rng);
  chain.x = cur.geom.at(std::clamp(u, I.lo, I.hi));
  return SampledPoint{chain.x, chain};
}

}  // namespace

std::vector<SampledPoint> sample_points(const Construction& c, double lambda, int K, std::int64_t n,
                                        std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_points needs n >= 1");
  if (K < 1 || K > c.K()) throw std::out_of_range("sample depth outside [1, K]");
  if (lambda < 0.0 || lambda > 1.0) throw std::invalid_argument("lambda outside [0, 1]");
  std::vector<SampledPoint> out(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(dynamic, 8)
  for (std::int64_t i = 0; i < n; ++i) {
    auto rng = kernels::seeded(seed, static_cast<std::uint64_t>(i));
    out[static_cast<std::size_t>(i)] = sample_one(c, lambda, K, rng);
  }
  return out;
}

// ------------------------------------------------------------------- JSON

void to_json(nlohmann::json& j, const WitnessChain& c) {
  std::vector<double> x(c.x.data(), c.x.data() + c.x.size());
  auto levels = nlohmann::json::array();
  for (const auto& l : c.levels) levels.push_back({{"k", l.k}, {"m", l.m}, {"path", l.path}});
  j = {{"point", x}, {"lambda", c.lambda}, {"K", c.K}, {"levels", levels}};
}

void from_json(const nlohmann::json& j, WitnessChain& c) {
  const auto x = j.at("point").get<std::vector<double>>();
  c.x = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
  c.lambda = j.at("lambda").get<double>();
  c.K = j.at("K").get<int>();
  c.levels.clear();
  for (const auto& l : j.at("levels"))
    c.levels.push_back(ChainLevel{l.at("k").get<int>(), l.at("m").get<int>(), l.at("path").get<LinePath>()});
}

}  // namespace uds
