#include "uds/hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "uds/kernels.hpp"

namespace uds {

namespace {

constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

std::uint64_t fnv_mix(std::uint64_t h, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xffU;
    h *= kFnvPrime;
  }
  return h;
}

}  // namespace

std::uint64_t root_id() { return fnv_mix(kFnvOffset, 0x6c31); }

std::uint64_t child_id(std::uint64_t parent, int k, int m, const Step& step) {
  std::uint64_t h = kFnvOffset;
  h = fnv_mix(h, parent);
  h = fnv_mix(h, static_cast<std::uint64_t>(k));
  h = fnv_mix(h, static_cast<std::uint64_t>(m));
  h = fnv_mix(h, static_cast<std::uint64_t>(step.j));
  h = fnv_mix(h, static_cast<std::uint64_t>(step.net));
  h = fnv_mix(h, static_cast<std::uint64_t>(step.grid));
  return h;
}

Construction::Construction(ParamSchedule sched) : sched_(std::move(sched)) {
  const auto& opt = sched_.construction();
  for (int k = 1; k <= sched_.K(); ++k) {
    const auto s = sched_.s(k);
    if (k >= 2)
      nets_.push_back(std::make_shared<const DirectionNet>(
          DirectionNet::build(sched_.d(), s, opt.net_seed + static_cast<std::uint64_t>(k), opt.net_limit)));
    else
      nets_.push_back(nullptr);
    std::vector<int> js;
    const std::int64_t lowest = opt.j_window > 0 ? std::max<std::int64_t>(1, s - opt.j_window + 1) : 1;
    for (auto j = s; j >= lowest; --j) js.push_back(static_cast<int>(j));
    jvals_.push_back(std::move(js));
  }
}

const DirectionNet& Construction::net(int k) const {
  if (k < 2 || k > K()) throw std::out_of_range("no direction net at level " + std::to_string(k));
  return *nets_[static_cast<std::size_t>(k - 1)];
}

const std::vector<int>& Construction::j_values(int k) const {
  return jvals_.at(static_cast<std::size_t>(k - 1));
}

bool Construction::j_allowed(int k, int j) const {
  const auto& js = j_values(k);
  return std::find(js.begin(), js.end(), j) != js.end();
}

HLine Construction::root() const {
  HLine l;
  l.tag = NodeTag{1, 0, {}};
  l.geom = Segment{Point::Zero(d()), Point::Unit(d(), 0), 0.5};
  l.id = root_id();
  return l;
}

HLine Construction::at_level(const HLine& l, int k) const {
  if (l.tag.k > k) throw InvalidDirective("line of level " + std::to_string(l.tag.k) + " viewed at level " + std::to_string(k));
  if (l.tag.k == k) return l;
  HLine v = l;
  v.tag = NodeTag{k, 0, {}};
  return v;
}

SegmentGrid Construction::grid(const HLine& l, int k, int j) const {
  const double h = sched_.q_pow(j - sched_.exponent(k)) / static_cast<double>(sched_.s(k));
  if (l.geom.length() < h * (1.0 - 1e-12))
    throw InvalidDirective("R_l(j,e) needs length(l) >= Q^j w_k / s_k");
  return segment_grid(l.geom.length(), h);
}

HLine Construction::refine(const HLine& src, int k, const Step& step) const {
  if (k < 2 || k > K()) throw InvalidDirective("refinement level outside [2, K]");
  const HLine l = at_level(src, k);
  const int m = l.tag.m;
  if (m >= sched_.M(k)) throw InvalidDirective("class budget M_k exhausted at level " + std::to_string(k));
  if (!j_allowed(k, step.j)) throw InvalidDirective("category entry j=" + std::to_string(step.j) + " not available at level " + std::to_string(k));
  if (m >= 1 && step.j > l.tag.category.back())
    throw InvalidDirective("category must be non-increasing (j=" + std::to_string(step.j) + " after " +
                           std::to_string(l.tag.category.back()) + ")");
  const auto& E = net(k);
  if (step.net < 0 || step.net >= E.size()) throw InvalidDirective("net index out of range");
  const auto g = grid(l, k, step.j);
  if (step.grid < 0 || step.grid >= g.count) throw InvalidDirective("grid index out of range");

  HLine c;
  c.tag = NodeTag{k, m + 1, l.tag.category};
  c.tag.category.push_back(step.j);
  c.geom = Segment{l.geom.at(g.param(step.grid)), E.member(step.net), sched_.q_pow(step.j - sched_.exponent(k))};
  c.parent = l.id;
  c.id = child_id(l.id, k, m + 1, step);
  c.path = l.path;
  if (c.path.empty() || c.path.back().level != k) c.path.push_back(LevelDirective{k, {}});
  c.path.back().steps.push_back(step);
  return c;
}

HLine Construction::lazy_path(const LinePath& path) const {
  HLine l = root();
  int prev = 1;
  for (const auto& dir : path) {
    if (dir.level <= prev) throw InvalidDirective("directive levels must increase");
    if (dir.level > K()) throw InvalidDirective("directive level beyond horizon");
    for (const auto& st : dir.steps) l = refine(l, dir.level, st);
    prev = dir.level;
  }
  return l;
}

LinePath Construction::random_path(int k, int m, std::mt19937_64& rng) const {
  if (k < 1 || k > K()) throw InvalidDirective("random_path level outside [1, K]");
  if (m < 0 || m > (k == 1 ? 0 : sched_.M(k))) throw InvalidDirective("random_path class out of range");
  HLine l = root();
  for (int lev = 2; lev <= k; ++lev) {
    const int M = static_cast<int>(sched_.M(lev));
    const int steps = lev < k ? std::uniform_int_distribution<int>(0, M)(rng) : m;
    int prev = std::numeric_limits<int>::max();
    for (int s = 0; s < steps; ++s) {
      std::vector<int> js;
      for (int j : j_values(lev))
        if (j <= prev) js.push_back(j);
      Step st;
      st.j = js[std::uniform_int_distribution<std::size_t>(0, js.size() - 1)(rng)];
      st.net = std::uniform_int_distribution<std::int64_t>(0, net(lev).size() - 1)(rng);
      st.grid = std::uniform_int_distribution<std::int64_t>(0, grid(at_level(l, lev), lev, st.j).count - 1)(rng);
      l = refine(l, lev, st);
      prev = st.j;
    }
  }
  return l.path;
}

// ------------------------------------------------------------- streaming

namespace {

bool dfs(const Construction& c, const HLine& l, int k, const LineVisitor& visit) {
  const int m = l.tag.m;
  if (m >= c.sched().M(k)) return true;
  const auto& E = c.net(k);
  const double s = static_cast<double>(c.sched().s(k));
  for (int j : c.j_values(k)) {
    if (m >= 1 && j > l.tag.category.back()) continue;
    const double half = c.sched().q_pow(j - c.sched().exponent(k));
    const auto anchors = separated_points(l.geom, half / s);
    for (std::int64_t e = 0; e < E.size(); ++e) {
      const Point dir = E.member(e);
      for (std::size_t i = 0; i < anchors.size(); ++i) {
        const Step st{j, e, static_cast<std::int64_t>(i)};
        HLine ch;
        ch.tag = NodeTag{k, m + 1, l.tag.category};
        ch.tag.category.push_back(j);
        ch.geom = Segment{anchors[i], dir, half};
        ch.parent = l.id;
        ch.id = child_id(l.id, k, m + 1, st);
        ch.path = l.path;
        if (ch.path.empty() || ch.path.back().level != k) ch.path.push_back(LevelDirective{k, {}});
        ch.path.back().steps.push_back(st);
        if (!visit(ch)) return false;
        if (!dfs(c, ch, k, visit)) return false;
      }
    }
  }
  return true;
}

}  // namespace

bool stream_level(const Construction& c, int k, const LineVisitor& visit) {
  if (k < 1 || k > c.K()) throw std::out_of_range("stream_level: level outside [1, K]");
  if (k == 1) return visit(c.root());
  return stream_level(c, k - 1, [&](const HLine& line) {
    const HLine v = c.at_level(line, k);
    if (!visit(v)) return false;
    return dfs(c, v, k, visit);
  });
}

StreamCounts stream_counts(const Construction& c, int k) {
  StreamCounts out;
  out.k = k;
  std::map<std::vector<int>, std::uint64_t> per;
  const double w = c.w(k);
  stream_level(c, k, [&](const HLine& l) {
    ++per[l.tag.category];
    ++out.total_lines;
    out.total_cubes += static_cast<std::uint64_t>(cube_cover_count(l.geom.length(), w));
    if (l.tag.m >= 1) {
      const double expect = 2.0 * c.sched().q_pow(l.tag.category.back() - c.sched().exponent(k));
      const double got = (l.geom.hi() - l.geom.lo()).norm();
      out.max_length_error = std::max(out.max_length_error, std::abs(got - expect) / expect);
    }
    return true;
  });
  out.lines.assign(per.begin(), per.end());
  return out;
}

CoverAudit audit_level(const Construction& c, int k, std::int64_t lines, std::int64_t points_per_line,
                       std::uint64_t seed) {
  CoverAudit a;
  a.k = k;
  std::vector<Segment> segs;
  for (std::int64_t i = 0; i < lines; ++i) {
    auto rng = kernels::seeded(seed, static_cast<std::uint64_t>(i));
    const int m = k == 1 ? 0 : std::uniform_int_distribution<int>(0, static_cast<int>(c.sched().M(k)))(rng);
    const HLine l = c.at_level(c.lazy_path(c.random_path(k, m, rng)), k);
    if (l.tag.m >= 1) {
      const double expect = 2.0 * c.sched().q_pow(l.tag.category.back() - c.sched().exponent(k));
      const double got = (l.geom.hi() - l.geom.lo()).norm();
      a.max_length_error = std::max(a.max_length_error, std::abs(got - expect) / expect);
    }
    segs.push_back(l.geom);
  }
  a.lines_checked = lines;
  a.samples = lines * points_per_line;
  a.failures = kernels::cover_failures_omp(segs, c.w(k), points_per_line, seed ^ 0x9e3779b97f4a7c15ULL);
  return a;
}

void to_json(nlohmann::json& j, const Step& s) { j = nlohmann::json::array({s.j, s.net, s.grid}); }

void from_json(const nlohmann::json& j, Step& s) {
  s.j = j.at(0).get<int>();
  s.net = j.at(1).get<std::int64_t>();
  s.grid = j.at(2).get<std::int64_t>();
}

void to_json(nlohmann::json& j, const LevelDirective& d) { j = {{"level", d.level}, {"steps", d.steps}}; }

void from_json(const nlohmann::json& j, LevelDirective& d) {
  d.level = j.at("level").get<int>();
  d.steps = j.at("steps").get<std::vector<Step>>();
}

}  // namespace uds
