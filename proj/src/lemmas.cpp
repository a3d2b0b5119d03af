#include "uds/lemmas.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "uds/kernels.hpp"

namespace uds::lemmas {

namespace {

BoundCheck check(std::string name, double value, double bound) {
  BoundCheck b{std::move(name), value, bound};
  if (!(value <= bound * (1.0 + 1e-12) + 1e-15))
    throw BoundViolation(b.name + ": " + std::to_string(value) + " > " + std::to_string(bound));
  return b;
}

HLine line_at(const Construction& c, const LinePath& path, int k) { return c.at_level(c.lazy_path(path), k); }

Point closest_on(const Segment& s, const Point& x) { return s.at(std::clamp(s.param(x), -s.half, s.half)); }

LinePath parent_path(LinePath p) {
  p.back().steps.pop_back();
  if (p.back().steps.empty()) p.pop_back();
  return p;
}

nlohmann::json vec(const Point& p) { return std::vector<double>(p.data(), p.data() + p.size()); }

void require_ranges(double lambda, double psi, bool open_lambda) {
  if (!(lambda >= 0.0 && lambda < 1.0) || (open_lambda && lambda <= 0.0))
    throw PreconditionError("lambda outside its range");
  if (!(psi > 0.0 && psi < 1.0 - lambda)) throw PreconditionError("psi outside (0, 1 - lambda)");
}

}  // namespace

// ------------------------------------------------------------- thresholds

Scale locate_scale(const ParamSchedule& sc, double delta, double psi) {
  Scale s;
  if (!(delta > 0.0) || !(psi > 0.0)) {
    s.why = "delta and psi must be positive";
    return s;
  }
  const double lq = std::log(sc.Q());
  // L = log_Q(Q delta / psi); psi w_n <= Q delta  <=>  E_n >= -L
  const double L = std::log(sc.Q() * delta / psi) / lq;
  int n = 0;
  for (int k = 1; k <= sc.K(); ++k)
    if (static_cast<double>(sc.exponent(k)) >= -L) {
      n = k;
      break;
    }
  if (n == 0) {
    s.why = "delta below the truncation horizon";
    return s;
  }
  if (n == 1) {
    s.why = "delta too large: Q delta >= psi w_1";
    return s;
  }
  s.n = n;
  s.t = static_cast<std::int64_t>(std::floor(L + static_cast<double>(sc.exponent(n))));
  s.t = std::clamp<std::int64_t>(s.t, 0, sc.s(n) - 1);
  if (1.0 / static_cast<double>(sc.s(n)) > psi) {
    s.why = "1/s_n > psi";
    return s;
  }
  s.ok = true;
  return s;
}

namespace {

bool core_conditions(const ParamSchedule& sc, int k, double psi, double eta) {
  const double s = static_cast<double>(sc.s(k));
  const double M = static_cast<double>(sc.M(k));
  return 1.0 / s <= std::min(eta, psi) && (M + 4.0) / s <= eta * psi / 4.0 && psi * M >= 6.0;
}

/// First level of the tail [k0, K] on which pred holds everywhere (0 if none; k0 >= 2).
template <class Pred>
int tail_start(int K, Pred pred) {
  int k0 = 0;
  for (int k = K; k >= 2; --k) {
    if (!pred(k)) break;
    k0 = k;
  }
  return k0;
}

}  // namespace

Thresholds delta_thresholds(double lambda, double psi, double eta, const ParamSchedule& sc, int K,
                            const WedgeConstants& wc) {
  require_ranges(lambda, psi, false);
  if (!(eta > 0.0 && eta < 1.0)) throw PreconditionError("eta outside (0, 1)");
  if (!wc.valid()) throw PreconditionError("wedge constants violate a + 2b + 3c < 1/2");
  if (K < 1 || K > sc.K()) throw PreconditionError("horizon outside [1, K]");
  const double Q = sc.Q();
  Thresholds th;
  // crucial: delta0 = delta0'(eta/2) / 2, delta0' = psi w_k0 / 2
  th.k0 = tail_start(K, [&](int k) { return core_conditions(sc, k, psi, eta / 2.0); });
  if (th.k0 > 0) {
    th.delta0 = psi * sc.width(th.k0).value / 4.0;
    th.delta0_floor = psi * sc.width(K).value / (2.0 * Q);
    // Compared in the log domain: the widths themselves may underflow.
    th.crucial_feasible = sc.log_width(K) - std::log(2.0 * Q) < sc.log_width(th.k0) - std::log(4.0);
  }
  // wedge on scaled inputs u = c v: eta_s = c eta, delta_s = delta / c
  const double eta_s = wc.c * eta;
  th.k0_wedge = tail_start(K, [&](int k) { return core_conditions(sc, k, psi, wc.a * eta_s / 2.0); });
  th.kb = tail_start(K, [&](int k) { return 2.0 / (psi * static_cast<double>(sc.s(k))) <= wc.b * eta_s; });
  if (th.k0_wedge > 0 && th.kb > 0) {
    const double core = std::min(psi * sc.width(th.k0_wedge).value / 4.0, psi * sc.width(th.kb).value / 2.0);
    th.delta1 = wc.c * core;
    th.delta1_floor = wc.c * psi * sc.width(K).value / Q;
    const double log_core = std::min(sc.log_width(th.k0_wedge) - std::log(4.0), sc.log_width(th.kb) - std::log(2.0));
    th.wedge_feasible = sc.log_width(K) - std::log(Q) < log_core;
  }
  th.verdict = th.crucial_feasible || th.wedge_feasible ? "ok" : "horizon-insufficient";
  return th;
}

// ------------------------------------------------------------------ basic

ChildResult nearest_child(const Construction& c, const HLine& src, int k, std::int64_t e, int j, const Point& x) {
  const HLine l = c.at_level(src, k);
  if (segment_distance(x, l.geom) > 1e-9 * l.geom.length()) throw PreconditionError("nearest_child: x not on l");
  const auto g = c.grid(l, k, j);
  const auto idx = g.nearest(l.geom.param(x));
  ChildResult r;
  r.line = c.refine(l, k, Step{j, e, idx});
  r.x = r.line.geom.center;
  const auto& sc = c.sched();
  r.dist = check("basic |x'-x| <= Q^j w_k / s_k", (r.x - x).norm(),
                 sc.q_pow(j - sc.exponent(k)) / static_cast<double>(sc.s(k)));
  return r;
}

// ----------------------------------------------------------------- approx

namespace {

RecatResult approx_rec(const Construction& c, const HLine& l, int k, int i, const Point& x) {
  const int n = l.tag.m;
  const Step last = l.path.back().steps.back();
  const HLine parent = line_at(c, parent_path(l.path), k);
  const Point z = l.geom.center;
  const double beta = (z - x).dot(l.geom.dir);  // z = x + beta e
  RecatResult out;
  if (n == 1 || i <= l.tag.category[static_cast<std::size_t>(n - 2)]) {
    const auto ch = nearest_child(c, parent, k, last.net, i, z);
    out.line = ch.line;
    out.x = ch.x - beta * l.geom.dir;
    out.cases.push_back(1);
  } else {
    const auto up = approx_rec(c, parent, k, i, z);
    const auto ch = nearest_child(c, up.line, k, last.net, i, up.x);
    out.line = ch.line;
    out.x = ch.x - beta * l.geom.dir;
    out.cases = up.cases;
    out.cases.insert(out.cases.begin(), 2);
  }
  const auto& sc = c.sched();
  out.dist = check("approx |x'-x| <= m Q^i w_k / s_k", (out.x - x).norm(),
                   n * sc.q_pow(i - sc.exponent(k)) / static_cast<double>(sc.s(k)));
  return out;
}

}  // namespace

RecatResult recategorize(const Construction& c, const HLine& src, int k, int iM, const Point& x) {
  const HLine l = c.at_level(src, k);
  if (l.tag.m < 1) throw PreconditionError("recategorize needs a line of class >= 1");
  if (iM <= l.tag.category.back()) throw PreconditionError("nothing to do: iM <= j_m");
  if (iM > c.sched().s(k)) throw PreconditionError("iM > s_k");
  if (!c.j_allowed(k, iM)) throw PreconditionError("iM outside the category window");
  if (segment_distance(x, l.geom) > 1e-9 * l.geom.length()) throw PreconditionError("recategorize: x not on l");
  auto r = approx_rec(c, l, k, iM, x);
  if ((r.line.geom.dir - l.geom.dir).norm() > 1e-15) throw BoundViolation("approx: l' not parallel to l");
  if (segment_distance(r.x, r.line.geom) > 1e-12 * r.line.geom.length()) throw BoundViolation("approx: x' not on l'");
  return r;
}

// --------------------------------------------------------------------- c1

ExtendResult extend_segment(const Construction& c, const WitnessChain& xchain, double lambda, double psi,
                            double delta, const Scale& scale, std::int64_t f, const Point& y, const HLine& src) {
  require_ranges(lambda, psi, false);
  if (!scale.ok) throw PreconditionError("extend_segment: " + scale.why);
  const int n = scale.n;
  const auto t = scale.t;
  const auto& sc = c.sched();
  if (n > xchain.K) throw PreconditionError("extend_segment: level n beyond the chain depth");
  const double wn = sc.width(n).value;
  const double sn = static_cast<double>(sc.s(n));
  const double lo = psi * sc.q_pow(t - 1) * wn, hi = psi * sc.q_pow(t) * wn;
  if (!(delta > lo * (1 - 1e-12) && delta <= hi * (1 + 1e-12)) || 1.0 / sn > psi)
    throw PreconditionError("extend_segment: (n, t, delta) violate the scale window");
  const HLine l = c.at_level(src, n);
  ExtendResult out;
  out.r = l.tag.m;
  out.class_limit = (lambda + psi) * static_cast<double>(sc.M(n)) - 2.0;
  if (static_cast<double>(out.r) > out.class_limit + 1e-12 || out.r >= sc.M(n))
    throw PreconditionError("extend_segment: class budget r <= (lambda + psi) M_n - 2 violated");
  if (out.r >= 1 && l.tag.category.back() < t + 1)
    throw PreconditionError("extend_segment: last category entry below t + 1");
  const auto ch = nearest_child(c, l, n, f, static_cast<int>(t + 1), y);
  out.y = ch.x;
  out.line = ch.line;
  out.dy = check("c1 |y'-y| <= Q delta / (psi s_n)", (out.y - y).norm(), sc.Q() * delta / (psi * sn));
  out.tau_max = (sc.Q() - sc.Q() / (psi * sn)) * delta - (y - xchain.x).norm();
  out.vacuous = out.tau_max <= 0.0;
  out.chain.x = out.y;
  out.chain.lambda = lambda + psi;
  out.chain.K = xchain.K;
  for (int k = 1; k <= xchain.K; ++k) {
    if (k < n)
      out.chain.levels.push_back(xchain.levels[static_cast<std::size_t>(k - 1)]);
    else
      out.chain.levels.push_back(ChainLevel{k, k == n ? out.r + 1 : 0, out.line.path});
  }
  return out;
}

bool verify_segment(const Construction& c, const WitnessChain& chain, const Point& a, const Point& b,
                    std::string* why) {
  const std::array<Point, 3> pts{a, 0.5 * (a + b), b};
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto rep = verify_witness(c, with_point(chain, pts[i]));
    if (!rep.ok) {
      if (why) {
        const auto& lv = rep.levels[static_cast<std::size_t>(rep.first_failure - 1)];
        *why = "point " + std::to_string(i) + " fails at level " + std::to_string(rep.first_failure) +
               " (dist " + std::to_string(lv.dist) + ", radius " + std::to_string(lv.radius) + ") " + lv.note;
      }
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------- crucial

CrucialResult approximate_at_scale(const Construction& c, const WitnessChain& xchain, const Point& e_in, double delta,
                                   double lambda, double psi, double eta) {
  require_ranges(lambda, psi, true);
  if (!(eta > 0.0 && eta < 0.25)) throw PreconditionError("eta outside (0, 1/4)");
  const auto& sc = c.sched();
  const auto th = delta_thresholds(lambda, psi, eta, sc, xchain.K);
  if (!th.crucial_feasible) throw DeltaOutOfRange("horizon-insufficient: no level in [2, K] meets the threshold conditions");
  if (!(delta < th.delta0)) throw DeltaOutOfRange("delta >= delta0");
  if (delta < th.delta0_floor) throw DeltaOutOfRange("delta below the horizon floor");
  const Point e = e_in.normalized();

  // the construction runs at (2 delta, eta / 2) and certifies half-length delta
  const double dc = 2.0 * delta, ec = eta / 2.0;
  CrucialResult out;
  out.scale = locate_scale(sc, dc, psi);
  if (!out.scale.ok || out.scale.n > xchain.K) throw DeltaOutOfRange("crucial: " + out.scale.why);
  const int n = out.scale.n;
  const auto t = out.scale.t;
  const double Q = sc.Q(), wn = sc.width(n).value, sn = static_cast<double>(sc.s(n));
  const auto& net = c.net(n);

  out.e_index = net.nearest(e);
  out.e = net.member(out.e_index);
  out.bounds.push_back(check("|e'-e| <= 1/s_n", (out.e - e).norm(), 1.0 / sn));

  const auto& lvn = xchain.levels[static_cast<std::size_t>(n - 1)];
  const HLine ln = line_at(c, lvn.path, n);
  out.m_n = ln.tag.m;
  const Point z = closest_on(ln.geom, xchain.x);
  const double alpha = (xchain.x - z).norm();
  out.bounds.push_back(check("alpha <= lambda w_n", alpha, lambda * wn));
  Point g = alpha > 0.0 ? Point((xchain.x - z) / alpha) : Point::Unit(c.d(), 0);
  const auto gi = net.nearest(g);
  const auto basic = nearest_child(c, ln, n, gi, 1, z);
  const Point x3 = basic.x + alpha * net.member(gi);  // x'''
  out.bounds.push_back(check("|x'''-x| <= 2Q^2 delta / (psi s_n)", (x3 - xchain.x).norm(),
                             2.0 * Q * Q * dc / (psi * sn)));
  HLine l2 = basic.line;
  Point x2 = x3;
  if (t >= 1) {
    const auto rc = recategorize(c, basic.line, n, static_cast<int>(t + 1), x3);
    out.bounds.push_back(check("|x''-x'''| <= (1+m_n) Q^(t+1) w_n / s_n", (rc.x - x3).norm(),
                               (1.0 + out.m_n) * sc.q_pow(t + 1) * wn / sn));
    out.recat_cases = rc.cases;
    l2 = rc.line;
    x2 = rc.x;
  }
  const auto ext = extend_segment(c, xchain, lambda, psi, dc, out.scale, out.e_index, x2, l2);
  out.tau_max = ext.tau_max;
  out.bounds.push_back(check("tau_max >= delta' / 2", dc / 2.0 - ext.tau_max, 0.0));
  out.x = ext.y;
  out.line = ext.line;
  out.chain = ext.chain;
  out.half = delta;
  out.r_out = ext.r + 1;
  out.class_limit = (lambda + psi) * static_cast<double>(sc.M(n)) - 4.0;
  out.bounds.push_back(check("class 2 + m_n <= (lambda+psi) M_n - 2", static_cast<double>(out.r_out),
                             out.class_limit + 2.0));
  out.bounds.push_back(check("|x'-x'''| <= (m_n+2) Q^2 delta / (psi s_n)", (out.x - x3).norm(),
                             (out.m_n + 2.0) * Q * Q * dc / (psi * sn)));
  out.bounds.push_back(check("|x'-x| <= eta delta", (out.x - xchain.x).norm(), ec * dc));
  out.bounds.push_back(check("|e'-e| <= eta", (out.e - e).norm(), eta));
  std::string why;
  if (!verify_segment(c, out.chain, out.x - delta * out.e, out.x + delta * out.e, &why))
    throw BoundViolation("crucial segment not in M_(lambda+psi): " + why);
  return out;
}

// ------------------------------------------------------------------ wedge

namespace {

bool distinct_nonzero(const std::array<Point, 3>& u) {
  for (std::size_t i = 0; i < 3; ++i) {
    if (u[i].norm() <= 0.0) return false;
    for (std::size_t j = i + 1; j < 3; ++j)
      if ((u[i] - u[j]).norm() <= 0.0) return false;
  }
  return true;
}

}  // namespace

WedgeResult wedge(const Construction& c, const WitnessChain& xchain, double delta, const std::array<Point, 3>& v,
                  double lambda, double psi, double eta, const WedgeConstants& wc) {
  require_ranges(lambda, psi, true);
  const auto& sc = c.sched();
  const auto th = delta_thresholds(lambda, psi, eta, sc, xchain.K, wc);
  if (!th.wedge_feasible) throw DeltaOutOfRange("horizon-insufficient: no level in [2, K] meets the threshold conditions");
  if (!(delta < th.delta1)) throw DeltaOutOfRange("delta >= delta1");
  if (delta < th.delta1_floor) throw DeltaOutOfRange("delta below the horizon floor");
  for (const auto& vi : v)
    if (vi.size() != c.d() || vi.norm() > 1.0 + 1e-12) throw PreconditionError("v_i outside the closed unit ball");

  // reduction to |u_i| <= c, distinct and non-zero: u_i = rho c v_i (+ kappa q_i)
  const double c0 = wc.c;
  const double rho = 1.0 - 1e-3 * eta;
  const double ds = delta / c0, es = c0 * eta;
  std::array<Point, 3> u;
  for (std::size_t i = 0; i < 3; ++i) u[i] = rho * c0 * v[i];
  WedgeResult out;
  if (!distinct_nonzero(u)) {
    const double kappa = 0.5e-3 * c0 * eta;
    const int d = c.d();
    const std::array<Point, 3> q{Point::Unit(d, 0), Point(-Point::Unit(d, 0)), Point::Unit(d, 1)};
    for (int shift = 0; shift < 3 && !distinct_nonzero(u); ++shift) {
      for (std::size_t i = 0; i < 3; ++i) u[i] = rho * c0 * v[i] + kappa * q[(i + static_cast<std::size_t>(shift)) % 3];
    }
    if (!distinct_nonzero(u)) throw PreconditionError("wedge: could not separate degenerate inputs");
    out.perturbation = kappa;
  }

  // step 1: crucial at scale delta_s with a eta_s
  const Point e1 = u[0] / u[0].norm();
  const auto cr = approximate_at_scale(c, xchain, e1, ds, lambda, psi, wc.a * es);
  out.crucial_scale = cr.scale;
  const Point x1 = cr.x + ds * u[0].norm() * cr.e;

  // steps 2-3: two c1 extensions at the wedge's own scale (n_w >= n)
  out.wedge_scale = locate_scale(sc, ds, psi);
  if (!out.wedge_scale.ok || out.wedge_scale.n > xchain.K) throw DeltaOutOfRange("wedge: " + out.wedge_scale.why);
  const int nw = out.wedge_scale.n;
  const auto& net = c.net(nw);
  const double sn = static_cast<double>(sc.s(nw));
  out.bounds.push_back(check("Q/(psi s_n) <= b eta_s", sc.Q() / (psi * sn), wc.b * es));

  const Point e3 = (u[2] - u[0]) / (u[2] - u[0]).norm();
  const auto f3 = net.nearest(e3);
  out.bounds.push_back(check("|e3'-e3| <= 1/s_n", (net.member(f3) - e3).norm(), 1.0 / sn));
  const auto c13 = extend_segment(c, xchain, lambda, psi, ds, out.wedge_scale, f3, x1, cr.line);
  const Point x1p = c13.y;
  out.bounds.push_back(check("|x1'-x1| <= b eta_s delta_s", (x1p - x1).norm(), wc.b * es * ds));
  out.bounds.push_back(check("c1 tau_max >= delta_s / 2 (first)", ds / 2.0 - c13.tau_max, 0.0));
  const Point x3 = x1p + ds * (u[2] - u[0]).norm() * net.member(f3);

  const Point e2 = (u[1] - u[2]) / (u[1] - u[2]).norm();
  const auto f2 = net.nearest(e2);
  out.bounds.push_back(check("|e2'-e2| <= 1/s_n", (net.member(f2) - e2).norm(), 1.0 / sn));
  const auto c32 = extend_segment(c, xchain, lambda, psi, ds, out.wedge_scale, f2, x3, c13.line);
  const Point x3p = c32.y;
  out.bounds.push_back(check("c1 tau_max >= delta_s / 2 (second)", ds / 2.0 - c32.tau_max, 0.0));
  const Point x2p = x3p + ds * (u[1] - u[2]).norm() * net.member(f2);

  out.pts = {x1p, x2p, x3p};
  out.chain13 = c13.chain;
  out.chain32 = c32.chain;
  // [x1', x3'] lies in x1' + [-delta_s/2, delta_s/2] e3' and [x3', x2'] in x3' + [-delta_s/2, delta_s/2] e2'
  out.bounds.push_back(check("|x3'-x1'| <= delta_s / 2", (x3p - x1p).norm(), ds / 2.0));
  out.bounds.push_back(check("|x2'-x3'| <= delta_s / 2", (x2p - x3p).norm(), ds / 2.0));
  std::string why;
  if (!verify_segment(c, out.chain13, x1p, x3p, &why)) throw BoundViolation("[x1', x3'] not in M: " + why);
  if (!verify_segment(c, out.chain32, x3p, x2p, &why)) throw BoundViolation("[x3', x2'] not in M: " + why);

  // v_i' in the caller's units: x + delta v_i' = x_i'
  for (std::size_t i = 0; i < 3; ++i) {
    out.v[i] = (out.pts[i] - xchain.x) / delta;
    out.bounds.push_back(check("|v" + std::to_string(i + 1) + "'-v" + std::to_string(i + 1) + "| <= eta",
                               (out.v[i] - v[i]).norm(), eta));
  }
  return out;
}

// ----------------------------------------------------------------- audits

const std::vector<std::string>& lemma_names() {
  static const std::vector<std::string> names{"basic", "approx", "c1", "crucial", "c3"};
  return names;
}

void to_json(nlohmann::json& j, const BoundCheck& b) {
  j = {{"name", b.name}, {"value", b.value}, {"bound", b.bound}, {"slack", b.slack()}};
}

void to_json(nlohmann::json& j, const Thresholds& t) {
  j = {{"verdict", t.verdict},         {"crucialFeasible", t.crucial_feasible},
       {"wedgeFeasible", t.wedge_feasible}, {"k0", t.k0},
       {"k0Wedge", t.k0_wedge},        {"kb", t.kb},
       {"delta0", t.delta0},           {"delta0Floor", t.delta0_floor},
       {"delta1", t.delta1},           {"delta1Floor", t.delta1_floor}};
}

namespace {

double worst(const std::vector<BoundCheck>& b) {
  double w = std::numeric_limits<double>::infinity();
  for (const auto& x : b) w = std::min(w, x.slack());
  return w;
}

HLine random_line(const Construction& c, int k, int m, std::mt19937_64& rng) {
  return line_at(c, c.random_path(k, m, rng), k);
}

Point random_on(const Segment& s, std::mt19937_64& rng) {
  return s.at(std::uniform_real_distribution<double>(-s.half, s.half)(rng));
}

double log_uniform(double lo, double hi, std::mt19937_64& rng) {
  return std::exp(std::uniform_real_distribution<double>(std::log(lo), std::log(hi))(rng));
}

void oracle_line(const Construction& c, const HLine& l, int k, std::vector<BoundCheck>& b) {
  const HLine o = line_at(c, l.path, k);
  if (o.id != l.id) throw BoundViolation("lazy_path oracle: id mismatch");
  b.push_back(check("lazy_path oracle geometry", (o.geom.center - l.geom.center).norm() + (o.geom.dir - l.geom.dir).norm(),
                    1e-12));
  const auto& sc = c.sched();
  const double expect = 2.0 * sc.q_pow(l.tag.category.back() - sc.exponent(k));
  b.push_back(check("(I_m) relative length error", std::abs(l.geom.length() - expect) / expect, 1e-10));
}

WitnessChain sample_chain(const Construction& c, double lambda, std::mt19937_64& rng) {
  return sample_points(c, lambda, c.K(), 1, rng())[0].chain;
}

TrialRecord run_basic(const Construction& c, std::mt19937_64& rng) {
  TrialRecord tr;
  const auto& sc = c.sched();
  const int k = std::uniform_int_distribution<int>(2, c.K())(rng);
  const int m = std::uniform_int_distribution<int>(0, static_cast<int>(sc.M(k)) - 1)(rng);
  const HLine l = random_line(c, k, m, rng);
  std::vector<int> js;
  for (int j : c.j_values(k))
    if (m == 0 || j <= l.tag.category.back()) js.push_back(j);
  const int j = js[std::uniform_int_distribution<std::size_t>(0, js.size() - 1)(rng)];
  const auto e = std::uniform_int_distribution<std::int64_t>(0, c.net(k).size() - 1)(rng);
  const Point x = random_on(l.geom, rng);
  const auto r = nearest_child(c, l, k, e, j, x);
  std::vector<BoundCheck> b{r.dist};
  b.push_back(check("x' on l", segment_distance(r.x, l.geom), 1e-12 * l.geom.length()));
  oracle_line(c, r.line, k, b);
  tr.n = k;
  tr.detail = {{"k", k}, {"m", m}, {"j", j}, {"net", e}, {"x", vec(x)}, {"xNew", vec(r.x)}, {"path", r.line.path},
               {"bounds", b}};
  tr.worst_slack = worst(b);
  tr.pass = true;
  return tr;
}

TrialRecord run_approx(const Construction& c, std::mt19937_64& rng) {
  TrialRecord tr;
  const auto& sc = c.sched();
  for (int attempt = 0; attempt < 64; ++attempt) {
    const int k = std::uniform_int_distribution<int>(2, c.K())(rng);
    const int m = std::uniform_int_distribution<int>(1, static_cast<int>(sc.M(k)))(rng);
    const HLine l = random_line(c, k, m, rng);
    std::vector<int> above;
    for (int j : c.j_values(k))
      if (j > l.tag.category.back()) above.push_back(j);
    if (above.empty()) continue;
    const int iM = above[std::uniform_int_distribution<std::size_t>(0, above.size() - 1)(rng)];
    const Point x = random_on(l.geom, rng);
    const auto r = recategorize(c, l, k, iM, x);
    std::vector<BoundCheck> b{r.dist};
    if (r.line.tag.m != m || r.line.tag.category.back() != iM) throw BoundViolation("approx: wrong class or category");
    oracle_line(c, r.line, k, b);
    tr.n = k;
    tr.detail = {{"k", k},           {"m", m},          {"category", l.tag.category}, {"iM", iM},
                 {"newCategory", r.line.tag.category}, {"cases", r.cases},  {"x", vec(x)}, {"xNew", vec(r.x)},
                 {"bounds", b}};
    tr.worst_slack = worst(b);
    tr.pass = true;
    return tr;
  }
  throw PreconditionError("approx: no line with j_m < s_k found");
}

TrialRecord run_c1(const Construction& c, const AuditConfig& cfg, std::mt19937_64& rng, std::int64_t& vacuous,
                   std::int64_t& attempts) {
  const auto& sc = c.sched();
  const int K = c.K();
  for (int attempt = 0; attempt < 50; ++attempt) {
    ++attempts;
    TrialRecord tr;
    const auto chain = sample_chain(c, cfg.lambda, rng);
    const double lo = cfg.psi * sc.width(K).value / sc.Q(), hi = cfg.psi * sc.width(1).value / sc.Q();
    const double delta = log_uniform(lo, hi, rng);
    const auto scale = locate_scale(sc, delta, cfg.psi);
    if (!scale.ok) continue;
    const int n = scale.n;
    const auto& lvn = chain.levels[static_cast<std::size_t>(n - 1)];
    HLine l = line_at(c, lvn.path, n);
    Point y = closest_on(l.geom, chain.x);
    std::vector<BoundCheck> b;
    if (l.tag.m >= 1 && l.tag.category.back() < scale.t + 1) {
      const auto rc = recategorize(c, l, n, static_cast<int>(scale.t + 1), y);
      b.push_back(rc.dist);
      l = rc.line;
      y = rc.x;
    }
    const auto f = std::uniform_int_distribution<std::int64_t>(0, c.net(n).size() - 1)(rng);
    const auto r = extend_segment(c, chain, cfg.lambda, cfg.psi, delta, scale, f, y, l);
    if (r.vacuous) {
      ++vacuous;
      continue;
    }
    b.push_back(r.dy);
    b.push_back(check("direction of l' equals f", (r.line.geom.dir - c.net(n).member(f)).norm(), 0.0));
    b.push_back(check("half-length Q^(t+1) w_n",
                      std::abs(r.line.geom.half - sc.q_pow(scale.t + 1 - sc.exponent(n))) / r.line.geom.half, 1e-12));
    std::string why;
    const Point dir = c.net(n).member(f);
    if (!verify_segment(c, r.chain, r.y - r.tau_max * dir, r.y + r.tau_max * dir, &why))
      throw BoundViolation("c1 segment not in M_(lambda+psi): " + why);
    tr.delta = delta;
    tr.n = n;
    tr.t = scale.t;
    tr.detail = {{"x", vec(chain.x)}, {"y", vec(y)},     {"yNew", vec(r.y)},  {"r", r.r},
                 {"tauMax", r.tau_max}, {"net", f},     {"chain", r.chain}, {"bounds", b}};
    tr.worst_slack = worst(b);
    tr.pass = true;
    return tr;
  }
  throw PreconditionError("c1: no non-vacuous case within 50 attempts");
}

TrialRecord run_crucial(const Construction& c, const AuditConfig& cfg, std::mt19937_64& rng) {
  TrialRecord tr;
  const auto th = delta_thresholds(cfg.lambda, cfg.psi, cfg.eta, c.sched(), c.K());
  if (!th.crucial_feasible) throw DeltaOutOfRange("horizon-insufficient: no level in [2, K] meets the threshold conditions");
  const auto chain = sample_chain(c, cfg.lambda, rng);
  const Point e = kernels::random_unit(c.d(), rng);
  const double delta = cfg.delta > 0 ? cfg.delta : log_uniform(th.delta0_floor, th.delta0, rng);
  tr.delta = delta;
  const auto r = approximate_at_scale(c, chain, e, delta, cfg.lambda, cfg.psi, cfg.eta);
  tr.n = r.scale.n;
  tr.t = r.scale.t;
  tr.detail = {{"x", vec(chain.x)},      {"e", vec(e)},          {"xNew", vec(r.x)},       {"eNew", vec(r.e)},
               {"mN", r.m_n},            {"rOut", r.r_out},      {"classLimit", r.class_limit},
               {"recatCases", r.recat_cases}, {"tauMax", r.tau_max}, {"chain", r.chain}, {"bounds", r.bounds}};
  tr.worst_slack = worst(r.bounds);
  tr.pass = true;
  return tr;
}

TrialRecord run_wedge_trial(const Construction& c, const AuditConfig& cfg, std::mt19937_64& rng) {
  TrialRecord tr;
  const auto th = delta_thresholds(cfg.lambda, cfg.psi, cfg.eta, c.sched(), c.K());
  if (!th.wedge_feasible) throw DeltaOutOfRange("horizon-insufficient: no level in [2, K] meets the threshold conditions");
  const auto chain = sample_chain(c, cfg.lambda, rng);
  std::array<Point, 3> v;
  for (auto& vi : v) vi = kernels::random_ball(c.d(), rng);
  const double delta = cfg.delta > 0 ? cfg.delta : log_uniform(th.delta1_floor, th.delta1, rng);
  tr.delta = delta;
  const auto r = wedge(c, chain, delta, v, cfg.lambda, cfg.psi, cfg.eta);
  tr.n = r.wedge_scale.n;
  tr.t = r.wedge_scale.t;
  tr.detail = {{"x", vec(chain.x)},
               {"v", {vec(v[0]), vec(v[1]), vec(v[2])}},
               {"vNew", {vec(r.v[0]), vec(r.v[1]), vec(r.v[2])}},
               {"points", {vec(r.pts[0]), vec(r.pts[1]), vec(r.pts[2])}},
               {"perturbation", r.perturbation},
               {"crucialScale", {r.crucial_scale.n, r.crucial_scale.t}},
               {"chain13", r.chain13},
               {"chain32", r.chain32},
               {"bounds", r.bounds}};
  tr.worst_slack = worst(r.bounds);
  tr.pass = true;
  return tr;
}

}  // namespace

AuditResult audit(const Construction& c, const std::string& which, const AuditConfig& cfg) {
  if (std::find(lemma_names().begin(), lemma_names().end(), which) == lemma_names().end())
    throw std::invalid_argument("unknown lemma '" + which + "'");
  if (cfg.trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (c.K() < 2) throw PreconditionError("lemma audits need K >= 2");
  // threshold-level preconditions surface as errors rather than failed trials
  if (which == "crucial" || which == "c3") {
    const auto th = delta_thresholds(cfg.lambda, cfg.psi, cfg.eta, c.sched(), c.K());
    const bool crucial = which == "crucial";
    const double lo = crucial ? th.delta0_floor : th.delta1_floor, hi = crucial ? th.delta0 : th.delta1;
    if ((crucial ? th.crucial_feasible : th.wedge_feasible) && !(lo > 0.0 && lo < hi))
      throw DeltaOutOfRange("admissible delta window underflows double precision");
    if (crucial) {
      if (!th.crucial_feasible) throw DeltaOutOfRange("horizon-insufficient: no level in [2, K] meets the threshold conditions");
      if (cfg.delta > 0 && (cfg.delta >= th.delta0 || cfg.delta < th.delta0_floor))
        throw DeltaOutOfRange("delta outside [" + std::to_string(th.delta0_floor) + ", " + std::to_string(th.delta0) + ")");
    } else {
      if (!th.wedge_feasible) throw DeltaOutOfRange("horizon-insufficient: no level in [2, K] meets the threshold conditions");
      if (cfg.delta > 0 && (cfg.delta >= th.delta1 || cfg.delta < th.delta1_floor))
        throw DeltaOutOfRange("delta outside [" + std::to_string(th.delta1_floor) + ", " + std::to_string(th.delta1) + ")");
    }
  }
  AuditResult out;
  out.lemma = which;
  out.trials.resize(static_cast<std::size_t>(cfg.trials));
  std::vector<std::int64_t> vac(out.trials.size(), 0), att(out.trials.size(), 1);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < cfg.trials; ++i) {
    auto rng = kernels::seeded(cfg.seed, static_cast<std::uint64_t>(i));
    const auto u = static_cast<std::size_t>(i);
    TrialRecord tr;
    try {
      if (which == "basic")
        tr = run_basic(c, rng);
      else if (which == "approx")
        tr = run_approx(c, rng);
      else if (which == "c1") {
        att[u] = 0;
        tr = run_c1(c, cfg, rng, vac[u], att[u]);
      } else if (which == "crucial")
        tr = run_crucial(c, cfg, rng);
      else
        tr = run_wedge_trial(c, cfg, rng);
    } catch (const std::exception& ex) {
      tr.pass = false;
      tr.error = ex.what();
      tr.worst_slack = -std::numeric_limits<double>::infinity();
    }
    tr.trial = i;
    out.trials[u] = std::move(tr);
  }
  for (std::size_t i = 0; i < out.trials.size(); ++i) {
    out.passes += out.trials[i].pass ? 1 : 0;
    out.vacuous += vac[i];
    out.attempts += att[i];
  }
  return out;
}

}  // namespace uds::lemmas
