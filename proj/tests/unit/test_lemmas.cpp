#include <doctest.h>

#include <cmath>

#include "uds/kernels.hpp"
#include "uds/lemmas.hpp"

using namespace uds;
using namespace uds::lemmas;

namespace {

const Construction& lemma_c() {
  static const Construction c(ParamSchedule::make(presets::lemma_spec()));
  return c;
}

const Construction& toy() {
  static const Construction c(ParamSchedule::make(presets::toy_spec()));
  return c;
}

Point p2(double x, double y) {
  Point p(2);
  p << x, y;
  return p;
}

WitnessChain root_chain(const Point& x, double lambda, int K) {
  WitnessChain ch;
  ch.x = x;
  ch.lambda = lambda;
  ch.K = K;
  for (int k = 1; k <= K; ++k) ch.levels.push_back(ChainLevel{k, 0, {}});
  return ch;
}

}  // namespace

TEST_CASE("threshold verdicts") {
  const auto th = delta_thresholds(0.2, 0.7, 0.2, lemma_c().sched(), 3);
  CHECK(th.crucial_feasible);
  CHECK(th.wedge_feasible);
  CHECK(th.verdict == "ok");
  CHECK(th.delta0_floor < th.delta0);
  CHECK(th.delta0 == doctest::Approx(6.45e-3).epsilon(0.01));
  CHECK(th.delta1 == doctest::Approx(4.96e-4).epsilon(0.01));

  auto spec = presets::default_spec();
  const auto bad = delta_thresholds(0.2, 0.5, 0.2, ParamSchedule::make(spec), 3);
  CHECK(bad.verdict == "horizon-insufficient");
  CHECK_THROWS_AS(delta_thresholds(0.5, 0.6, 0.2, lemma_c().sched(), 3), PreconditionError);
  CHECK_FALSE(WedgeConstants{0.2, 0.2, 0.2}.valid());
}

TEST_CASE("threshold verdicts do not depend on Q") {
  auto rng = kernels::seeded(6, 0);
  std::uniform_real_distribution<double> ul(0.02, 0.3), up(0.3, 1.0), ue(0.02, 0.5);
  for (int i = 0; i < 10; ++i) {
    const double lambda = ul(rng), psi = (1 - lambda) * up(rng), eta = ue(rng);
    std::vector<Thresholds> th;
    for (double Q : {1.1, 1.5, 1.9}) {
      auto spec = presets::lemma_spec();
      spec.Q = Q;
      th.push_back(delta_thresholds(lambda, psi, eta, ParamSchedule::make(spec), 3));
    }
    CHECK(th[0].same_verdict(th[1]));
    CHECK(th[0].same_verdict(th[2]));
  }
}

TEST_CASE("scale location") {
  const auto& sc = lemma_c().sched();
  const double psi = 0.7;
  const double delta = 5e-3;
  const auto s = locate_scale(sc, delta, psi);
  REQUIRE_MESSAGE(s.ok, s.why);
  CHECK(s.n == 3);
  CHECK_FALSE(locate_scale(sc, 1e-4, psi).ok);  // below psi w_K / Q
  const double wn = sc.width(s.n).value;
  CHECK(psi * wn <= sc.Q() * delta * (1 + 1e-12));
  CHECK(psi * sc.q_pow(s.t - 1) * wn < delta * (1 + 1e-9));
  CHECK(delta <= psi * sc.q_pow(s.t) * wn * (1 + 1e-9));
}

TEST_CASE("nearest_child picks the nearest anchor") {
  const auto& c = toy();
  const auto root = c.root();
  const auto g = c.grid(root, 2, 5);
  const Point on = root.geom.at(g.param(7));
  const auto r = nearest_child(c, root, 2, 0, 5, on);
  CHECK((r.x - on).norm() < 1e-15);
  const Point mid = root.geom.at(0.5 * (g.param(3) + g.param(4)));
  const auto t = nearest_child(c, root, 2, 1, 5, mid);
  CHECK((t.x - root.geom.at(g.param(3))).norm() < 1e-15);
  CHECK(t.dist.value <= t.dist.bound);
  CHECK_THROWS_AS(nearest_child(c, root, 2, 0, 5, p2(0, 0.3)), PreconditionError);
}

TEST_CASE("recategorize") {
  const auto& c = toy();
  const auto l = c.lazy_path({LevelDirective{2, {Step{4, 0, 5}}}});
  const auto r = recategorize(c, l, 2, 5, l.geom.center);
  CHECK(r.line.tag.category == std::vector<int>{5});
  REQUIRE(r.cases.size() == 1);
  CHECK(r.cases[0] == 1);
  CHECK(r.dist.value <= r.dist.bound);
  const auto l2 = c.lazy_path({LevelDirective{2, {Step{5, 0, 5}, Step{4, 1, 2}}}});
  const auto r2 = recategorize(c, l2, 2, 5, l2.geom.at(0.1 * l2.geom.half));
  CHECK(r2.line.tag.category == std::vector<int>{5, 5});
  CHECK(r2.dist.value <= r2.dist.bound);
  CHECK_THROWS_AS(recategorize(c, l2, 2, 4, l2.geom.center), PreconditionError);
}

TEST_CASE("extend_segment flags vacuous cases") {
  const auto& c = lemma_c();
  const double delta = 2e-3, psi = 0.7;
  const auto sc = locate_scale(c.sched(), delta, psi);
  REQUIRE(sc.ok);
  const auto x = p2(0.1, 0);
  const auto chain = root_chain(x, 0.2, 3);
  const auto ok = extend_segment(c, chain, 0.2, psi, delta, sc, 3, x, c.root());
  CHECK_FALSE(ok.vacuous);
  CHECK(ok.tau_max > 0);
  std::string why;
  CHECK(verify_segment(c, ok.chain, ok.y - ok.tau_max * ok.line.geom.dir, ok.y + ok.tau_max * ok.line.geom.dir, &why));
  const auto far = extend_segment(c, chain, 0.2, psi, delta, sc, 3, p2(0.1 + 2 * c.sched().Q() * delta, 0), c.root());
  CHECK(far.vacuous);
  CHECK(far.tau_max < 0);
}

TEST_CASE("approximate_at_scale on a net direction") {
  const auto& c = lemma_c();
  const double delta = 1e-3;
  const auto chain = root_chain(p2(0.05, 0), 0.2, 3);
  const auto s = locate_scale(c.sched(), 2 * delta, 0.7);
  const Point e = c.net(s.n).member(17);
  const auto r = approximate_at_scale(c, chain, e, delta, 0.2, 0.7, 0.2);
  CHECK((r.x - chain.x).norm() <= 0.2 * delta);
  CHECK((r.e - e).norm() <= 0.2);
  for (const auto& b : r.bounds) CHECK_MESSAGE(b.value <= b.bound * (1 + 1e-12) + 1e-15, b.name);
  CHECK(verify_segment(c, r.chain, r.x - delta * r.e, r.x + delta * r.e));
  CHECK_THROWS_AS(approximate_at_scale(c, chain, e, 1.0, 0.2, 0.7, 0.2), DeltaOutOfRange);
}

TEST_CASE("wedge handles coincident inputs") {
  const auto& c = lemma_c();
  const double delta = 2e-4;
  const auto chain = root_chain(p2(-0.1, 0), 0.2, 3);
  const Point v = p2(1e-3, 2e-3);
  const auto r = wedge(c, chain, delta, {v, v, v}, 0.2, 0.7, 0.2);
  CHECK(r.perturbation > 0);
  for (int i = 0; i < 3; ++i) CHECK((r.v[i] - v).norm() <= 0.2);
  CHECK(verify_segment(c, r.chain13, r.pts[0], r.pts[2]));
  CHECK(verify_segment(c, r.chain32, r.pts[2], r.pts[1]));
  CHECK_THROWS_AS(wedge(c, chain, 0.1, {v, v, v}, 0.2, 0.7, 0.2), DeltaOutOfRange);
}

TEST_CASE("randomized audits") {
  const auto& c = lemma_c();
  for (const auto& name : lemma_names()) {
    AuditConfig cfg;
    cfg.trials = 30;
    cfg.seed = 5;
    const auto r = audit(c, name, cfg);
    CHECK_MESSAGE(r.passes == 30, name);
    const auto again = audit(c, name, cfg);
    for (std::size_t i = 0; i < r.trials.size(); ++i) CHECK(r.trials[i].worst_slack == again.trials[i].worst_slack);
  }
  AuditConfig loose;
  loose.trials = 10;
  loose.eta = 0.9;
  CHECK(audit(c, "c3", loose).passes == 10);
  CHECK_THROWS(audit(c, "nope", AuditConfig{}));
  AuditConfig big;
  big.delta = 0.5;
  CHECK_THROWS_AS(audit(c, "c3", big), DeltaOutOfRange);
  CHECK_THROWS_AS(audit(toy(), "crucial", AuditConfig{}), DeltaOutOfRange);
}
