#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "uds/hierarchy.hpp"
#include "uds/setmodel.hpp"

namespace uds::lemmas {

/// A displayed inequality failed at runtime. Always a hard failure.
class BoundViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Inputs outside a lemma's hypotheses.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// delta outside the admissible window (above the threshold or below the horizon floor).
class DeltaOutOfRange : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

struct WedgeConstants {
  double a = 1.0 / 13.0;
  double b = 1.0 / 13.0;
  double c = 1.0 / 13.0;
  bool valid() const { return a > 0 && b > 0 && c > 0 && a + 2 * b + 3 * c < 0.5; }
};

/// psi Q^(t-1) w_n < delta <= psi Q^t w_n, with n the level of
/// psi w_n <= Q delta < psi w_(n-1).
struct Scale {
  bool ok = false;
  int n = 0;
  std::int64_t t = 0;
  std::string why;  // reason when !ok
};

Scale locate_scale(const ParamSchedule& sc, double delta, double psi);

/// Threshold selection from the Q-free conditions
///   1/s_k <= min(eta, psi), (M_k + 4)/s_k <= eta psi / 4, psi M_k >= 6
/// (and 2/(psi s_k) <= b eta for the wedge) over the truncation horizon.
struct Thresholds {
  bool crucial_feasible = false;
  bool wedge_feasible = false;
  int k0 = 0;            // first level of the qualifying tail for eta/2 (0 = none)
  int k0_wedge = 0;      // same for the wedge's inner eta (a c eta / 2)
  int kb = 0;            // first level of the 2/(psi s_k) <= b c eta tail
  double delta0 = 0.0;   // crucial: admissible delta in [delta0_floor, delta0)
  double delta0_floor = 0.0;
  double delta1 = 0.0;   // wedge: admissible delta in [delta1_floor, delta1)
  double delta1_floor = 0.0;
  std::string verdict;   // "ok" or "horizon-insufficient"
  /// The Q-independent part: which levels qualified.
  bool same_verdict(const Thresholds& o) const {
    return crucial_feasible == o.crucial_feasible && wedge_feasible == o.wedge_feasible && k0 == o.k0 &&
           k0_wedge == o.k0_wedge && kb == o.kb && verdict == o.verdict;
  }
};

Thresholds delta_thresholds(double lambda, double psi, double eta, const ParamSchedule& sc, int K,
                            const WedgeConstants& wc = {});

/// Error bound and measured value of one displayed inequality.
struct BoundCheck {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  double slack() const { return bound > 0 ? (bound - value) / bound : bound - value; }
};

// ------------------------------------------------------------------ basic

struct ChildResult {
  Point x;     // anchor x' on l
  HLine line;  // x' + [-1, 1] Q^j w_k e
  BoundCheck dist;
};

/// Nearest grid anchor on l (viewed at level k) and the child in direction e (net index).
ChildResult nearest_child(const Construction& c, const HLine& l, int k, std::int64_t e, int j, const Point& x);

// ----------------------------------------------------------------- approx

struct RecatResult {
  Point x;
  HLine line;
  BoundCheck dist;
  std::vector<int> cases;  // branch taken at each recursion depth, outermost first
};

/// l of class m >= 1 at level k with j_m < iM <= s_k. Returns a parallel
/// line of the same class whose category ends in iM.
RecatResult recategorize(const Construction& c, const HLine& l, int k, int iM, const Point& x);

// --------------------------------------------------------------------- c1

struct ExtendResult {
  Point y;           // y' (anchor of the new line)
  HLine line;        // l' = y' + [-1, 1] Q^(t+1) w_n f
  double tau_max = 0.0;
  bool vacuous = false;  // tau_max <= 0
  int r = 0;             // class of the source line at level n
  double class_limit = 0.0;  // (lambda + psi) M_n - 2
  BoundCheck dy;             // |y' - y| <= Q delta / (psi s_n)
  WitnessChain chain;        // certifies y' + [-tau, tau] f in M_(lambda+psi); point = y'
};

/// Source line l (any level <= n) holds y. If l has class r >= 1 at level n its
/// last category entry must be >= t + 1.
ExtendResult extend_segment(const Construction& c, const WitnessChain& xchain, double lambda, double psi,
                            double delta, const Scale& sc, std::int64_t f, const Point& y, const HLine& l);

/// Verifies a chain at both ends and the midpoint of [a, b].
bool verify_segment(const Construction& c, const WitnessChain& chain, const Point& a, const Point& b,
                    std::string* why = nullptr);

// ---------------------------------------------------------------- crucial

struct CrucialResult {
  Point x;            // x'
  Point e;            // e' (net member at level n)
  std::int64_t e_index = 0;
  HLine line;         // l'
  Scale scale;        // (n, t) of the construction scale 2 delta
  double half = 0.0;  // certified half-length (= delta)
  int m_n = 0;
  int r_out = 0;      // class of l' at level n
  double class_limit = 0.0;  // (lambda + psi) M_n - 4
  std::vector<BoundCheck> bounds;
  std::vector<int> recat_cases;
  double tau_max = 0.0;
  WitnessChain chain;  // point = x'
};

CrucialResult approximate_at_scale(const Construction& c, const WitnessChain& xchain, const Point& e, double delta,
                                   double lambda, double psi, double eta);

// ------------------------------------------------------------------ wedge

struct WedgeResult {
  std::array<Point, 3> v;      // v1', v2', v3'
  std::array<Point, 3> pts;    // x1', x2', x3' (x + delta v_i')
  WitnessChain chain13;        // certifies [x1', x3']
  WitnessChain chain32;        // certifies [x3', x2']
  double perturbation = 0.0;   // size of the degenerate-input nudge (scaled units)
  Scale crucial_scale;
  Scale wedge_scale;
  std::vector<BoundCheck> bounds;
};

WedgeResult wedge(const Construction& c, const WitnessChain& xchain, double delta, const std::array<Point, 3>& v,
                  double lambda, double psi, double eta, const WedgeConstants& wc = {});

// ----------------------------------------------------------------- audits

struct AuditConfig {
  double lambda = 0.2;
  double psi = 0.7;
  double eta = 0.2;
  std::int64_t trials = 100;
  std::uint64_t seed = 1;
  double delta = 0.0;  // > 0 fixes delta for crucial/c3; otherwise drawn per trial
};

struct TrialRecord {
  std::int64_t trial = 0;
  bool pass = false;
  bool vacuous = false;
  double worst_slack = 0.0;
  double delta = 0.0;
  int n = 0;
  std::int64_t t = 0;
  std::string error;
  nlohmann::json detail;
};

struct AuditResult {
  std::string lemma;
  std::vector<TrialRecord> trials;
  std::int64_t passes = 0;
  std::int64_t vacuous = 0;
  std::int64_t attempts = 0;
};

/// which: basic, approx, c1, crucial, c3. Trials run in parallel with seeds
/// derived from cfg.seed and the trial index. c1 redraws vacuous cases until
/// cfg.trials non-vacuous ones are collected (bounded number of attempts).
AuditResult audit(const Construction& c, const std::string& which, const AuditConfig& cfg);

const std::vector<std::string>& lemma_names();

void to_json(nlohmann::json& j, const BoundCheck& b);
void to_json(nlohmann::json& j, const Thresholds& t);

}  // namespace uds::lemmas
