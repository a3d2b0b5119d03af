#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "uds/hierarchy.hpp"

namespace uds {

struct ChainLevel {
  int k = 1;
  int m = 0;
  LinePath path;  // designates the level-k line (class 0 when it ends below k)
};

struct WitnessChain {
  Point x;
  double lambda = 1.0;
  int K = 1;
  std::vector<ChainLevel> levels;  // one entry per k = 1..K
};

class MalformedChain : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct LevelCheck {
  int k = 1;
  int m = 0;
  double class_budget = 0.0;  // lambda * M_k
  double dist = 0.0;
  double radius = 0.0;        // lambda * w_k
  bool line_ok = true;        // path designates a line of L_(k, m)
  bool class_ok = true;
  bool dist_ok = true;
  std::string note;
};

struct WitnessReport {
  bool ok = true;
  int first_failure = 0;  // 0 when ok
  std::vector<LevelCheck> levels;
};

/// Checks every per-level condition of the truncated M_lambda. Lines are
/// rebuilt from their paths by a routine independent of Construction::refine.
WitnessReport verify_witness(const Construction& c, const WitnessChain& chain);

/// Same chain with a different point.
WitnessChain with_point(WitnessChain chain, const Point& x);

enum class MembershipStatus { Member, NotMember, Unknown };

struct MembershipResult {
  MembershipStatus status = MembershipStatus::Unknown;
  std::optional<WitnessChain> chain;
  int level = 0;  // first level that failed (NotMember) or ran out of budget (Unknown)
  std::int64_t expansions = 0;
};

/// Budgeted branch-and-bound search for a witness chain of x in M_lambda at depth K.
MembershipResult membership(const Construction& c, const Point& x, double lambda, int K, std::int64_t budget);

struct SampledPoint {
  Point x;
  WitnessChain chain;
};

/// Random descents with class budgets m_k <= lambda M_k; each point is uniform on
/// the admissible part of its deepest line.
std::vector<SampledPoint> sample_points(const Construction& c, double lambda, int K, std::int64_t n,
                                        std::uint64_t seed);

std::string status_name(MembershipStatus s);

void to_json(nlohmann::json& j, const WitnessChain& c);
void from_json(const nlohmann::json& j, WitnessChain& c);

}  // namespace uds
