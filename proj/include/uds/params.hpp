#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace uds {

/// Raised when a schedule document or rule violates a hard constraint.
class ScheduleError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Rule producing s_k: affine and polynomial rules evaluate F(k) and apply
/// max(3, floor(F(k))); table rules are taken verbatim.
struct SRule {
  enum class Kind { Affine, Polynomial, Table };
  Kind kind = Kind::Affine;
  std::vector<double> coefficients{3.0, 1.0};  // c0 + c1 k + c2 k^2 + ...
  std::vector<std::int64_t> table;
};

/// Rule producing M_k from s_k.
struct MRule {
  enum class Kind { LogFloor, Power, SameAsS, Table };
  Kind kind = Kind::LogFloor;
  std::int64_t min = 3;
  double alpha = 0.5;
  std::vector<std::int64_t> table;
};

/// Rule producing the comparison sequence s~_k.
struct TildeRule {
  enum class Kind { SameAsS, Affine, Table };
  Kind kind = Kind::SameAsS;
  double a = 1.0;
  double b = 0.0;
  std::vector<std::int64_t> table;
};

/// Knobs that restrict the enumerated construction without changing the schedule.
struct ConstructionOptions {
  int net_limit = 0;   ///< keep only the first n members of each direction net (0 = all)
  int j_window = 0;    ///< restrict category entries to the top w values of 1..s_k (0 = all)
  std::uint64_t net_seed = 0;

  bool operator==(const ConstructionOptions&) const = default;
};

struct ScheduleSpec {
  int d = 2;
  double Q = 1.5;
  SRule s;
  MRule M;
  TildeRule s_tilde;
  int K = 3;
  ConstructionOptions construction;
};

/// w_k = Q^(-exponent), exponent = s_1 + ... + s_k kept exactly.
struct Width {
  std::int64_t exponent = 0;
  double value = 1.0;
};

class ParamSchedule {
 public:
  /// Evaluates the rules over 1..K and enforces every hard invariant.
  static ParamSchedule make(const ScheduleSpec& spec);
  /// Evaluates without enforcing; callers inspect hard_violations().
  static ParamSchedule evaluate(const ScheduleSpec& spec);

  int d() const { return spec_.d; }
  double Q() const { return spec_.Q; }
  int K() const { return spec_.K; }
  const ScheduleSpec& spec() const { return spec_; }
  const ConstructionOptions& construction() const { return spec_.construction; }

  std::int64_t s(int k) const { return s_.at(check(k)); }
  std::int64_t M(int k) const { return M_.at(check(k)); }
  std::int64_t s_tilde(int k) const { return s_tilde_.at(check(k)); }

  /// Sum s_1 + ... + s_k (0 for k = 0).
  std::int64_t exponent(int k) const;
  Width width(int k) const;
  /// log(w_k) computed from the exact exponent.
  double log_width(int k) const;
  /// Q^p for an integer power, evaluated as exp(p log Q).
  double q_pow(std::int64_t p) const;

  const std::vector<std::string>& hard_violations() const { return violations_; }

 private:
  std::size_t check(int k) const;

  ScheduleSpec spec_;
  std::vector<std::int64_t> s_, M_, s_tilde_, prefix_;
  std::vector<std::string> violations_;
};

/// Example families exposed for convenience; see README for the coefficient layout.
enum class ScheduleKind { Polynomial, LinearTilde, LogM };

ParamSchedule make_schedule(ScheduleKind kind, const std::vector<double>& coefficients, int d,
                            double Q, int K);

struct TrendSeries {
  std::string name;
  int first_index = 1;
  std::vector<double> values;
  bool non_increasing_tail = true;
};

struct ScheduleValidation {
  int horizon = 0;
  bool hard_pass = true;
  std::vector<std::string> hard_violations;
  bool s_growth = false;
  bool M_growth = false;
  TrendSeries ml_ratio;         // M_k log(s_k) / s_k
  TrendSeries tilde_increment;  // (s~_k - s~_{k-1}) / s_k
  TrendSeries s_ratio;          // s_k / s_{k+1}
  std::string label = "trend only";
};

ScheduleValidation validate_schedule(const ParamSchedule& sched, int horizon);

namespace presets {
/// d=2, Q=1.5, s_k=k+3, M_k=max(3, floor(log s_k)), s~=s, K=3.
ScheduleSpec default_spec();
/// default_spec with nets cut to 5 directions and categories drawn from {s_k-1, s_k}.
ScheduleSpec toy_spec();
/// Parameters large enough that the approximation lemmas' threshold conditions hold.
ScheduleSpec lemma_spec();
}  // namespace presets

void to_json(nlohmann::json& j, const ScheduleSpec& spec);
void from_json(const nlohmann::json& j, ScheduleSpec& spec);
void to_json(nlohmann::json& j, const ScheduleValidation& v);

}  // namespace uds
