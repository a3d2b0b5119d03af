#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <json.hpp>

#include "uds/geometry.hpp"
#include "uds/params.hpp"

namespace uds {

using BigInt = boost::multiprecision::cpp_int;
using BigReal = boost::multiprecision::cpp_bin_float_50;

struct NodeTag {
  int k = 1;
  int m = 0;
  std::vector<int> category;  // (j_1, ..., j_m), non-increasing
};

/// One refinement: category entry j, net index of e, grid index of the anchor.
struct Step {
  int j = 1;
  std::int64_t net = 0;
  std::int64_t grid = 0;
  bool operator==(const Step&) const = default;
};

struct LevelDirective {
  int level = 2;
  std::vector<Step> steps;
  bool operator==(const LevelDirective&) const = default;
};

/// Root-to-node construction path. Levels strictly increase; a level with no
/// directive is a class-0 carryover.
using LinePath = std::vector<LevelDirective>;

struct HLine {
  NodeTag tag;
  Segment geom;
  std::uint64_t id = 0;
  std::optional<std::uint64_t> parent;
  LinePath path;
};

class InvalidDirective : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::uint64_t root_id();
std::uint64_t child_id(std::uint64_t parent, int k, int m, const Step& step);

/// Schedule together with the direction nets and category windows the
/// construction actually uses.
class Construction {
 public:
  explicit Construction(ParamSchedule sched);

  const ParamSchedule& sched() const { return sched_; }
  int K() const { return sched_.K(); }
  int d() const { return sched_.d(); }
  double w(int k) const { return sched_.width(k).value; }
  const DirectionNet& net(int k) const;
  /// Allowed category entries at level k, descending.
  const std::vector<int>& j_values(int k) const;
  bool j_allowed(int k, int j) const;

  /// Level-1 state: l_1 = [-1/2, 1/2] e_1.
  HLine root() const;
  /// Views a line as a level-k line (class-0 carryover when created earlier).
  HLine at_level(const HLine& l, int k) const;
  /// Anchor grid for R_l(j, e) at level k.
  SegmentGrid grid(const HLine& l, int k, int j) const;
  /// One refinement step of l (viewed at level k).
  HLine refine(const HLine& l, int k, const Step& step) const;
  /// Materialises the single line reached by the directives.
  HLine lazy_path(const LinePath& path) const;
  /// Random line of level k, class m, built by random descent.
  LinePath random_path(int k, int m, std::mt19937_64& rng) const;

 private:
  ParamSchedule sched_;
  std::vector<std::shared_ptr<const DirectionNet>> nets_;
  std::vector<std::vector<int>> jvals_;
};

/// Depth-first streaming of every line of L_k with multiplicity (class 0
/// first, then each source line's refinements). Returns false from the
/// visitor to stop early.
using LineVisitor = std::function<bool(const HLine&)>;
bool stream_level(const Construction& c, int k, const LineVisitor& visit);

// ------------------------------------------------------------------ ledger

struct LedgerRow {
  int k = 1;
  int m = 0;                  // -1 = level total
  std::vector<int> category;  // empty for class 0 and totals
  bool class_total = false;
  BigInt lines = 0;
  BigInt cubes = 0;
  std::optional<BigReal> bound_lines;
  std::optional<BigReal> bound_cubes;
  bool strict = false;  // bound_cubes compared with '<' (level 1 cover)
  bool exact = true;    // false: counts unavailable (budget), bounds only
  bool pass = true;
};

struct LevelSummary {
  int k = 1;
  std::int64_t exponent = 0;
  double w = 1.0;
  std::int64_t net_size = 0;
  std::int64_t full_net_size = 0;
  bool exact = true;  // false: budget exceeded, cubes holds the bound estimate
  BigInt lines = 0;
  BigInt cubes = 0;
  BigReal cubes_estimate = 0;  // == cubes when exact
  std::optional<BigReal> level_bound;
  bool pass = true;
  std::int64_t strict_cover_notes = 0;  // categories where |F_w(l)| < length/w fails
};

struct CountLedger {
  std::vector<LedgerRow> rows;
  std::vector<LevelSummary> levels;
  std::int64_t work_items = 0;
  std::int64_t budget = 0;
  bool partial = false;

  bool all_pass() const;
  const LevelSummary& level(int k) const { return levels.at(static_cast<std::size_t>(k - 1)); }
};

/// Exact grouped counting: every line of one category has the same length,
/// so counts are accumulated per (category, source-length group).
/// budget bounds the number of grouped work items (0 = unlimited).
CountLedger enumerate_ledger(const Construction& c, int K, std::int64_t budget);

struct StreamCounts {
  int k = 1;
  std::vector<std::pair<std::vector<int>, std::uint64_t>> lines;  // per category (class = size)
  std::uint64_t total_lines = 0;
  std::uint64_t total_cubes = 0;
  double max_length_error = 0.0;  // relative (I_m) error
};

/// Materialised count of level k (feasible for toy levels <= 2).
StreamCounts stream_counts(const Construction& c, int k);

struct CoverAudit {
  int k = 1;
  std::int64_t samples = 0;
  std::int64_t failures = 0;
  double max_length_error = 0.0;
  std::int64_t lines_checked = 0;
};

/// Random lazy descents: (I_m) lengths and cube-cover sampling per level.
CoverAudit audit_level(const Construction& c, int k, std::int64_t lines, std::int64_t points_per_line,
                       std::uint64_t seed);

std::string category_string(const std::vector<int>& cat);
std::string big_string(const BigReal& v);
void write_ledger_csv(std::ostream& os, const CountLedger& l);
nlohmann::json ledger_json(const CountLedger& l);

void to_json(nlohmann::json& j, const Step& s);
void from_json(const nlohmann::json& j, Step& s);
void to_json(nlohmann::json& j, const LevelDirective& d);
void from_json(const nlohmann::json& j, LevelDirective& d);

}  // namespace uds
