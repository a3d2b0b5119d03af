#include "uds/cli.hpp"

#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "uds/dimension.hpp"
#include "uds/io.hpp"
#include "uds/kernels.hpp"
#include "uds/lemmas.hpp"
#include "uds/probes.hpp"
#include "uds/setmodel.hpp"

namespace uds::cli {

namespace {

namespace fs = std::filesystem;
using io::num;
using nlohmann::json;

struct Common {
  std::string schedule;
  std::string preset = "default";
  std::uint64_t seed = 1;
  std::string out = "out";
  std::int64_t budget = 10'000'000;
  int levels = -1;
  std::string format = "csv";
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--schedule", c.schedule, "schedule JSON document");
  sub->add_option("--preset", c.preset, "built-in schedule when --schedule is absent")
      ->check(CLI::IsMember({"default", "toy", "lemma"}));
  sub->add_option("--seed", c.seed, "master seed");
  sub->add_option("--out", c.out, "output directory");
  sub->add_option("--budget", c.budget, "work budget (0 = unlimited)");
  sub->add_option("--levels", c.levels, "truncation depth K (defaults to the schedule's K)");
  sub->add_option("--format", c.format, "stdout format")->check(CLI::IsMember({"csv", "json"}));
}

ScheduleSpec load_spec(const Common& c) {
  ScheduleSpec spec;
  if (!c.schedule.empty()) {
    const auto doc = io::read_json_file(c.schedule);
    try {
      spec = doc.get<ScheduleSpec>();
    } catch (const json::exception& e) {
      throw io::IoError(std::string("bad schedule document: ") + e.what());
    }
  } else if (c.preset == "toy") {
    spec = presets::toy_spec();
  } else if (c.preset == "lemma") {
    spec = presets::lemma_spec();
  } else {
    spec = presets::default_spec();
  }
  if (c.levels != -1) spec.K = c.levels;
  return spec;
}

io::RunConfig make_config(const std::string& cmd, const Common& c, const ScheduleSpec& spec, json options) {
  io::RunConfig rc;
  rc.command = cmd;
  rc.schedule = spec;
  options["budget"] = c.budget;
  rc.options = std::move(options);
  rc.seed = c.seed;
  rc.out = c.out;
  rc.format = c.format;
  return rc;
}

std::string with_hash(const io::RunConfig& rc, const std::string& csv) {
  return "# config_hash=" + rc.hash() + "\n" + csv;
}

json report(const io::RunConfig& rc) { return {{"configHash", rc.hash()}, {"config", rc.to_json()}}; }

void put(const io::RunConfig& rc, const std::string& name, const std::string& content) {
  io::write_file(fs::path(rc.out) / name, content);
}

std::vector<double> default_scales() {
  std::vector<double> s;
  for (int j = 2; j <= 8; ++j) s.push_back(std::ldexp(1.0, -j));
  return s;
}

// ---------------------------------------------------------------- commands

int cmd_validate(const Common& c, std::ostream& out, std::ostream& err) {
  const auto spec = load_spec(c);
  const auto sched = ParamSchedule::evaluate(spec);
  const int horizon = spec.K >= 1 ? spec.K : 1;
  json v;
  if (spec.K >= 1 && sched.hard_violations().empty()) {
    v = validate_schedule(sched, horizon);
  } else {
    v = {{"hardPass", false}, {"hardViolations", sched.hard_violations()}};
  }
  const auto rc = make_config("validate", c, spec, json::object());
  json doc = report(rc);
  doc["validation"] = v;
  put(rc, "validation.json", doc.dump(2) + "\n");
  if (!sched.hard_violations().empty()) {
    for (const auto& m : sched.hard_violations()) err << "violation: " << m << "\n";
    return 1;
  }
  out << (c.format == "json" ? doc.dump(2) : std::string("hard invariants: pass")) << "\n";
  return 0;
}

int cmd_build(const Common& c, std::int64_t audit_lines, std::int64_t audit_points, std::ostream& out,
              std::ostream& err) {
  const auto spec = load_spec(c);
  const Construction con(ParamSchedule::make(spec));
  const auto rc = make_config("build", c, spec, {{"auditLines", audit_lines}, {"auditPoints", audit_points}});
  const auto ledger = enumerate_ledger(con, con.K(), c.budget);
  std::ostringstream csv;
  write_ledger_csv(csv, ledger);
  put(rc, "ledger.csv", with_hash(rc, csv.str()));
  json doc = report(rc);
  doc["ledger"] = ledger_json(ledger);
  bool ok = ledger.all_pass();
  auto audits = json::array();
  if (audit_lines > 0) {
    for (int k = 1; k <= con.K(); ++k) {
      const auto a = audit_level(con, k, audit_lines, audit_points, c.seed + static_cast<std::uint64_t>(k));
      audits.push_back({{"k", k},
                        {"linesChecked", a.lines_checked},
                        {"samples", a.samples},
                        {"failures", a.failures},
                        {"maxLengthError", a.max_length_error}});
      if (a.failures > 0 || a.max_length_error > 1e-10) ok = false;
    }
  }
  doc["coverAudits"] = audits;
  doc["pass"] = ok;
  put(rc, "ledger.json", doc.dump(2) + "\n");
  out << (c.format == "json" ? doc.dump(2) : csv.str());
  if (c.format == "json") out << "\n";
  if (ledger.partial) err << "ledger partial: budget " << c.budget << " exceeded\n";
  return ok ? 0 : 1;
}

int cmd_boxcount(const Common& c, const std::string& target, std::int64_t samples, double lambda,
                 std::vector<double> scales, std::ostream& out) {
  if (scales.empty()) scales = default_scales();
  const auto spec = load_spec(c);
  const Construction con(ParamSchedule::make(spec));
  const auto rc = make_config("boxcount", c, spec,
                              {{"target", target}, {"samples", samples}, {"lambda", lambda}, {"scales", scales}});
  std::vector<Point> pts;
  std::optional<std::pair<double, double>> trust;
  if (target == "construction") {
    for (auto& s : sample_points(con, lambda, con.K(), samples, c.seed)) pts.push_back(std::move(s.x));
    trust = std::make_pair(con.w(con.K()), con.w(1));
  } else {
    auto rng = kernels::seeded(c.seed, 0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::int64_t i = 0; i < samples; ++i) {
      Point p = Point::Zero(con.d());
      p[0] = u(rng);
      if (target == "square") p[1] = u(rng);
      pts.push_back(p);
    }
  }
  auto rep = empirical_box_count(pts, scales, trust);
  std::ostringstream csv;
  csv << "epsilon,count,source\n";
  for (std::size_t i = 0; i < rep.scales.size(); ++i)
    csv << num(rep.scales[i]) << ',' << rep.counts[i] << ",empirical-grid\n";
  json doc = report(rc);
  doc["empirical"] = rep;
  if (target == "construction") {
    const auto ledger = enumerate_ledger(con, con.K(), c.budget);
    auto th = json::array();
    for (int k = 1; k <= con.K(); ++k) {
      const auto tc = theoretical_box_count(ledger, k);
      const std::string cnt = tc.bound ? big_string(tc.count) : ledger.level(k).cubes.str();
      const std::string src = tc.bound ? "theoretical-cubes-bound" : "theoretical-cubes";
      csv << num(tc.w) << ',' << cnt << ',' << src << "\n";
      th.push_back({{"k", k}, {"epsilon", tc.w}, {"count", cnt}, {"bound", tc.bound}});
    }
    doc["theoretical"] = th;
    doc["trustWindow"] = {con.w(con.K()), con.w(1)};
  }
  put(rc, "boxcount.csv", with_hash(rc, csv.str()));
  put(rc, "boxcount.json", doc.dump(2) + "\n");
  out << (c.format == "json" ? doc.dump(2) + "\n" : csv.str());
  return 0;
}

int cmd_claim(const Common& c, std::vector<double> ps, std::ostream& out) {
  if (ps.empty()) ps = {1.2, 1.5, 1.8};
  const auto spec = load_spec(c);
  const Construction con(ParamSchedule::make(spec));
  const auto rc = make_config("claim", c, spec, {{"p", ps}});
  const auto ledger = enumerate_ledger(con, con.K(), c.budget);
  std::ostringstream csv;
  csv << "p,k,log_term,log_term_tilde,log_factor_count,log_factor_decay,log_factor_tilde,log_factor_budget,log_ratio,"
         "count_is_bound\n";
  json doc = report(rc);
  doc["reports"] = json::array();
  bool ok = true;
  for (double p : ps) {
    const auto r = check_claim(p, con.K(), con, ledger);
    for (const auto& row : r.rows)
      csv << num(p) << ',' << row.k << ',' << num(row.log_term) << ',' << num(row.log_term_tilde) << ','
          << num(row.log_factor_count) << ',' << num(row.log_factor_decay) << ',' << num(row.log_factor_tilde) << ','
          << num(row.log_factor_budget) << ',' << num(row.log_ratio) << ',' << (row.count_is_bound ? "true" : "false")
          << "\n";
    doc["reports"].push_back(r);
    ok = ok && r.finite && r.bounded_trend;
  }
  doc["pass"] = ok;
  put(rc, "claim.csv", with_hash(rc, csv.str()));
  put(rc, "claim.json", doc.dump(2) + "\n");
  out << (c.format == "json" ? doc.dump(2) + "\n" : csv.str());
  return ok ? 0 : 1;
}

int cmd_lemma(const Common& c, const std::string& which, const lemmas::AuditConfig& cfg_in, std::ostream& out) {
  const auto& names = lemmas::lemma_names();
  if (std::find(names.begin(), names.end(), which) == names.end())
    throw CLI::ValidationError("--which", "unknown lemma '" + which + "'");
  const auto spec = load_spec(c);
  const Construction con(ParamSchedule::make(spec));
  lemmas::AuditConfig cfg = cfg_in;
  cfg.seed = c.seed;
  const auto rc = make_config("lemma", c, spec,
                              {{"which", which},
                               {"trials", cfg.trials},
                               {"lambda", cfg.lambda},
                               {"psi", cfg.psi},
                               {"eta", cfg.eta},
                               {"delta", cfg.delta}});
  const auto th = lemmas::delta_thresholds(cfg.lambda, cfg.psi, cfg.eta, con.sched(), con.K());
  const auto res = lemmas::audit(con, which, cfg);
  std::string jsonl;
  std::ostringstream csv;
  csv << "trial,pass,worst_slack,delta,n,t\n";
  for (const auto& t : res.trials) {
    json rec = {{"configHash", rc.hash()}, {"lemma", which},        {"trial", t.trial},
                {"pass", t.pass},          {"worstSlack", t.worst_slack}, {"delta", t.delta},
                {"n", t.n},                {"t", t.t},              {"error", t.error},
                {"detail", t.detail}};
    jsonl += rec.dump() + "\n";
    csv << t.trial << ',' << (t.pass ? "true" : "false") << ',' << num(t.worst_slack) << ',' << num(t.delta) << ','
        << t.n << ',' << t.t << "\n";
  }
  json doc = report(rc);
  doc["lemma"] = which;
  doc["thresholds"] = th;
  doc["trials"] = cfg.trials;
  doc["passes"] = res.passes;
  doc["vacuousRedraws"] = res.vacuous;
  doc["attempts"] = res.attempts;
  put(rc, "lemma_" + which + ".jsonl", jsonl);
  put(rc, "lemma_" + which + "_summary.csv", with_hash(rc, csv.str()));
  put(rc, "lemma_" + which + ".json", doc.dump(2) + "\n");
  out << (c.format == "json" ? doc.dump(2) + "\n" : csv.str());
  return res.passes == cfg.trials ? 0 : 1;
}

int cmd_porosity(const Common& c, double lambda, std::int64_t samples, std::int64_t trials, std::vector<double> radii,
                 std::ostream& out) {
  const auto spec = load_spec(c);
  const Construction con(ParamSchedule::make(spec));
  const double lo = 10.0 * con.w(con.K()), hi = con.w(1);
  if (!(lo < hi)) throw std::invalid_argument("porosity trust window [10 w_K, w_1] is empty");
  if (radii.empty())
    for (int i = 0; i < 4; ++i) radii.push_back(lo * std::pow(hi / lo, i / 3.0));
  const auto rc = make_config("porosity", c, spec,
                              {{"lambda", lambda}, {"samples", samples}, {"trials", trials}, {"radii", radii}});
  std::vector<Point> set;
  for (auto& s : sample_points(con, lambda, con.K(), samples, c.seed)) set.push_back(std::move(s.x));
  const auto est = probes::porosity_scan(set, set.front(), radii, trials, c.seed, lo, hi, con.K());
  json doc = report(rc);
  doc["porosity"] = est;
  put(rc, "porosity.json", doc.dump(2) + "\n");
  std::ostringstream csv;
  csv << "radius,ratio\n";
  for (std::size_t i = 0; i < est.radii.size(); ++i) csv << num(est.radii[i]) << ',' << num(est.ratios[i]) << "\n";
  put(rc, "porosity.csv", with_hash(rc, csv.str()));
  out << (c.format == "json" ? doc.dump(2) + "\n" : csv.str());
  return 0;
}

int cmd_sample(const Common& c, double lambda, std::int64_t samples, std::ostream& out) {
  const auto spec = load_spec(c);
  const Construction con(ParamSchedule::make(spec));
  const auto rc = make_config("sample", c, spec, {{"lambda", lambda}, {"samples", samples}});
  const auto pts = sample_points(con, lambda, con.K(), samples, c.seed);
  std::string jsonl;
  std::int64_t bad = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const bool ok = verify_witness(con, pts[i].chain).ok;
    bad += ok ? 0 : 1;
    jsonl += json{{"configHash", rc.hash()}, {"index", i}, {"verified", ok}, {"chain", pts[i].chain}}.dump() + "\n";
  }
  put(rc, "samples.jsonl", jsonl);
  out << "samples: " << pts.size() << ", unverified: " << bad << "\n";
  return bad == 0 ? 0 : 1;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Truncated universal differentiability sets: construction, counting and lemma audits"};
  app.require_subcommand(1);
  Common common;

  auto* validate = app.add_subcommand("validate", "check a schedule's hard invariants and trends");
  add_common(validate, common);

  std::int64_t audit_lines = 200, audit_points = 50;
  auto* build = app.add_subcommand("build", "count the construction and check every bound");
  add_common(build, common);
  build->add_option("--audit-lines", audit_lines, "random lines per level for the cube-cover audit");
  build->add_option("--audit-points", audit_points, "tube samples per audited line");

  std::string target = "construction";
  std::int64_t samples = 100000;
  double lambda = 1.0;
  std::vector<double> scales;
  auto* box = app.add_subcommand("boxcount", "grid box counting on sampled points");
  add_common(box, common);
  box->add_option("--target", target)->check(CLI::IsMember({"construction", "segment", "square"}));
  box->add_option("--samples", samples);
  box->add_option("--lambda", lambda);
  box->add_option("--scales", scales, "box half-widths");

  std::vector<double> ps;
  auto* claim = app.add_subcommand("claim", "boundedness of |C_k| w_k^p Q^(p s_k)");
  add_common(claim, common);
  claim->add_option("--p", ps, "exponents in (1, 2)");

  std::string which;
  lemmas::AuditConfig acfg;
  auto* lemma = app.add_subcommand("lemma", "randomized lemma audits");
  add_common(lemma, common);
  lemma->add_option("--which", which, "basic, approx, c1, crucial or c3")->required();
  lemma->add_option("--trials", acfg.trials);
  lemma->add_option("--lambda", acfg.lambda);
  lemma->add_option("--psi", acfg.psi);
  lemma->add_option("--eta", acfg.eta);
  lemma->add_option("--delta", acfg.delta, "fixed delta (default: drawn per trial)");

  double plambda = 1.0;
  std::int64_t psamples = 20000, ptrials = 512;
  std::vector<double> radii;
  auto* por = app.add_subcommand("porosity", "porosity scan at a sampled point");
  add_common(por, common);
  por->add_option("--lambda", plambda);
  por->add_option("--samples", psamples);
  por->add_option("--trials", ptrials);
  por->add_option("--radii", radii);

  double slambda = 1.0;
  std::int64_t ssamples = 100;
  auto* sample = app.add_subcommand("sample", "sample points of M_lambda with witness chains");
  add_common(sample, common);
  sample->add_option("--lambda", slambda);
  sample->add_option("--samples", ssamples);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n" << "run with --help for usage\n";
    return 2;
  }
  if (lemma->parsed() && lemma->get_option("--preset")->count() == 0) common.preset = "lemma";

  try {
    if (validate->parsed()) return cmd_validate(common, out, err);
    if (build->parsed()) return cmd_build(common, audit_lines, audit_points, out, err);
    if (box->parsed()) return cmd_boxcount(common, target, samples, lambda, scales, out);
    if (claim->parsed()) return cmd_claim(common, ps, out);
    if (lemma->parsed()) return cmd_lemma(common, which, acfg, out);
    if (por->parsed()) return cmd_porosity(common, plambda, psamples, ptrials, radii, out);
    if (sample->parsed()) return cmd_sample(common, slambda, ssamples, out);
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace uds::cli
