#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "uds/cli.hpp"
#include "uds/io.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "uds");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = uds::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path tmp(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("uds_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("run config hashing") {
  uds::io::RunConfig a;
  a.command = "build";
  a.schedule = {{"d", 2}};
  auto b = a;
  b.out = "elsewhere";
  CHECK(a.hash() == b.hash());
  CHECK(a.hash().size() == 16);
  b.seed = 2;
  CHECK(a.hash() != b.hash());
  CHECK(uds::io::fnv1a_hex("") == "cbf29ce484222325");
  CHECK(uds::io::num(0.1) == "0.1");
  CHECK_THROWS_AS(uds::io::read_json_file("/nonexistent/x.json"), uds::io::IoError);
}

TEST_CASE("validate") {
  const auto d = tmp("validate");
  CHECK(run({"validate", "--out", d.string()}).code == 0);
  const auto bad = d / "bad.json";
  fs::create_directories(d);
  std::ofstream(bad) << R"({"d":2,"Q":1.5,"K":3,"s":{"kind":"table","values":[4,2,6]},"M":{"kind":"table","values":[3,3,3]}})";
  const auto r = run({"validate", "--schedule", bad.string(), "--out", d.string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("3 ≤ M_k ≤ s_k") != std::string::npos);
  CHECK(run({"validate", "--schedule", (d / "missing.json").string(), "--out", d.string()}).code == 2);
}

TEST_CASE("build") {
  const auto d = tmp("build");
  const auto r = run({"build", "--preset", "toy", "--out", d.string()});
  CHECK(r.code == 0);
  const auto csv = slurp(d / "ledger.csv");
  CHECK(csv.rfind("# config_hash=", 0) == 0);
  CHECK(csv.find("k,m,category,lines,cubes,bound_II,bound_V,pass") != std::string::npos);
  const auto j = nlohmann::json::parse(slurp(d / "ledger.json"));
  CHECK(j["pass"] == true);
  CHECK(csv.find(j["configHash"].get<std::string>()) != std::string::npos);
  CHECK(run({"build", "--preset", "toy", "--budget", "10", "--out", d.string()}).code == 1);
  CHECK(run({"build", "--levels", "0", "--out", d.string()}).code == 2);
  CHECK(run({"build", "--format", "xml", "--out", d.string()}).code == 2);
  CHECK(run({"--help"}).code == 0);
  CHECK(run({}).code == 2);
}

TEST_CASE("boxcount") {
  const auto d = tmp("boxcount");
  const auto r = run({"boxcount", "--target", "segment", "--samples", "20000", "--out", d.string(), "--format", "json"});
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(slurp(d / "boxcount.json"));
  CHECK(std::abs(j["empirical"]["slope"].get<double>() - 1.0) < 0.05);
  CHECK(slurp(d / "boxcount.csv").find("epsilon,count,source") != std::string::npos);
  CHECK(run({"boxcount", "--samples", "2000", "--out", d.string()}).code == 0);
  CHECK(slurp(d / "boxcount.csv").find("theoretical-cubes") != std::string::npos);
}

TEST_CASE("lemma") {
  const auto d = tmp("lemma");
  CHECK(run({"lemma", "--which", "basic", "--trials", "10", "--out", d.string()}).code == 0);
  const auto lines = slurp(d / "lemma_basic.jsonl");
  CHECK(std::count(lines.begin(), lines.end(), '\n') == 10);
  const auto first = nlohmann::json::parse(lines.substr(0, lines.find('\n')));
  CHECK(first.contains("configHash"));
  CHECK(slurp(d / "lemma_basic_summary.csv").find("trial,pass,worst_slack,delta,n,t") != std::string::npos);
  CHECK(run({"lemma", "--which", "crucial", "--preset", "default", "--out", d.string()}).code == 2);
  CHECK(run({"lemma", "--which", "bogus", "--out", d.string()}).code == 2);
  CHECK(run({"lemma", "--which", "c3", "--delta", "0.5", "--out", d.string()}).code == 2);
}

TEST_CASE("claim, sample and porosity") {
  const auto d = tmp("misc");
  CHECK(run({"claim", "--preset", "toy", "--out", d.string()}).code == 1);  // trend red at k = 3
  CHECK(nlohmann::json::parse(slurp(d / "claim.json"))["reports"].size() == 3);
  CHECK(run({"sample", "--samples", "10", "--out", d.string()}).code == 0);
  CHECK(run({"porosity", "--samples", "2000", "--trials", "32", "--out", d.string()}).code == 0);
  CHECK(nlohmann::json::parse(slurp(d / "porosity.json"))["porosity"]["ratios"].size() == 4);
}
