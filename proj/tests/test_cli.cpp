#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "hypoflow/config.hpp"
#include "hypoflow/errors.hpp"
#include "hypoflow/experiments.hpp"
#include "hypoflow/output.hpp"

using namespace hypoflow;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("hypoflow_test_cli_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

int run_cli(const std::string& args, const fs::path& log) {
  const char* cli = std::getenv("HYPOFLOW_CLI");
  REQUIRE_MESSAGE(cli != nullptr, "HYPOFLOW_CLI must point at the hypoflow executable");
  const std::string cmd = std::string("\"") + cli + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  const int raw = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(raw));
  return WEXITSTATUS(raw);
}

const CheckResult& find_check(const RunManifest& m, const std::string& name) {
  for (const auto& c : m.checks)
    if (c.name == name) return c;
  FAIL("missing check " << name);
  throw std::logic_error("unreachable");
}

}  // namespace

TEST_CASE("config text: sections, comments, canonical echo") {
  const auto cfg = Config::parse("model = fokker-planck  # trailing\n; comment\nN = 8\n[tolerance]\nslope = 0.2\n", "t");
  REQUIRE(cfg.entries().size() == 3);
  CHECK(*cfg.find("model") == "fokker-planck");
  CHECK(*cfg.find("tolerance.slope") == "0.2");
  CHECK(cfg.find("slope") == nullptr);
  const auto again = Config::parse(cfg.text(), "echo");
  REQUIRE(again.entries().size() == 3);
  for (const auto& e : cfg.entries()) CHECK(*again.find(e.key) == e.value);
}

TEST_CASE("config text: malformed input names the line") {
  CHECK_THROWS_WITH_AS(Config::parse("a = 1\na = 2\n", "f"), doctest::Contains("f:2"), ConfigError);
  CHECK_THROWS_AS(Config::parse("[open\n", "f"), ConfigError);
  CHECK_THROWS_AS(Config::parse("novalue\n", "f"), ConfigError);
  CHECK_THROWS_AS(Config::parse("bad key = 1\n", "f"), ConfigError);
  CHECK_THROWS_AS(Config::load("/nonexistent/hypoflow.cfg"), ConfigError);
}

TEST_CASE("parameter validation happens before any computation") {
  const std::vector<ParamSpec> specs{{"N", ParamType::Int, "4", 1, 10, {}, ""},
                                     {"x", ParamType::OptReal, "auto", 0, 1, {}, ""},
                                     {"m", ParamType::Choice, "a", 0, 0, {"a", "b"}, ""},
                                     {"ks", ParamType::RealList, "1,2", 0, 5, {}, ""}};
  const auto p = validate(Config::parse("N = 7\nks = 0.5, 4\n"), specs);
  CHECK(p.get_int("N") == 7);
  CHECK_FALSE(p.get_opt_real("x").has_value());
  CHECK(p.get_string("m") == "a");
  CHECK(p.get_real_list("ks") == std::vector<double>{0.5, 4.0});
  CHECK(p.explicitly_set("N"));
  CHECK_FALSE(p.explicitly_set("m"));
  CHECK_THROWS_WITH_AS(validate(Config::parse("N = 11\n", "c"), specs), doctest::Contains("c:1"), ConfigError);
  CHECK_THROWS_AS(validate(Config::parse("N = 2.5\n"), specs), ConfigError);
  CHECK_THROWS_AS(validate(Config::parse("m = c\n"), specs), ConfigError);
  CHECK_THROWS_AS(validate(Config::parse("ks = 1,,2\n"), specs), ConfigError);
  CHECK_THROWS_AS(validate(Config::parse("typo = 1\n"), specs), ConfigError);
  CHECK(parse_seed("42") == 42u);
  CHECK_THROWS_AS(parse_seed("-1"), ConfigError);
  CHECK_THROWS_AS(parse_seed("abc"), ConfigError);
}

TEST_CASE("registry holds exactly the fourteen experiments") {
  const std::set<std::string> want{"decay-torus", "decay-wholespace", "duhamel",       "decay-confined", "conservation",
                                   "fluid-residuals", "mode-certify", "coercivity",    "poincare",       "korn",
                                   "korn-gradient", "kernel-witness", "commutators",   "ladder-selftest"};
  std::set<std::string> have;
  for (const auto& e : experiment_registry()) have.insert(e.id);
  CHECK(have == want);
  CHECK_THROWS_AS(find_experiment("nope"), ConfigError);
  CHECK_THROWS_AS(suite_members("nightly"), ConfigError);
  for (const char* profile : {"smoke", "acceptance", "extended"})
    for (const auto& m : suite_members(profile)) {
      INFO(profile << "/" << m.label);
      CHECK_NOTHROW(validate(Config::parse(m.config_text), find_experiment(m.experiment).params, {"experiment", "seed"}));
    }
}

TEST_CASE("poincare run: lambda 1 and a complete manifest") {
  const auto dir = scratch("poincare");
  const auto m = run_experiment("poincare", Config::parse("d_values = 1\nN = 20\n"), dir);
  CHECK(m.status == RunStatus::Pass);
  CHECK(find_check(m, "lambda_d1").value <= 1e-10);
  const auto j = read_json(dir / "manifest.json");
  CHECK(j["status"] == "pass");
  CHECK(j["config"]["N"] == 20);
  CHECK(j["config_text"].get<std::string>().find("N = 20") != std::string::npos);
  CHECK(j["versions"]["hypoflow"] == kVersion);
  REQUIRE(j["files"].size() == 2);
  for (const auto& f : j["files"]) {
    const fs::path p = dir / f["name"].get<std::string>();
    REQUIRE(fs::exists(p));
    CHECK(sha256_file(p) == f["sha256"]);
    CHECK(fs::file_size(p) == f["bytes"].get<std::uintmax_t>());
  }
  const auto constants = read_json(dir / "constants.json");
  CHECK(constants["reports"][0]["lambda_fine"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("decay run emits curve, fit and plot script") {
  const auto dir = scratch("torus");
  const auto m = run_experiment("decay-torus", Config::parse("K = 3\nN = 8\nt_max = 8\n"), dir, 7);
  CHECK(m.status == RunStatus::Pass);
  std::set<std::string> names;
  for (const auto& f : m.files) names.insert(f.name);
  CHECK(names == std::set<std::string>{"curve.csv", "fit.json", "curve.gp"});
  const std::string csv = slurp(dir / "curve.csv");
  CHECK(csv.rfind("t,norm,energy\n", 0) == 0);
  CHECK(slurp(dir / "curve.gp").find("exp(-") != std::string::npos);
  CHECK(read_json(dir / "manifest.json")["seed"] == 7);
}

TEST_CASE("torus data with a kernel component is rejected with the component named") {
  const auto dir = scratch("torus_bad");
  const auto m = run_experiment("decay-torus", Config::parse("K = 2\nN = 6\nt_max = 2\ndata = kernel-mass\n"), dir);
  CHECK(m.status == RunStatus::ConfigError);
  CHECK(m.error.find("mass") != std::string::npos);
  CHECK(m.partial);
  CHECK(exit_code(m.status) == 2);
  CHECK(fs::exists(dir / "manifest.json"));
}

TEST_CASE("conservation moments CSV has one column per conserved moment") {
  for (int d : {1, 2}) {
    const auto dir = scratch("conservation_d" + std::to_string(d));
    const auto m = run_experiment("conservation",
                                  Config::parse("d = " + std::to_string(d) + "\nN = 4\nt_max = 1\nadmissible_t_max = 1\n"), dir);
    CHECK(m.status == RunStatus::Pass);
    const std::string csv = slurp(dir / "moments.csv");
    const std::string header = csv.substr(0, csv.find('\n'));
    const auto columns = static_cast<int>(std::count(header.begin(), header.end(), ',')) + 1;
    CHECK(columns - 1 == 4 + 2 * d + d * (d - 1) / 2);
  }
}

TEST_CASE("identical config and seed give byte-identical CSVs") {
  const auto cfg = Config::parse("K = 3\nN = 8\nt_max = 5\n");
  const auto a = run_experiment("decay-torus", cfg, scratch("rep_a"), 11);
  const auto b = run_experiment("decay-torus", cfg, scratch("rep_b"), 11);
  const auto c = run_experiment("decay-torus", cfg, scratch("rep_c"), 12);
  REQUIRE(a.files.size() == b.files.size());
  for (std::size_t i = 0; i < a.files.size(); ++i) CHECK(a.files[i].sha256 == b.files[i].sha256);
  CHECK(slurp(a.dir / "curve.csv") != slurp(c.dir / "curve.csv"));
}

TEST_CASE("config naming a different experiment is rejected") {
  CHECK_THROWS_AS(run_experiment("korn", Config::parse("experiment = poincare\n"), scratch("mismatch")), ConfigError);
}

TEST_CASE("command line exit codes") {
  const auto dir = scratch("cli");
  fs::create_directories(dir);
  const auto log = dir / "log.txt";
  {
    std::ofstream(dir / "poincare.cfg") << "d_values = 1,2\nN = 12\n";
    CHECK(run_cli("poincare --config " + (dir / "poincare.cfg").string() + " --out " + (dir / "p").string(), log) == 0);
    CHECK(fs::exists(dir / "p" / "manifest.json"));
    CHECK(slurp(log).find("PASS lambda_d2") != std::string::npos);
  }
  {
    std::ofstream(dir / "tight.cfg") << "N = 6\nN_fine = 8\nupper_bound = 0.5\n";
    CHECK(run_cli("korn-gradient --config " + (dir / "tight.cfg").string() + " --out " + (dir / "kg").string(), log) == 1);
    CHECK(read_json(dir / "kg" / "manifest.json")["status"] == "fail");
  }
  {
    std::ofstream(dir / "typo.cfg") << "N = 6\nNfine = 8\n";
    CHECK(run_cli("korn --config " + (dir / "typo.cfg").string() + " --out " + (dir / "typo").string(), log) == 2);
    CHECK(slurp(log).find("typo.cfg:2") != std::string::npos);
    CHECK_FALSE(fs::exists(dir / "typo" / "manifest.json"));
  }
  CHECK(run_cli("not-an-experiment", log) == 2);
  CHECK(run_cli("suite --profile nightly --out " + (dir / "s").string(), log) == 2);
  CHECK(run_cli("poincare --seed banana --out " + (dir / "seed").string(), log) == 2);
  CHECK(run_cli("poincare --config /nonexistent.cfg", log) == 2);
  {
    std::ofstream(dir / "guard.cfg") << "model = relaxation\nk_values = 1\nkappa_choice = default\nt_max = 1\n"
                                         "[kappa]\nkappa = 9\n";
    CHECK(run_cli("mode-certify --config " + (dir / "guard.cfg").string() + " --out " + (dir / "g").string(), log) == 3);
    const auto j = read_json(dir / "g" / "manifest.json");
    CHECK(j["status"] == "numeric-error");
    CHECK(j["partial"] == true);
  }
  CHECK(run_cli("list", log) == 0);
  CHECK(slurp(log).find("ladder-selftest") != std::string::npos);
}

TEST_CASE("smoke suite passes and writes an aggregate report") {
  const auto dir = scratch("smoke");
  const auto rep = run_suite("smoke", dir, 1);
  for (const auto& [label, m] : rep.runs) {
    INFO(label << ": " << m.error);
    CHECK(m.pass());
  }
  CHECK(rep.status() == RunStatus::Pass);
  const auto j = read_json(dir / "suite.json");
  CHECK(j["runs"].size() == rep.runs.size());
  CHECK(j["status"] == "pass");
  fs::remove_all(dir.parent_path());
}

TEST_CASE("shipped example configs validate") {
  const char* dir = std::getenv("HYPOFLOW_CONFIGS");
  if (!dir) return;
  int seen = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() != ".cfg") continue;
    INFO(e.path().string());
    const auto cfg = Config::load(e.path());
    REQUIRE(cfg.find("experiment") != nullptr);
    CHECK_NOTHROW(validate(cfg, find_experiment(*cfg.find("experiment")).params, {"experiment", "seed"}));
    ++seen;
  }
  CHECK(seen >= 8);
}
