#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "hypoflow/config.hpp"
#include "hypoflow/errors.hpp"
#include "hypoflow/experiments.hpp"

namespace {

void print_checks(const hypoflow::RunManifest& m) {
  for (const auto& c : m.checks)
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << "  value=" << hypoflow::format_double(c.value) << " "
              << c.relation << " " << hypoflow::format_double(c.threshold)
              << (c.detail.empty() ? "" : "  (" + c.detail + ")") << "\n";
}

std::string experiment_list() {
  std::string s = "experiments:\n";
  for (const auto& e : hypoflow::experiment_registry()) s += "  " + e.id + std::string(20 - std::min<std::size_t>(e.id.size(), 19), ' ') + e.summary + "\n";
  return s;
}

int run_single(const std::string& id, int argc, char** argv) {
  CLI::App app{"hypoflow " + id};
  app.name("hypoflow " + id);
  std::string config_path, out_dir, seed_text;
  bool show_params = false;
  app.add_option("--config", config_path, "configuration file (key = value with [sections])");
  app.add_option("--out", out_dir, "output directory (default runs/<experiment>)");
  app.add_option("--seed", seed_text, "random seed, overrides the config value");
  app.add_flag("--params", show_params, "list the accepted configuration keys and exit");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  try {
    const auto& info = hypoflow::find_experiment(id);
    if (show_params) {
      for (const auto& p : info.params) std::cout << p.key << " = " << p.default_value << "    # " << p.help << "\n";
      return 0;
    }
    const hypoflow::Config cfg = config_path.empty() ? hypoflow::Config::parse("", "<defaults>") : hypoflow::Config::load(config_path);
    std::optional<std::uint64_t> seed;
    if (!seed_text.empty()) seed = hypoflow::parse_seed(seed_text);
    const std::filesystem::path out = out_dir.empty() ? std::filesystem::path("runs") / id : std::filesystem::path(out_dir);
    const auto m = hypoflow::run_experiment(id, cfg, out, seed);
    print_checks(m);
    if (!m.error.empty()) std::cerr << "hypoflow: " << m.error << "\n";
    std::cout << id << ": " << hypoflow::status_name(m.status) << " (" << m.wall_seconds << " s, manifest "
              << (out / "manifest.json").string() << ")\n";
    return hypoflow::exit_code(m.status);
  } catch (const hypoflow::ConfigError& e) {
    std::cerr << "hypoflow: config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "hypoflow: " << e.what() << "\n";
    return 3;
  }
}

int run_suite_cmd(int argc, char** argv) {
  CLI::App app{"hypoflow suite"};
  app.name("hypoflow suite");
  std::string profile = "smoke", out_dir, seed_text;
  app.add_option("--profile", profile, "smoke, acceptance or extended");
  app.add_option("--out", out_dir, "output directory (default runs/suite-<profile>)");
  app.add_option("--seed", seed_text, "random seed applied to every member");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  try {
    std::optional<std::uint64_t> seed;
    if (!seed_text.empty()) seed = hypoflow::parse_seed(seed_text);
    hypoflow::suite_members(profile);
    const std::filesystem::path out =
        out_dir.empty() ? std::filesystem::path("runs") / ("suite-" + profile) : std::filesystem::path(out_dir);
    const auto rep = hypoflow::run_suite(profile, out, seed, true);
    for (const auto& [label, m] : rep.runs) {
      std::cout << (m.pass() ? "PASS " : "FAIL ") << label << "  [" << hypoflow::status_name(m.status) << "]\n";
      for (const auto& c : m.checks)
        if (!c.pass) std::cout << "    failed check " << c.name << " value=" << hypoflow::format_double(c.value) << "\n";
    }
    std::cout << "suite " << profile << ": " << hypoflow::status_name(rep.status()) << " (" << rep.wall_seconds << " s)\n";
    return hypoflow::exit_code(rep.status());
  } catch (const hypoflow::ConfigError& e) {
    std::cerr << "hypoflow: config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "hypoflow: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace

int main(int argc, char** argv) {
  const std::string usage =
      "usage: hypoflow <experiment> [--config <file>] [--out <dir>] [--seed <n>] [--params]\n"
      "       hypoflow suite --profile {smoke,acceptance,extended} [--out <dir>] [--seed <n>]\n"
      "       hypoflow list | --version | --help\n";
  if (argc < 2) {
    std::cerr << usage;
    return 2;
  }
  const std::string cmd = argv[1];
  if (cmd == "--help" || cmd == "-h" || cmd == "help") {
    std::cout << usage << "\n" << experiment_list();
    return 0;
  }
  if (cmd == "--version") {
    std::cout << "hypoflow " << hypoflow::kVersion << "\n";
    return 0;
  }
  if (cmd == "list") {
    std::cout << experiment_list();
    return 0;
  }
  if (cmd == "suite") return run_suite_cmd(argc - 1, argv + 1);
  try {
    hypoflow::find_experiment(cmd);
  } catch (const hypoflow::ConfigError& e) {
    std::cerr << "hypoflow: " << e.what() << "\n" << usage;
    return 2;
  }
  return run_single(cmd, argc - 1, argv + 1);
}
