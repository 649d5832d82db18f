// phaseforge command-line driver.
//
// Exit codes: 0 pass, 1 verification failure, 2 bad configuration or usage,
// 3 capacity limit reached.

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "phaseforge/errors.hpp"
#include "phaseforge/report.hpp"

namespace {

using phaseforge::ScenarioConfig;

struct FlagSet {
  std::map<std::string, std::string> values;
  std::string config_file;
  bool weak = false;
};

// Scenario flags shared by every scenario subcommand; stored as text and
// applied through ScenarioConfig::set so files and flags validate alike.
void add_scenario_flags(CLI::App* app, FlagSet& flags) {
  static const std::vector<std::pair<std::string, std::string>> kFlags{
      {"ring", "ring spec, e.g. chain:2:2, zmod:4, fatpoint:2, prod:(zmod:2,zmod:3)"},
      {"n", "module rank"},
      {"family", "phase family: deg1, deg2, deg3 or poly:<p1>;<p2>"},
      {"strategy", "defect strategy or comma list: default, literal, commutator, radical-depth"},
      {"cap", "closure size cap"},
      {"workers", "worker threads"},
      {"seed", "random seed"},
      {"out", "report output path"},
      {"format", "report format: json or text"},
      {"extra", "phases adjoined by model boundary, e.g. cubic:x1x2x3"},
      {"in", "phase table file"},
      {"h", "increments for phase derive, packed indices separated by commas"},
      {"character", "canonical index of the character to use"},
  };
  for (const auto& [name, help] : kFlags) {
    const std::string key = name == "h" ? "increments" : name;
    app->add_option_function<std::string>(
        "--" + name, [&flags, key](const std::string& v) { flags.values[key] = v; }, help);
  }
  app->add_flag("--weak", flags.weak, "filtration on the family alone (weak admissibility)");
  app->add_option("--config", flags.config_file, "key=value scenario file; flags override it");
}

ScenarioConfig build_config(const std::string& command, const FlagSet& flags) {
  ScenarioConfig cfg;
  if (!flags.config_file.empty()) {
    std::ifstream in(flags.config_file);
    if (!in) throw phaseforge::ConfigError("cannot read config file '" + flags.config_file + "'");
    std::stringstream text;
    text << in.rdbuf();
    cfg = ScenarioConfig::parse(text.str());
  }
  cfg.set("command", command);
  for (const auto& [key, value] : flags.values) cfg.set(key, value);
  if (flags.weak) cfg.weak = true;
  return cfg;
}

int run(const std::string& command, const FlagSet& flags) {
  const ScenarioConfig cfg = build_config(command, flags);
  const auto format = phaseforge::parse_format(cfg.format);
  const auto report = phaseforge::run_scenario(cfg);
  if (cfg.out.empty()) {
    std::cout << phaseforge::render_report(report, format);
  } else {
    phaseforge::emit_report(report, format, cfg.out);
    std::cout << "verdict: " << report.verdict() << "\nreport: " << cfg.out << "\n";
  }
  return report.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"phaseforge: exact defect filtrations of phase operators over finite rings"};
  app.set_help_flag("--help", "print help and exit");
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(phaseforge::kToolVersion));

  std::string command;
  FlagSet flags;

  auto leaf = [&](CLI::App* parent, const std::string& name, const std::string& full, const std::string& help) {
    auto* sub = parent->add_subcommand(name, help);
    add_scenario_flags(sub, flags);
    sub->callback([&command, full] { command = full; });
    return sub;
  };

  auto* ring = app.add_subcommand("ring", "ring structure")->require_subcommand(1);
  leaf(ring, "info", "ring info", "radical chain and basic invariants");
  leaf(&app, "frobenius", "frobenius", "search for a generating character");
  auto* phase = app.add_subcommand("phase", "single-phase calculus")->require_subcommand(1);
  leaf(phase, "analyze", "phase analyze", "degree, defect degrees and polarization");
  leaf(phase, "derive", "phase derive", "iterated differences by two methods");
  auto* model = app.add_subcommand("model", "operator models")->require_subcommand(1);
  leaf(model, "extract", "model extract", "admissibility and filtration");
  leaf(model, "verify", "model verify", "extraction plus axiom checks");
  leaf(model, "boundary", "model boundary", "adjoin phases and compare filtrations");
  leaf(model, "compare", "model compare", "compare defect strategies");

  auto* report = app.add_subcommand("report", "report files")->require_subcommand(1);
  auto* diff = report->add_subcommand("diff", "compare stable sections of two JSON reports");
  std::string diff_a, diff_b;
  diff->add_option("a", diff_a, "first report")->required();
  diff->add_option("b", diff_b, "second report")->required();
  diff->callback([&command] { command = "report diff"; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (command == "report diff") {
      const auto d = phaseforge::diff_reports(diff_a, diff_b);
      if (d.identical) {
        std::cout << "identical\n";
        return 0;
      }
      for (const auto& line : d.differences) std::cout << line << "\n";
      return 1;
    }
    return run(command, flags);
  } catch (const phaseforge::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const phaseforge::ConstructionError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const phaseforge::CapacityError& e) {
    std::cerr << "capacity: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
