#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "phaseforge/errors.hpp"
#include "phaseforge/report.hpp"
#include "support.hpp"

using namespace phaseforge;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("phaseforge-report-test-" + name);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

ScenarioConfig random_config(std::mt19937_64& rng) {
  static const std::vector<std::string> commands{"ring info", "frobenius", "phase analyze", "model verify",
                                                 "model compare", "model boundary"};
  static const std::vector<std::string> rings{"chain:2:2", "zmod:4", "fatpoint:2", "prod:(zmod:2,zmod:3)"};
  static const std::vector<std::string> families{"deg1", "deg2", "deg3", "poly:2*x1x2;x1"};
  static const std::vector<std::string> strategies{"default", "literal", "commutator", "radical-depth"};
  ScenarioConfig c;
  c.command = commands[rng() % commands.size()];
  c.ring = rings[rng() % rings.size()];
  c.rank = 1 + rng() % 3;
  c.family = families[rng() % families.size()];
  c.strategies.clear();
  for (std::size_t i = 0, k = 1 + rng() % 3; i < k; ++i) c.strategies.push_back(strategies[rng() % 4]);
  c.cap = 1 + rng() % 5'000'000;
  c.workers = 1 + static_cast<unsigned>(rng() % 16);
  c.seed = rng();
  c.out = rng() % 2 ? "" : "out-" + std::to_string(rng() % 100) + ".json";
  c.format = rng() % 2 ? "json" : "text";
  c.extra = rng() % 2 ? "" : "cubic:x1x2x3";
  c.increments = rng() % 2 ? "" : "1,4";
  c.weak = rng() % 2;
  if (rng() % 2) c.character = rng() % 4;
  return c;
}

}  // namespace

TEST(Report, ConfigRoundTrip) {
  ScenarioConfig c;
  EXPECT_EQ(ScenarioConfig::parse(c.emit()), c);
  const auto parsed = ScenarioConfig::parse("# comment\n\ncommand = model compare\nring=zmod:4\nn=2\nstrategy=default, commutator\n");
  EXPECT_EQ(parsed.command, "model compare");
  EXPECT_EQ(parsed.rank, 2u);
  EXPECT_EQ(parsed.strategies, (std::vector<std::string>{"default", "commutator"}));
}

TEST(ReportProperty, ConfigParseEmitParseIsIdentity) {
  gen::for_seeds(61, 200, [](std::mt19937_64& rng, std::uint64_t seed) {
    const auto c = random_config(rng);
    const auto once = ScenarioConfig::parse(c.emit());
    ASSERT_EQ(once, c) << seed << "\n" << c.emit();
    ASSERT_EQ(ScenarioConfig::parse(once.emit()), once) << seed;
  });
}

TEST(Report, ConfigRejectsBadInput) {
  for (const char* text : {"colour=blue", "n=zero", "n=0", "cap=-1", "workers=0", "format=xml", "weak=maybe",
                           "strategy=fancy", "command=model destroy", "ring chain:2:2", "seed=1x"})
    EXPECT_THROW(ScenarioConfig::parse(text), ConfigError) << text;
}

TEST(Report, EmptyReportPasses) {
  Report r;
  r.command = "model verify";
  EXPECT_EQ(r.verdict(), "pass");
  EXPECT_EQ(r.exit_code(), 0);
  const auto path = temp_file("empty.json");
  emit_report(r, ReportFormat::Json, path);
  const auto first = slurp(path);
  emit_report(r, ReportFormat::Json, path);
  EXPECT_EQ(slurp(path), first);
  EXPECT_TRUE(Json::accept(first));
  std::filesystem::remove(path);
}

TEST(Report, VerdictPrecedence) {
  Report r;
  r.checks.push_back({"a", "pass", Json::object(), 0});
  r.checks.push_back({"b", "capacity", Json::object(), 0});
  EXPECT_EQ(r.verdict(), "capacity");
  EXPECT_EQ(r.exit_code(), 3);
  r.checks.push_back({"c", "fail", Json::object(), 0});
  EXPECT_EQ(r.verdict(), "fail");
  EXPECT_EQ(r.exit_code(), 1);
}

TEST(Report, IoErrorsNameThePath) {
  Report r;
  try {
    emit_report(r, ReportFormat::Json, "/nonexistent-dir/report.json");
    FAIL() << "expected an I/O error";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent-dir/report.json"), std::string::npos);
  }
}

TEST(Report, StableSectionExcludesTiming) {
  ScenarioConfig c;
  c.command = "frobenius";
  auto a = run_scenario(c);
  auto b = a;
  b.checks[0].seconds += 5;
  b.volatile_notes["cache_hit"] = true;
  b.config.workers = 7;
  b.config.out = "elsewhere.json";
  EXPECT_EQ(a.stable_json().dump(), b.stable_json().dump());
  EXPECT_EQ(a.digest(), b.digest());
  EXPECT_NE(a.to_json().dump(), b.to_json().dump());
}

TEST(Report, ModelVerifyRankTwo) {
  ScenarioConfig c;
  c.rank = 2;
  const auto r = run_scenario(c);
  EXPECT_EQ(r.exit_code(), 0);
  std::set<std::string> names;
  for (const auto& check : r.checks) {
    names.insert(check.name);
    EXPECT_EQ(check.verdict, "pass") << check.name;
  }
  for (const char* n : {"axiom-I", "axiom-II", "axiom-III", "axiom-IV", "axiom-V", "termination"})
    EXPECT_TRUE(names.count(n)) << n;
  EXPECT_EQ(r.checks[1].data["filtration"]["depth"], 2);
}

TEST(Report, FrobeniusFatPoint) {
  ScenarioConfig c;
  c.command = "frobenius";
  c.ring = "fatpoint:2";
  const auto r = run_scenario(c);
  EXPECT_EQ(r.exit_code(), 0);
  EXPECT_EQ(r.checks.at(0).data["verdict"], "not Frobenius");
}

TEST(Report, BoundaryReportCarriesStratumThreeWitness) {
  ScenarioConfig c;
  c.command = "model boundary";
  c.rank = 3;
  c.extra = "cubic:x1x2x3";
  const auto r = run_scenario(c);
  const auto& probe = r.checks.at(2);
  ASSERT_EQ(probe.name, "boundary-probe");
  EXPECT_EQ(probe.verdict, "pass");
  EXPECT_TRUE(probe.data["witnesses"].contains("3"));
  EXPECT_EQ(probe.data["new_levels"], Json::array({3}));
}

TEST(Report, CapacityBecomesVerdict) {
  ScenarioConfig c;
  c.ring = "zmod:4";
  c.rank = 3;  // 4^64 candidate tables, no linear model over Z/4
  const auto r = run_scenario(c);
  EXPECT_EQ(r.verdict(), "capacity");
  EXPECT_EQ(r.exit_code(), 3);
  for (const auto& check : r.checks) EXPECT_FALSE(check.verdict.empty());
}

TEST(Report, InadmissibleDataIsAFailedCheck) {
  ScenarioConfig c;
  c.ring = "fatpoint:2";
  const auto r = run_scenario(c);
  EXPECT_EQ(r.exit_code(), 1);
  EXPECT_EQ(r.checks.at(0).name, "admissibility");
  EXPECT_EQ(r.checks.at(0).verdict, "fail");
}

TEST(Report, ConfigErrorsThrow) {
  ScenarioConfig c;
  c.ring = "zmod:1";
  EXPECT_THROW(run_scenario(c), ConfigError);
  ScenarioConfig d;
  d.command = "model compare";
  EXPECT_THROW(run_scenario(d), ConfigError);  // needs two strategies
  ScenarioConfig e;
  e.command = "model boundary";
  e.extra = "quartic:x1";
  EXPECT_THROW(run_scenario(e), ConfigError);
}

TEST(Report, PhaseTextRoundTrip) {
  const auto s = make_space(make_ring("chain:2:2"), 2);
  std::mt19937_64 rng(71);
  const auto phi = gen::random_phase(s, rng);
  const auto text = format_phase_text(phi);
  EXPECT_EQ(text.substr(0, text.find('\n')), "ring=chain:2:2 n=2");
  EXPECT_EQ(parse_phase_text(text), phi);
  EXPECT_THROW(parse_phase_text("ring=chain:2:2 n=1\n0\n1\n"), ConfigError);
  EXPECT_THROW(parse_phase_text("ring=chain:2:2 n=1\n0\n1\n2\n4\n"), ConfigError);
  EXPECT_THROW(parse_phase_text("n=1\n0\n"), ConfigError);
}

TEST(Report, PhaseAnalyzeAndDerive) {
  const auto path = temp_file("phase.txt");
  const auto s = make_space(make_ring("chain:2:2"), 2);
  std::ofstream(path) << format_phase_text(phase_from_poly(PolynomialSpec::parse("2*x1x2"), s));
  ScenarioConfig c;
  c.command = "phase analyze";
  c.input = path.string();
  auto r = run_scenario(c);
  EXPECT_EQ(r.exit_code(), 0);
  EXPECT_EQ(r.checks.at(0).data["additive_degree"], 2);
  EXPECT_EQ(r.checks.at(0).data["polarization"]["biadditive"], true);
  c.command = "phase derive";
  c.increments = "1,4";
  r = run_scenario(c);
  EXPECT_EQ(r.exit_code(), 0);
  EXPECT_EQ(r.checks.at(0).data["constant"], true);
  EXPECT_EQ(r.checks.at(0).data["methods_agree"], true);
  std::filesystem::remove(path);
}

TEST(Report, DiffReports) {
  ScenarioConfig c;
  c.command = "frobenius";
  const auto a = temp_file("a.json"), b = temp_file("b.json");
  emit_report(run_scenario(c), ReportFormat::Json, a);
  c.workers = 4;
  emit_report(run_scenario(c), ReportFormat::Json, b);
  EXPECT_TRUE(diff_reports(a, b).identical);
  c.ring = "zmod:4";
  emit_report(run_scenario(c), ReportFormat::Json, b);
  const auto d = diff_reports(a, b);
  EXPECT_FALSE(d.identical);
  EXPECT_FALSE(d.differences.empty());
  std::filesystem::remove(a);
  std::filesystem::remove(b);
}

TEST(Report, TextAndJsonCarryTheSameVerdicts) {
  for (const auto& cfg : verification_suite(1)) {
    const auto r = run_scenario(cfg);
    const auto text = render_report(r, ReportFormat::Text);
    const auto json = Json::parse(render_report(r, ReportFormat::Json));
    for (const auto& check : json["stable"]["checks"]) {
      const std::string line = "[" + check["verdict"].get<std::string>() + "] " + check["name"].get<std::string>() + "\n";
      EXPECT_NE(text.find(line), std::string::npos) << cfg.command << " " << line;
    }
    EXPECT_NE(text.find("verdict: " + json["stable"]["verdict"].get<std::string>() + "\n"), std::string::npos);
    EXPECT_NE(text.find("digest: " + json["digest"].get<std::string>() + "\n"), std::string::npos);
  }
}
