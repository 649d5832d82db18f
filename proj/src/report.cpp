#include "phaseforge/report.hpp"

#include <charconv>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

#include "phaseforge/digest.hpp"
#include "phaseforge/errors.hpp"

namespace phaseforge {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size() || value.empty())
    throw ConfigError("config key '" + std::string(key) + "': '" + std::string(value) + "' is not a valid number");
  return out;
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  while (!text.empty()) {
    const auto at = text.find(sep);
    out.emplace_back(trim(text.substr(0, at)));
    if (at == std::string_view::npos) break;
    text.remove_prefix(at + 1);
  }
  return out;
}

const std::vector<std::string>& known_commands() {
  static const std::vector<std::string> kCommands{"ring info",     "frobenius",      "phase analyze",
                                                  "phase derive",  "model extract",  "model verify",
                                                  "model boundary", "model compare"};
  return kCommands;
}

}  // namespace

// ---------------------------------------------------------------------------
// Config

void ScenarioConfig::set(std::string_view key, std::string_view value) {
  value = trim(value);
  if (key == "command") {
    if (std::find(known_commands().begin(), known_commands().end(), value) == known_commands().end())
      throw ConfigError("unknown command '" + std::string(value) + "'");
    command = value;
  } else if (key == "ring") {
    ring = value;
  } else if (key == "n") {
    rank = parse_number<std::size_t>(key, value);
    if (rank == 0) throw ConfigError("n must be positive");
  } else if (key == "family") {
    family = value;
  } else if (key == "strategy") {
    strategies = split(value, ',');
    if (strategies.empty()) throw ConfigError("strategy list is empty");
    for (const auto& s : strategies) (void)parse_strategy(s);
  } else if (key == "cap") {
    cap = parse_number<std::size_t>(key, value);
    if (cap == 0) throw ConfigError("cap must be positive");
  } else if (key == "workers") {
    workers = parse_number<unsigned>(key, value);
    if (workers == 0 || workers > 256) throw ConfigError("workers must lie in [1, 256]");
  } else if (key == "seed") {
    seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "out") {
    out = value;
  } else if (key == "format") {
    (void)parse_format(value);
    format = value;
  } else if (key == "extra") {
    extra = value;
  } else if (key == "in") {
    input = value;
  } else if (key == "increments") {
    increments = value;
  } else if (key == "weak") {
    if (value != "true" && value != "false") throw ConfigError("weak must be true or false");
    weak = value == "true";
  } else if (key == "character") {
    if (value.empty()) character.reset();
    else character = parse_number<std::size_t>(key, value);
  } else {
    throw ConfigError("unknown config key '" + std::string(key) + "'");
  }
}

ScenarioConfig ScenarioConfig::parse(std::string_view text) {
  ScenarioConfig cfg;
  std::size_t line_no = 0;
  for (const auto& raw : split(text, '\n')) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key=value");
    cfg.set(trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return cfg;
}

std::string ScenarioConfig::emit() const {
  std::string s;
  auto put = [&](std::string_view k, const std::string& v) { s += std::string(k) + "=" + v + "\n"; };
  std::string strategy_text;
  for (const auto& st : strategies) strategy_text += (strategy_text.empty() ? "" : ",") + st;
  put("command", command);
  put("ring", ring);
  put("n", std::to_string(rank));
  put("family", family);
  put("strategy", strategy_text);
  put("cap", std::to_string(cap));
  put("workers", std::to_string(workers));
  put("seed", std::to_string(seed));
  put("out", out);
  put("format", format);
  put("extra", extra);
  put("in", input);
  put("increments", increments);
  put("weak", weak ? "true" : "false");
  put("character", character ? std::to_string(*character) : "");
  return s;
}

std::vector<Strategy> ScenarioConfig::strategy_list() const {
  std::vector<Strategy> out;
  for (const auto& s : strategies) out.push_back(parse_strategy(s));
  return out;
}

ReportFormat parse_format(std::string_view name) {
  if (name == "json") return ReportFormat::Json;
  if (name == "text") return ReportFormat::Text;
  throw ConfigError("unknown report format '" + std::string(name) + "' (expected json or text)");
}

// ---------------------------------------------------------------------------
// Phase files

PhaseFunction parse_phase_text(std::string_view text) {
  const auto lines = split(text, '\n');
  std::size_t i = 0;
  while (i < lines.size() && lines[i].empty()) ++i;
  if (i == lines.size()) throw ConfigError("phase file: missing header");
  std::string ring_spec;
  std::optional<std::size_t> rank;
  for (const auto& field : split(lines[i], ' ')) {
    if (field.empty()) continue;
    if (field.starts_with("ring=")) ring_spec = field.substr(5);
    else if (field.starts_with("n=")) rank = parse_number<std::size_t>("n", std::string_view(field).substr(2));
    else throw ConfigError("phase file: unexpected header field '" + field + "'");
  }
  if (ring_spec.empty() || !rank) throw ConfigError("phase file: header must read ring=<spec> n=<rank>");
  const auto space = make_space(make_ring(ring_spec), *rank);
  std::vector<RingIndex> table;
  for (++i; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto v = parse_number<unsigned>("value", lines[i]);
    if (v >= space->ring()->order()) throw ConfigError("phase file: value " + lines[i] + " is not a ring element");
    table.push_back(static_cast<RingIndex>(v));
  }
  if (table.size() != space->size())
    throw ConfigError("phase file: expected " + std::to_string(space->size()) + " values, found " +
                      std::to_string(table.size()));
  return PhaseFunction(space, std::move(table));
}

std::string format_phase_text(const PhaseFunction& phi) {
  std::string out = "ring=" + phi.ring().name() + " n=" + std::to_string(phi.domain()->rank()) + "\n";
  for (RingIndex v : phi.table()) out += std::to_string(v) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Reports

std::string Report::verdict() const {
  bool capacity = false;
  for (const auto& c : checks) {
    if (c.verdict == "fail") return "fail";
    if (c.verdict == "capacity") capacity = true;
  }
  return capacity ? "capacity" : "pass";
}

int Report::exit_code() const {
  const auto v = verdict();
  if (v == "fail") return 1;
  if (v == "capacity") return 3;
  return 0;
}

namespace {

Json stable_config(const ScenarioConfig& c) {
  Json j = Json::object();
  j["ring"] = c.ring;
  j["n"] = c.rank;
  j["family"] = c.family;
  j["strategy"] = c.strategies;
  j["cap"] = c.cap;
  j["seed"] = c.seed;
  j["extra"] = c.extra;
  j["in"] = c.input;
  j["increments"] = c.increments;
  j["weak"] = c.weak;
  j["character"] = c.character ? Json(*c.character) : Json(nullptr);
  return j;
}

}  // namespace

Json Report::stable_json() const {
  Json j = Json::object();
  j["tool"] = "phaseforge";
  j["version"] = std::string(kToolVersion);
  j["command"] = command;
  const Json cfg = stable_config(config);
  j["config"] = cfg;
  j["config_digest"] = sha256_hex(cfg.dump());
  Json arr = Json::array();
  for (const auto& c : checks) {
    Json r = Json::object();
    r["name"] = c.name;
    r["verdict"] = c.verdict;
    r["data"] = c.data;
    arr.push_back(std::move(r));
  }
  j["checks"] = std::move(arr);
  j["verdict"] = verdict();
  return j;
}

std::string Report::digest() const { return sha256_hex(stable_json().dump()); }

Json Report::to_json() const {
  Json j = Json::object();
  j["stable"] = stable_json();
  j["digest"] = digest();
  Json timing = Json::object();
  double total = 0;
  Json per = Json::array();
  for (const auto& c : checks) {
    per.push_back(Json{{"name", c.name}, {"seconds", c.seconds}});
    total += c.seconds;
  }
  timing["checks"] = std::move(per);
  timing["total_seconds"] = total;
  timing["workers"] = config.workers;
  timing["notes"] = volatile_notes;
  j["timing"] = std::move(timing);
  return j;
}

namespace {

void text_data(std::string& out, const Json& data, const std::string& indent) {
  for (auto it = data.begin(); it != data.end(); ++it) {
    if (it->is_structured()) {
      const std::string dumped = it->dump();
      if (dumped.size() <= 100) out += indent + it.key() + ": " + dumped + "\n";
      else out += indent + it.key() + ": (" + std::to_string(it->size()) + " entries, see JSON)\n";
    } else {
      out += indent + it.key() + ": " + (it->is_string() ? it->get<std::string>() : it->dump()) + "\n";
    }
  }
}

}  // namespace

std::string Report::to_text() const {
  std::string out = "phaseforge " + std::string(kToolVersion) + "\n";
  out += "command: " + command + "\n";
  std::string cfg;
  for (const auto& line : split(config.emit(), '\n'))
    if (!line.empty() && !line.ends_with("=")) cfg += (cfg.empty() ? "" : " ") + line;
  out += "config: " + cfg + "\n";
  for (const auto& c : checks) {
    out += "[" + c.verdict + "] " + c.name + "\n";
    text_data(out, c.data, "    ");
  }
  out += "verdict: " + verdict() + "\n";
  out += "digest: " + digest() + "\n";
  return out;
}

std::string render_report(const Report& report, ReportFormat format) {
  return format == ReportFormat::Json ? report.to_json().dump(2) + "\n" : report.to_text();
}

void emit_report(const Report& report, ReportFormat format, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open report file " + path.string());
  out << render_report(report, format);
  if (!out) throw std::runtime_error("failed writing report file " + path.string());
}

ReportDiff diff_reports(const std::filesystem::path& a, const std::filesystem::path& b) {
  auto load = [](const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in) throw std::runtime_error("cannot read report file " + p.string());
    try {
      return Json::parse(in);
    } catch (const Json::parse_error& e) {
      throw ConfigError("report file " + p.string() + " is not JSON: " + e.what());
    }
  };
  const Json ja = load(a), jb = load(b);
  if (!ja.contains("stable") || !jb.contains("stable")) throw ConfigError("report files lack a stable section");
  ReportDiff diff;
  for (const auto& op : Json::diff(ja["stable"], jb["stable"]))
    diff.differences.push_back(op["op"].get<std::string>() + " " + op["path"].get<std::string>());
  diff.identical = diff.differences.empty();
  return diff;
}

// ---------------------------------------------------------------------------
// Scenario execution

namespace {

Json hex_or_null(const std::optional<std::string>& key) { return key ? Json(hex_key(*key)) : Json(nullptr); }

Json filtration_json(const Filtration& f) {
  Json j = Json::object();
  j["strategy"] = std::string(strategy_name(f.strategy));
  j["depth"] = f.depth;
  j["total"] = f.total_exact ? Json(f.total) : Json(nullptr);
  Json levels = Json::array();
  for (const auto& l : f.levels) {
    Json lj = Json::object();
    lj["level"] = l.level;
    lj["graded_size"] = l.graded_size ? Json(*l.graded_size) : Json(nullptr);
    lj["sublevel_size"] = l.sublevel_size ? Json(*l.sublevel_size) : Json(nullptr);
    lj["sublevel_dim"] = l.sublevel_dim ? Json(*l.sublevel_dim) : Json(nullptr);
    lj["strict"] = l.witness_key.has_value();
    lj["witness"] = hex_or_null(l.witness_key);
    levels.push_back(std::move(lj));
  }
  j["levels"] = std::move(levels);
  return j;
}

Json admissibility_json(const AdmissibilityReport& a) {
  Json j = Json::object();
  j["pullback_closed"] = a.pullback_closed;
  j["degree_bounded"] = a.degree_bounded;
  j["interaction_closed"] = a.interaction_closed;
  j["weak"] = a.weak;
  j["strong"] = a.strong;
  j["degree_bound"] = a.degree_bound;
  j["homs_checked"] = a.homs_checked;
  j["interaction_checks"] = a.interaction_checks;
  j["frobenius"] = a.frobenius;
  j["character_index"] = a.character_index ? Json(*a.character_index) : Json(nullptr);
  j["notes"] = a.notes;
  return j;
}

Json extraction_json(const ExtractedPhase& p) {
  Json j = Json::object();
  j["mode"] = std::string(mode_name(p.mode));
  j["generators"] = p.generators.size();
  j["character_index"] = p.character_index ? Json(*p.character_index) : Json(nullptr);
  if (p.closure) {
    j["closure_size"] = p.closure->size();
    j["reached_fixpoint"] = p.closure->reached_fixpoint;
    j["max_phase_degree"] = p.closure->max_phase_degree;
    Json census = Json::object();
    for (const auto& [k, v] : p.closure->stratum_census) census[std::to_string(k)] = v;
    j["stratum_census"] = std::move(census);
  }
  if (p.structural) {
    j["phase_span_dim"] = p.structural->phases.dim();
    j["translations"] = p.structural->translations;
    j["max_phase_degree"] = p.structural->max_phase_degree;
    j["samples_checked"] = p.structural->samples_checked;
    j["samples_passed"] = p.structural->samples_passed;
    j["failures"] = p.structural->failures;
  }
  j["filtration"] = filtration_json(p.filtration);
  return j;
}

using CheckBody = std::function<bool(Json&)>;

void run_check(Report& report, const std::string& name, const CheckBody& body) {
  CheckRecord rec;
  rec.name = name;
  const auto start = std::chrono::steady_clock::now();
  try {
    rec.verdict = body(rec.data) ? "pass" : "fail";
  } catch (const CapacityError& e) {
    rec.verdict = "capacity";
    rec.data["capacity"] = e.what();
  } catch (const AdmissibilityError& e) {
    rec.verdict = "fail";
    rec.data["error"] = e.what();
  } catch (const StrategyDomainError& e) {
    rec.verdict = "fail";
    rec.data["error"] = e.what();
  }
  rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  report.checks.push_back(std::move(rec));
}

std::vector<PhaseFunction> parse_extra(const std::string& text, const SpacePtr& space) {
  std::vector<PhaseFunction> out;
  if (text.empty()) return out;
  std::string_view body = text;
  if (body.starts_with("cubic:")) body.remove_prefix(6);
  else if (body.starts_with("poly:")) body.remove_prefix(5);
  else throw ConfigError("extra must start with cubic: or poly:");
  for (const auto& piece : split(body, ';')) {
    if (piece.empty()) throw ConfigError("extra: empty polynomial");
    try {
      out.push_back(phase_from_poly(PolynomialSpec::parse(piece), space));
    } catch (const DomainError& e) {
      throw ConfigError(std::string("extra: ") + e.what());
    }
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read input file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Phases named by `in` (a table file) or else by a poly: family.
std::vector<PhaseFunction> input_phases(const ScenarioConfig& cfg) {
  if (!cfg.input.empty()) return {parse_phase_text(read_file(cfg.input))};
  const auto family = FamilySpec::parse(cfg.family);
  if (family.kind != FamilySpec::Kind::Polynomials)
    throw ConfigError("phase commands need --in <file> or a poly: family");
  const auto space = make_space(make_ring(cfg.ring), cfg.rank);
  std::vector<PhaseFunction> out;
  for (const auto& p : family.polynomials) {
    try {
      out.push_back(phase_from_poly(p, space));
    } catch (const DomainError& e) {
      throw ConfigError(e.what());
    }
  }
  return out;
}

ExtractOptions extract_options(const ScenarioConfig& cfg) {
  ExtractOptions o;
  o.strategy = cfg.strategy_list().front();
  o.cap = cfg.cap;
  o.workers = cfg.workers;
  o.seed = cfg.seed;
  o.weak_mode = cfg.weak;
  if (const char* dir = std::getenv("PHASEFORGE_CACHE_DIR"); dir && *dir) o.cache_dir = std::filesystem::path(dir);
  return o;
}

Json ring_json(const FiniteRing& ring) {
  Json j = Json::object();
  j["name"] = ring.name();
  j["order"] = ring.order();
  j["additive_exponent"] = ring.additive_exponent();
  Json chain = Json::array();
  for (const auto& level : ring.radical_chain()) chain.push_back(level.size());
  j["radical_chain_sizes"] = std::move(chain);
  j["nilpotency_length"] = ring.nilpotency_length();
  j["reduced"] = ring.is_reduced();
  j["radical"] = ring.radical_chain().size() > 1 ? Json(ring.radical_chain()[1]) : Json::array();
  return j;
}

void run_model(Report& report, const ScenarioConfig& cfg) {
  const PhaseDatum datum = PhaseDatum::make(cfg.ring, cfg.rank, FamilySpec::parse(cfg.family), cfg.character);
  const ExtractOptions options = extract_options(cfg);
  const auto strategies = cfg.strategy_list();
  if (cfg.command == "model compare" && strategies.size() < 2)
    throw ConfigError("model compare needs at least two strategies (e.g. --strategy default,commutator)");

  AdmissibilityReport adm;
  run_check(report, "admissibility", [&](Json& data) {
    adm = check_admissibility(datum, cfg.seed);
    data = admissibility_json(adm);
    return options.weak_mode ? adm.weak : adm.strong;
  });

  std::optional<ExtractedPhase> phase;
  run_check(report, "extraction", [&](Json& data) {
    phase = extract_phase(datum, options);
    report.volatile_notes["cache_hit"] = phase->cache_hit;
    data = extraction_json(*phase);
    return true;
  });
  if (!phase) return;

  if (cfg.command == "model verify") {
    const auto axioms = verify_axioms(*phase);
    for (const auto& v : axioms.axioms)
      run_check(report, "axiom-" + v.name, [&](Json& data) {
        data["detail"] = v.detail;
        return v.pass;
      });
    run_check(report, "termination", [&](Json& data) {
      data["depth"] = phase->depth;
      data["degree_bound"] = phase->admissibility.degree_bound;
      return phase->depth <= phase->admissibility.degree_bound ||
             (phase->admissibility.degree_bound == 0 && phase->depth <= 1);
    });
  } else if (cfg.command == "model boundary") {
    const auto extra = parse_extra(cfg.extra, datum.space);
    std::optional<BoundaryReport> boundary;
    run_check(report, "boundary-probe", [&](Json& data) {
      boundary = boundary_probe(*phase, extra);
      data["extra_phases"] = extra.size();
      data["proper"] = boundary->proper;
      data["tight"] = boundary->tight;
      data["base_depth"] = boundary->base_depth;
      data["extended_depth"] = boundary->extended_depth;
      data["extended_mode"] = std::string(mode_name(boundary->extended_mode));
      data["new_levels"] = boundary->new_levels;
      Json w = Json::object();
      for (const auto& [k, key] : boundary->witnesses) w[std::to_string(k)] = hex_key(key);
      data["witnesses"] = std::move(w);
      data["extended_filtration"] = filtration_json(boundary->extended_filtration);
      // A proper tight extension must reach past the base depth.
      return !(boundary->proper && boundary->tight) || !boundary->new_levels.empty();
    });
    if (boundary)
      for (std::size_t i = 0; i < boundary->cubic_checks.size(); ++i) {
        const auto& c = boundary->cubic_checks[i];
        run_check(report, "cubic-invariant-" + std::to_string(i), [&](Json& data) {
          data["phase"] = hex_key(c.phase);
          data["default_degree"] = c.default_degree;
          data["tensor_at_basis"] = c.tensor_at_basis ? Json(*c.tensor_at_basis) : Json(nullptr);
          data["first_derivatives_match_zero"] = c.first_derivatives_match_zero;
          data["second_derivatives_match_zero"] = c.second_derivatives_match_zero;
          data["first_mismatch"] = c.first_mismatch ? Json(*c.first_mismatch) : Json(nullptr);
          data["second_mismatch"] = c.second_mismatch ? Json(*c.second_mismatch) : Json(nullptr);
          return c.default_degree == 3 && c.tensor_at_basis == RingIndex{1} && c.first_derivatives_match_zero &&
                 c.second_derivatives_match_zero;
        });
      }
  } else if (cfg.command == "model compare") {
    run_check(report, "strategy-comparison", [&](Json& data) {
      const auto cmp = compare_strategies(*phase, strategies);
      Json sizes = Json::object();
      for (const auto& [name, v] : cmp.graded_sizes) sizes[name] = v;
      data["graded_sizes"] = std::move(sizes);
      Json errors = Json::object();
      for (const auto& [name, v] : cmp.domain_errors) errors[name] = v;
      data["domain_errors"] = std::move(errors);
      data["phases_compared"] = cmp.phases_compared;
      data["agree_at_degree_two_and_above"] = cmp.agree_at_degree_two_and_above;
      data["divergences_confined"] = cmp.divergences_confined;
      data["reconstruction_ok"] = cmp.reconstruction_ok;
      Json divs = Json::array();
      for (const auto& d : cmp.divergences) {
        Json dj = Json::object();
        dj["phase"] = hex_key(d.phase_key);
        dj["additive_degree"] = d.additive_degree;
        dj["additive_or_constant"] = d.additive_or_constant;
        dj["elements"] = d.elements;
        Json values = Json::object();
        for (const auto& [name, v] : d.values) values[name] = v ? Json(*v) : Json(nullptr);
        dj["values"] = std::move(values);
        divs.push_back(std::move(dj));
      }
      data["divergence_count"] = cmp.divergences.size();
      data["divergences"] = std::move(divs);
      return cmp.reconstruction_ok && cmp.agree_at_degree_two_and_above && cmp.divergences_confined;
    });
  }
}

}  // namespace

Report run_scenario(const ScenarioConfig& config) {
  ScenarioConfig cfg = config;
  cfg.set("command", config.command);
  for (const auto& s : cfg.strategies) (void)parse_strategy(s);
  Report report;
  report.command = cfg.command;
  report.config = cfg;

  try {
    if (cfg.command == "ring info") {
      const auto ring = make_ring(cfg.ring);
      run_check(report, "ring-structure", [&](Json& data) {
        data = ring_json(*ring);
        return ring->radical_chain() == radical_chain(*ring) &&
               nilpotents_by_power(*ring) == nilpotents_by_orbit(*ring);
      });
    } else if (cfg.command == "frobenius") {
      const auto ring = make_ring(cfg.ring);
      run_check(report, "frobenius", [&](Json& data) {
        const auto verdict = find_generating_character(ring, cfg.workers);
        data["ring"] = ring->name();
        data["verdict"] = verdict.frobenius() ? "Frobenius" : "not Frobenius";
        data["characters_examined"] = verdict.characters_examined;
        data["character_index"] = verdict.index ? Json(*verdict.index) : Json(nullptr);
        if (verdict.character) {
          data["modulus"] = verdict.character->modulus();
          data["character"] = verdict.character->exponents();
        }
        data["generating_indices"] = generating_character_indices(ring);
        return true;
      });
    } else if (cfg.command == "phase analyze") {
      const auto phases = input_phases(cfg);
      const Strategy strategy = cfg.strategy_list().front();
      for (std::size_t i = 0; i < phases.size(); ++i)
        run_check(report, "profile-" + std::to_string(i), [&](Json& data) {
          const auto& phi = phases[i];
          const auto profile = defect_tensor(phi, strategy);
          data["additive_degree"] = profile.additive_degree;
          data["is_additive"] = profile.is_additive;
          Json by = Json::object();
          for (const auto& [name, v] : profile.defect_degree_by_strategy) by[name] = v ? Json(*v) : Json(nullptr);
          data["defect_degree"] = std::move(by);
          data["tensor_order"] = profile.tensor_order;
          std::size_t nonzero = 0;
          for (RingIndex v : profile.tensor.values)
            if (v != 0) ++nonzero;
          data["tensor_nonzero_entries"] = nonzero;
          bool consistent = true;
          if (profile.polarization) {
            data["polarization"] = Json{{"symmetric", profile.polarization->symmetric},
                                        {"biadditive", profile.polarization->biadditive}};
            consistent = profile.polarization->symmetric &&
                         profile.polarization->biadditive == (profile.additive_degree <= 2);
          } else {
            data["polarization"] = nullptr;
          }
          return consistent;
        });
    } else if (cfg.command == "phase derive") {
      const auto phases = input_phases(cfg);
      std::vector<ModuleElement> hs;
      for (const auto& piece : split(cfg.increments, ','))
        if (!piece.empty()) hs.push_back({parse_number<std::uint32_t>("increments", piece)});
      for (std::size_t i = 0; i < phases.size(); ++i)
        run_check(report, "derivative-" + std::to_string(i), [&](Json& data) {
          const auto& phi = phases[i];
          for (auto h : hs)
            if (!phi.domain()->contains(h)) throw ConfigError("increment " + std::to_string(h.packed) + " outside A");
          const auto rec = iterated_difference(phi, hs, DifferenceMethod::Recursive);
          const auto alt = iterated_difference(phi, hs, DifferenceMethod::AlternatingSum);
          Json inc = Json::array();
          for (auto h : hs) inc.push_back(h.packed);
          data["increments"] = std::move(inc);
          data["table"] = rec.table();
          data["constant"] = rec.is_constant();
          data["zero"] = rec.is_zero();
          data["methods_agree"] = rec == alt;
          return rec == alt;
        });
    } else {
      run_model(report, cfg);
    }
  } catch (const ConstructionError& e) {
    throw ConfigError(e.what());
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  return report;
}

std::vector<ScenarioConfig> verification_suite(unsigned workers) {
  std::vector<ScenarioConfig> out;
  auto add = [&](std::string command, std::string ring, std::size_t n, std::string family, std::string strategy,
                 std::string extra = "", bool weak = false) {
    ScenarioConfig c;
    c.command = std::move(command);
    c.ring = std::move(ring);
    c.rank = n;
    c.family = std::move(family);
    c.strategies = split(strategy, ',');
    c.extra = std::move(extra);
    c.weak = weak;
    c.workers = workers;
    out.push_back(std::move(c));
  };
  for (const char* ring : {"chain:2:2", "zmod:4", "fatpoint:2", "prod:(zmod:2,zmod:3)"})
    add("ring info", ring, 1, "deg2", "default");
  for (const char* ring : {"chain:2:2", "zmod:4", "zmod:2", "zmod:3", "fatpoint:2"})
    add("frobenius", ring, 1, "deg2", "default");
  add("phase analyze", "chain:2:2", 2, "poly:2*x1x2", "default");
  add("phase analyze", "chain:2:2", 3, "poly:x1x2x3", "default");
  add("phase derive", "chain:2:2", 2, "poly:2*x1x2", "default");
  add("model verify", "chain:2:2", 1, "deg2", "default");
  add("model verify", "chain:2:2", 2, "deg2", "default");
  add("model verify", "chain:2:2", 1, "deg1", "default");
  add("model verify", "zmod:2", 2, "deg2", "radical-depth");
  add("model verify", "zmod:3", 1, "deg2", "radical-depth");
  add("model compare", "chain:2:2", 1, "deg2", "default,commutator,literal,radical-depth");
  add("model compare", "chain:2:2", 2, "deg2", "default,commutator");
  add("model extract", "chain:2:2", 3, "deg3", "default", "", true);
  add("model boundary", "chain:2:2", 3, "deg2", "default", "cubic:x1x2x3");
  add("model boundary", "chain:2:2", 3, "deg2", "default");
  for (auto& c : out)
    if (c.command == "phase derive") c.increments = "1,4";
  return out;
}

}  // namespace phaseforge
