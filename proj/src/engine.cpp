#include "phaseforge/engine.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "phaseforge/errors.hpp"

namespace phaseforge {

namespace {

constexpr std::uint64_t kMemberEnumerationCap = std::uint64_t{1} << 16;
constexpr std::uint64_t kTableEnumerationCap = std::uint64_t{1} << 20;
constexpr std::uint64_t kInteractionCheckCap = std::uint64_t{1} << 18;

std::string phase_key(const PhaseFunction& phi) { return {phi.table().begin(), phi.table().end()}; }

std::string table_part(std::string_view element_key) {
  return std::string(element_key.substr(0, element_key.size() - 4));
}

// Shifts used for interaction and derivative scans: all of A when small,
// otherwise the additive generators.
std::vector<ModuleElement> probe_shifts(const ModuleSpace& space, std::uint64_t limit) {
  if (space.size() <= limit) {
    std::vector<ModuleElement> all;
    for (auto x : space.elements()) all.push_back(x);
    return all;
  }
  return space.additive_generators();
}

// ψ ↦ every (order)-fold derivative along generator multisets, as digits.
PhaseCondition derivative_condition(const SpacePtr& space, std::size_t order) {
  if (order > kMaxDerivativeOrder)
    throw CapacityError("sublevel condition needs derivatives of order " + std::to_string(order));
  const auto gens = space->additive_generators();
  return [gens, order](const PhaseFunction& phi) {
    FpVector out;
    std::function<void(const PhaseFunction&, std::size_t, std::size_t)> walk =
        [&](const PhaseFunction& current, std::size_t level, std::size_t start) {
          if (level == order) {
            const auto v = phase_to_vector(current);
            out.insert(out.end(), v.begin(), v.end());
            return;
          }
          for (std::size_t i = start; i < gens.size(); ++i) walk(difference(current, gens[i]), level + 1, i);
        };
    walk(phi, 0, 0);
    return out;
  };
}

// ψ ↦ (ψ(0), ψ(x+g) − ψ(x) − ψ(g) for generators g and all x).
PhaseCondition additivity_condition(const SpacePtr& space) {
  const auto gens = space->additive_generators();
  return [space, gens](const PhaseFunction& phi) {
    const auto& ring = phi.ring();
    std::vector<RingIndex> values{phi(space->zero())};
    for (auto g : gens)
      for (std::uint32_t x = 0; x < phi.size(); ++x)
        values.push_back(ring.sub(ring.sub(phi(space->add({x}, g)), phi.at(x)), phi(g)));
    const std::size_t r = ring.elementary_rank();
    FpVector out;
    out.reserve(values.size() * r);
    for (RingIndex v : values)
      for (std::size_t j = 0; j < r; ++j) out.push_back(static_cast<std::uint8_t>(ring.digit(v, j)));
    return out;
  };
}

// ψ ↦ B_ψ(g_i, g_j) modulo rad^s, for generator pairs. Linear on phases of degree ≤ 2.
PhaseCondition radical_condition(const SpacePtr& space, std::size_t s) {
  const auto& ring = *space->ring();
  const std::size_t r = ring.elementary_rank();
  FpSpan ideal(ring.elementary_prime(), r);
  for (RingIndex a : ring.radical_chain().at(s)) {
    FpVector v(r);
    for (std::size_t j = 0; j < r; ++j) v[j] = static_cast<std::uint8_t>(ring.digit(a, j));
    ideal.insert(std::move(v));
  }
  const auto gens = space->additive_generators();
  return [space, gens, ideal, r](const PhaseFunction& phi) {
    const auto& ring = phi.ring();
    FpVector out;
    const RingIndex at_zero = phi(space->zero());
    for (std::size_t i = 0; i < gens.size(); ++i)
      for (std::size_t j = i; j < gens.size(); ++j) {
        const RingIndex b = ring.add(
            ring.sub(ring.sub(phi(space->add(gens[i], gens[j])), phi(gens[i])), phi(gens[j])), at_zero);
        FpVector v(r);
        for (std::size_t t = 0; t < r; ++t) v[t] = static_cast<std::uint8_t>(ring.digit(b, t));
        v = ideal.reduce(std::move(v));
        out.insert(out.end(), v.begin(), v.end());
      }
    return out;
  };
}

std::uint64_t saturating_pow(std::uint64_t base, std::uint64_t exp) {
  std::uint64_t out = 1;
  for (std::uint64_t i = 0; i < exp; ++i) {
    if (out > std::numeric_limits<std::uint64_t>::max() / base) return std::numeric_limits<std::uint64_t>::max();
    out *= base;
  }
  return out;
}

std::optional<std::uint64_t> checked_pow(std::uint64_t base, std::uint64_t exp) {
  const auto v = saturating_pow(base, exp);
  if (v == std::numeric_limits<std::uint64_t>::max()) return std::nullopt;
  return v;
}

std::size_t safe_additive_degree(const PhaseFunction& phi) {
  try {
    return additive_degree(phi);
  } catch (const CapacityError&) {
    return kMaxDerivativeOrder + 1;
  }
}

}  // namespace

std::string hex_key(std::string_view key) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(key.size() * 2);
  for (unsigned char c : key) {
    out.push_back(kDigits[c >> 4]);
    out.push_back(kDigits[c & 15]);
  }
  return out;
}

std::string_view mode_name(ExtractionMode m) {
  switch (m) {
    case ExtractionMode::Closure: return "closure";
    case ExtractionMode::Structural: return "structural";
    case ExtractionMode::Weak: return "weak";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Families and data

FamilySpec FamilySpec::degree(std::size_t d) {
  FamilySpec f;
  f.kind = Kind::DegreeBound;
  f.degree_bound = d;
  return f;
}

FamilySpec FamilySpec::parse(std::string_view text) {
  if (text.starts_with("deg")) {
    const auto rest = text.substr(3);
    if (rest.size() == 1 && rest[0] >= '1' && rest[0] <= '3') return degree(static_cast<std::size_t>(rest[0] - '0'));
    throw ConfigError("family '" + std::string(text) + "': degree bound must be 1, 2 or 3");
  }
  if (text.starts_with("poly:")) {
    FamilySpec f;
    f.kind = Kind::Polynomials;
    std::string_view rest = text.substr(5);
    while (!rest.empty()) {
      const auto semi = rest.find(';');
      const auto piece = rest.substr(0, semi);
      if (piece.empty()) throw ConfigError("family: empty polynomial in '" + std::string(text) + "'");
      f.polynomials.push_back(PolynomialSpec::parse(piece));
      rest = semi == std::string_view::npos ? std::string_view{} : rest.substr(semi + 1);
    }
    if (f.polynomials.empty()) throw ConfigError("family: poly: needs at least one polynomial");
    return f;
  }
  throw ConfigError("unknown family '" + std::string(text) + "' (expected deg1|deg2|deg3|poly:...)");
}

std::string FamilySpec::to_string() const {
  switch (kind) {
    case Kind::DegreeBound: return "deg" + std::to_string(degree_bound);
    case Kind::Polynomials: {
      std::string out = "poly:";
      for (std::size_t i = 0; i < polynomials.size(); ++i) {
        if (i) out += ';';
        out += polynomials[i].to_string();
      }
      return out;
    }
    case Kind::Tables: return "tables:" + std::to_string(tables.size());
  }
  return "unknown";
}

PhaseDatum PhaseDatum::make(std::string_view ring_spec, std::size_t rank, FamilySpec family,
                            std::optional<std::size_t> character_index) {
  PhaseDatum d;
  d.ring_spec = RingSpec::parse(ring_spec);
  d.ring = make_ring(ring_spec);
  if (rank == 0) throw ConfigError("rank must be positive");
  d.space = make_space(d.ring, rank);
  d.space->require_enumerable("phase datum");
  if (family.kind == FamilySpec::Kind::Polynomials) {
    try {
      for (const auto& p : family.polynomials) (void)phase_from_poly(p, d.space);
    } catch (const DomainError& e) {
      throw ConfigError(std::string("family: ") + e.what());
    }
  }
  if (family.kind == FamilySpec::Kind::Tables) {
    if (family.tables.empty()) throw ConfigError("family: empty table list");
    for (const auto& t : family.tables)
      if (!t.domain()->same_as(*d.space)) throw ConfigError("family: table on a different module");
  }
  if (character_index && *character_index >= d.ring->order())
    throw ConfigError("character index " + std::to_string(*character_index) + " out of range");
  d.family = std::move(family);
  d.character_index = character_index;
  return d;
}

RealizedFamily realize_family(const PhaseDatum& datum) {
  RealizedFamily out;
  const auto& space = datum.space;
  const auto& ring = *datum.ring;
  switch (datum.family.kind) {
    case FamilySpec::Kind::Polynomials:
      for (const auto& p : datum.family.polynomials) out.members.push_back(phase_from_poly(p, space));
      out.enumerated = true;
      return out;
    case FamilySpec::Kind::Tables:
      out.members = datum.family.tables;
      out.enumerated = true;
      return out;
    case FamilySpec::Kind::DegreeBound: break;
  }
  const std::size_t d = datum.family.degree_bound;
  if (ring.elementary_prime() != 0) {
    out.subspace = PhaseSubspace::full(space).kernel(derivative_condition(space, d + 1));
    out.basis = out.subspace->basis();
    if (out.subspace->log2_size() <= std::log2(static_cast<double>(kMemberEnumerationCap))) {
      out.members = out.subspace->enumerate(kMemberEnumerationCap);
      std::sort(out.members.begin(), out.members.end(),
                [](const PhaseFunction& a, const PhaseFunction& b) { return a.table() < b.table(); });
      out.enumerated = true;
    }
    return out;
  }
  const std::uint64_t tables = saturating_pow(ring.order(), space->size());
  if (tables > kTableEnumerationCap)
    throw CapacityError("family " + datum.family.to_string() + " over " + ring.name() + "^" +
                        std::to_string(space->rank()) + " needs " + "more than 2^20 tables and " +
                        "the ring's additive group is not elementary abelian");
  std::vector<RingIndex> table(space->size(), 0);
  for (std::uint64_t t = 0; t < tables; ++t) {
    std::uint64_t rest = t;
    for (auto& v : table) {
      v = static_cast<RingIndex>(rest % ring.order());
      rest /= ring.order();
    }
    PhaseFunction phi(space, table);
    if (safe_additive_degree(phi) <= d) out.members.push_back(std::move(phi));
  }
  out.enumerated = true;
  return out;
}

std::vector<NamedHom> hom_battery(const SpacePtr& space, std::uint64_t seed, std::size_t random_count) {
  std::vector<NamedHom> out;
  const std::size_t n = space->rank();
  const auto& ring = *space->ring();
  out.push_back({"identity", ModuleHom::identity(space)});
  out.push_back({"zero", ModuleHom::zero(space, space)});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      std::vector<RingIndex> swap(n * n, ring.zero());
      for (std::size_t t = 0; t < n; ++t) swap[t * n + t] = ring.one();
      swap[i * n + i] = swap[j * n + j] = ring.zero();
      swap[i * n + j] = swap[j * n + i] = ring.one();
      out.push_back({"swap(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")",
                     ModuleHom(space, space, std::move(swap))});
      std::vector<RingIndex> shear(n * n, ring.zero());
      for (std::size_t t = 0; t < n; ++t) shear[t * n + t] = ring.one();
      shear[i * n + j] = ring.one();
      out.push_back({"shear(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")",
                     ModuleHom(space, space, std::move(shear))});
    }
  std::mt19937_64 rng(seed);
  for (std::size_t r = 0; r < random_count; ++r)
    out.push_back({"random#" + std::to_string(r), ModuleHom::random(space, space, rng)});
  return out;
}

AdmissibilityReport check_admissibility(const PhaseDatum& datum, std::uint64_t seed) {
  AdmissibilityReport rep;
  const RealizedFamily family = realize_family(datum);
  const auto& space = datum.space;
  const bool linear = family.subspace.has_value();
  const auto& gens = linear ? family.basis : family.members;

  // W2: uniform degree bound.
  rep.degree_bounded = true;
  rep.degree_bound = 0;
  for (const auto& phi : gens) {
    const std::size_t d = safe_additive_degree(phi);
    if (d > kMaxDerivativeOrder) {
      rep.degree_bounded = false;
      rep.notes.push_back("W2: a member exceeds the derivative-order cap");
      break;
    }
    rep.degree_bound = std::max(rep.degree_bound, d);
  }
  const bool degree_family = datum.family.kind == FamilySpec::Kind::DegreeBound;
  const std::size_t bound = degree_family ? datum.family.degree_bound : rep.degree_bound;
  if (degree_family && rep.degree_bound > bound) {
    rep.degree_bounded = false;
    rep.notes.push_back("W2: realized member exceeds the declared bound");
  }

  // W1: pullback closure along the hom battery. Pullback is linear, so a basis suffices.
  std::unordered_set<std::string> member_keys;
  for (const auto& phi : family.members) member_keys.insert(phase_key(phi));
  auto in_family = [&](const PhaseFunction& phi) {
    if (degree_family) return safe_additive_degree(phi) <= bound;
    return member_keys.contains(phase_key(phi));
  };
  rep.pullback_closed = true;
  const auto homs = hom_battery(space, seed);
  for (const auto& [name, f] : homs) {
    ++rep.homs_checked;
    for (std::size_t i = 0; i < gens.size(); ++i) {
      if (!in_family(pullback_phase(f, gens[i]))) {
        rep.pullback_closed = false;
        rep.notes.push_back("W1: pullback of member #" + std::to_string(i) + " along " + name +
                            " leaves the family");
        break;
      }
    }
    if (!rep.pullback_closed) break;
  }

  // W3: ψ1 + ψ2∘τ_a stays within the degree bound.
  rep.interaction_closed = true;
  const auto shifts = probe_shifts(*space, space->rank() <= 2 ? kEnumerationCap : 0);
  const std::uint64_t total = static_cast<std::uint64_t>(gens.size()) * gens.size() * shifts.size();
  auto check_pair = [&](std::size_t i, std::size_t j, ModuleElement a) {
    ++rep.interaction_checks;
    if (safe_additive_degree(gens[i] + gens[j].translated(a)) > bound) {
      rep.interaction_closed = false;
      rep.notes.push_back("W3: member #" + std::to_string(i) + " + translate of member #" + std::to_string(j) +
                          " by element " + std::to_string(a.packed) + " exceeds degree " + std::to_string(bound));
      return false;
    }
    return true;
  };
  if (total <= kInteractionCheckCap) {
    for (std::size_t i = 0; i < gens.size() && rep.interaction_closed; ++i)
      for (std::size_t j = 0; j < gens.size() && rep.interaction_closed; ++j)
        for (auto a : shifts)
          if (!check_pair(i, j, a)) break;
  } else {
    std::mt19937_64 rng(seed ^ 0x5bd1e995ULL);
    std::uniform_int_distribution<std::size_t> pick(0, gens.size() - 1);
    std::uniform_int_distribution<std::size_t> pick_shift(0, shifts.size() - 1);
    for (std::uint64_t t = 0; t < kInteractionCheckCap && rep.interaction_closed; ++t)
      check_pair(pick(rng), pick(rng), shifts[pick_shift(rng)]);
    rep.notes.push_back("W3: sampled " + std::to_string(rep.interaction_checks) + " of " + std::to_string(total) +
                        " interaction triples");
  }

  rep.weak = rep.pullback_closed && rep.degree_bounded && rep.interaction_closed;

  const auto verdict = find_generating_character(datum.ring);
  rep.frobenius = verdict.frobenius();
  bool character_ok = rep.frobenius;
  if (datum.character_index) {
    const auto generating = generating_character_indices(datum.ring);
    character_ok = std::find(generating.begin(), generating.end(), *datum.character_index) != generating.end();
    if (character_ok) rep.character_index = datum.character_index;
    else rep.notes.push_back("strong: character #" + std::to_string(*datum.character_index) + " is not generating");
  } else if (verdict.index) {
    rep.character_index = verdict.index;
  }
  if (!rep.frobenius) rep.notes.push_back("strong: " + datum.ring->name() + " has no generating character");
  rep.strong = rep.weak && character_ok;
  return rep;
}

// ---------------------------------------------------------------------------
// Filtrations

std::vector<std::uint64_t> Filtration::graded_sizes() const {
  std::vector<std::uint64_t> out;
  for (const auto& l : levels) out.push_back(l.graded_size.value_or(0));
  return out;
}

std::vector<std::size_t> Filtration::sublevel_dims() const {
  std::vector<std::size_t> out;
  for (const auto& l : levels)
    if (l.sublevel_dim) out.push_back(*l.sublevel_dim);
  return out;
}

namespace {

// Filtration from (key, degree) pairs; `trivial_key` plays the role of 𝒫_{-1}.
Filtration filtration_from_degrees(const std::map<std::string, std::size_t>& degrees, Strategy strategy,
                                   const std::string& trivial_key) {
  Filtration f;
  f.strategy = strategy;
  f.strata = degrees;
  f.total = degrees.size();
  for (const auto& [key, d] : degrees) f.depth = std::max(f.depth, d);
  f.levels.resize(f.depth + 1);
  for (std::size_t k = 0; k <= f.depth; ++k) {
    f.levels[k].level = k;
    f.levels[k].graded_size = 0;
  }
  for (const auto& [key, d] : degrees) {
    auto& level = f.levels[d];
    ++*level.graded_size;
    if (!level.witness_key && key != trivial_key) level.witness_key = key;
  }
  std::uint64_t running = 0;
  for (auto& level : f.levels) {
    running += *level.graded_size;
    level.sublevel_size = running;
  }
  return f;
}

}  // namespace

Filtration compute_filtration(const std::vector<PhaseGroupElement>& elements, Strategy strategy) {
  std::map<std::string, std::size_t> degrees;
  std::unordered_map<std::string, std::size_t> cache;
  std::string identity;
  for (const auto& g : elements) {
    const std::string table = phase_key(g.phase());
    auto it = cache.find(table);
    if (it == cache.end()) it = cache.emplace(table, defect_degree(g.phase(), strategy)).first;
    degrees.emplace(g.key(), it->second);
  }
  if (!elements.empty()) identity = PhaseGroupElement::identity(elements.front().domain()).key();
  return filtration_from_degrees(degrees, strategy, identity);
}

PhaseSubspace sublevel_subspace(const PhaseSubspace& u, Strategy strategy, std::size_t k) {
  const auto& space = u.domain();
  switch (strategy) {
    case Strategy::Literal:
      throw StrategyDomainError("literal sublevel sets are not subgroups; use an enumerable closure");
    case Strategy::Default:
      if (k == 0) return u.kernel(additivity_condition(space));
      return u.kernel(derivative_condition(space, k + 1));
    case Strategy::Commutator: return u.kernel(derivative_condition(space, k + 1));
    case Strategy::RadicalDepth: {
      if (!u.kernel(derivative_condition(space, 3)).contains(u))
        throw StrategyDomainError("radical-depth strategy is defined only for phases of degree <= 2");
      const std::size_t chain = space->ring()->nilpotency_length();
      if (k == 0) return u.kernel(derivative_condition(space, 2));
      if (k >= chain) return u;
      return u.kernel(radical_condition(space, chain - k));
    }
  }
  throw ConfigError("unknown strategy");
}

namespace {

struct LinearFiltration {
  std::vector<PhaseSubspace> sublevels;
  Filtration filtration;
};

// Sublevels of U until they exhaust it. Sizes count |A| translations per phase
// (pass 1 for phase-only filtrations); `level0_witness` stands in for level 0.
LinearFiltration linear_filtration(const PhaseSubspace& u, Strategy strategy, std::uint64_t translations,
                                   const std::optional<std::string>& level0_witness,
                                   const std::function<std::string(const PhaseFunction&)>& key_of) {
  LinearFiltration out;
  auto& f = out.filtration;
  f.strategy = strategy;
  for (std::size_t k = 0;; ++k) {
    out.sublevels.push_back(sublevel_subspace(u, strategy, k));
    if (out.sublevels.back().dim() == u.dim()) break;
    if (k >= kMaxDerivativeOrder) throw CapacityError("filtration does not terminate below the derivative-order cap");
  }
  f.depth = out.sublevels.size() - 1;
  const std::uint32_t p = u.prime();
  const double log_t = std::log2(static_cast<double>(translations));
  std::optional<std::uint64_t> previous = 0;
  for (std::size_t k = 0; k <= f.depth; ++k) {
    FiltrationLevel level;
    level.level = k;
    level.sublevel_dim = out.sublevels[k].dim();
    if (static_cast<double>(*level.sublevel_dim) * std::log2(static_cast<double>(p)) + log_t < 63.0) {
      level.sublevel_size = *checked_pow(p, *level.sublevel_dim) * translations;
      if (previous) level.graded_size = *level.sublevel_size - *previous;
    }
    previous = level.sublevel_size;
    if (k == 0) {
      if (level0_witness) {
        level.witness_key = *level0_witness;
      } else if (out.sublevels[0].dim() > 0) {
        level.witness_key = key_of(out.sublevels[0].basis().front());
      }
    } else {
      for (const auto& b : out.sublevels[k].basis())
        if (!out.sublevels[k - 1].contains(b)) {
          level.witness_key = key_of(b);
          break;
        }
    }
    f.levels.push_back(std::move(level));
  }
  f.total_exact = f.levels.back().sublevel_size.has_value();
  f.total = f.levels.back().sublevel_size.value_or(0);
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Extraction

namespace {

ExtractedPhase blank_phase(const PhaseDatum& datum, const ExtractOptions& options, AdmissibilityReport adm) {
  ExtractedPhase out;
  out.datum = datum;
  out.options = options;
  out.admissibility = std::move(adm);
  return out;
}

std::size_t max_degree_of(const std::vector<PhaseFunction>& phases) {
  std::size_t d = 0;
  for (const auto& phi : phases) d = std::max(d, safe_additive_degree(phi));
  return d;
}

// Closure or structural model of the group generated by M_φ (φ in `phases`,
// then `extra`) and the translations.
void realize_operators(ExtractedPhase& out) {
  const auto& datum = out.datum;
  const auto& options = out.options;
  const auto& space = datum.space;
  const auto& ring = *datum.ring;

  std::vector<PhaseFunction> phases = out.generator_phases;
  phases.insert(phases.end(), out.extra_phases.begin(), out.extra_phases.end());
  std::vector<PhaseGroupElement> gens;
  for (const auto& phi : phases) gens.push_back(PhaseGroupElement::multiplication(phi));
  for (auto a : probe_shifts(*space, 4096)) gens.push_back(PhaseGroupElement::translation(space, a));
  if (options.shuffle_seed) {
    std::mt19937_64 rng(*options.shuffle_seed);
    std::shuffle(gens.begin(), gens.end(), rng);
  }
  out.generators = gens;

  const bool elementary = ring.elementary_prime() != 0;
  std::optional<PhaseSubspace> u;
  const double log_a = std::log2(static_cast<double>(space->size()));
  if (elementary) {
    std::vector<PhaseFunction> ordered;
    for (const auto& g : gens)
      if (!g.phase().is_zero()) ordered.push_back(g.phase());
    u = PhaseSubspace::translation_closure(space, ordered);
    out.predicted_log2_size = u->log2_size() + log_a;
  }
  const bool fits = !elementary || out.predicted_log2_size <= std::log2(static_cast<double>(options.cap)) + 1e-9;
  if (fits) {
    ClosureOptions co;
    co.cap = options.cap;
    co.workers = options.workers;
    co.strategy = options.strategy;
    auto result = options.cache_dir ? cached_closure(gens, co, *options.cache_dir, &out.cache_hit) : closure(gens, co);
    if (!result.cap_hit) {
      out.mode = ExtractionMode::Closure;
      out.filtration = compute_filtration(result.elements, options.strategy);
      out.depth = out.filtration.depth;
      if (!elementary) out.predicted_log2_size = std::log2(static_cast<double>(result.size()));
      out.closure = std::move(result);
      return;
    }
    if (!elementary)
      throw CapacityError("closure exceeded the cap of " + std::to_string(options.cap) + " elements over " +
                          ring.name() + ", whose additive group admits no linear model");
  }

  out.mode = ExtractionMode::Structural;
  const std::string level0 = PhaseGroupElement::translation(space, space->additive_generators().front()).key();
  auto lf = linear_filtration(*u, options.strategy, space->size(), level0,
                              [](const PhaseFunction& phi) { return PhaseGroupElement::multiplication(phi).key(); });
  StructuralModel model{*u, std::move(lf.sublevels), space->size(), 0, true, 0, {}};
  const auto basis = u->basis();
  model.max_phase_degree = max_degree_of(basis);

  for (const auto& phi : phases)
    if (!u->contains(phi)) model.failures.push_back("generator phase outside the phase span");
  for (const auto& b : basis)
    for (auto e : space->additive_generators())
      if (!u->contains(b.translated(e))) model.failures.push_back("phase span not translation invariant");
  std::mt19937_64 rng(options.seed);
  std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(space->size() - 1));
  for (std::size_t i = 0; i < options.structural_samples; ++i) {
    const PhaseGroupElement g1(u->random_phase(rng), {pick(rng)});
    const PhaseGroupElement g2(u->random_phase(rng), {pick(rng)});
    const auto product = compose(g1, g2);
    const auto inverse = invert(g1);
    if (!u->contains(product.phase())) model.failures.push_back("sampled product leaves the model");
    if (!u->contains(inverse.phase())) model.failures.push_back("sampled inverse leaves the model");
    if (safe_additive_degree(product.phase()) > model.max_phase_degree)
      model.failures.push_back("sampled product exceeds the degree bound");
    if (compose(g1, inverse) != PhaseGroupElement::identity(space))
      model.failures.push_back("sampled inverse law fails");
    ++model.samples_checked;
  }
  model.samples_passed = model.failures.empty();
  out.filtration = std::move(lf.filtration);
  out.depth = out.filtration.depth;
  out.structural = std::move(model);
}

std::string join_notes(const std::vector<std::string>& notes) {
  std::string out;
  for (const auto& n : notes) out += (out.empty() ? "" : "; ") + n;
  return out;
}

}  // namespace

ExtractedPhase extract_phase(const PhaseDatum& datum, const ExtractOptions& options) {
  ExtractedPhase out = blank_phase(datum, options, check_admissibility(datum, options.seed));
  const auto& adm = out.admissibility;
  if (!adm.weak) throw AdmissibilityError("phase datum is not weakly admissible: " + join_notes(adm.notes));
  if (!options.weak_mode && !adm.strong)
    throw AdmissibilityError("phase datum is not strongly admissible: " + join_notes(adm.notes));
  out.character_index = adm.character_index;
  const RealizedFamily family = realize_family(datum);
  out.generator_phases = family.generators();

  if (!options.weak_mode) {
    realize_operators(out);
    return out;
  }

  out.mode = ExtractionMode::Weak;
  out.family_phases = family.generators();
  if (family.enumerated) {
    std::map<std::string, std::size_t> degrees;
    for (const auto& phi : family.members) degrees.emplace(phase_key(phi), defect_degree(phi, options.strategy));
    out.filtration = filtration_from_degrees(degrees, options.strategy, phase_key(PhaseFunction::zero(datum.space)));
  } else {
    auto lf = linear_filtration(*family.subspace, options.strategy, 1, std::nullopt, phase_key);
    out.filtration = std::move(lf.filtration);
    out.structural = StructuralModel{*family.subspace, std::move(lf.sublevels), 1, 0, true,
                                     max_degree_of(family.basis), {}};
  }
  out.depth = out.filtration.depth;
  return out;
}

namespace {

ExtractedPhase reextract(const ExtractedPhase& phase, const ExtractOptions& options, const PhaseDatum& datum) {
  if (phase.extra_phases.empty()) return extract_phase(datum, options);
  ExtractedPhase out = blank_phase(datum, options, phase.admissibility);
  out.character_index = phase.character_index;
  out.generator_phases = phase.generator_phases;
  out.extra_phases = phase.extra_phases;
  realize_operators(out);
  return out;
}

PhaseFunction phase_of_key(const ExtractedPhase& phase, const std::string& key) {
  const auto& space = phase.datum.space;
  if (phase.mode == ExtractionMode::Weak) return PhaseFunction(space, std::vector<RingIndex>(key.begin(), key.end()));
  return PhaseGroupElement::from_key(space, key).phase();
}

// Number of disagreements between the stored strata and degrees recomputed
// from scratch, plus witnesses whose degree is not their level.
std::size_t reconstruction_mismatches(const ExtractedPhase& phase) {
  const auto& f = phase.filtration;
  const Strategy s = f.strategy;
  std::size_t bad = 0;
  for (std::size_t k = 0; k < f.levels.size(); ++k)
    if (f.levels[k].witness_key && defect_degree(phase_of_key(phase, *f.levels[k].witness_key), s) != k) ++bad;
  if (!f.strata.empty()) {
    std::map<std::string, std::size_t> fresh;
    for (const auto& [key, d] : f.strata) {
      const std::string table = phase.mode == ExtractionMode::Weak ? key : table_part(key);
      auto it = fresh.find(table);
      if (it == fresh.end()) it = fresh.emplace(table, defect_degree(phase_of_key(phase, key), s)).first;
      if (it->second != d) ++bad;
    }
    // Sublevel sets rebuilt from the degree function.
    for (std::size_t k = 0; k < f.levels.size(); ++k) {
      std::uint64_t count = 0;
      for (const auto& [key, d] : f.strata)
        if (d <= k) ++count;
      if (f.levels[k].sublevel_size != count) ++bad;
    }
    return bad;
  }
  if (phase.structural) {
    const auto& model = *phase.structural;
    std::mt19937_64 rng(phase.options.seed + 17);
    for (std::size_t i = 0; i < 32; ++i) {
      const auto psi = model.phases.random_phase(rng);
      const std::size_t d = defect_degree(psi, s);
      for (std::size_t k = 0; k < model.sublevels.size(); ++k)
        if ((d <= k) != model.sublevels[k].contains(psi)) ++bad;
    }
    for (std::size_t k = 0; k < model.sublevels.size(); ++k)
      for (std::size_t i = 0; i < 4; ++i)
        if (defect_degree(model.sublevels[k].random_phase(rng), s) > k) ++bad;
  }
  return bad;
}

}  // namespace

bool AxiomReport::all_pass() const {
  return std::all_of(axioms.begin(), axioms.end(), [](const Verdict& v) { return v.pass; });
}

AxiomReport verify_axioms(const ExtractedPhase& phase) {
  AxiomReport rep;
  const auto& f = phase.filtration;

  {
    bool ok = !f.levels.empty() && f.levels.size() == f.depth + 1;
    for (std::size_t k = 1; ok && k < f.levels.size(); ++k) {
      if (f.levels[k].sublevel_size && f.levels[k - 1].sublevel_size)
        ok = *f.levels[k - 1].sublevel_size <= *f.levels[k].sublevel_size;
      if (f.levels[k].sublevel_dim && f.levels[k - 1].sublevel_dim)
        ok = ok && *f.levels[k - 1].sublevel_dim <= *f.levels[k].sublevel_dim;
    }
    if (phase.closure) ok = ok && f.strata.size() == phase.closure->size() && f.levels.back().sublevel_size == f.total;
    if (phase.structural) {
      const auto& m = *phase.structural;
      for (std::size_t k = 1; ok && k < m.sublevels.size(); ++k) ok = m.sublevels[k].contains(m.sublevels[k - 1]);
      ok = ok && m.sublevels.back() == m.phases;
    }
    rep.axioms.push_back({"I", ok, "degree function total; " + std::to_string(f.levels.size()) +
                                       " nested levels ending at the whole phase"});
  }

  {
    bool ok = true;
    std::string detail;
    ExtractOptions shuffled = phase.options;
    shuffled.shuffle_seed = phase.options.shuffle_seed.value_or(phase.options.seed) + 1;
    const auto again = reextract(phase, shuffled, phase.datum);
    const auto eq = equivalence_check(phase, again);
    ok = eq.equivalent;
    detail = "shuffled presentation: " + std::string(eq.equivalent ? "equivalent" : "NOT equivalent");
    std::optional<std::size_t> alternative;
    for (std::size_t idx : generating_character_indices(phase.datum.ring))
      if (!phase.character_index || idx != *phase.character_index) {
        alternative = idx;
        break;
      }
    if (alternative && phase.mode != ExtractionMode::Weak) {
      PhaseDatum other = phase.datum;
      other.character_index = alternative;
      const auto alt = reextract(phase, phase.options, other);
      const auto eq2 = equivalence_check(phase, alt);
      ok = ok && eq2.equivalent;
      detail += "; character #" + std::to_string(*alternative) + ": " +
                (eq2.equivalent ? "equivalent" : "NOT equivalent");
    } else {
      detail += "; no alternative generating character";
    }
    rep.axioms.push_back({"II", ok, detail});
  }

  {
    const std::size_t bad = reconstruction_mismatches(phase);
    rep.axioms.push_back({"III", bad == 0, std::to_string(bad) + " mismatches between stored strata and sublevel sets"});
  }

  {
    std::size_t checks = 0;
    std::vector<std::string> failures;
    std::vector<PhaseFunction> phases = phase.generator_phases;
    phases.insert(phases.end(), phase.extra_phases.begin(), phase.extra_phases.end());
    for (const auto& [name, hom] : hom_battery(phase.datum.space, phase.options.seed)) {
      for (std::size_t i = 0; i < phases.size(); ++i) {
        ++checks;
        const auto before = defect_degree(phases[i], f.strategy);
        const auto after = defect_degree(pullback_phase(hom, phases[i]), f.strategy);
        if (after > before && failures.size() < 4)
          failures.push_back("generator #" + std::to_string(i) + " along " + name);
      }
    }
    std::string detail = std::to_string(checks) + " pullbacks checked";
    if (!failures.empty()) detail += "; raised degree: " + join_notes(failures);
    rep.axioms.push_back({"IV", failures.empty(), detail});
  }

  {
    bool ok = f.depth <= kMaxDerivativeOrder;
    std::string detail = "depth " + std::to_string(f.depth);
    switch (phase.mode) {
      case ExtractionMode::Closure:
        ok = ok && phase.closure->reached_fixpoint;
        detail += "; closure fixpoint " + std::string(phase.closure->reached_fixpoint ? "reached" : "not reached");
        break;
      case ExtractionMode::Structural:
        ok = ok && phase.structural->samples_passed;
        detail += "; structural checks " + std::string(phase.structural->samples_passed ? "passed" : "failed") + " (" +
                  std::to_string(phase.structural->samples_checked) + " samples)";
        break;
      case ExtractionMode::Weak: detail += "; family filtration"; break;
    }
    rep.axioms.push_back({"V", ok, detail});
  }
  return rep;
}

EquivalenceReport equivalence_check(const ExtractedPhase& a, const ExtractedPhase& b) {
  EquivalenceReport rep;
  if (!a.datum.space->same_as(*b.datum.space)) {
    rep.detail = "different ring or rank";
    return rep;
  }
  if (a.mode != b.mode) {
    rep.detail = "different extraction modes";
    return rep;
  }
  rep.comparable = true;
  if (a.filtration.graded_sizes() != b.filtration.graded_sizes() ||
      a.filtration.sublevel_dims() != b.filtration.sublevel_dims()) {
    rep.detail = "graded sizes differ";
    return rep;
  }
  if (a.filtration.strata != b.filtration.strata) {
    rep.detail = "key matching is not a stratum-preserving bijection";
    return rep;
  }
  if (a.structural && b.structural) {
    const auto& x = *a.structural;
    const auto& y = *b.structural;
    if (!(x.phases == y.phases) || x.translations != y.translations) {
      rep.detail = "phase spans differ";
      return rep;
    }
    for (std::size_t k = 0; k < x.sublevels.size(); ++k)
      if (!(x.sublevels[k] == y.sublevels[k])) {
        rep.detail = "level " + std::to_string(k) + " subspaces differ";
        return rep;
      }
  }
  rep.equivalent = true;
  rep.detail = a.filtration.strata.empty() ? "graded dimensions and sublevel subspaces agree"
                                           : "graded sizes agree; key matching preserves strata";
  return rep;
}

namespace {

std::vector<std::string> keys_up_to(const Filtration& f, std::size_t k) {
  std::vector<std::string> out;
  for (const auto& [key, d] : f.strata)
    if (d <= k) out.push_back(key);
  return out;
}

// Phase part of 𝒫_k as a subspace (elementary rings only).
PhaseSubspace phase_sublevel(const ExtractedPhase& phase, std::size_t k) {
  if (phase.structural) {
    const auto& subs = phase.structural->sublevels;
    return subs[std::min(k, subs.size() - 1)];
  }
  PhaseSubspace out(phase.datum.space);
  for (const auto& key : keys_up_to(phase.filtration, k)) out.insert(phase_of_key(phase, key));
  return out;
}

}  // namespace

bool tightness_check(const ExtractedPhase& base, const ExtractedPhase& ext, std::size_t depth) {
  if (!base.datum.space->same_as(*ext.datum.space)) throw DomainError("tightness: phases live on different modules");
  if (base.filtration.strategy != ext.filtration.strategy) throw DomainError("tightness: strategies differ");
  if (base.mode == ExtractionMode::Weak || ext.mode == ExtractionMode::Weak)
    throw DomainError("tightness needs operator-level phases");
  const auto& space = base.datum.space;
  for (std::size_t k = 0; k <= depth; ++k) {
    if (base.closure && ext.closure) {
      std::vector<PhaseGroupElement> gens;
      for (const auto& key : keys_up_to(base.filtration, k)) gens.push_back(PhaseGroupElement::from_key(space, key));
      ClosureOptions co;
      co.cap = base.options.cap;
      co.workers = base.options.workers;
      co.strategy = base.filtration.strategy;
      const auto sub = closure(gens, co);
      for (const auto& key : keys_up_to(ext.filtration, k))
        if (!sub.contains(key)) return false;
      continue;
    }
    const auto base_k = phase_sublevel(base, k);
    const auto generated = PhaseSubspace::translation_closure(space, base_k.basis());
    if (!generated.contains(phase_sublevel(ext, k))) return false;
  }
  return true;
}

BoundaryReport boundary_probe(const ExtractedPhase& base, const std::vector<PhaseFunction>& extra) {
  if (base.mode == ExtractionMode::Weak) throw DomainError("boundary probe needs an operator-level phase");
  BoundaryReport rep;
  rep.base_depth = base.depth;
  ExtractedPhase ext = blank_phase(base.datum, base.options, base.admissibility);
  ext.character_index = base.character_index;
  ext.generator_phases = base.generator_phases;
  ext.extra_phases = base.extra_phases;
  for (const auto& phi : extra) {
    if (!phi.domain()->same_as(*base.datum.space)) throw DomainError("extra phase lives on a different module");
    ext.extra_phases.push_back(phi);
  }
  realize_operators(ext);
  rep.extended_depth = ext.depth;
  rep.extended_mode = ext.mode;
  rep.extended_filtration = ext.filtration;

  if (base.closure && ext.closure) {
    rep.proper = ext.closure->size() > base.closure->size();
  } else {
    rep.proper = phase_sublevel(ext, ext.depth).dim() > phase_sublevel(base, base.depth).dim();
  }
  rep.tight = tightness_check(base, ext, base.depth);
  for (std::size_t k = base.depth + 1; k <= ext.depth; ++k)
    if (ext.filtration.strict_at(k)) {
      rep.new_levels.push_back(k);
      rep.witnesses[k] = *ext.filtration.levels[k].witness_key;
    }

  const auto& space = *base.datum.space;
  for (const auto& psi : extra) {
    if (safe_additive_degree(psi) != 3) continue;
    BoundaryReport::CubicCheck c;
    c.phase = phase_key(psi);
    const auto& ring = psi.ring();
    const RingIndex at_zero = psi(space.zero());
    c.first_derivatives_match_zero = true;
    for (std::uint32_t h = 0; h < space.size() && c.first_derivatives_match_zero; ++h) {
      const RingIndex v = ring.sub(psi.at(h), at_zero);
      if (v != ring.zero()) {
        c.first_derivatives_match_zero = false;
        c.first_mismatch = std::array<std::uint32_t, 2>{h, v};
      }
    }
    c.second_derivatives_match_zero = true;
    for (std::uint32_t h = 0; h < space.size() && c.second_derivatives_match_zero; ++h)
      for (std::uint32_t k = 0; k < space.size(); ++k) {
        const RingIndex v =
            ring.add(ring.sub(ring.sub(psi(space.add({h}, {k})), psi.at(h)), psi.at(k)), at_zero);
        if (v != ring.zero()) {
          c.second_derivatives_match_zero = false;
          c.second_mismatch = std::array<std::uint32_t, 3>{h, k, v};
          break;
        }
      }
    if (space.rank() >= 3) {
      const std::array<ModuleElement, 3> basis{space.basis(0), space.basis(1), space.basis(2)};
      c.tensor_at_basis = iterated_difference(psi, basis)(space.zero());
    }
    c.default_degree = defect_degree(psi, Strategy::Default);
    rep.cubic_checks.push_back(std::move(c));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Strategy comparison

StrategyComparison compare_strategies(const std::vector<PhaseFunction>& phases,
                                      const std::vector<Strategy>& strategies) {
  StrategyComparison cmp;
  cmp.strategies = strategies;
  std::map<std::string, std::pair<const PhaseFunction*, std::uint64_t>> distinct;
  for (const auto& phi : phases) {
    auto [it, fresh] = distinct.try_emplace(phase_key(phi), &phi, 0);
    ++it->second.second;
  }
  cmp.phases_compared = distinct.size();
  const auto has = [&](Strategy s) { return std::find(strategies.begin(), strategies.end(), s) != strategies.end(); };
  const bool pair = has(Strategy::Default) && has(Strategy::Commutator);
  std::map<std::string, std::vector<std::uint64_t>> sizes;
  for (Strategy s : strategies) cmp.domain_errors[std::string(strategy_name(s))] = 0;

  for (const auto& [key, entry] : distinct) {
    const auto& [phi, count] = entry;
    StrategyComparison::Divergence row;
    row.phase_key = key;
    row.additive_degree = safe_additive_degree(*phi);
    row.additive_or_constant = is_additive(*phi) || phi->is_constant();
    row.elements = count;
    std::set<std::size_t> seen;
    for (Strategy s : strategies) {
      const std::string name(strategy_name(s));
      try {
        const std::size_t d = defect_degree(*phi, s);
        row.values[name] = d;
        seen.insert(d);
        auto& v = sizes[name];
        if (v.size() <= d) v.resize(d + 1, 0);
        v[d] += count;
      } catch (const StrategyDomainError&) {
        row.values[name] = std::nullopt;
        ++cmp.domain_errors[name];
      }
    }
    if (pair) {
      const auto a = row.values.at("default");
      const auto b = row.values.at("commutator");
      if (a != b) {
        if (row.additive_degree >= 2) cmp.agree_at_degree_two_and_above = false;
        if (!row.additive_or_constant) cmp.divergences_confined = false;
      }
    }
    if (seen.size() > 1) cmp.divergences.push_back(std::move(row));
  }
  for (Strategy s : strategies) {
    const std::string name(strategy_name(s));
    cmp.graded_sizes[name] = cmp.domain_errors[name] == 0 ? sizes[name] : std::vector<std::uint64_t>{};
  }
  return cmp;
}

StrategyComparison compare_strategies(const ExtractedPhase& phase, const std::vector<Strategy>& strategies,
                                      std::size_t samples) {
  if (strategies.size() < 2) throw ConfigError("strategy comparison needs at least two strategies");
  std::vector<PhaseFunction> phases;
  if (phase.closure) {
    for (const auto& g : phase.closure->elements) phases.push_back(g.phase());
  } else if (phase.mode == ExtractionMode::Weak && !phase.filtration.strata.empty()) {
    for (const auto& [key, d] : phase.filtration.strata) phases.push_back(phase_of_key(phase, key));
  } else {
    const auto& model = *phase.structural;
    std::mt19937_64 rng(phase.options.seed + 29);
    for (const auto& sub : model.sublevels) {
      for (const auto& b : sub.basis()) phases.push_back(b);
      for (std::size_t i = 0; i < samples / model.sublevels.size() + 1; ++i) phases.push_back(sub.random_phase(rng));
    }
  }
  auto cmp = compare_strategies(phases, strategies);
  cmp.reconstruction_ok = reconstruction_mismatches(phase) == 0;
  return cmp;
}

// ---------------------------------------------------------------------------
// Minimality

bool MinimalityReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Verdict& v) { return v.pass; });
}

MinimalityReport minimality_battery(std::size_t rank, const ExtractOptions& options) {
  MinimalityReport rep;
  auto levels_text = [](const ExtractedPhase& p) {
    std::string out = "depth " + std::to_string(p.depth) + ", strict levels:";
    for (std::size_t k = 0; k < p.filtration.levels.size(); ++k)
      if (p.filtration.strict_at(k)) out += " " + std::to_string(k);
    return out;
  };
  {
    ExtractOptions o = options;
    o.strategy = Strategy::Default;
    const auto p = extract_phase(PhaseDatum::make("chain:2:2", rank, FamilySpec::degree(2)), o);
    const bool ok = p.depth == 2 && p.filtration.strict_at(0) && p.filtration.strict_at(1) && p.filtration.strict_at(2);
    rep.checks.push_back({"radical model strict three-level filtration", ok, levels_text(p)});
  }
  {
    ExtractOptions o = options;
    o.strategy = Strategy::Default;
    const auto p = extract_phase(PhaseDatum::make("chain:2:2", rank, FamilySpec::degree(1)), o);
    rep.checks.push_back({"degree-one family collapses", p.depth <= 1, levels_text(p)});
  }
  for (const char* ring : {"zmod:2", "zmod:3"}) {
    ExtractOptions o = options;
    o.strategy = Strategy::RadicalDepth;
    const auto p = extract_phase(PhaseDatum::make(ring, rank, FamilySpec::degree(2)), o);
    rep.checks.push_back({std::string("reduced ring ") + ring + " collapses under radical depth", p.depth <= 1,
                          levels_text(p)});
  }
  return rep;
}

}  // namespace phaseforge
