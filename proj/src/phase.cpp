#include "phaseforge/phase.hpp"

#include <algorithm>
#include <charconv>
#include <functional>

#include "phaseforge/errors.hpp"
#include "phaseforge/phase_group.hpp"

namespace phaseforge {

PhaseFunction::PhaseFunction(SpacePtr domain, std::vector<RingIndex> table)
    : domain_(std::move(domain)), table_(std::move(table)) {
  domain_->require_enumerable("phase table");
  if (table_.size() != domain_->size())
    throw DomainError("phase table length " + std::to_string(table_.size()) +
                      " does not match module size " + std::to_string(domain_->size()));
  const std::size_t order = domain_->ring()->order();
  for (RingIndex v : table_)
    if (v >= order) throw DomainError("phase table entry is not a ring element");
}

PhaseFunction PhaseFunction::zero(const SpacePtr& domain) {
  return constant(domain, domain->ring()->zero());
}

PhaseFunction PhaseFunction::constant(const SpacePtr& domain, RingIndex value) {
  domain->require_enumerable("phase table");
  return PhaseFunction(domain, std::vector<RingIndex>(domain->size(), value));
}

PhaseFunction PhaseFunction::translated(ModuleElement a) const {
  const auto& space = *domain_;
  std::vector<RingIndex> out(table_.size());
  for (std::uint32_t x = 0; x < out.size(); ++x) out[x] = table_[space.add({x}, a).packed];
  return PhaseFunction(domain_, std::move(out));
}

bool PhaseFunction::is_constant() const {
  return std::all_of(table_.begin(), table_.end(), [&](RingIndex v) { return v == table_[0]; });
}

bool PhaseFunction::is_zero() const {
  const RingIndex z = ring().zero();
  return std::all_of(table_.begin(), table_.end(), [z](RingIndex v) { return v == z; });
}

void PhaseFunction::require_same_domain(const PhaseFunction& other) const {
  if (!domain_->same_as(*other.domain_)) throw DomainError("phases live on different modules");
}

PhaseFunction PhaseFunction::operator+(const PhaseFunction& other) const {
  require_same_domain(other);
  std::vector<RingIndex> out(table_.size());
  for (std::size_t x = 0; x < out.size(); ++x) out[x] = ring().add(table_[x], other.table_[x]);
  return PhaseFunction(domain_, std::move(out));
}

PhaseFunction PhaseFunction::operator-(const PhaseFunction& other) const {
  require_same_domain(other);
  std::vector<RingIndex> out(table_.size());
  for (std::size_t x = 0; x < out.size(); ++x) out[x] = ring().sub(table_[x], other.table_[x]);
  return PhaseFunction(domain_, std::move(out));
}

PhaseFunction PhaseFunction::operator-() const {
  std::vector<RingIndex> out(table_.size());
  for (std::size_t x = 0; x < out.size(); ++x) out[x] = ring().neg(table_[x]);
  return PhaseFunction(domain_, std::move(out));
}

PhaseFunction pullback_phase(const ModuleHom& f, const PhaseFunction& target_phase) {
  if (!target_phase.domain()->same_as(*f.target()))
    throw DomainError("pullback: phase does not live on the target of the hom");
  return PhaseFunction::tabulate(f.source(), [&](ModuleElement x) { return target_phase(f.apply(x)); });
}

// ---------------------------------------------------------------------------
// Polynomial specs

PolynomialSpec PolynomialSpec::parse(std::string_view text) {
  PolynomialSpec spec;
  auto read_number = [](std::string_view& s, std::string_view what) {
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr == s.data())
      throw ConfigError("polynomial: expected " + std::string(what) + " in '" + std::string(s) + "'");
    s.remove_prefix(static_cast<std::size_t>(ptr - s.data()));
    return value;
  };
  std::string cleaned;
  for (char c : text)
    if (c != ' ') cleaned.push_back(c);
  if (cleaned.empty()) throw ConfigError("polynomial: empty text");
  std::string_view rest = cleaned;
  for (bool more = true; more;) {
    const auto plus = rest.find('+');
    std::string_view term = rest.substr(0, plus);
    more = plus != std::string_view::npos;
    if (more) rest.remove_prefix(plus + 1);
    if (term.empty()) throw ConfigError("polynomial: empty term");
    Monomial mono;
    if (term.front() != 'x') {
      const std::size_t c = read_number(term, "coefficient");
      if (c > 255) throw ConfigError("polynomial: coefficient index exceeds 255");
      mono.coefficient = static_cast<RingIndex>(c);
      if (!term.empty()) {
        if (term.front() != '*') throw ConfigError("polynomial: expected '*' after coefficient");
        term.remove_prefix(1);
        if (term.empty()) throw ConfigError("polynomial: dangling '*'");
      }
    }
    while (!term.empty()) {
      if (term.front() != 'x') throw ConfigError("polynomial: expected variable x<i>");
      term.remove_prefix(1);
      const std::size_t pos = read_number(term, "variable index");
      if (pos == 0) throw ConfigError("polynomial: variables are numbered from x1");
      mono.positions.push_back(pos - 1);
    }
    if (mono.positions.size() > kMaxMonomialSize)
      throw ConfigError("polynomial: monomials are limited to degree 3");
    spec.terms.push_back(std::move(mono));
  }
  return spec;
}

std::string PolynomialSpec::to_string() const {
  std::string out;
  for (const auto& term : terms) {
    if (!out.empty()) out += '+';
    if (term.coefficient) {
      out += std::to_string(*term.coefficient);
      if (!term.positions.empty()) out += '*';
    } else if (term.positions.empty()) {
      out += "1";
    }
    for (std::size_t p : term.positions) out += "x" + std::to_string(p + 1);
  }
  return out;
}

std::size_t PolynomialSpec::degree() const {
  std::size_t d = 0;
  for (const auto& t : terms) d = std::max(d, t.positions.size());
  return d;
}

PhaseFunction phase_from_poly(const PolynomialSpec& spec, const SpacePtr& domain) {
  const auto& ring = *domain->ring();
  for (const auto& t : spec.terms) {
    if (t.coefficient && *t.coefficient >= ring.order())
      throw DomainError("polynomial coefficient " + std::to_string(*t.coefficient) +
                        " is not an element of " + ring.name());
    for (std::size_t p : t.positions)
      if (p >= domain->rank())
        throw DomainError("polynomial variable x" + std::to_string(p + 1) + " exceeds rank " +
                          std::to_string(domain->rank()));
  }
  return PhaseFunction::tabulate(domain, [&](ModuleElement x) {
    RingIndex total = ring.zero();
    for (const auto& t : spec.terms) {
      RingIndex value = t.coefficient.value_or(ring.one());
      for (std::size_t p : t.positions) value = ring.mul(value, domain->coord(x, p));
      total = ring.add(total, value);
    }
    return total;
  });
}

// ---------------------------------------------------------------------------
// Difference calculus

PhaseFunction difference(const PhaseFunction& phi, ModuleElement h) {
  const auto& space = *phi.domain();
  if (!space.contains(h)) throw DomainError("increment outside the phase domain");
  const auto& ring = phi.ring();
  std::vector<RingIndex> out(phi.size());
  for (std::uint32_t x = 0; x < out.size(); ++x)
    out[x] = ring.sub(phi.at(space.add({x}, h).packed), phi.at(x));
  return PhaseFunction(phi.domain(), std::move(out));
}

PhaseFunction iterated_difference(const PhaseFunction& phi, std::span<const ModuleElement> hs,
                                  DifferenceMethod method) {
  if (hs.size() > kMaxDerivativeOrder)
    throw CapacityError("derivative order " + std::to_string(hs.size()) + " exceeds the cap of " +
                        std::to_string(kMaxDerivativeOrder));
  const auto& space = *phi.domain();
  for (auto h : hs)
    if (!space.contains(h)) throw DomainError("increment outside the phase domain");

  if (method == DifferenceMethod::Recursive) {
    PhaseFunction current = phi;
    for (auto h : hs) current = difference(current, h);
    return current;
  }

  // Σ_{ε∈{0,1}^k} (−1)^{k−|ε|} φ(x + Σ ε_i h_i)
  const std::size_t k = hs.size();
  const std::size_t subsets = std::size_t{1} << k;
  std::vector<ModuleElement> offset(subsets, space.zero());
  std::vector<bool> negative(subsets);
  for (std::size_t mask = 0; mask < subsets; ++mask) {
    std::size_t weight = 0;
    for (std::size_t i = 0; i < k; ++i)
      if (mask >> i & 1U) {
        offset[mask] = space.add(offset[mask], hs[i]);
        ++weight;
      }
    negative[mask] = (k - weight) % 2 == 1;
  }
  const auto& ring = phi.ring();
  std::vector<RingIndex> out(phi.size());
  for (std::uint32_t x = 0; x < out.size(); ++x) {
    RingIndex acc = ring.zero();
    for (std::size_t mask = 0; mask < subsets; ++mask) {
      const RingIndex v = phi.at(space.add({x}, offset[mask]).packed);
      acc = negative[mask] ? ring.sub(acc, v) : ring.add(acc, v);
    }
    out[x] = acc;
  }
  return PhaseFunction(phi.domain(), std::move(out));
}

namespace {

// Visits Δ_{g_{i1}..g_{ik}}φ for every nondecreasing index tuple of length
// `depth` over `gens`. Stops early when `visit` returns false; returns
// whether every visit returned true.
bool visit_multiset_derivatives(const PhaseFunction& phi, const std::vector<ModuleElement>& gens,
                                std::size_t depth,
                                const std::function<bool(const PhaseFunction&)>& visit) {
  std::function<bool(const PhaseFunction&, std::size_t, std::size_t)> walk =
      [&](const PhaseFunction& current, std::size_t level, std::size_t start) {
        if (level == depth) return visit(current);
        for (std::size_t i = start; i < gens.size(); ++i)
          if (!walk(difference(current, gens[i]), level + 1, i)) return false;
        return true;
      };
  return walk(phi, 0, 0);
}

}  // namespace

std::size_t additive_degree(const PhaseFunction& phi) {
  if (phi.is_constant()) return 0;
  const auto gens = phi.domain()->additive_generators();
  for (std::size_t d = 1; d <= kMaxDerivativeOrder; ++d) {
    const bool all_constant = visit_multiset_derivatives(
        phi, gens, d, [](const PhaseFunction& t) { return t.is_constant(); });
    if (all_constant) return d;
  }
  throw CapacityError("additive degree exceeds the derivative-order cap of " +
                      std::to_string(kMaxDerivativeOrder) + " on " + phi.ring().name());
}

std::size_t additive_degree_exhaustive(const PhaseFunction& phi, std::uint64_t budget) {
  const std::uint64_t n = phi.size();
  for (std::size_t d = 0; d <= kMaxDerivativeOrder; ++d) {
    std::uint64_t cost = n;
    for (std::size_t i = 0; i < d + 1; ++i) {
      cost *= n;
      if (cost > budget)
        throw CapacityError("exhaustive degree scan exceeds budget; use the generator-based scan");
    }
    // Every ordered (d+1)-tuple of increments must annihilate φ.
    std::function<bool(const PhaseFunction&, std::size_t)> all_vanish =
        [&](const PhaseFunction& current, std::size_t level) {
          if (level == d + 1) return current.is_zero();
          for (std::uint32_t h = 0; h < n; ++h)
            if (!all_vanish(difference(current, {h}), level + 1)) return false;
          return true;
        };
    if (all_vanish(phi, 0)) return d;
  }
  throw CapacityError("additive degree exceeds the derivative-order cap");
}

bool is_additive(const PhaseFunction& phi) {
  const auto& space = *phi.domain();
  const auto& ring = phi.ring();
  if (phi.at(0) != ring.zero()) return false;
  if (phi.size() <= 4096) {
    for (std::uint32_t x = 0; x < phi.size(); ++x)
      for (std::uint32_t y = x; y < phi.size(); ++y)
        if (phi.at(space.add({x}, {y}).packed) != ring.add(phi.at(x), phi.at(y))) return false;
    return true;
  }
  for (auto g : space.additive_generators())
    for (std::uint32_t x = 0; x < phi.size(); ++x)
      if (phi.at(space.add({x}, g).packed) != ring.add(phi.at(x), phi(g))) return false;
  return true;
}

bool Polarization::is_zero() const {
  return std::all_of(values.begin(), values.end(), [](RingIndex v) { return v == 0; });
}

Polarization polarization(const PhaseFunction& phi) {
  const std::size_t n = phi.size();
  if (n > 256)
    throw CapacityError("polarization table limited to modules of at most 256 elements");
  const auto& space = *phi.domain();
  const auto& ring = phi.ring();
  Polarization b;
  b.size = n;
  b.values.resize(n * n);
  for (std::uint32_t x = 0; x < n; ++x)
    for (std::uint32_t y = 0; y < n; ++y)
      b.values[x * n + y] = ring.add(
          ring.sub(ring.sub(phi.at(space.add({x}, {y}).packed), phi.at(x)), phi.at(y)), phi.at(0));
  b.symmetric = true;
  for (std::size_t x = 0; x < n && b.symmetric; ++x)
    for (std::size_t y = 0; y < n && b.symmetric; ++y)
      b.symmetric = b.values[x * n + y] == b.values[y * n + x];
  b.biadditive = true;
  for (std::uint32_t x = 0; x < n && b.biadditive; ++x)
    for (std::uint32_t x2 = 0; x2 < n && b.biadditive; ++x2) {
      const std::uint32_t sum = space.add({x}, {x2}).packed;
      for (std::uint32_t y = 0; y < n; ++y) {
        const bool left = b.values[sum * n + y] == ring.add(b.values[x * n + y], b.values[x2 * n + y]);
        const bool right = b.values[y * n + sum] == ring.add(b.values[y * n + x], b.values[y * n + x2]);
        if (!left || !right) {
          b.biadditive = false;
          b.failure = std::array<std::uint32_t, 3>{x, x2, y};
          break;
        }
      }
    }
  return b;
}

// ---------------------------------------------------------------------------
// Strategies

std::string_view strategy_name(Strategy s) {
  switch (s) {
    case Strategy::Default: return "default";
    case Strategy::Literal: return "literal";
    case Strategy::Commutator: return "commutator";
    case Strategy::RadicalDepth: return "radical-depth";
  }
  return "unknown";
}

Strategy parse_strategy(std::string_view name) {
  for (Strategy s : all_strategies())
    if (strategy_name(s) == name) return s;
  throw ConfigError("unknown defect strategy '" + std::string(name) + "'");
}

const std::vector<Strategy>& all_strategies() {
  static const std::vector<Strategy> kAll{Strategy::Default, Strategy::Literal, Strategy::Commutator,
                                          Strategy::RadicalDepth};
  return kAll;
}

namespace {

std::size_t literal_degree(const PhaseFunction& phi) {
  if (is_additive(phi)) return 0;
  const auto gens = phi.domain()->additive_generators();
  for (std::size_t k = 1; k <= kMaxDerivativeOrder; ++k) {
    const bool all_zero =
        visit_multiset_derivatives(phi, gens, k, [](const PhaseFunction& t) { return t.is_zero(); });
    if (!all_zero) return k;
    // Vanishing k-fold derivatives force every higher one to vanish as well.
    if (k == 1) return 0;
  }
  return 0;
}

std::size_t radical_depth(const PhaseFunction& phi) {
  if (additive_degree(phi) > 2)
    throw StrategyDomainError("radical-depth strategy is defined only for phases of degree <= 2");
  const auto& space = *phi.domain();
  const auto& ring = phi.ring();
  const std::size_t chain_length = ring.nilpotency_length();
  std::size_t deepest = chain_length;  // radical level shared by every value of B
  auto visit = [&](ModuleElement x, ModuleElement y) {
    const RingIndex v = ring.add(
        ring.sub(ring.sub(phi(space.add(x, y)), phi(x)), phi(y)), phi(space.zero()));
    deepest = std::min(deepest, ring.radical_level(v));
  };
  if (phi.size() <= 4096) {
    for (std::uint32_t x = 0; x < phi.size(); ++x)
      for (std::uint32_t y = 0; y < phi.size(); ++y) visit({x}, {y});
  } else {
    // B is biadditive here, so generator pairs reach every radical level it meets.
    const auto gens = space.additive_generators();
    for (auto x : gens)
      for (auto y : gens) visit(x, y);
  }
  if (deepest == chain_length) return 0;
  return chain_length - deepest;
}

}  // namespace

std::size_t defect_degree(const PhaseFunction& phi, Strategy strategy) {
  switch (strategy) {
    case Strategy::Default:
      return is_additive(phi) ? 0 : std::max<std::size_t>(1, additive_degree(phi));
    case Strategy::Literal: return literal_degree(phi);
    case Strategy::Commutator: return commutator_degree(phi);
    case Strategy::RadicalDepth: return radical_depth(phi);
  }
  throw ConfigError("unknown defect strategy");
}

RingIndex DefectTensor::at(std::span<const ModuleElement> hs) const {
  if (hs.size() != order) throw DomainError("defect tensor index has the wrong arity");
  std::uint64_t index = 0;
  for (std::size_t i = hs.size(); i-- > 0;) index = index * space_size + hs[i].packed;
  return values.at(index);
}

bool DefectTensor::is_zero() const {
  return std::all_of(values.begin(), values.end(), [](RingIndex v) { return v == 0; });
}

DefectTensor derivative_tensor(const PhaseFunction& phi, std::size_t order) {
  DefectTensor tensor;
  tensor.order = order;
  tensor.space_size = phi.size();
  if (order == 0) return tensor;
  if (order > kMaxDerivativeOrder) throw CapacityError("defect tensor order exceeds the cap");
  std::uint64_t entries = 1;
  for (std::size_t i = 0; i < order; ++i) {
    entries *= phi.size();
    if (entries > (std::uint64_t{1} << 22))
      throw CapacityError("defect tensor exceeds 2^22 entries");
  }
  const auto& space = *phi.domain();
  const auto& ring = phi.ring();
  tensor.values.resize(entries);
  const std::size_t subsets = std::size_t{1} << order;
  std::vector<ModuleElement> hs(order);
  for (std::uint64_t index = 0; index < entries; ++index) {
    std::uint64_t rest = index;
    for (std::size_t i = 0; i < order; ++i) {
      hs[i] = {static_cast<std::uint32_t>(rest % phi.size())};
      rest /= phi.size();
    }
    RingIndex acc = ring.zero();
    for (std::size_t mask = 0; mask < subsets; ++mask) {
      ModuleElement point = space.zero();
      std::size_t weight = 0;
      for (std::size_t i = 0; i < order; ++i)
        if (mask >> i & 1U) {
          point = space.add(point, hs[i]);
          ++weight;
        }
      acc = (order - weight) % 2 == 1 ? ring.sub(acc, phi(point)) : ring.add(acc, phi(point));
    }
    tensor.values[index] = acc;
  }
  return tensor;
}

DefectProfile defect_tensor(const PhaseFunction& phi, Strategy strategy) {
  DefectProfile profile;
  profile.strategy = strategy;
  profile.additive_degree = additive_degree(phi);
  profile.is_additive = is_additive(phi);
  for (Strategy s : all_strategies()) {
    try {
      profile.defect_degree_by_strategy[std::string(strategy_name(s))] = defect_degree(phi, s);
    } catch (const StrategyDomainError&) {
      profile.defect_degree_by_strategy[std::string(strategy_name(s))] = std::nullopt;
    }
  }
  const auto chosen = profile.defect_degree_by_strategy.at(std::string(strategy_name(strategy)));
  if (!chosen)
    throw StrategyDomainError(std::string(strategy_name(strategy)) +
                              " strategy cannot evaluate a phase of additive degree " +
                              std::to_string(profile.additive_degree));
  profile.tensor_order = *chosen;
  profile.tensor = derivative_tensor(phi, profile.tensor_order);
  if (profile.additive_degree <= 2 && phi.size() <= 256) profile.polarization = polarization(phi);
  return profile;
}

}  // namespace phaseforge
