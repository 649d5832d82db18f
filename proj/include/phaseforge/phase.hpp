#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "phaseforge/module.hpp"

namespace phaseforge {

/// A phase φ: A -> R stored as a dense table in packed-index order.
class PhaseFunction {
 public:
  /// Throws DomainError if the table has the wrong length or invalid entries,
  /// CapacityError if the domain is not enumerable.
  PhaseFunction(SpacePtr domain, std::vector<RingIndex> table);

  static PhaseFunction zero(const SpacePtr& domain);
  static PhaseFunction constant(const SpacePtr& domain, RingIndex value);
  template <typename Fn>
  static PhaseFunction tabulate(const SpacePtr& domain, Fn&& fn) {
    domain->require_enumerable("phase table");
    std::vector<RingIndex> table(domain->size());
    for (std::uint32_t x = 0; x < table.size(); ++x) table[x] = fn(ModuleElement{x});
    return PhaseFunction(domain, std::move(table));
  }

  const SpacePtr& domain() const { return domain_; }
  const FiniteRing& ring() const { return *domain_->ring(); }
  const std::vector<RingIndex>& table() const { return table_; }
  std::size_t size() const { return table_.size(); }
  RingIndex operator()(ModuleElement x) const { return table_[x.packed]; }
  RingIndex at(std::uint32_t x) const { return table_[x]; }

  /// x ↦ φ(x + a).
  PhaseFunction translated(ModuleElement a) const;
  bool is_constant() const;
  bool is_zero() const;

  PhaseFunction operator+(const PhaseFunction& other) const;
  PhaseFunction operator-(const PhaseFunction& other) const;
  PhaseFunction operator-() const;

  friend bool operator==(const PhaseFunction& a, const PhaseFunction& b) {
    return a.domain_->same_as(*b.domain_) && a.table_ == b.table_;
  }

 private:
  void require_same_domain(const PhaseFunction& other) const;

  SpacePtr domain_;
  std::vector<RingIndex> table_;
};

/// f*(φ') = φ' ∘ f. Throws DomainError unless φ' lives on f's target.
PhaseFunction pullback_phase(const ModuleHom& f, const PhaseFunction& target_phase);

/// One term coefficient·x_{i1}·…·x_{ik}; positions are 0-based.
struct Monomial {
  std::vector<std::size_t> positions;
  /// Ring element index; empty means the ring's identity.
  std::optional<RingIndex> coefficient;
  friend bool operator==(const Monomial&, const Monomial&) = default;
};

/// Polynomial constructor for phases, e.g. "2*x1x2" or "x1x2x3+1".
///
/// Grammar: terms joined by '+'; a term is `[<ring index>*]x<i>x<j>...` or a
/// bare ring index (constant). Positions are 1-based in text.
struct PolynomialSpec {
  std::vector<Monomial> terms;

  static constexpr std::size_t kMaxMonomialSize = 3;

  static PolynomialSpec parse(std::string_view text);
  std::string to_string() const;
  std::size_t degree() const;
  friend bool operator==(const PolynomialSpec&, const PolynomialSpec&) = default;
};

/// Evaluates the polynomial at every point. Throws DomainError if a position
/// exceeds the rank or a coefficient is not a ring element.
PhaseFunction phase_from_poly(const PolynomialSpec& spec, const SpacePtr& domain);

enum class DifferenceMethod { Recursive, AlternatingSum };

inline constexpr std::size_t kMaxDerivativeOrder = 6;

/// (Δ_h φ)(x) = φ(x+h) − φ(x).
PhaseFunction difference(const PhaseFunction& phi, ModuleElement h);

/// Δ_{h1..hk} φ, either by iterating Δ or by the signed sum over {0,1}^k.
/// Throws CapacityError when more than kMaxDerivativeOrder increments are given.
PhaseFunction iterated_difference(const PhaseFunction& phi, std::span<const ModuleElement> hs,
                                  DifferenceMethod method = DifferenceMethod::Recursive);

/// Least d with every (d+1)-fold derivative identically zero. Increments are
/// drawn from the additive generators of A, which detect the same degree.
/// Throws CapacityError if the degree exceeds kMaxDerivativeOrder.
std::size_t additive_degree(const PhaseFunction& phi);

/// Same quantity by scanning every tuple of A. Throws CapacityError when
/// |A|^(d+2) would exceed `budget` before the degree is settled.
std::size_t additive_degree_exhaustive(const PhaseFunction& phi,
                                       std::uint64_t budget = std::uint64_t{1} << 26);

bool is_additive(const PhaseFunction& phi);

/// Polarization B(x,y) = φ(x+y) − φ(x) − φ(y) + φ(0) = Δ_{x,y}φ(0).
struct Polarization {
  std::size_t size = 0;
  std::vector<RingIndex> values;
  bool symmetric = false;
  bool biadditive = false;
  /// First (x, x', y) breaking additivity in the first slot, when not biadditive.
  std::optional<std::array<std::uint32_t, 3>> failure;

  RingIndex operator()(ModuleElement x, ModuleElement y) const { return values[x.packed * size + y.packed]; }
  bool is_zero() const;
};

/// Full |A|×|A| table with exhaustive biadditivity check; |A| ≤ 256.
Polarization polarization(const PhaseFunction& phi);

enum class Strategy { Default, Literal, Commutator, RadicalDepth };

std::string_view strategy_name(Strategy s);
/// Throws ConfigError for unknown names.
Strategy parse_strategy(std::string_view name);
const std::vector<Strategy>& all_strategies();

/// Defect degree under the named strategy:
///   default       0 if additive, else max(1, additive degree)
///   literal       0 if additive, else least k ≥ 1 with a nonzero k-fold derivative (0 if none)
///   commutator    least k with every k-fold translation commutator of M_φ scalar
///   radical-depth 0 if B ≡ 0, else L − s where L is the nilpotency length of
///                 rad(R) and s the deepest radical power containing all values of B
/// Throws StrategyDomainError for radical-depth on phases of degree > 2.
std::size_t defect_degree(const PhaseFunction& phi, Strategy strategy);

/// Values Δ_{h1..hk}φ(0) for every k-tuple, indexed by h1 + |A|·h2 + ….
struct DefectTensor {
  std::size_t order = 0;
  std::uint64_t space_size = 0;
  std::vector<RingIndex> values;

  RingIndex at(std::span<const ModuleElement> hs) const;
  bool is_zero() const;
};

/// Throws CapacityError when |A|^order exceeds 2^22 entries.
DefectTensor derivative_tensor(const PhaseFunction& phi, std::size_t order);

struct DefectProfile {
  std::size_t additive_degree = 0;
  bool is_additive = false;
  Strategy strategy = Strategy::Default;
  /// Empty entries mark strategy-domain errors.
  std::map<std::string, std::optional<std::size_t>> defect_degree_by_strategy;
  std::size_t tensor_order = 0;
  DefectTensor tensor;
  /// Present when additive degree ≤ 2 and |A| ≤ 256.
  std::optional<Polarization> polarization;
};

/// Throws StrategyDomainError if `strategy` itself cannot evaluate φ.
DefectProfile defect_tensor(const PhaseFunction& phi, Strategy strategy);

}  // namespace phaseforge
