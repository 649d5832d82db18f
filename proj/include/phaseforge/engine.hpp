#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "phaseforge/characters.hpp"
#include "phaseforge/linear.hpp"
#include "phaseforge/phase_group.hpp"

namespace phaseforge {

/// Which phases make up Φ.
///
/// Text forms: `deg1`, `deg2`, `deg3` (every phase of that additive degree or
/// less) and `poly:<p1>;<p2>;...` (an explicit list of polynomial phases).
struct FamilySpec {
  enum class Kind { DegreeBound, Polynomials, Tables };

  Kind kind = Kind::DegreeBound;
  std::size_t degree_bound = 2;
  std::vector<PolynomialSpec> polynomials;
  /// Explicit tables; only settable programmatically.
  std::vector<PhaseFunction> tables;

  static FamilySpec degree(std::size_t d);
  static FamilySpec parse(std::string_view text);
  std::string to_string() const;
};

struct PhaseDatum {
  RingSpec ring_spec;
  RingPtr ring;
  SpacePtr space;
  FamilySpec family;
  /// Canonical index of the character to realize operators with; empty means
  /// the least generating one.
  std::optional<std::size_t> character_index;

  /// Throws ConfigError / ConstructionError for malformed input.
  static PhaseDatum make(std::string_view ring_spec, std::size_t rank, FamilySpec family,
                         std::optional<std::size_t> character_index = std::nullopt);
};

/// Φ made concrete: either an F_p-subspace, an explicit member list, or both.
struct RealizedFamily {
  std::optional<PhaseSubspace> subspace;
  std::vector<PhaseFunction> members;
  bool enumerated = false;
  /// Members, or the subspace basis when the members are not listed.
  const std::vector<PhaseFunction>& generators() const { return enumerated ? members : basis; }
  std::vector<PhaseFunction> basis;
};

/// Throws CapacityError when Φ can be neither enumerated nor described linearly.
RealizedFamily realize_family(const PhaseDatum& datum);

/// Endomorphisms of A used to probe pullback closure: identity, zero,
/// coordinate swaps and shears, then `random_count` seeded random matrices.
struct NamedHom {
  std::string name;
  ModuleHom hom;
};
std::vector<NamedHom> hom_battery(const SpacePtr& space, std::uint64_t seed, std::size_t random_count = 8);

struct AdmissibilityReport {
  bool pullback_closed = false;  // W1
  bool degree_bounded = false;   // W2
  bool interaction_closed = false;  // W3
  bool weak = false;
  bool strong = false;
  std::size_t degree_bound = 0;
  std::size_t homs_checked = 0;
  std::size_t interaction_checks = 0;
  bool frobenius = false;
  std::optional<std::size_t> character_index;
  /// Human-readable witnesses and counterexamples, one per entry.
  std::vector<std::string> notes;
};

AdmissibilityReport check_admissibility(const PhaseDatum& datum, std::uint64_t seed = 0);

struct ExtractOptions {
  Strategy strategy = Strategy::Default;
  std::size_t cap = 1'000'000;
  unsigned workers = 1;
  std::uint64_t seed = 0;
  /// Filtration on Φ alone, without operators; needs only weak admissibility.
  bool weak_mode = false;
  /// Shuffle the generator list with this seed before use.
  std::optional<std::uint64_t> shuffle_seed;
  /// Random composition samples used to confirm closure in structural mode.
  std::size_t structural_samples = 64;
  /// Reuse closure key files from this directory when set.
  std::optional<std::filesystem::path> cache_dir;
};

enum class ExtractionMode { Closure, Structural, Weak };
std::string_view mode_name(ExtractionMode m);

struct FiltrationLevel {
  std::size_t level = 0;
  /// Exact counts; absent when they do not fit 64 bits.
  std::optional<std::uint64_t> graded_size;
  std::optional<std::uint64_t> sublevel_size;
  /// Structural and linear weak filtrations: F_p-dimension of the phase part of 𝒫_k.
  std::optional<std::size_t> sublevel_dim;
  /// Canonical key of an element in 𝒫_k \ 𝒫_{k-1}, if the level is strict.
  std::optional<std::string> witness_key;
};

struct Filtration {
  Strategy strategy = Strategy::Default;
  std::size_t depth = 0;
  std::vector<FiltrationLevel> levels;
  /// Element key -> degree; filled when the elements were enumerated.
  std::map<std::string, std::size_t> strata;
  std::uint64_t total = 0;
  bool total_exact = true;

  std::vector<std::uint64_t> graded_sizes() const;
  std::vector<std::size_t> sublevel_dims() const;
  bool strict_at(std::size_t k) const { return k < levels.size() && levels[k].witness_key.has_value(); }
};

/// Sublevel filtration of an enumerated element set. 𝒫_{-1} is taken to be
/// {identity} so the level-0 witness is a nontrivial element when one exists.
/// Throws StrategyDomainError if the strategy cannot evaluate some element.
Filtration compute_filtration(const std::vector<PhaseGroupElement>& elements, Strategy strategy);

/// The phase part U of the closure together with its sublevel subspaces.
struct StructuralModel {
  PhaseSubspace phases;
  std::vector<PhaseSubspace> sublevels;
  std::uint64_t translations = 0;
  std::size_t samples_checked = 0;
  bool samples_passed = false;
  std::size_t max_phase_degree = 0;
  std::vector<std::string> failures;
};

/// {ψ ∈ U : deg_s ψ ≤ k} as a subspace. Throws StrategyDomainError for the
/// literal strategy, whose sublevel sets are not subgroups.
PhaseSubspace sublevel_subspace(const PhaseSubspace& u, Strategy strategy, std::size_t k);

struct ExtractedPhase {
  PhaseDatum datum;
  ExtractOptions options;
  AdmissibilityReport admissibility;
  ExtractionMode mode = ExtractionMode::Closure;
  std::vector<PhaseGroupElement> generators;
  /// Phases of the multiplication generators, before any shuffling.
  std::vector<PhaseFunction> generator_phases;
  /// Phases adjoined beyond Φ (boundary extensions).
  std::vector<PhaseFunction> extra_phases;
  std::optional<ClosureResult> closure;
  std::optional<StructuralModel> structural;
  /// Weak mode: Φ members or basis, and the linear span when available.
  std::vector<PhaseFunction> family_phases;
  Filtration filtration;
  std::size_t depth = 0;
  std::optional<std::size_t> character_index;
  /// log2 of |U|·|A| before choosing the mode.
  double predicted_log2_size = 0;
  bool cache_hit = false;
};

/// Throws AdmissibilityError if the datum is not (strongly, unless weak_mode)
/// admissible, CapacityError if neither enumeration nor the linear model applies.
ExtractedPhase extract_phase(const PhaseDatum& datum, const ExtractOptions& options);

struct Verdict {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct AxiomReport {
  std::vector<Verdict> axioms;  // I..V in order
  bool all_pass() const;
};

AxiomReport verify_axioms(const ExtractedPhase& phase);

struct EquivalenceReport {
  bool comparable = false;
  bool equivalent = false;
  std::string detail;
};

EquivalenceReport equivalence_check(const ExtractedPhase& a, const ExtractedPhase& b);

/// For each k ≤ depth, the level-≤k part of `ext` lies in the closure of the
/// level-≤k part of `base`. Throws DomainError for incompatible phases.
bool tightness_check(const ExtractedPhase& base, const ExtractedPhase& ext, std::size_t depth);

struct BoundaryReport {
  bool proper = false;
  bool tight = false;
  std::size_t base_depth = 0;
  std::size_t extended_depth = 0;
  std::vector<std::size_t> new_levels;
  /// Per new level, one witness key.
  std::map<std::size_t, std::string> witnesses;
  /// For each extra generator phase of additive degree 3.
  struct CubicCheck {
    std::string phase;
    bool first_derivatives_match_zero = false;
    bool second_derivatives_match_zero = false;
    std::optional<std::array<std::uint32_t, 2>> first_mismatch;  // (h, value)
    std::optional<std::array<std::uint32_t, 3>> second_mismatch;  // (h, k, value)
    std::optional<RingIndex> tensor_at_basis;  // T(e1,e2,e3)
    std::size_t default_degree = 0;
  };
  std::vector<CubicCheck> cubic_checks;
  ExtractionMode extended_mode = ExtractionMode::Closure;
  Filtration extended_filtration;
};

/// Extends `base` by multiplication operators for `extra` and compares.
BoundaryReport boundary_probe(const ExtractedPhase& base, const std::vector<PhaseFunction>& extra);

struct StrategyComparison {
  std::vector<Strategy> strategies;
  /// Per strategy, graded sizes over the compared elements (empty on a domain error).
  std::map<std::string, std::vector<std::uint64_t>> graded_sizes;
  std::map<std::string, std::size_t> domain_errors;
  struct Divergence {
    std::string phase_key;  // phase table bytes
    std::size_t additive_degree = 0;
    bool additive_or_constant = false;
    std::map<std::string, std::optional<std::size_t>> values;
    std::uint64_t elements = 0;
  };
  std::vector<Divergence> divergences;
  std::size_t phases_compared = 0;
  bool agree_at_degree_two_and_above = true;
  bool divergences_confined = true;
  /// Filtrations rebuilt from the degree function matched the stored strata.
  bool reconstruction_ok = true;
};

/// Compares strategies over the phase parts of the closure (or of Φ in weak
/// mode, or of random members of U in structural mode).
StrategyComparison compare_strategies(const ExtractedPhase& phase, const std::vector<Strategy>& strategies,
                                      std::size_t samples = 256);
/// Same comparison over an explicit phase list.
StrategyComparison compare_strategies(const std::vector<PhaseFunction>& phases,
                                      const std::vector<Strategy>& strategies);

struct MinimalityReport {
  std::vector<Verdict> checks;
  bool all_pass() const;
};

/// Strict three-level filtration of the radical quadratic model and collapse
/// of its degree-one and reduced-ring variants.
MinimalityReport minimality_battery(std::size_t rank, const ExtractOptions& options);

/// Hex rendering of a key, for reports.
std::string hex_key(std::string_view key);

}  // namespace phaseforge
