#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "phaseforge/characters.hpp"
#include "phaseforge/phase.hpp"

namespace phaseforge {

/// The operator M_ψ T_a, i.e. f ↦ χ(ψ(x))·f(x+a), held symbolically as (ψ, a).
class PhaseGroupElement {
 public:
  PhaseGroupElement(PhaseFunction psi, ModuleElement shift);

  static PhaseGroupElement identity(const SpacePtr& space);
  static PhaseGroupElement translation(const SpacePtr& space, ModuleElement a);
  static PhaseGroupElement multiplication(PhaseFunction psi);

  const PhaseFunction& phase() const { return psi_; }
  ModuleElement shift() const { return shift_; }
  const SpacePtr& domain() const { return psi_.domain(); }

  /// Canonical key: the phase table bytes followed by the shift (4 bytes, little endian).
  std::string key() const;
  static PhaseGroupElement from_key(const SpacePtr& space, std::string_view key);

  /// Constant phase and zero shift: a scalar multiple of the identity.
  bool is_scalar() const { return shift_.packed == 0 && psi_.is_constant(); }
  bool is_translation() const { return psi_.is_zero(); }

  friend bool operator==(const PhaseGroupElement& a, const PhaseGroupElement& b) {
    return a.shift_ == b.shift_ && a.psi_ == b.psi_;
  }

 private:
  PhaseFunction psi_;
  ModuleElement shift_;
};

/// (ψ1,a1)∘(ψ2,a2) = (ψ1 + ψ2∘τ_{a1}, a1 + a2). Throws DomainError on mismatched domains.
PhaseGroupElement compose(const PhaseGroupElement& g1, const PhaseGroupElement& g2);

/// (ψ,a)^{-1} = (−ψ∘τ_{−a}, −a).
PhaseGroupElement invert(const PhaseGroupElement& g);

/// [g, T_h] = g∘T_h∘g^{-1}∘T_h^{-1}, which equals (−Δ_h ψ, 0).
PhaseGroupElement translation_commutator(const PhaseGroupElement& g, ModuleElement h);

/// Least k such that every k-fold translation commutator of M_ψ is scalar,
/// computed through the operator side. Throws CapacityError past order 6.
std::size_t commutator_degree(const PhaseFunction& psi);

struct ClosureOptions {
  std::size_t cap = 1'000'000;
  unsigned workers = 1;
  Strategy strategy = Strategy::Default;
};

struct ClosureResult {
  /// Sorted by canonical key; keys[i] is elements[i].key().
  std::vector<PhaseGroupElement> elements;
  std::vector<std::string> keys;
  std::size_t generator_count = 0;
  bool reached_fixpoint = false;
  bool cap_hit = false;
  std::size_t max_phase_degree = 0;
  std::map<std::size_t, std::size_t> stratum_census;

  bool contains(std::string_view key) const;
  std::size_t size() const { return elements.size(); }
};

/// Breadth-first closure under composition and inversion, starting from the
/// identity and the generators. The element set depends only on the
/// generators and the cap, not on generator order or worker count; when the
/// cap is exceeded the lexicographically first keys of the final level are kept.
ClosureResult closure(std::span<const PhaseGroupElement> generators, const ClosureOptions& options);

/// Order-independent digest of the generator set, ring, rank and cap.
std::string generator_digest(std::span<const PhaseGroupElement> generators, std::size_t cap);

/// closure() backed by a key file in `cache_dir` named after generator_digest().
/// A file is reused only when its header matches; otherwise it is rewritten.
ClosureResult cached_closure(std::span<const PhaseGroupElement> generators, const ClosureOptions& options,
                             const std::filesystem::path& cache_dir, bool* hit = nullptr);

/// Census and maximal additive degree of an element set under a strategy.
void annotate_closure(ClosureResult& result, Strategy strategy);

/// Monomial matrix over Z/m: row x has its single entry at column[x] with
/// value exp(2πi·exponent[x]/m); every other entry is zero.
struct ExponentMatrix {
  std::size_t size = 0;
  std::uint32_t modulus = 1;
  std::vector<std::uint32_t> column;
  std::vector<std::uint32_t> exponent;

  friend bool operator==(const ExponentMatrix&, const ExponentMatrix&) = default;
};

ExponentMatrix operator*(const ExponentMatrix& a, const ExponentMatrix& b);

/// The realization of g on Fun(A, C) through χ. Throws CapacityError for |A| > 4096.
ExponentMatrix operator_matrix(const PhaseGroupElement& g, const AdditiveCharacter& chi);

}  // namespace phaseforge
