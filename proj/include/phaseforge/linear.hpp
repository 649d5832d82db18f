#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "phaseforge/phase.hpp"

namespace phaseforge {

/// Vector over F_p, one residue per byte.
using FpVector = std::vector<std::uint8_t>;

/// Subspace of F_p^length held in reduced row echelon form, so the stored
/// basis is a canonical function of the subspace.
class FpSpan {
 public:
  FpSpan(std::uint32_t prime, std::size_t length);

  std::uint32_t prime() const { return p_; }
  std::size_t length() const { return length_; }
  std::size_t dim() const { return rows_.size(); }
  const std::vector<FpVector>& basis() const { return rows_; }
  const std::vector<std::size_t>& pivots() const { return pivots_; }

  /// Adds v; returns false if it was already in the span.
  bool insert(FpVector v);
  bool contains(const FpVector& v) const;
  /// Canonical coset representative of v modulo the span (linear in v).
  FpVector reduce(FpVector v) const;
  bool contains_span(const FpSpan& other) const;
  FpVector combination(std::span<const std::uint8_t> coefficients) const;
  FpVector random_element(std::mt19937_64& rng) const;

  friend bool operator==(const FpSpan& a, const FpSpan& b) {
    return a.p_ == b.p_ && a.length_ == b.length_ && a.rows_ == b.rows_;
  }

 private:
  std::uint32_t p_;
  std::size_t length_;
  std::vector<FpVector> rows_;
  std::vector<std::size_t> pivots_;
  std::vector<std::uint8_t> inverse_;
};

/// Coefficient vectors c spanning {c : Σ c_i·images_i = 0}.
std::vector<FpVector> kernel_combinations(std::uint32_t prime, std::span<const FpVector> images);

/// Base-p digits of every table entry, entry-major. Requires an elementary-abelian ring.
FpVector phase_to_vector(const PhaseFunction& phi);
PhaseFunction vector_to_phase(const SpacePtr& domain, const FpVector& v);

/// Linear map on phases, written as an F_p vector of conditions.
using PhaseCondition = std::function<FpVector(const PhaseFunction&)>;

/// An F_p-subspace of phases A -> R, for rings whose additive group is
/// elementary abelian. Throws DomainError for other rings.
class PhaseSubspace {
 public:
  explicit PhaseSubspace(SpacePtr domain);

  /// Every phase A -> R.
  static PhaseSubspace full(const SpacePtr& domain);
  /// Smallest subspace containing `phases` and stable under x ↦ φ(x+e) for every e.
  static PhaseSubspace translation_closure(const SpacePtr& domain, std::span<const PhaseFunction> phases);

  const SpacePtr& domain() const { return domain_; }
  std::uint32_t prime() const { return span_.prime(); }
  std::size_t dim() const { return span_.dim(); }
  const FpSpan& span() const { return span_; }

  bool insert(const PhaseFunction& phi) { return span_.insert(phase_to_vector(phi)); }
  bool contains(const PhaseFunction& phi) const { return span_.contains(phase_to_vector(phi)); }
  bool contains(const PhaseSubspace& other) const { return span_.contains_span(other.span_); }
  /// Echelon basis as phases.
  std::vector<PhaseFunction> basis() const;
  PhaseFunction random_phase(std::mt19937_64& rng) const;

  /// {φ in this subspace : condition(φ) = 0}.
  PhaseSubspace kernel(const PhaseCondition& condition) const;
  PhaseSubspace intersect(const PhaseSubspace& other) const;

  /// log2 of the subspace size.
  double log2_size() const;
  /// Every member, in the order of coefficient vectors; throws CapacityError past `limit`.
  std::vector<PhaseFunction> enumerate(std::uint64_t limit) const;

  friend bool operator==(const PhaseSubspace& a, const PhaseSubspace& b) { return a.span_ == b.span_; }

 private:
  SpacePtr domain_;
  FpSpan span_;
};

}  // namespace phaseforge
