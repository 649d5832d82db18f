#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "phaseforge/ring.hpp"

namespace phaseforge {

/// Additive character of (R,+) with values exp(2πi·e/m) stored as exponents e in Z/m,
/// where m is the additive exponent of the ring. No floating point is involved.
class AdditiveCharacter {
 public:
  /// Throws DomainError unless `exponents` is an additive homomorphism R -> Z/m.
  AdditiveCharacter(RingPtr ring, std::vector<std::uint32_t> exponents);

  const RingPtr& ring() const { return ring_; }
  std::uint32_t modulus() const { return modulus_; }
  std::uint32_t exponent(RingIndex a) const { return exponents_[a]; }
  const std::vector<std::uint32_t>& exponents() const { return exponents_; }
  bool is_trivial() const;
  /// ker χ as a sorted index list.
  std::vector<RingIndex> kernel() const;

  friend bool operator==(const AdditiveCharacter& a, const AdditiveCharacter& b) {
    return a.exponents_ == b.exponents_ && a.modulus_ == b.modulus_;
  }

 private:
  RingPtr ring_;
  std::uint32_t modulus_;
  std::vector<std::uint32_t> exponents_;
};

/// All |R| characters of (R,+), sorted lexicographically by exponent table.
/// Position in this list is the character's canonical index.
std::vector<AdditiveCharacter> character_group(const RingPtr& ring);

/// True iff no nonzero principal ideal rR lies inside ker χ.
bool is_generating(const AdditiveCharacter& chi);

struct FrobeniusVerdict {
  std::optional<AdditiveCharacter> character;
  /// Canonical index of the returned character, when found.
  std::optional<std::size_t> index;
  std::size_t characters_examined = 0;
  bool frobenius() const { return character.has_value(); }
};

/// First generating character in canonical order, searched across `workers`
/// threads; the result does not depend on the worker count.
FrobeniusVerdict find_generating_character(const RingPtr& ring, unsigned workers = 1);

/// Canonical indices of every generating character.
std::vector<std::size_t> generating_character_indices(const RingPtr& ring);

}  // namespace phaseforge
