#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace phaseforge {

/// Index of a ring element under the ring's canonical mixed-radix numbering.
using RingIndex = std::uint8_t;

inline constexpr std::size_t kMaxRingOrder = 256;

/// Parsed ring-family descriptor.
///
/// Grammar: `zmod:<n>`, `chain:<p>:<k>`, `fatpoint:<p>`, `prod:(<spec>,<spec>)`.
struct RingSpec {
  enum class Family { ZMod, Chain, FatPoint, Product };

  Family family = Family::ZMod;
  unsigned modulus = 0;  // zmod
  unsigned prime = 0;    // chain, fatpoint
  unsigned length = 0;   // chain: u^length = 0
  std::vector<RingSpec> factors;  // product: exactly two

  static RingSpec parse(std::string_view text);
  std::string to_string() const;

  friend bool operator==(const RingSpec&, const RingSpec&) = default;
};

/// Finite commutative ring stored as full Cayley tables.
///
/// Immutable after construction. Every table law (abelian addition,
/// commutative associative unital multiplication, distributivity) is checked
/// exhaustively when the ring is built.
class FiniteRing {
 public:
  /// Validates the tables and computes the radical chain. Throws
  /// InternalError if a law fails and ConstructionError on size violations.
  static FiniteRing from_tables(std::string name, std::size_t order,
                                std::vector<RingIndex> add_table,
                                std::vector<RingIndex> mul_table,
                                RingIndex zero, RingIndex one);

  std::size_t order() const { return order_; }
  const std::string& name() const { return name_; }
  RingIndex zero() const { return zero_; }
  RingIndex one() const { return one_; }

  RingIndex add(RingIndex a, RingIndex b) const { return add_[a * order_ + b]; }
  RingIndex mul(RingIndex a, RingIndex b) const { return mul_[a * order_ + b]; }
  RingIndex neg(RingIndex a) const { return neg_[a]; }
  RingIndex sub(RingIndex a, RingIndex b) const { return add(a, neg(b)); }
  RingIndex pow(RingIndex a, std::size_t e) const;
  /// n·a, the n-fold additive multiple.
  RingIndex times(std::size_t n, RingIndex a) const;

  /// [rad^0 = R, rad^1, ..., {0}], each level a sorted index list.
  const std::vector<std::vector<RingIndex>>& radical_chain() const { return chain_; }
  /// Least L with rad^L = 0; 1 for reduced rings.
  std::size_t nilpotency_length() const { return chain_.size() - 1; }
  bool is_reduced() const { return chain_.size() == 2; }
  /// Largest s with a in rad^s; zero sits at nilpotency_length().
  std::size_t radical_level(RingIndex a) const { return level_[a]; }
  bool in_radical(RingIndex a) const { return level_[a] >= 1; }

  std::uint32_t additive_order(RingIndex a) const { return add_order_[a]; }
  /// Least common multiple of the additive orders.
  std::uint32_t additive_exponent() const { return exponent_; }
  /// Greedy generating set of (R,+) in index order.
  const std::vector<RingIndex>& additive_generators() const { return add_gens_; }

  /// When (R,+) is elementary abelian of prime exponent p and the base-p
  /// digits of the element index are its F_p coordinates, returns p; else 0.
  std::uint32_t elementary_prime() const { return elem_prime_; }
  /// Number of base-p digits (F_p-dimension of R) when elementary.
  std::size_t elementary_rank() const { return elem_rank_; }
  std::uint32_t digit(RingIndex a, std::size_t j) const;
  RingIndex from_digits(std::span<const std::uint32_t> digits) const;

  std::span<const RingIndex> add_table() const { return add_; }
  std::span<const RingIndex> mul_table() const { return mul_; }

 private:
  FiniteRing() = default;
  void validate() const;
  void derive_structure();

  std::string name_;
  std::size_t order_ = 0;
  std::vector<RingIndex> add_;
  std::vector<RingIndex> mul_;
  std::vector<RingIndex> neg_;
  RingIndex zero_ = 0;
  RingIndex one_ = 0;
  std::vector<std::vector<RingIndex>> chain_;
  std::vector<std::size_t> level_;
  std::vector<std::uint32_t> add_order_;
  std::uint32_t exponent_ = 1;
  std::vector<RingIndex> add_gens_;
  std::uint32_t elem_prime_ = 0;
  std::size_t elem_rank_ = 0;
};

using RingPtr = std::shared_ptr<const FiniteRing>;

FiniteRing build_ring(const RingSpec& spec);
RingPtr make_ring(std::string_view spec);

/// The radical chain recomputed from scratch (closure of nilpotent products).
std::vector<std::vector<RingIndex>> radical_chain(const FiniteRing& ring);

/// Nilpotents as {r : r^order = 0}.
std::vector<RingIndex> nilpotents_by_power(const FiniteRing& ring);
/// Nilpotents as elements whose power orbit reaches zero before cycling.
std::vector<RingIndex> nilpotents_by_orbit(const FiniteRing& ring);

/// Additive span of a set of elements (always contains zero), sorted.
std::vector<RingIndex> additive_span(const FiniteRing& ring,
                                     std::span<const RingIndex> seeds);

bool is_prime(unsigned n);

}  // namespace phaseforge
