#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <random>
#include <ranges>
#include <span>
#include <vector>

#include "phaseforge/ring.hpp"

namespace phaseforge {

/// Element of R^n by packed mixed-radix index (coordinate 0 least significant).
struct ModuleElement {
  std::uint32_t packed = 0;
  friend auto operator<=>(const ModuleElement&, const ModuleElement&) = default;
};

inline constexpr std::uint64_t kEnumerationCap = std::uint64_t{1} << 20;

/// The free module A = R^n.
class ModuleSpace {
 public:
  /// Throws ConstructionError if |R|^n does not fit a 32-bit packed index.
  ModuleSpace(RingPtr ring, std::size_t rank);

  const RingPtr& ring() const { return ring_; }
  std::size_t rank() const { return rank_; }
  std::uint64_t size() const { return size_; }
  bool enumerable() const { return size_ <= kEnumerationCap; }
  /// Throws CapacityError unless the space is enumerable.
  void require_enumerable(std::string_view what) const;

  /// All elements in packed-index order.
  auto elements() const {
    require_enumerable("element iteration");
    return std::views::iota(std::uint32_t{0}, static_cast<std::uint32_t>(size_)) |
           std::views::transform([](std::uint32_t i) { return ModuleElement{i}; });
  }

  RingIndex coord(ModuleElement x, std::size_t i) const {
    return static_cast<RingIndex>((x.packed / radix_[i]) % ring_->order());
  }
  std::vector<RingIndex> coords(ModuleElement x) const;
  ModuleElement encode(std::span<const RingIndex> coords) const;
  bool contains(ModuleElement x) const { return x.packed < size_; }

  ModuleElement zero() const { return {}; }
  ModuleElement add(ModuleElement x, ModuleElement y) const {
    if (!add_table_.empty()) return {add_table_[x.packed * size_ + y.packed]};
    return add_digits(x, y);
  }
  ModuleElement neg(ModuleElement x) const;
  ModuleElement sub(ModuleElement x, ModuleElement y) const { return add(x, neg(y)); }
  ModuleElement scale(RingIndex r, ModuleElement x) const;
  /// Standard basis vector e_i.
  ModuleElement basis(std::size_t i) const;
  /// Generators of (A,+): each ring additive generator placed in each coordinate.
  std::vector<ModuleElement> additive_generators() const;

  /// Same ring (by canonical name) and same rank.
  bool same_as(const ModuleSpace& other) const {
    return rank_ == other.rank_ && ring_->name() == other.ring_->name();
  }

 private:
  ModuleElement add_digits(ModuleElement x, ModuleElement y) const;

  RingPtr ring_;
  std::size_t rank_;
  std::uint64_t size_;
  std::vector<std::uint32_t> radix_;
  std::vector<std::uint32_t> add_table_;
};

using SpacePtr = std::shared_ptr<const ModuleSpace>;

SpacePtr make_space(RingPtr ring, std::size_t rank);

/// R-linear map R^n -> R^m given by an m×n matrix (row-major).
class ModuleHom {
 public:
  ModuleHom(SpacePtr source, SpacePtr target, std::vector<RingIndex> matrix);

  static ModuleHom identity(const SpacePtr& space);
  static ModuleHom zero(const SpacePtr& source, const SpacePtr& target);
  static ModuleHom random(const SpacePtr& source, const SpacePtr& target, std::mt19937_64& rng);

  const SpacePtr& source() const { return source_; }
  const SpacePtr& target() const { return target_; }
  RingIndex entry(std::size_t row, std::size_t col) const {
    return matrix_[row * source_->rank() + col];
  }
  const std::vector<RingIndex>& matrix() const { return matrix_; }

  /// Matrix-vector product. Throws DomainError for elements outside the source.
  ModuleElement apply(ModuleElement x) const;

 private:
  SpacePtr source_;
  SpacePtr target_;
  std::vector<RingIndex> matrix_;
};

inline ModuleElement hom_apply(const ModuleHom& f, ModuleElement x) { return f.apply(x); }

/// g ∘ f. Throws DomainError unless f's target is g's source.
ModuleHom compose(const ModuleHom& g, const ModuleHom& f);

}  // namespace phaseforge
