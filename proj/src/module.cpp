#include "phaseforge/module.hpp"

#include <string>

#include "phaseforge/errors.hpp"

namespace phaseforge {

namespace {
constexpr std::uint64_t kFullAddTableCap = 1024;
constexpr std::uint64_t kPackedCap = std::uint64_t{1} << 32;
}  // namespace

ModuleSpace::ModuleSpace(RingPtr ring, std::size_t rank) : ring_(std::move(ring)), rank_(rank), size_(1) {
  if (rank_ == 0) throw ConstructionError("module rank must be positive");
  radix_.reserve(rank_);
  for (std::size_t i = 0; i < rank_; ++i) {
    radix_.push_back(static_cast<std::uint32_t>(size_));
    size_ *= ring_->order();
    if (size_ >= kPackedCap)
      throw ConstructionError(ring_->name() + "^" + std::to_string(rank_) +
                              ": module too large for packed indexing");
  }
  if (size_ <= kFullAddTableCap) {
    add_table_.resize(size_ * size_);
    for (std::uint32_t x = 0; x < size_; ++x)
      for (std::uint32_t y = 0; y < size_; ++y)
        add_table_[x * size_ + y] = add_digits({x}, {y}).packed;
  }
}

void ModuleSpace::require_enumerable(std::string_view what) const {
  if (!enumerable())
    throw CapacityError(std::string(what) + ": module of size " + std::to_string(size_) +
                        " exceeds the enumeration cap of 2^20 elements");
}

std::vector<RingIndex> ModuleSpace::coords(ModuleElement x) const {
  std::vector<RingIndex> out(rank_);
  for (std::size_t i = 0; i < rank_; ++i) out[i] = coord(x, i);
  return out;
}

ModuleElement ModuleSpace::encode(std::span<const RingIndex> c) const {
  if (c.size() != rank_) throw DomainError("coordinate count does not match module rank");
  std::uint32_t packed = 0;
  for (std::size_t i = 0; i < rank_; ++i) {
    if (c[i] >= ring_->order()) throw DomainError("coordinate is not a ring element");
    packed += c[i] * radix_[i];
  }
  return {packed};
}

ModuleElement ModuleSpace::add_digits(ModuleElement x, ModuleElement y) const {
  std::uint32_t packed = 0;
  for (std::size_t i = 0; i < rank_; ++i)
    packed += ring_->add(coord(x, i), coord(y, i)) * radix_[i];
  return {packed};
}

ModuleElement ModuleSpace::neg(ModuleElement x) const {
  std::uint32_t packed = 0;
  for (std::size_t i = 0; i < rank_; ++i) packed += ring_->neg(coord(x, i)) * radix_[i];
  return {packed};
}

ModuleElement ModuleSpace::scale(RingIndex r, ModuleElement x) const {
  std::uint32_t packed = 0;
  for (std::size_t i = 0; i < rank_; ++i) packed += ring_->mul(r, coord(x, i)) * radix_[i];
  return {packed};
}

ModuleElement ModuleSpace::basis(std::size_t i) const {
  if (i >= rank_) throw DomainError("basis index out of range");
  return {ring_->one() * radix_[i]};
}

std::vector<ModuleElement> ModuleSpace::additive_generators() const {
  std::vector<ModuleElement> out;
  for (std::size_t i = 0; i < rank_; ++i)
    for (RingIndex g : ring_->additive_generators()) out.push_back({g * radix_[i]});
  return out;
}

SpacePtr make_space(RingPtr ring, std::size_t rank) {
  return std::make_shared<const ModuleSpace>(std::move(ring), rank);
}

ModuleHom::ModuleHom(SpacePtr source, SpacePtr target, std::vector<RingIndex> matrix)
    : source_(std::move(source)), target_(std::move(target)), matrix_(std::move(matrix)) {
  if (source_->ring()->name() != target_->ring()->name())
    throw DomainError("module hom between modules over different rings");
  if (matrix_.size() != source_->rank() * target_->rank())
    throw DomainError("hom matrix shape does not match ranks");
  for (RingIndex r : matrix_)
    if (r >= source_->ring()->order()) throw DomainError("hom matrix entry is not a ring element");
}

ModuleHom ModuleHom::identity(const SpacePtr& space) {
  const std::size_t n = space->rank();
  std::vector<RingIndex> m(n * n, space->ring()->zero());
  for (std::size_t i = 0; i < n; ++i) m[i * n + i] = space->ring()->one();
  return ModuleHom(space, space, std::move(m));
}

ModuleHom ModuleHom::zero(const SpacePtr& source, const SpacePtr& target) {
  return ModuleHom(source, target,
                   std::vector<RingIndex>(source->rank() * target->rank(), source->ring()->zero()));
}

ModuleHom ModuleHom::random(const SpacePtr& source, const SpacePtr& target, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, source->ring()->order() - 1);
  std::vector<RingIndex> m(source->rank() * target->rank());
  for (auto& entry : m) entry = static_cast<RingIndex>(pick(rng));
  return ModuleHom(source, target, std::move(m));
}

ModuleElement ModuleHom::apply(ModuleElement x) const {
  if (!source_->contains(x)) throw DomainError("hom applied to element outside its source");
  const auto& ring = *source_->ring();
  const std::size_t n = source_->rank(), m = target_->rank();
  std::vector<RingIndex> out(m, ring.zero());
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      out[i] = ring.add(out[i], ring.mul(matrix_[i * n + j], source_->coord(x, j)));
  return target_->encode(out);
}

ModuleHom compose(const ModuleHom& g, const ModuleHom& f) {
  if (!f.target()->same_as(*g.source()))
    throw DomainError("hom composition: target of f is not the source of g");
  const auto& ring = *f.source()->ring();
  const std::size_t n = f.source()->rank(), k = f.target()->rank(), m = g.target()->rank();
  std::vector<RingIndex> out(m * n, ring.zero());
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t t = 0; t < k; ++t)
        out[i * n + j] = ring.add(out[i * n + j], ring.mul(g.entry(i, t), f.entry(t, j)));
  return ModuleHom(f.source(), g.target(), std::move(out));
}

}  // namespace phaseforge
