#include "phaseforge/characters.hpp"

#include <algorithm>
#include <limits>

#include "phaseforge/errors.hpp"
#include "phaseforge/parallel.hpp"

namespace phaseforge {

AdditiveCharacter::AdditiveCharacter(RingPtr ring, std::vector<std::uint32_t> exponents)
    : ring_(std::move(ring)), modulus_(ring_->additive_exponent()), exponents_(std::move(exponents)) {
  const std::size_t n = ring_->order();
  if (exponents_.size() != n) throw DomainError("character table length must equal ring order");
  if (exponents_[ring_->zero()] != 0) throw DomainError("character must send zero to exponent 0");
  for (std::size_t a = 0; a < n; ++a) {
    if (exponents_[a] >= modulus_) throw DomainError("character exponent out of range");
    for (std::size_t b = 0; b < n; ++b) {
      const auto sum = ring_->add(static_cast<RingIndex>(a), static_cast<RingIndex>(b));
      if (exponents_[sum] != (exponents_[a] + exponents_[b]) % modulus_)
        throw DomainError("character table is not additive");
    }
  }
}

bool AdditiveCharacter::is_trivial() const {
  return std::all_of(exponents_.begin(), exponents_.end(), [](auto e) { return e == 0; });
}

std::vector<RingIndex> AdditiveCharacter::kernel() const {
  std::vector<RingIndex> out;
  for (std::size_t a = 0; a < exponents_.size(); ++a)
    if (exponents_[a] == 0) out.push_back(static_cast<RingIndex>(a));
  return out;
}

std::vector<AdditiveCharacter> character_group(const RingPtr& ring) {
  const std::size_t n = ring->order();
  const std::uint32_t m = ring->additive_exponent();
  constexpr std::uint32_t kUnset = std::numeric_limits<std::uint32_t>::max();

  // Extend characters one cyclic step at a time: H grows by the least
  // element outside it, and each character on H has exactly s extensions.
  std::vector<bool> in_h(n, false);
  std::vector<RingIndex> h_members{ring->zero()};
  in_h[ring->zero()] = true;
  std::vector<std::vector<std::uint32_t>> partial(1, std::vector<std::uint32_t>(n, kUnset));
  partial[0][ring->zero()] = 0;

  while (h_members.size() < n) {
    RingIndex g = 0;
    while (in_h[g]) ++g;
    std::uint32_t s = 1;
    RingIndex multiple = g;
    while (!in_h[multiple]) {
      multiple = ring->add(multiple, g);
      ++s;
    }
    std::vector<RingIndex> next_members;
    next_members.reserve(h_members.size() * s);
    std::vector<std::vector<std::uint32_t>> next;
    for (const auto& chi : partial) {
      const std::uint32_t target = chi[multiple];
      for (std::uint32_t e = 0; e < m; ++e) {
        if ((static_cast<std::uint64_t>(s) * e) % m != target) continue;
        std::vector<std::uint32_t> ext(n, kUnset);
        for (RingIndex h : h_members) {
          RingIndex point = h;
          for (std::uint32_t j = 0; j < s; ++j) {
            ext[point] = (chi[h] + j * e) % m;
            point = ring->add(point, g);
          }
        }
        next.push_back(std::move(ext));
      }
    }
    for (RingIndex h : h_members) {
      RingIndex point = h;
      for (std::uint32_t j = 0; j < s; ++j) {
        if (!in_h[point]) next_members.push_back(point);
        point = ring->add(point, g);
      }
    }
    for (RingIndex r : next_members) {
      in_h[r] = true;
      h_members.push_back(r);
    }
    partial = std::move(next);
  }
  if (partial.size() != n) throw InternalError(ring->name() + ": character count differs from order");
  std::sort(partial.begin(), partial.end());
  std::vector<AdditiveCharacter> out;
  out.reserve(n);
  for (auto& table : partial) out.emplace_back(ring, std::move(table));
  return out;
}

bool is_generating(const AdditiveCharacter& chi) {
  const auto& ring = *chi.ring();
  for (std::size_t r = 0; r < ring.order(); ++r) {
    if (r == ring.zero()) continue;
    bool escapes_kernel = false;
    for (std::size_t s = 0; s < ring.order() && !escapes_kernel; ++s)
      escapes_kernel = chi.exponent(ring.mul(static_cast<RingIndex>(r), static_cast<RingIndex>(s))) != 0;
    if (!escapes_kernel) return false;
  }
  return true;
}

FrobeniusVerdict find_generating_character(const RingPtr& ring, unsigned workers) {
  const auto characters = character_group(ring);
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> best(std::max(1u, workers), kNone);
  parallel_slices(characters.size(), workers, [&](unsigned w, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i)
      if (is_generating(characters[i])) {
        best[w] = i;
        return;
      }
  });
  FrobeniusVerdict verdict;
  verdict.characters_examined = characters.size();
  const std::size_t first = *std::min_element(best.begin(), best.end());
  if (first != kNone) {
    verdict.character = characters[first];
    verdict.index = first;
  }
  return verdict;
}

std::vector<std::size_t> generating_character_indices(const RingPtr& ring) {
  const auto characters = character_group(ring);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < characters.size(); ++i)
    if (is_generating(characters[i])) out.push_back(i);
  return out;
}

}  // namespace phaseforge
