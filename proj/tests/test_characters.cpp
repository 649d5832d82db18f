#include <gtest/gtest.h>

#include <algorithm>

#include "phaseforge/characters.hpp"
#include "phaseforge/errors.hpp"
#include "support.hpp"

using namespace phaseforge;

namespace {

template <typename Arith>
void expect_group_matches_brute_force(const char* spec, const Arith& arith) {
  const auto ring = make_ring(spec);
  const auto group = character_group(ring);
  auto brute = oracle::brute_characters(arith, ring->additive_exponent());
  std::sort(brute.begin(), brute.end());
  ASSERT_EQ(group.size(), brute.size()) << spec;
  ASSERT_EQ(group.size(), ring->order()) << spec;
  for (std::size_t i = 0; i < group.size(); ++i) {
    const std::vector<unsigned> got(group[i].exponents().begin(), group[i].exponents().end());
    EXPECT_EQ(got, brute[i]) << spec << " character " << i;
    EXPECT_EQ(is_generating(group[i]), oracle::brute_generating(arith, brute[i])) << spec << " character " << i;
  }
}

}  // namespace

TEST(Characters, GroupMatchesBruteForce) {
  expect_group_matches_brute_force("chain:2:2", oracle::ChainArith{2, 2});
  expect_group_matches_brute_force("zmod:4", oracle::ZModArith{4});
  expect_group_matches_brute_force("zmod:6", oracle::ZModArith{6});
  expect_group_matches_brute_force("zmod:3", oracle::ZModArith{3});
  expect_group_matches_brute_force("fatpoint:2", oracle::FatPointArith{2});
  expect_group_matches_brute_force("chain:3:2", oracle::ChainArith{3, 2});
}

TEST(Characters, DualNumberCharacterIsParity) {
  // χ(a+ub) = (-1)^b: exponent table over indices a+2b is (0,0,1,1).
  const auto ring = make_ring("chain:2:2");
  const auto verdict = find_generating_character(ring);
  ASSERT_TRUE(verdict.frobenius());
  EXPECT_EQ(verdict.character->exponents(), (std::vector<std::uint32_t>{0, 0, 1, 1}));
  EXPECT_EQ(verdict.character->kernel(), (std::vector<RingIndex>{0, 1}));
  EXPECT_EQ(verdict.index, std::optional<std::size_t>{1});
}

TEST(Characters, FrobeniusVerdicts) {
  for (const char* spec : {"chain:2:2", "zmod:4", "zmod:2", "zmod:3", "zmod:12", "chain:3:2", "prod:(zmod:2,zmod:3)"})
    EXPECT_TRUE(find_generating_character(make_ring(spec)).frobenius()) << spec;
  const auto fat = find_generating_character(make_ring("fatpoint:2"));
  EXPECT_FALSE(fat.frobenius());
  EXPECT_EQ(fat.characters_examined, 8u);
  EXPECT_FALSE(find_generating_character(make_ring("fatpoint:3")).frobenius());
}

TEST(Characters, WorkerCountDoesNotChangeResult) {
  for (const char* spec : {"chain:2:3", "zmod:12", "fatpoint:3", "prod:(chain:2:2,zmod:5)"}) {
    const auto ring = make_ring(spec);
    const auto one = find_generating_character(ring, 1);
    for (unsigned w : {2u, 3u, 8u}) {
      const auto many = find_generating_character(ring, w);
      EXPECT_EQ(one.index, many.index) << spec << " workers " << w;
      EXPECT_EQ(one.character, many.character) << spec;
    }
  }
}

TEST(Characters, IndicesListAllGenerating) {
  const auto ring = make_ring("zmod:4");
  const auto indices = generating_character_indices(ring);
  const auto group = character_group(ring);
  std::size_t count = 0;
  for (std::size_t i = 0; i < group.size(); ++i)
    if (is_generating(group[i])) {
      ++count;
      EXPECT_NE(std::find(indices.begin(), indices.end(), i), indices.end());
    }
  EXPECT_EQ(indices.size(), count);
  EXPECT_EQ(count, 2u);  // e ↦ e and e ↦ 3e
}

TEST(Characters, RejectsNonHomomorphisms) {
  const auto ring = make_ring("zmod:4");
  EXPECT_THROW(AdditiveCharacter(ring, {0, 1, 1, 1}), DomainError);
  EXPECT_THROW(AdditiveCharacter(ring, {0, 1}), DomainError);
  EXPECT_NO_THROW(AdditiveCharacter(ring, {0, 2, 0, 2}));
  EXPECT_TRUE(AdditiveCharacter(ring, {0, 0, 0, 0}).is_trivial());
}
