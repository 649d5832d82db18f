#include <gtest/gtest.h>

#include <set>

#include "phaseforge/errors.hpp"
#include "phaseforge/module.hpp"
#include "phaseforge/phase.hpp"
#include "support.hpp"

using namespace phaseforge;

TEST(Module, Sizes) {
  const auto r = make_ring("chain:2:2");
  EXPECT_EQ(make_space(r, 1)->size(), 4u);
  EXPECT_EQ(make_space(r, 2)->size(), 16u);
  EXPECT_EQ(make_space(r, 3)->size(), 64u);
}

TEST(Module, IterationVisitsEachElementOnceInOrder) {
  const auto a = make_space(make_ring("zmod:3"), 3);
  std::uint32_t expected = 0;
  std::set<std::uint32_t> seen;
  for (auto x : a->elements()) {
    EXPECT_EQ(x.packed, expected++);
    seen.insert(x.packed);
  }
  EXPECT_EQ(seen.size(), 27u);
}

TEST(Module, CoordinatesAndAdditionMatchOracle) {
  const oracle::ChainArith arith{2, 2};
  const auto a = make_space(make_ring("chain:2:2"), 3);
  for (auto x : a->elements())
    for (auto y : a->elements()) {
      ASSERT_EQ(a->add(x, y).packed, oracle::module_add(arith, x.packed, y.packed, 3));
    }
  const auto c = a->coords({37});
  EXPECT_EQ(std::vector<unsigned>(c.begin(), c.end()), oracle::coords(37, 4, 3));
  EXPECT_EQ(a->encode(c).packed, 37u);
  EXPECT_EQ(a->basis(1).packed, 4u);
}

TEST(Module, HomApplyAndComposeMatchMatrixProduct) {
  const auto r = make_ring("zmod:4");
  const oracle::ZModArith z{4};
  const auto a2 = make_space(r, 2), a3 = make_space(r, 3);
  std::mt19937_64 rng(11);
  for (int t = 0; t < 20; ++t) {
    const auto f = ModuleHom::random(a2, a3, rng);
    const auto g = ModuleHom::random(a3, a2, rng);
    for (auto x : a2->elements()) {
      const auto xc = oracle::coords(x.packed, 4, 2);
      std::vector<unsigned> fx(3, 0);
      for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 2; ++j) fx[i] = z.add(fx[i], z.mul(f.entry(i, j), xc[j]));
      ASSERT_EQ(f.apply(x).packed, oracle::pack(fx, 4));
      ASSERT_EQ(compose(g, f).apply(x), g.apply(f.apply(x)));
    }
  }
  const auto f = ModuleHom::random(a2, a3, rng);
  EXPECT_THROW(compose(f, f), DomainError);
  EXPECT_THROW(f.apply({999}), DomainError);
}

TEST(Module, IdentityZeroAndScale) {
  const auto a = make_space(make_ring("chain:2:2"), 2);
  const auto id = ModuleHom::identity(a);
  const auto zero = ModuleHom::zero(a, a);
  for (auto x : a->elements()) {
    EXPECT_EQ(id.apply(x), x);
    EXPECT_EQ(zero.apply(x), a->zero());
    EXPECT_EQ(a->add(x, a->neg(x)), a->zero());
    EXPECT_EQ(a->scale(1, x), x);
    EXPECT_EQ(a->scale(0, x), a->zero());
  }
}

TEST(Module, PullbackIsComposition) {
  const auto r = make_ring("chain:2:2");
  const auto a1 = make_space(r, 1), a2 = make_space(r, 2);
  std::mt19937_64 rng(3);
  const auto phi = gen::random_phase(a2, rng);
  const auto f = ModuleHom::random(a1, a2, rng);
  const auto pulled = pullback_phase(f, phi);
  for (auto x : a1->elements()) EXPECT_EQ(pulled(x), phi(f.apply(x)));
  EXPECT_THROW(pullback_phase(f, gen::random_phase(a1, rng)), DomainError);
}

TEST(Module, LargeSpacesConstructibleButNotEnumerable) {
  const auto a = make_space(make_ring("zmod:16"), 6);  // 2^24 elements
  EXPECT_FALSE(a->enumerable());
  EXPECT_THROW(a->require_enumerable("test"), CapacityError);
  EXPECT_THROW((void)a->elements(), CapacityError);
  EXPECT_EQ(a->add({5}, {7}).packed, 12u);
  EXPECT_THROW(make_space(make_ring("zmod:256"), 5), ConstructionError);
}

TEST(ModuleProperty, AdditionIsAbelianGroup) {
  const auto a = make_space(make_ring("fatpoint:2"), 2);
  gen::for_seeds(5, 500, [&](std::mt19937_64& rng, std::uint64_t seed) {
    const auto x = gen::random_element(a, rng), y = gen::random_element(a, rng), z = gen::random_element(a, rng);
    ASSERT_EQ(a->add(x, y), a->add(y, x)) << seed;
    ASSERT_EQ(a->add(a->add(x, y), z), a->add(x, a->add(y, z))) << seed;
    ASSERT_EQ(a->sub(a->add(x, y), y), x) << seed;
  });
}
