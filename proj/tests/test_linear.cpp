#include <gtest/gtest.h>

#include <set>

#include "phaseforge/errors.hpp"
#include "phaseforge/linear.hpp"
#include "support.hpp"

using namespace phaseforge;

namespace {

FpVector random_vector(std::uint32_t p, std::size_t len, std::mt19937_64& rng) {
  std::uniform_int_distribution<unsigned> pick(0, p - 1);
  FpVector v(len);
  for (auto& x : v) x = static_cast<std::uint8_t>(pick(rng));
  return v;
}

// Every combination of `gens` over F_p, as a set (brute-force span).
std::set<FpVector> brute_span(std::uint32_t p, const std::vector<FpVector>& gens, std::size_t len) {
  std::set<FpVector> out{FpVector(len, 0)};
  for (const auto& g : gens) {
    std::set<FpVector> next;
    for (const auto& v : out)
      for (std::uint32_t c = 0; c < p; ++c) {
        FpVector w = v;
        for (std::size_t i = 0; i < len; ++i) w[i] = static_cast<std::uint8_t>((w[i] + c * g[i]) % p);
        next.insert(w);
      }
    out = std::move(next);
  }
  return out;
}

}  // namespace

TEST(Linear, SpanMatchesBruteForce) {
  std::mt19937_64 rng(1);
  for (std::uint32_t p : {2u, 3u, 5u}) {
    for (int t = 0; t < 10; ++t) {
      std::vector<FpVector> gens;
      for (int i = 0; i < 4; ++i) gens.push_back(random_vector(p, 6, rng));
      FpSpan span(p, 6);
      for (const auto& g : gens) span.insert(g);
      const auto brute = brute_span(p, gens, 6);
      std::uint64_t size = 1;
      for (std::size_t i = 0; i < span.dim(); ++i) size *= p;
      EXPECT_EQ(size, brute.size());
      for (int i = 0; i < 30; ++i) {
        const auto v = random_vector(p, 6, rng);
        EXPECT_EQ(span.contains(v), brute.count(v) == 1);
      }
    }
  }
}

TEST(Linear, EchelonFormIsCanonical) {
  std::mt19937_64 rng(2);
  std::vector<FpVector> gens;
  for (int i = 0; i < 5; ++i) gens.push_back(random_vector(3, 8, rng));
  FpSpan a(3, 8), b(3, 8);
  for (const auto& g : gens) a.insert(g);
  for (auto it = gens.rbegin(); it != gens.rend(); ++it) b.insert(*it);
  EXPECT_EQ(a, b);
  EXPECT_TRUE(a.contains_span(b));
  // Reduction is linear and kills the span.
  for (const auto& g : gens) EXPECT_EQ(a.reduce(g), FpVector(8, 0));
}

TEST(Linear, KernelCombinations) {
  const std::vector<FpVector> images{{1, 0, 1}, {0, 1, 1}, {1, 1, 0}, {1, 1, 0}};
  const auto kernel = kernel_combinations(2, images);
  EXPECT_EQ(kernel.size(), 2u);  // rank 2 over F2 from four images
  for (const auto& c : kernel) {
    FpVector sum(3, 0);
    for (std::size_t i = 0; i < images.size(); ++i)
      for (std::size_t j = 0; j < 3; ++j) sum[j] = static_cast<std::uint8_t>((sum[j] + c[i] * images[i][j]) % 2);
    EXPECT_EQ(sum, FpVector(3, 0));
  }
}

TEST(Linear, PhaseVectorRoundTrip) {
  const auto s = make_space(make_ring("chain:3:2"), 1);
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    const auto phi = gen::random_phase(s, rng);
    const auto v = phase_to_vector(phi);
    EXPECT_EQ(v.size(), s->size() * 2);
    EXPECT_EQ(vector_to_phase(s, v), phi);
  }
  EXPECT_THROW(phase_to_vector(PhaseFunction::zero(make_space(make_ring("zmod:4"), 1))), DomainError);
}

TEST(Linear, TranslationClosureIsInvariant) {
  const auto s = make_space(make_ring("chain:2:2"), 2);
  const std::vector<PhaseFunction> seeds{phase_from_poly(PolynomialSpec::parse("2*x1x2"), s),
                                         phase_from_poly(PolynomialSpec::parse("x1x1"), s)};
  const auto u = PhaseSubspace::translation_closure(s, seeds);
  for (const auto& b : u.basis())
    for (auto a : s->elements()) ASSERT_TRUE(u.contains(b.translated(a)));
  for (const auto& seed : seeds) EXPECT_TRUE(u.contains(seed));
  EXPECT_TRUE(PhaseSubspace::full(s).contains(u));
  EXPECT_EQ(PhaseSubspace::full(s).dim(), 32u);
}

TEST(Linear, KernelAndIntersection) {
  const auto s = make_space(make_ring("zmod:2"), 3);
  const auto full = PhaseSubspace::full(s);
  // Phases vanishing at 0.
  const auto at_zero = full.kernel([](const PhaseFunction& phi) { return FpVector{phi.at(0)}; });
  EXPECT_EQ(at_zero.dim(), 7u);
  const auto at_one = full.kernel([](const PhaseFunction& phi) { return FpVector{phi.at(1)}; });
  EXPECT_EQ(at_zero.intersect(at_one).dim(), 6u);
  const auto members = at_zero.intersect(at_one).enumerate(1u << 10);
  EXPECT_EQ(members.size(), 64u);
  for (const auto& m : members) EXPECT_EQ(m.at(0) | m.at(1), 0);
  EXPECT_THROW(full.enumerate(16), CapacityError);
  EXPECT_DOUBLE_EQ(full.log2_size(), 8.0);
}

// Property: random members of a subspace are members, and sums stay inside.
TEST(LinearProperty, RandomMembersStayInside) {
  const auto s = make_space(make_ring("fatpoint:2"), 1);
  std::vector<PhaseFunction> seeds;
  std::mt19937_64 seed_rng(4);
  for (int i = 0; i < 3; ++i) seeds.push_back(gen::random_phase(s, seed_rng));
  const auto u = PhaseSubspace::translation_closure(s, seeds);
  gen::for_seeds(41, 100, [&](std::mt19937_64& rng, std::uint64_t seed) {
    const auto a = u.random_phase(rng), b = u.random_phase(rng);
    ASSERT_TRUE(u.contains(a)) << seed;
    ASSERT_TRUE(u.contains(a + b)) << seed;
    ASSERT_TRUE(u.contains(-a)) << seed;
  });
}
