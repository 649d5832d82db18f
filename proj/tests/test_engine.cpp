#include <gtest/gtest.h>

#include "phaseforge/engine.hpp"
#include "phaseforge/errors.hpp"
#include "support.hpp"

using namespace phaseforge;

namespace {

ExtractedPhase extract(const char* ring, std::size_t n, const char* family, Strategy s = Strategy::Default,
                       unsigned workers = 1) {
  ExtractOptions o;
  o.strategy = s;
  o.workers = workers;
  return extract_phase(PhaseDatum::make(ring, n, FamilySpec::parse(family)), o);
}

}  // namespace

TEST(Engine, FamilySpecParsing) {
  EXPECT_EQ(FamilySpec::parse("deg2").degree_bound, 2u);
  EXPECT_EQ(FamilySpec::parse("deg3").to_string(), "deg3");
  const auto p = FamilySpec::parse("poly:x1x2;2*x1");
  EXPECT_EQ(p.kind, FamilySpec::Kind::Polynomials);
  EXPECT_EQ(p.polynomials.size(), 2u);
  EXPECT_EQ(FamilySpec::parse(p.to_string()).polynomials, p.polynomials);
  for (const char* bad : {"", "deg", "deg9", "degx", "quad", "poly:", "poly:x1;;x2"})
    EXPECT_THROW(FamilySpec::parse(bad), ConfigError) << bad;
}

TEST(Engine, RealizedFamilySizes) {
  // n=1 over F2[u]/(u²): every phase has degree ≤ 2; 64 have degree ≤ 1.
  const auto deg2 = realize_family(PhaseDatum::make("chain:2:2", 1, FamilySpec::degree(2)));
  EXPECT_TRUE(deg2.enumerated);
  EXPECT_EQ(deg2.members.size(), 256u);
  const auto deg1 = realize_family(PhaseDatum::make("chain:2:2", 1, FamilySpec::degree(1)));
  EXPECT_EQ(deg1.members.size(), 64u);
  const auto big = realize_family(PhaseDatum::make("chain:2:2", 2, FamilySpec::degree(2)));
  ASSERT_TRUE(big.subspace.has_value());
  EXPECT_EQ(big.subspace->dim(), 22u);
  const auto z4 = realize_family(PhaseDatum::make("zmod:4", 1, FamilySpec::degree(2)));
  EXPECT_TRUE(z4.enumerated);
  for (const auto& m : z4.members) EXPECT_LE(additive_degree(m), 2u);
}

TEST(Engine, Admissibility) {
  const auto strong = check_admissibility(PhaseDatum::make("chain:2:2", 2, FamilySpec::degree(2)));
  EXPECT_TRUE(strong.pullback_closed);
  EXPECT_TRUE(strong.degree_bounded);
  EXPECT_TRUE(strong.interaction_closed);
  EXPECT_TRUE(strong.strong);
  EXPECT_EQ(strong.character_index, std::optional<std::size_t>{1});

  // No generating character: weak at best.
  const auto fat = check_admissibility(PhaseDatum::make("fatpoint:2", 1, FamilySpec::degree(2)));
  EXPECT_TRUE(fat.weak);
  EXPECT_FALSE(fat.frobenius);
  EXPECT_FALSE(fat.strong);

  // A lone quadratic is not closed under pullback (the zero map sends it to 0).
  const auto lone = check_admissibility(PhaseDatum::make("chain:2:2", 2, FamilySpec::parse("poly:2*x1x2")));
  EXPECT_FALSE(lone.pullback_closed);
  EXPECT_FALSE(lone.weak);
  EXPECT_FALSE(lone.notes.empty());
  EXPECT_THROW(extract_phase(PhaseDatum::make("chain:2:2", 2, FamilySpec::parse("poly:2*x1x2")), {}),
               AdmissibilityError);
  EXPECT_THROW(extract_phase(PhaseDatum::make("fatpoint:2", 1, FamilySpec::degree(2)), {}), AdmissibilityError);
}

TEST(Engine, DatumErrors) {
  EXPECT_THROW(PhaseDatum::make("chain:2:2", 0, FamilySpec::degree(2)), ConfigError);
  EXPECT_THROW(PhaseDatum::make("nonsense", 1, FamilySpec::degree(2)), ConstructionError);
  // The trivial character is accepted as data but is not generating.
  const auto trivial = check_admissibility(PhaseDatum::make("chain:2:2", 1, FamilySpec::degree(2), 0));
  EXPECT_TRUE(trivial.weak);
  EXPECT_FALSE(trivial.strong);
  EXPECT_THROW(PhaseDatum::make("chain:2:2", 1, FamilySpec::degree(2), 99), ConfigError);
}

TEST(Engine, QuadraticModelRankOne) {
  const auto p = extract("chain:2:2", 1, "deg2");
  EXPECT_EQ(p.mode, ExtractionMode::Closure);
  EXPECT_EQ(p.depth, 2u);
  EXPECT_EQ(p.filtration.graded_sizes(), (std::vector<std::uint64_t>{64, 192, 768}));
  for (std::size_t k = 0; k <= 2; ++k) EXPECT_TRUE(p.filtration.strict_at(k)) << k;
  EXPECT_EQ(hex_key(*p.filtration.levels[0].witness_key), "0000000001000000");
  EXPECT_EQ(hex_key(*p.filtration.levels[1].witness_key), "0100000100000000");
  EXPECT_EQ(hex_key(*p.filtration.levels[2].witness_key), "0000000100000000");
  ASSERT_TRUE(p.closure.has_value());
  EXPECT_EQ(p.closure->max_phase_degree, 2u);
  EXPECT_TRUE(verify_axioms(p).all_pass());
}

TEST(Engine, QuadraticModelRankTwoStructural) {
  const auto p = extract("chain:2:2", 2, "deg2");
  EXPECT_EQ(p.mode, ExtractionMode::Structural);
  EXPECT_EQ(p.depth, 2u);
  EXPECT_EQ(p.filtration.sublevel_dims(), (std::vector<std::size_t>{8, 10, 22}));
  EXPECT_EQ(p.filtration.graded_sizes(), (std::vector<std::uint64_t>{4096, 12288, 67092480}));
  ASSERT_TRUE(p.structural.has_value());
  EXPECT_TRUE(p.structural->samples_passed);
  EXPECT_LE(p.structural->max_phase_degree, 2u);
  const auto axioms = verify_axioms(p);
  for (const auto& v : axioms.axioms) EXPECT_TRUE(v.pass) << v.name << ": " << v.detail;
}

TEST(Engine, StructuralModeMatchesClosureWhereBothApply) {
  // Force structural mode with a tiny cap; the level dimensions must match
  // the enumerated closure.
  const auto datum = PhaseDatum::make("chain:2:2", 1, FamilySpec::degree(2));
  const auto full = extract_phase(datum, {});
  ExtractOptions small;
  small.cap = 16;
  const auto structural = extract_phase(datum, small);
  EXPECT_EQ(structural.mode, ExtractionMode::Structural);
  EXPECT_EQ(structural.filtration.graded_sizes(), full.filtration.graded_sizes());
  EXPECT_EQ(structural.depth, full.depth);
}

TEST(Engine, LiteralRejectedInStructuralMode) {
  ExtractOptions o;
  o.strategy = Strategy::Literal;
  EXPECT_THROW(extract_phase(PhaseDatum::make("chain:2:2", 2, FamilySpec::degree(2)), o), StrategyDomainError);
  EXPECT_THROW(sublevel_subspace(PhaseSubspace::full(make_space(make_ring("zmod:2"), 1)), Strategy::Literal, 1),
               StrategyDomainError);
}

TEST(Engine, Collapse) {
  EXPECT_LE(extract("chain:2:2", 1, "deg1").depth, 1u);
  EXPECT_LE(extract("chain:2:2", 2, "deg1").depth, 1u);
  EXPECT_LE(extract("zmod:2", 2, "deg2", Strategy::RadicalDepth).depth, 1u);
  EXPECT_LE(extract("zmod:3", 1, "deg2", Strategy::RadicalDepth).depth, 1u);
  const auto battery = minimality_battery(1, {});
  for (const auto& v : battery.checks) EXPECT_TRUE(v.pass) << v.name << ": " << v.detail;
}

TEST(Engine, WorkerCountDoesNotChangeFiltration) {
  const auto one = extract("chain:2:2", 1, "deg2", Strategy::Default, 1);
  const auto eight = extract("chain:2:2", 1, "deg2", Strategy::Default, 8);
  EXPECT_EQ(one.closure->keys, eight.closure->keys);
  EXPECT_EQ(one.filtration.strata, eight.filtration.strata);
  const auto s1 = extract("chain:2:2", 2, "deg2", Strategy::Default, 1);
  const auto s8 = extract("chain:2:2", 2, "deg2", Strategy::Default, 8);
  EXPECT_EQ(s1.filtration.sublevel_dims(), s8.filtration.sublevel_dims());
  EXPECT_TRUE(s1.structural->phases == s8.structural->phases);
}

TEST(Engine, ShuffledPresentationIsEquivalent) {
  const auto datum = PhaseDatum::make("chain:2:2", 1, FamilySpec::degree(2));
  const auto base = extract_phase(datum, {});
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    ExtractOptions o;
    o.shuffle_seed = seed;
    const auto other = extract_phase(datum, o);
    const auto eq = equivalence_check(base, other);
    EXPECT_TRUE(eq.comparable);
    EXPECT_TRUE(eq.equivalent) << eq.detail;
    EXPECT_EQ(other.filtration.strata, base.filtration.strata);
  }
}

TEST(Engine, AlternativeCharacterGivesSameFiltration) {
  const auto a = extract_phase(PhaseDatum::make("zmod:4", 1, FamilySpec::degree(2), 1), {});
  const auto b = extract_phase(PhaseDatum::make("zmod:4", 1, FamilySpec::degree(2), 3), {});
  EXPECT_EQ(a.character_index, std::optional<std::size_t>{1});
  EXPECT_EQ(b.character_index, std::optional<std::size_t>{3});
  EXPECT_TRUE(equivalence_check(a, b).equivalent);
}

TEST(Engine, StrategyComparison) {
  const auto p = extract("chain:2:2", 1, "deg2");
  const auto cmp = compare_strategies(p, {Strategy::Default, Strategy::Commutator});
  EXPECT_TRUE(cmp.agree_at_degree_two_and_above);
  EXPECT_TRUE(cmp.divergences_confined);
  EXPECT_TRUE(cmp.reconstruction_ok);
  EXPECT_EQ(cmp.phases_compared, 256u);
  EXPECT_FALSE(cmp.divergences.empty());
  for (const auto& d : cmp.divergences) EXPECT_TRUE(d.additive_or_constant);
  // Radical-depth is outside its domain on cubic phases.
  const auto s = make_space(make_ring("chain:2:2"), 3);
  const auto lst = compare_strategies(std::vector<PhaseFunction>{phase_from_poly(PolynomialSpec::parse("x1x2x3"), s)},
                                      {Strategy::Default, Strategy::RadicalDepth});
  EXPECT_EQ(lst.domain_errors.at("radical-depth"), 1u);
}

TEST(Engine, BoundaryProbe) {
  const auto base = extract("chain:2:2", 3, "deg2");
  EXPECT_EQ(base.depth, 2u);
  EXPECT_FALSE(base.filtration.strict_at(3));
  const auto s = base.datum.space;
  const auto psi = phase_from_poly(PolynomialSpec::parse("x1x2x3"), s);
  const auto report = boundary_probe(base, {psi});
  EXPECT_TRUE(report.proper);
  EXPECT_TRUE(report.tight);
  EXPECT_EQ(report.extended_depth, 3u);
  EXPECT_EQ(report.new_levels, (std::vector<std::size_t>{3}));
  EXPECT_EQ(report.witnesses.count(3), 1u);
  ASSERT_EQ(report.cubic_checks.size(), 1u);
  EXPECT_EQ(report.cubic_checks[0].tensor_at_basis, RingIndex{1});
  EXPECT_EQ(report.cubic_checks[0].default_degree, 3u);

  // Adjoining something already present adds nothing.
  const auto none = boundary_probe(base, {phase_from_poly(PolynomialSpec::parse("2*x1x2"), s)});
  EXPECT_FALSE(none.proper);
  EXPECT_TRUE(none.new_levels.empty());
}

TEST(Engine, WeakMode) {
  ExtractOptions o;
  o.weak_mode = true;
  const auto fat = extract_phase(PhaseDatum::make("fatpoint:2", 1, FamilySpec::degree(2)), o);
  EXPECT_EQ(fat.mode, ExtractionMode::Weak);
  EXPECT_LE(fat.depth, 2u);
  const auto cubic = extract_phase(PhaseDatum::make("chain:2:2", 3, FamilySpec::degree(3)), o);
  EXPECT_EQ(cubic.depth, 3u);
  EXPECT_EQ(cubic.filtration.sublevel_dims(), (std::vector<std::size_t>{12, 14, 44, 84}));
}

// Property: functoriality of differencing and degree under random pullbacks.
TEST(EngineProperty, PullbackFunctoriality) {
  const auto ring = make_ring("chain:2:2");
  std::vector<SpacePtr> spaces{make_space(ring, 1), make_space(ring, 2), make_space(ring, 3)};
  gen::for_seeds(53, 30, [&](std::mt19937_64& rng, std::uint64_t seed) {
    const auto& src = spaces[rng() % 3];
    const auto& dst = spaces[rng() % 3];
    const auto f = ModuleHom::random(src, dst, rng);
    const auto phi = gen::random_poly_phase(dst, 3, rng);
    const auto pulled = pullback_phase(f, phi);
    const auto h = gen::random_element(src, rng);
    ASSERT_EQ(difference(pulled, h), pullback_phase(f, difference(phi, f.apply(h)))) << seed;
    for (auto st : {Strategy::Default, Strategy::Commutator})
      ASSERT_LE(defect_degree(pulled, st), defect_degree(phi, st)) << seed;
  });
}
