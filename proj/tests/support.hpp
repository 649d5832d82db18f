#pragma once

// Independent oracles and hand-rolled generators for the test suites.
// The oracles compute from first principles (coefficient arithmetic, direct
// sums over tuples) and never call the library's derived machinery.

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "phaseforge/module.hpp"
#include "phaseforge/phase.hpp"
#include "phaseforge/ring.hpp"

namespace oracle {

/// Truncated polynomial ring F_p[u]/(u^k), element index = Σ c_i p^i.
struct ChainArith {
  unsigned p, k;
  std::vector<unsigned> coeffs(unsigned a) const {
    std::vector<unsigned> c(k);
    for (unsigned i = 0; i < k; ++i, a /= p) c[i] = a % p;
    return c;
  }
  unsigned index(const std::vector<unsigned>& c) const {
    unsigned a = 0;
    for (unsigned i = k; i-- > 0;) a = a * p + c[i] % p;
    return a;
  }
  unsigned add(unsigned a, unsigned b) const {
    auto x = coeffs(a), y = coeffs(b);
    for (unsigned i = 0; i < k; ++i) x[i] = (x[i] + y[i]) % p;
    return index(x);
  }
  unsigned neg(unsigned a) const {
    auto x = coeffs(a);
    for (auto& c : x) c = (p - c) % p;
    return index(x);
  }
  unsigned sub(unsigned a, unsigned b) const { return add(a, neg(b)); }
  unsigned mul(unsigned a, unsigned b) const {
    auto x = coeffs(a), y = coeffs(b);
    std::vector<unsigned> z(k, 0);
    for (unsigned i = 0; i < k; ++i)
      for (unsigned j = 0; i + j < k; ++j) z[i + j] = (z[i + j] + x[i] * y[j]) % p;
    return index(z);
  }
  unsigned order() const {
    unsigned o = 1;
    for (unsigned i = 0; i < k; ++i) o *= p;
    return o;
  }
};

/// Z/n.
struct ZModArith {
  unsigned n;
  unsigned add(unsigned a, unsigned b) const { return (a + b) % n; }
  unsigned neg(unsigned a) const { return (n - a) % n; }
  unsigned sub(unsigned a, unsigned b) const { return add(a, neg(b)); }
  unsigned mul(unsigned a, unsigned b) const { return (a * b) % n; }
  unsigned order() const { return n; }
};

/// F_p[x,y]/(x^2,xy,y^2) with index a + p·b + p²·c for a + bx + cy.
struct FatPointArith {
  unsigned p;
  unsigned add(unsigned a, unsigned b) const {
    return (a % p + b % p) % p + p * ((a / p % p + b / p % p) % p) + p * p * ((a / p / p + b / p / p) % p);
  }
  unsigned neg(unsigned a) const {
    return (p - a % p) % p + p * ((p - a / p % p) % p) + p * p * ((p - a / p / p) % p);
  }
  unsigned mul(unsigned a, unsigned b) const {
    const unsigned a0 = a % p, a1 = a / p % p, a2 = a / p / p;
    const unsigned b0 = b % p, b1 = b / p % p, b2 = b / p / p;
    return (a0 * b0) % p + p * ((a0 * b1 + a1 * b0) % p) + p * p * ((a0 * b2 + a2 * b0) % p);
  }
  unsigned order() const { return p * p * p; }
};

/// Coordinates of a packed module element, coordinate 0 least significant.
inline std::vector<unsigned> coords(std::uint32_t x, unsigned q, std::size_t n) {
  std::vector<unsigned> c(n);
  for (std::size_t i = 0; i < n; ++i, x /= q) c[i] = x % q;
  return c;
}

inline std::uint32_t pack(const std::vector<unsigned>& c, unsigned q) {
  std::uint32_t x = 0;
  for (std::size_t i = c.size(); i-- > 0;) x = x * q + c[i];
  return x;
}

/// Componentwise addition in R^n through a ring oracle.
template <typename Arith>
std::uint32_t module_add(const Arith& r, std::uint32_t x, std::uint32_t y, std::size_t n) {
  auto a = coords(x, r.order(), n), b = coords(y, r.order(), n);
  for (std::size_t i = 0; i < n; ++i) a[i] = r.add(a[i], b[i]);
  return pack(a, r.order());
}

/// Δ_{h1..hk}φ(x) as the signed sum over subsets, with ring ops from the oracle.
template <typename Arith>
unsigned alternating_difference(const Arith& r, const std::vector<unsigned>& table, std::size_t n,
                                const std::vector<std::uint32_t>& hs, std::uint32_t x) {
  unsigned total = 0;
  const std::size_t k = hs.size();
  for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
    std::uint32_t point = x;
    int bits = 0;
    for (std::size_t i = 0; i < k; ++i)
      if (mask >> i & 1u) {
        point = module_add(r, point, hs[i], n);
        ++bits;
      }
    const unsigned v = table[point];
    total = ((k - bits) % 2 == 0) ? r.add(total, v) : r.sub(total, v);
  }
  return total;
}

/// Least d with every (d+1)-fold difference zero, by scanning all tuples.
template <typename Arith>
std::size_t brute_degree(const Arith& r, const std::vector<unsigned>& table, std::size_t n) {
  const std::uint32_t size = static_cast<std::uint32_t>(table.size());
  for (std::size_t d = 0; d <= 4; ++d) {
    const std::size_t k = d + 1;
    std::vector<std::uint32_t> hs(k, 0);
    bool all_zero = true;
    std::uint64_t total = 1;
    for (std::size_t i = 0; i < k; ++i) total *= size;
    for (std::uint64_t t = 0; t < total && all_zero; ++t) {
      std::uint64_t rest = t;
      for (auto& h : hs) {
        h = static_cast<std::uint32_t>(rest % size);
        rest /= size;
      }
      for (std::uint32_t x = 0; x < size && all_zero; ++x)
        if (alternating_difference(r, table, n, hs, x) != 0) all_zero = false;
    }
    if (all_zero) return d;
  }
  return 99;
}

/// All additive characters R -> Z/m found by trying every exponent table.
template <typename Arith>
std::vector<std::vector<unsigned>> brute_characters(const Arith& r, unsigned m) {
  std::vector<std::vector<unsigned>> out;
  const unsigned q = r.order();
  std::uint64_t total = 1;
  for (unsigned i = 0; i < q; ++i) total *= m;
  for (std::uint64_t t = 0; t < total; ++t) {
    std::vector<unsigned> e(q);
    std::uint64_t rest = t;
    for (auto& v : e) {
      v = static_cast<unsigned>(rest % m);
      rest /= m;
    }
    bool hom = true;
    for (unsigned a = 0; a < q && hom; ++a)
      for (unsigned b = 0; b < q && hom; ++b)
        if (e[r.add(a, b)] != (e[a] + e[b]) % m) hom = false;
    if (hom) out.push_back(e);
  }
  return out;
}

/// No nonzero principal ideal rR inside ker χ.
template <typename Arith>
bool brute_generating(const Arith& r, const std::vector<unsigned>& e) {
  for (unsigned x = 1; x < r.order(); ++x) {
    bool inside = true;
    for (unsigned y = 0; y < r.order() && inside; ++y)
      if (e[r.mul(x, y)] != 0) inside = false;
    if (inside) return false;
  }
  return true;
}

}  // namespace oracle

namespace gen {

/// Random phase table with values in the ring.
inline phaseforge::PhaseFunction random_phase(const phaseforge::SpacePtr& space, std::mt19937_64& rng) {
  std::uniform_int_distribution<unsigned> value(0, static_cast<unsigned>(space->ring()->order() - 1));
  std::vector<phaseforge::RingIndex> table(space->size());
  for (auto& v : table) v = static_cast<phaseforge::RingIndex>(value(rng));
  return phaseforge::PhaseFunction(space, std::move(table));
}

inline phaseforge::ModuleElement random_element(const phaseforge::SpacePtr& space, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(space->size() - 1));
  return {pick(rng)};
}

/// Random polynomial phase of degree at most `max_degree` with random coefficients.
inline phaseforge::PhaseFunction random_poly_phase(const phaseforge::SpacePtr& space, std::size_t max_degree,
                                                   std::mt19937_64& rng) {
  const std::size_t n = space->rank();
  const unsigned q = static_cast<unsigned>(space->ring()->order());
  std::uniform_int_distribution<unsigned> coeff(0, q - 1);
  std::uniform_int_distribution<std::size_t> pos(0, n - 1);
  std::uniform_int_distribution<std::size_t> size(0, max_degree);
  std::uniform_int_distribution<int> terms(1, 4);
  phaseforge::PolynomialSpec spec;
  for (int t = terms(rng); t > 0; --t) {
    phaseforge::Monomial m;
    for (std::size_t s = size(rng); s > 0; --s) m.positions.push_back(pos(rng));
    m.coefficient = static_cast<phaseforge::RingIndex>(coeff(rng));
    spec.terms.push_back(std::move(m));
  }
  return phaseforge::phase_from_poly(spec, space);
}

/// Runs `body` on `count` seeded cases; the seed is reported on failure by the caller.
inline void for_seeds(std::uint64_t base, int count, const std::function<void(std::mt19937_64&, std::uint64_t)>& body) {
  for (int i = 0; i < count; ++i) {
    const std::uint64_t seed = base * 1000003u + static_cast<std::uint64_t>(i);
    std::mt19937_64 rng(seed);
    body(rng, seed);
  }
}

}  // namespace gen
