#include "phaseforge/ring.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>

#include "phaseforge/errors.hpp"

namespace phaseforge {

bool is_prime(unsigned n) {
  if (n < 2) return false;
  for (unsigned d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

namespace {

unsigned parse_unsigned(std::string_view text, std::string_view what) {
  unsigned value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
    throw ConstructionError("ring spec: expected integer for " + std::string(what) +
                            ", got '" + std::string(text) + "'");
  return value;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  return s;
}

std::size_t ipow(std::size_t base, std::size_t exp) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    r *= base;
    if (r > (1u << 20)) return r;
  }
  return r;
}

// Index-level multiplication by coefficient vectors of length `len` over F_p.
std::vector<unsigned> to_digits(std::size_t index, unsigned base, std::size_t len) {
  std::vector<unsigned> d(len);
  for (std::size_t i = 0; i < len; ++i) {
    d[i] = static_cast<unsigned>(index % base);
    index /= base;
  }
  return d;
}

std::size_t from_digits_base(const std::vector<unsigned>& d, unsigned base) {
  std::size_t index = 0;
  for (std::size_t i = d.size(); i-- > 0;) index = index * base + d[i];
  return index;
}

FiniteRing build_zmod(unsigned n) {
  if (n < 2 || n > kMaxRingOrder)
    throw ConstructionError("zmod:" + std::to_string(n) + ": modulus must lie in [2, 256]");
  std::vector<RingIndex> add(n * n), mul(n * n);
  for (unsigned a = 0; a < n; ++a)
    for (unsigned b = 0; b < n; ++b) {
      add[a * n + b] = static_cast<RingIndex>((a + b) % n);
      mul[a * n + b] = static_cast<RingIndex>((a * b) % n);
    }
  return FiniteRing::from_tables("zmod:" + std::to_string(n), n, std::move(add),
                                 std::move(mul), 0, 1);
}

// Generic truncated-polynomial style construction: elements are coefficient
// vectors over F_p of length `len`, multiplied by `product`.
template <typename Product>
FiniteRing build_coefficient_ring(std::string name, unsigned p, std::size_t len,
                                  Product product) {
  const std::size_t order = ipow(p, len);
  std::vector<RingIndex> add(order * order), mul(order * order);
  for (std::size_t a = 0; a < order; ++a) {
    const auto da = to_digits(a, p, len);
    for (std::size_t b = 0; b < order; ++b) {
      const auto db = to_digits(b, p, len);
      std::vector<unsigned> sum(len);
      for (std::size_t i = 0; i < len; ++i) sum[i] = (da[i] + db[i]) % p;
      add[a * order + b] = static_cast<RingIndex>(from_digits_base(sum, p));
      mul[a * order + b] = static_cast<RingIndex>(from_digits_base(product(da, db), p));
    }
  }
  return FiniteRing::from_tables(std::move(name), order, std::move(add), std::move(mul), 0, 1);
}

FiniteRing build_chain(unsigned p, unsigned k) {
  const std::string name = "chain:" + std::to_string(p) + ":" + std::to_string(k);
  if (!is_prime(p)) throw ConstructionError(name + ": p must be prime");
  if (k < 1) throw ConstructionError(name + ": k must be at least 1");
  if (ipow(p, k) > kMaxRingOrder) throw ConstructionError(name + ": order p^k exceeds 256");
  // (Σ a_i u^i)(Σ b_j u^j) truncated at u^k.
  return build_coefficient_ring(name, p, k, [p, k](const auto& a, const auto& b) {
    std::vector<unsigned> c(k, 0);
    for (unsigned i = 0; i < k; ++i)
      for (unsigned j = 0; i + j < k; ++j) c[i + j] = (c[i + j] + a[i] * b[j]) % p;
    return c;
  });
}

FiniteRing build_fatpoint(unsigned p) {
  const std::string name = "fatpoint:" + std::to_string(p);
  if (!is_prime(p)) throw ConstructionError(name + ": p must be prime");
  if (ipow(p, 3) > kMaxRingOrder) throw ConstructionError(name + ": order p^3 exceeds 256");
  // Basis (1, x, y) with x^2 = xy = y^2 = 0.
  return build_coefficient_ring(name, p, 3, [p](const auto& a, const auto& b) {
    return std::vector<unsigned>{(a[0] * b[0]) % p, (a[0] * b[1] + a[1] * b[0]) % p,
                                 (a[0] * b[2] + a[2] * b[0]) % p};
  });
}

FiniteRing build_product(const FiniteRing& left, const FiniteRing& right) {
  const std::string name = "prod:(" + left.name() + "," + right.name() + ")";
  const std::size_t o1 = left.order(), o2 = right.order();
  if (o1 * o2 > kMaxRingOrder) throw ConstructionError(name + ": product order exceeds 256");
  const std::size_t order = o1 * o2;
  std::vector<RingIndex> add(order * order), mul(order * order);
  for (std::size_t a = 0; a < order; ++a) {
    const auto a1 = static_cast<RingIndex>(a % o1), a2 = static_cast<RingIndex>(a / o1);
    for (std::size_t b = 0; b < order; ++b) {
      const auto b1 = static_cast<RingIndex>(b % o1), b2 = static_cast<RingIndex>(b / o1);
      add[a * order + b] = static_cast<RingIndex>(left.add(a1, b1) + o1 * right.add(a2, b2));
      mul[a * order + b] = static_cast<RingIndex>(left.mul(a1, b1) + o1 * right.mul(a2, b2));
    }
  }
  const auto zero = static_cast<RingIndex>(left.zero() + o1 * right.zero());
  const auto one = static_cast<RingIndex>(left.one() + o1 * right.one());
  return FiniteRing::from_tables(name, order, std::move(add), std::move(mul), zero, one);
}

}  // namespace

RingSpec RingSpec::parse(std::string_view text) {
  text = trim(text);
  RingSpec spec;
  auto take_prefix = [&](std::string_view prefix) {
    if (text.substr(0, prefix.size()) != prefix) return false;
    text.remove_prefix(prefix.size());
    return true;
  };
  if (take_prefix("zmod:")) {
    spec.family = Family::ZMod;
    spec.modulus = parse_unsigned(text, "modulus");
  } else if (take_prefix("chain:")) {
    spec.family = Family::Chain;
    const auto colon = text.find(':');
    if (colon == std::string_view::npos)
      throw ConstructionError("ring spec: chain expects chain:<p>:<k>");
    spec.prime = parse_unsigned(text.substr(0, colon), "p");
    spec.length = parse_unsigned(text.substr(colon + 1), "k");
  } else if (take_prefix("fatpoint:")) {
    spec.family = Family::FatPoint;
    spec.prime = parse_unsigned(text, "p");
  } else if (take_prefix("prod:")) {
    spec.family = Family::Product;
    if (text.size() < 2 || text.front() != '(' || text.back() != ')')
      throw ConstructionError("ring spec: prod expects prod:(<spec>,<spec>)");
    text = text.substr(1, text.size() - 2);
    int depth = 0;
    std::size_t split = std::string_view::npos;
    for (std::size_t i = 0; i < text.size(); ++i) {
      if (text[i] == '(') ++depth;
      if (text[i] == ')') --depth;
      if (text[i] == ',' && depth == 0) {
        if (split != std::string_view::npos)
          throw ConstructionError("ring spec: prod takes exactly two factors");
        split = i;
      }
    }
    if (split == std::string_view::npos)
      throw ConstructionError("ring spec: prod takes exactly two factors");
    spec.factors.push_back(parse(text.substr(0, split)));
    spec.factors.push_back(parse(text.substr(split + 1)));
  } else {
    throw ConstructionError("ring spec: unknown family in '" + std::string(text) + "'");
  }
  return spec;
}

std::string RingSpec::to_string() const {
  switch (family) {
    case Family::ZMod: return "zmod:" + std::to_string(modulus);
    case Family::Chain: return "chain:" + std::to_string(prime) + ":" + std::to_string(length);
    case Family::FatPoint: return "fatpoint:" + std::to_string(prime);
    case Family::Product:
      return "prod:(" + factors.at(0).to_string() + "," + factors.at(1).to_string() + ")";
  }
  return {};
}

FiniteRing build_ring(const RingSpec& spec) {
  switch (spec.family) {
    case RingSpec::Family::ZMod: return build_zmod(spec.modulus);
    case RingSpec::Family::Chain: return build_chain(spec.prime, spec.length);
    case RingSpec::Family::FatPoint: return build_fatpoint(spec.prime);
    case RingSpec::Family::Product:
      if (spec.factors.size() != 2)
        throw ConstructionError("ring spec: prod takes exactly two factors");
      return build_product(build_ring(spec.factors[0]), build_ring(spec.factors[1]));
  }
  throw ConstructionError("ring spec: unknown family");
}

RingPtr make_ring(std::string_view spec) {
  return std::make_shared<const FiniteRing>(build_ring(RingSpec::parse(spec)));
}

FiniteRing FiniteRing::from_tables(std::string name, std::size_t order,
                                   std::vector<RingIndex> add_table,
                                   std::vector<RingIndex> mul_table, RingIndex zero,
                                   RingIndex one) {
  if (order == 0 || order > kMaxRingOrder)
    throw ConstructionError(name + ": order must lie in [1, 256]");
  if (add_table.size() != order * order || mul_table.size() != order * order)
    throw ConstructionError(name + ": table size does not match order");
  if (zero >= order || one >= order)
    throw ConstructionError(name + ": identity index out of range");
  FiniteRing ring;
  ring.name_ = std::move(name);
  ring.order_ = order;
  ring.add_ = std::move(add_table);
  ring.mul_ = std::move(mul_table);
  ring.zero_ = zero;
  ring.one_ = one;
  ring.validate();
  ring.derive_structure();
  return ring;
}

void FiniteRing::validate() const {
  const std::size_t n = order_;
  auto fail = [&](const std::string& law) {
    throw InternalError(name_ + ": table validation failed (" + law + ")");
  };
  for (std::size_t v : add_) if (v >= n) fail("add value out of range");
  for (std::size_t v : mul_) if (v >= n) fail("mul value out of range");
  for (std::size_t a = 0; a < n; ++a) {
    const auto ra = static_cast<RingIndex>(a);
    if (add(ra, zero_) != ra) fail("additive identity");
    if (mul(ra, one_) != ra) fail("multiplicative identity");
    bool has_inverse = false;
    for (std::size_t b = 0; b < n; ++b) {
      const auto rb = static_cast<RingIndex>(b);
      if (add(ra, rb) != add(rb, ra)) fail("additive commutativity");
      if (mul(ra, rb) != mul(rb, ra)) fail("multiplicative commutativity");
      if (add(ra, rb) == zero_) has_inverse = true;
    }
    if (!has_inverse) fail("additive inverse");
  }
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      const auto ra = static_cast<RingIndex>(a), rb = static_cast<RingIndex>(b);
      const RingIndex ab_sum = add(ra, rb), ab_prod = mul(ra, rb);
      for (std::size_t c = 0; c < n; ++c) {
        const auto rc = static_cast<RingIndex>(c);
        if (add(ab_sum, rc) != add(ra, add(rb, rc))) fail("additive associativity");
        if (mul(ab_prod, rc) != mul(ra, mul(rb, rc))) fail("multiplicative associativity");
        if (mul(ra, add(rb, rc)) != add(ab_prod, mul(ra, rc))) fail("distributivity");
      }
    }
}

void FiniteRing::derive_structure() {
  const std::size_t n = order_;
  neg_.assign(n, 0);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      if (add(static_cast<RingIndex>(a), static_cast<RingIndex>(b)) == zero_)
        neg_[a] = static_cast<RingIndex>(b);

  add_order_.assign(n, 1);
  exponent_ = 1;
  for (std::size_t a = 0; a < n; ++a) {
    std::uint32_t k = 1;
    for (auto acc = static_cast<RingIndex>(a); acc != zero_; acc = add(acc, static_cast<RingIndex>(a)))
      ++k;
    add_order_[a] = k;
    exponent_ = std::lcm(exponent_, k);
  }

  add_gens_.clear();
  std::vector<RingIndex> span{zero_};
  for (std::size_t a = 0; a < n && span.size() < n; ++a) {
    const auto ra = static_cast<RingIndex>(a);
    if (std::binary_search(span.begin(), span.end(), ra)) continue;
    add_gens_.push_back(ra);
    span = additive_span(*this, add_gens_);
  }

  chain_ = phaseforge::radical_chain(*this);
  level_.assign(n, 0);
  for (std::size_t s = 0; s < chain_.size(); ++s)
    for (RingIndex r : chain_[s]) level_[r] = s;

  elem_prime_ = 0;
  elem_rank_ = 0;
  if (is_prime(exponent_) && zero_ == 0) {
    const std::uint32_t p = exponent_;
    std::size_t rank = 0;
    std::size_t power = 1;
    while (power < n) {
      power *= p;
      ++rank;
    }
    bool digitwise = power == n;
    for (std::size_t a = 0; digitwise && a < n; ++a) {
      const auto da = to_digits(a, p, rank);
      for (std::size_t b = 0; digitwise && b < n; ++b) {
        const auto db = to_digits(b, p, rank);
        std::vector<unsigned> sum(rank);
        for (std::size_t i = 0; i < rank; ++i) sum[i] = (da[i] + db[i]) % p;
        digitwise = from_digits_base(sum, p) == add(static_cast<RingIndex>(a), static_cast<RingIndex>(b));
      }
    }
    if (digitwise) {
      elem_prime_ = p;
      elem_rank_ = rank;
    }
  }
}

RingIndex FiniteRing::pow(RingIndex a, std::size_t e) const {
  RingIndex result = one_;
  for (std::size_t i = 0; i < e; ++i) result = mul(result, a);
  return result;
}

RingIndex FiniteRing::times(std::size_t n, RingIndex a) const {
  RingIndex acc = zero_;
  for (std::size_t i = 0; i < n % add_order_[a]; ++i) acc = add(acc, a);
  return acc;
}

std::uint32_t FiniteRing::digit(RingIndex a, std::size_t j) const {
  std::uint32_t v = a;
  for (std::size_t i = 0; i < j; ++i) v /= elem_prime_;
  return v % elem_prime_;
}

RingIndex FiniteRing::from_digits(std::span<const std::uint32_t> digits) const {
  std::size_t index = 0;
  for (std::size_t i = digits.size(); i-- > 0;) index = index * elem_prime_ + digits[i];
  return static_cast<RingIndex>(index);
}

std::vector<RingIndex> additive_span(const FiniteRing& ring, std::span<const RingIndex> seeds) {
  std::vector<bool> in(ring.order(), false);
  std::vector<RingIndex> members{ring.zero()};
  in[ring.zero()] = true;
  for (std::size_t i = 0; i < members.size(); ++i)
    for (RingIndex s : seeds) {
      const RingIndex next = ring.add(members[i], s);
      if (!in[next]) {
        in[next] = true;
        members.push_back(next);
      }
    }
  std::sort(members.begin(), members.end());
  return members;
}

std::vector<RingIndex> nilpotents_by_power(const FiniteRing& ring) {
  std::vector<RingIndex> out;
  for (std::size_t a = 0; a < ring.order(); ++a)
    if (ring.pow(static_cast<RingIndex>(a), ring.order()) == ring.zero())
      out.push_back(static_cast<RingIndex>(a));
  return out;
}

std::vector<RingIndex> nilpotents_by_orbit(const FiniteRing& ring) {
  std::vector<RingIndex> out;
  for (std::size_t a = 0; a < ring.order(); ++a) {
    const auto ra = static_cast<RingIndex>(a);
    std::vector<bool> seen(ring.order(), false);
    RingIndex cur = ra;
    while (!seen[cur] && cur != ring.zero()) {
      seen[cur] = true;
      cur = ring.mul(cur, ra);
    }
    if (cur == ring.zero()) out.push_back(ra);
  }
  return out;
}

std::vector<std::vector<RingIndex>> radical_chain(const FiniteRing& ring) {
  std::vector<RingIndex> everything(ring.order());
  std::iota(everything.begin(), everything.end(), RingIndex{0});
  std::vector<std::vector<RingIndex>> chain{everything};
  const auto radical = nilpotents_by_orbit(ring);
  std::vector<RingIndex> current = radical;
  while (true) {
    if (current.size() >= chain.back().size())
      throw InternalError(ring.name() + ": radical chain failed to decrease");
    chain.push_back(current);
    if (current.size() == 1) break;
    std::vector<RingIndex> products;
    for (RingIndex a : current)
      for (RingIndex b : radical) products.push_back(ring.mul(a, b));
    std::sort(products.begin(), products.end());
    products.erase(std::unique(products.begin(), products.end()), products.end());
    current = additive_span(ring, products);
  }
  return chain;
}

}  // namespace phaseforge
