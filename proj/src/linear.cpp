#include "phaseforge/linear.hpp"

#include <algorithm>
#include <cmath>

#include "phaseforge/errors.hpp"

namespace phaseforge {

namespace {

std::vector<std::uint8_t> inverses(std::uint32_t p) {
  std::vector<std::uint8_t> inv(p, 0);
  for (std::uint32_t a = 1; a < p; ++a)
    for (std::uint32_t b = 1; b < p; ++b)
      if (a * b % p == 1) inv[a] = static_cast<std::uint8_t>(b);
  return inv;
}

// v -= c·row over F_p
void subtract_multiple(FpVector& v, const FpVector& row, std::uint32_t c, std::uint32_t p) {
  const std::uint32_t neg = p - c;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (row[i] != 0) v[i] = static_cast<std::uint8_t>((v[i] + neg * row[i]) % p);
}

std::size_t leading(const FpVector& v) {
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i] != 0) return i;
  return v.size();
}

}  // namespace

FpSpan::FpSpan(std::uint32_t prime, std::size_t length)
    : p_(prime), length_(length), inverse_(inverses(prime)) {
  if (prime < 2 || prime > 255) throw DomainError("F_p span needs a prime below 256");
}

FpVector FpSpan::reduce(FpVector v) const {
  if (v.size() != length_) throw DomainError("vector length does not match the span");
  for (std::size_t r = 0; r < rows_.size(); ++r)
    if (const std::uint32_t c = v[pivots_[r]]; c != 0) subtract_multiple(v, rows_[r], c, p_);
  return v;
}

bool FpSpan::contains(const FpVector& v) const {
  const FpVector rest = reduce(v);
  return std::all_of(rest.begin(), rest.end(), [](std::uint8_t x) { return x == 0; });
}

bool FpSpan::insert(FpVector v) {
  v = reduce(std::move(v));
  const std::size_t pivot = leading(v);
  if (pivot == v.size()) return false;
  const std::uint32_t scale = inverse_[v[pivot]];
  for (auto& x : v) x = static_cast<std::uint8_t>(x * scale % p_);
  for (auto& row : rows_)
    if (const std::uint32_t c = row[pivot]; c != 0) subtract_multiple(row, v, c, p_);
  const auto at = std::lower_bound(pivots_.begin(), pivots_.end(), pivot) - pivots_.begin();
  pivots_.insert(pivots_.begin() + at, pivot);
  rows_.insert(rows_.begin() + at, std::move(v));
  return true;
}

bool FpSpan::contains_span(const FpSpan& other) const {
  return std::all_of(other.rows_.begin(), other.rows_.end(), [&](const FpVector& r) { return contains(r); });
}

FpVector FpSpan::combination(std::span<const std::uint8_t> coefficients) const {
  if (coefficients.size() != rows_.size()) throw DomainError("coefficient count does not match dimension");
  FpVector out(length_, 0);
  for (std::size_t r = 0; r < rows_.size(); ++r)
    if (coefficients[r] % p_ != 0) subtract_multiple(out, rows_[r], p_ - coefficients[r] % p_, p_);
  return out;
}

FpVector FpSpan::random_element(std::mt19937_64& rng) const {
  std::uniform_int_distribution<std::uint32_t> pick(0, p_ - 1);
  FpVector c(rows_.size());
  for (auto& x : c) x = static_cast<std::uint8_t>(pick(rng));
  return combination(c);
}

std::vector<FpVector> kernel_combinations(std::uint32_t prime, std::span<const FpVector> images) {
  const std::size_t count = images.size();
  const auto inv = inverses(prime);
  std::vector<FpVector> pivot_rows;  // image part then coefficient part
  std::vector<std::size_t> pivot_cols;
  std::vector<FpVector> kernel;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t width = images[i].size();
    FpVector row(images[i]);
    row.resize(width + count, 0);
    row[width + i] = 1;
    for (std::size_t r = 0; r < pivot_rows.size(); ++r)
      if (const std::uint32_t c = row[pivot_cols[r]]; c != 0) subtract_multiple(row, pivot_rows[r], c, prime);
    std::size_t pivot = width;
    for (std::size_t j = 0; j < width; ++j)
      if (row[j] != 0) {
        pivot = j;
        break;
      }
    if (pivot == width) {
      kernel.emplace_back(row.begin() + static_cast<std::ptrdiff_t>(width), row.end());
      continue;
    }
    const std::uint32_t scale = inv[row[pivot]];
    for (auto& x : row) x = static_cast<std::uint8_t>(x * scale % prime);
    pivot_rows.push_back(std::move(row));
    pivot_cols.push_back(pivot);
  }
  return kernel;
}

FpVector phase_to_vector(const PhaseFunction& phi) {
  const auto& ring = phi.ring();
  if (ring.elementary_prime() == 0)
    throw DomainError(ring.name() + " does not have an elementary abelian additive group");
  const std::size_t r = ring.elementary_rank();
  FpVector v(phi.size() * r);
  for (std::uint32_t x = 0; x < phi.size(); ++x)
    for (std::size_t j = 0; j < r; ++j) v[x * r + j] = static_cast<std::uint8_t>(ring.digit(phi.at(x), j));
  return v;
}

PhaseFunction vector_to_phase(const SpacePtr& domain, const FpVector& v) {
  const auto& ring = *domain->ring();
  const std::size_t r = ring.elementary_rank();
  if (ring.elementary_prime() == 0 || v.size() != domain->size() * r)
    throw DomainError("vector does not encode a phase on this module");
  std::vector<std::uint32_t> digits(r);
  return PhaseFunction::tabulate(domain, [&](ModuleElement x) {
    for (std::size_t j = 0; j < r; ++j) digits[j] = v[x.packed * r + j];
    return ring.from_digits(digits);
  });
}

namespace {

std::uint32_t prime_of(const SpacePtr& domain) {
  const auto& ring = *domain->ring();
  if (ring.elementary_prime() == 0)
    throw DomainError("linear phase spaces need an elementary abelian ring; " + ring.name() + " is not");
  domain->require_enumerable("phase subspace");
  return ring.elementary_prime();
}

}  // namespace

PhaseSubspace::PhaseSubspace(SpacePtr domain)
    : domain_(std::move(domain)),
      span_(prime_of(domain_), domain_->size() * domain_->ring()->elementary_rank()) {}

PhaseSubspace PhaseSubspace::full(const SpacePtr& domain) {
  PhaseSubspace out(domain);
  for (std::size_t i = 0; i < out.span_.length(); ++i) {
    FpVector e(out.span_.length(), 0);
    e[i] = 1;
    out.span_.insert(std::move(e));
  }
  return out;
}

PhaseSubspace PhaseSubspace::translation_closure(const SpacePtr& domain,
                                                 std::span<const PhaseFunction> phases) {
  PhaseSubspace out(domain);
  std::vector<PhaseFunction> pending;
  for (const auto& phi : phases)
    if (out.insert(phi)) pending.push_back(phi);
  const auto shifts = domain->additive_generators();
  while (!pending.empty()) {
    const PhaseFunction phi = std::move(pending.back());
    pending.pop_back();
    for (auto e : shifts) {
      PhaseFunction moved = phi.translated(e);
      if (out.insert(moved)) pending.push_back(std::move(moved));
    }
  }
  return out;
}

std::vector<PhaseFunction> PhaseSubspace::basis() const {
  std::vector<PhaseFunction> out;
  out.reserve(span_.dim());
  for (const auto& row : span_.basis()) out.push_back(vector_to_phase(domain_, row));
  return out;
}

PhaseFunction PhaseSubspace::random_phase(std::mt19937_64& rng) const {
  return vector_to_phase(domain_, span_.random_element(rng));
}

PhaseSubspace PhaseSubspace::kernel(const PhaseCondition& condition) const {
  std::vector<FpVector> images;
  images.reserve(span_.dim());
  for (const auto& phi : basis()) images.push_back(condition(phi));
  PhaseSubspace out(domain_);
  for (const auto& c : kernel_combinations(prime(), images)) out.span_.insert(span_.combination(c));
  return out;
}

PhaseSubspace PhaseSubspace::intersect(const PhaseSubspace& other) const {
  return kernel([&](const PhaseFunction& phi) { return other.span_.reduce(phase_to_vector(phi)); });
}

double PhaseSubspace::log2_size() const {
  return static_cast<double>(dim()) * std::log2(static_cast<double>(prime()));
}

std::vector<PhaseFunction> PhaseSubspace::enumerate(std::uint64_t limit) const {
  if (log2_size() > std::log2(static_cast<double>(limit)) + 1e-9)
    throw CapacityError("phase subspace of dimension " + std::to_string(dim()) +
                        " is too large to enumerate");
  std::vector<PhaseFunction> out;
  FpVector c(dim(), 0);
  while (true) {
    out.push_back(vector_to_phase(domain_, span_.combination(c)));
    std::size_t i = 0;
    while (i < c.size() && ++c[i] == prime()) c[i++] = 0;
    if (i == c.size()) break;
  }
  return out;
}

}  // namespace phaseforge
