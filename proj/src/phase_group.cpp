#include "phaseforge/phase_group.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "phaseforge/digest.hpp"
#include "phaseforge/errors.hpp"
#include "phaseforge/parallel.hpp"

namespace phaseforge {

PhaseGroupElement::PhaseGroupElement(PhaseFunction psi, ModuleElement shift)
    : psi_(std::move(psi)), shift_(shift) {
  if (!psi_.domain()->contains(shift_)) throw DomainError("translation outside the phase domain");
}

PhaseGroupElement PhaseGroupElement::identity(const SpacePtr& space) {
  return PhaseGroupElement(PhaseFunction::zero(space), space->zero());
}

PhaseGroupElement PhaseGroupElement::translation(const SpacePtr& space, ModuleElement a) {
  return PhaseGroupElement(PhaseFunction::zero(space), a);
}

PhaseGroupElement PhaseGroupElement::multiplication(PhaseFunction psi) {
  const ModuleElement origin = psi.domain()->zero();
  return PhaseGroupElement(std::move(psi), origin);
}

std::string PhaseGroupElement::key() const {
  std::string out(psi_.table().begin(), psi_.table().end());
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>(shift_.packed >> (8 * i) & 0xFFU));
  return out;
}

PhaseGroupElement PhaseGroupElement::from_key(const SpacePtr& space, std::string_view key) {
  if (key.size() != space->size() + 4) throw DomainError("element key has the wrong length");
  std::vector<RingIndex> table(key.begin(), key.end() - 4);
  std::uint32_t shift = 0;
  for (int i = 0; i < 4; ++i)
    shift |= static_cast<std::uint32_t>(static_cast<unsigned char>(key[space->size() + i])) << (8 * i);
  return PhaseGroupElement(PhaseFunction(space, std::move(table)), {shift});
}

PhaseGroupElement compose(const PhaseGroupElement& g1, const PhaseGroupElement& g2) {
  if (!g1.domain()->same_as(*g2.domain())) throw DomainError("composing operators on different modules");
  return PhaseGroupElement(g1.phase() + g2.phase().translated(g1.shift()),
                           g1.domain()->add(g1.shift(), g2.shift()));
}

PhaseGroupElement invert(const PhaseGroupElement& g) {
  const ModuleElement back = g.domain()->neg(g.shift());
  return PhaseGroupElement(-g.phase().translated(back), back);
}

PhaseGroupElement translation_commutator(const PhaseGroupElement& g, ModuleElement h) {
  const auto& space = g.domain();
  const auto t = PhaseGroupElement::translation(space, h);
  return compose(compose(compose(g, t), invert(g)), invert(t));
}

std::size_t commutator_degree(const PhaseFunction& psi) {
  const auto g = PhaseGroupElement::multiplication(psi);
  if (g.is_scalar()) return 0;
  const auto gens = psi.domain()->additive_generators();
  for (std::size_t k = 1; k <= kMaxDerivativeOrder; ++k) {
    std::function<bool(const PhaseGroupElement&, std::size_t, std::size_t)> all_scalar =
        [&](const PhaseGroupElement& current, std::size_t level, std::size_t start) {
          if (level == k) return current.is_scalar();
          for (std::size_t i = start; i < gens.size(); ++i)
            if (!all_scalar(translation_commutator(current, gens[i]), level + 1, i)) return false;
          return true;
        };
    if (all_scalar(g, 0, 0)) return k;
  }
  throw CapacityError("commutator depth exceeds the derivative-order cap of " +
                      std::to_string(kMaxDerivativeOrder));
}

bool ClosureResult::contains(std::string_view key) const {
  return std::binary_search(keys.begin(), keys.end(), key,
                            [](std::string_view a, std::string_view b) { return a < b; });
}

namespace {

// Composition directly on keys, avoiding table validation in the inner loop.
class KeyArithmetic {
 public:
  explicit KeyArithmetic(const SpacePtr& space) : space_(space), size_(space->size()) {}

  std::uint32_t shift(const std::string& k) const {
    std::uint32_t s = 0;
    for (int i = 0; i < 4; ++i)
      s |= static_cast<std::uint32_t>(static_cast<unsigned char>(k[size_ + i])) << (8 * i);
    return s;
  }

  std::string compose(const std::string& a, const std::string& b) const {
    const auto& ring = *space_->ring();
    const ModuleElement sa{shift(a)};
    std::string out(size_ + 4, '\0');
    for (std::uint32_t x = 0; x < size_; ++x) {
      const auto moved = space_->add({x}, sa).packed;
      out[x] = static_cast<char>(ring.add(static_cast<unsigned char>(a[x]),
                                          static_cast<unsigned char>(b[moved])));
    }
    const std::uint32_t s = space_->add(sa, {shift(b)}).packed;
    for (int i = 0; i < 4; ++i) out[size_ + i] = static_cast<char>(s >> (8 * i) & 0xFFU);
    return out;
  }

 private:
  SpacePtr space_;
  std::size_t size_;
};

}  // namespace

ClosureResult closure(std::span<const PhaseGroupElement> generators, const ClosureOptions& options) {
  if (generators.empty()) throw DomainError("closure needs at least one generator");
  const SpacePtr space = generators.front().domain();
  for (const auto& g : generators)
    if (!g.domain()->same_as(*space)) throw DomainError("closure generators live on different modules");
  if (options.cap == 0) throw ConfigError("closure cap must be positive");

  // Right multiplication by generators and their inverses reaches every word.
  std::vector<std::string> steps;
  for (const auto& g : generators) {
    steps.push_back(g.key());
    steps.push_back(invert(g).key());
  }
  std::sort(steps.begin(), steps.end());
  steps.erase(std::unique(steps.begin(), steps.end()), steps.end());

  const KeyArithmetic arith(space);
  ClosureResult result;
  result.generator_count = generators.size();

  std::unordered_set<std::string> seen;
  std::vector<std::string> frontier{PhaseGroupElement::identity(space).key()};
  seen.insert(frontier.front());
  {
    std::vector<std::string> first = steps;
    std::erase_if(first, [&](const std::string& k) { return seen.contains(k); });
    const std::size_t room = options.cap - seen.size();
    if (first.size() > room) {
      first.resize(room);
      result.cap_hit = true;
    }
    for (auto& k : first) seen.insert(k);
    frontier.insert(frontier.end(), first.begin(), first.end());
  }

  while (!frontier.empty() && !result.cap_hit) {
    const unsigned workers = std::max(1u, options.workers);
    std::vector<std::vector<std::string>> found(workers);
    parallel_slices(frontier.size(), workers, [&](unsigned w, std::size_t begin, std::size_t end) {
      std::unordered_set<std::string> local;
      for (std::size_t i = begin; i < end; ++i)
        for (const auto& s : steps) {
          auto k = arith.compose(frontier[i], s);
          if (!seen.contains(k)) local.insert(std::move(k));
        }
      found[w].assign(local.begin(), local.end());
    });
    std::vector<std::string> next;
    for (auto& part : found) next.insert(next.end(), part.begin(), part.end());
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    const std::size_t room = options.cap - seen.size();
    if (next.size() > room) {
      next.resize(room);
      result.cap_hit = true;
    }
    for (const auto& k : next) seen.insert(k);
    frontier = std::move(next);
  }
  result.reached_fixpoint = !result.cap_hit;

  result.keys.assign(seen.begin(), seen.end());
  std::sort(result.keys.begin(), result.keys.end());
  result.elements.reserve(result.keys.size());
  for (const auto& k : result.keys) result.elements.push_back(PhaseGroupElement::from_key(space, k));
  annotate_closure(result, options.strategy);
  return result;
}

std::string generator_digest(std::span<const PhaseGroupElement> generators, std::size_t cap) {
  if (generators.empty()) throw DomainError("digest of an empty generator set");
  std::vector<std::string> keys;
  for (const auto& g : generators) keys.push_back(g.key());
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  const auto& space = *generators.front().domain();
  std::string material = space.ring()->name() + "|" + std::to_string(space.rank()) + "|" + std::to_string(cap);
  for (const auto& k : keys) material += "|" + std::to_string(k.size()) + ":" + k;
  return sha256_hex(material);
}

namespace {

std::string to_hex(std::string_view bytes) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned char c : bytes) {
    out.push_back(kHex[c >> 4]);
    out.push_back(kHex[c & 15]);
  }
  return out;
}

std::optional<std::string> from_hex(std::string_view text) {
  if (text.size() % 2 != 0) return std::nullopt;
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    return -1;
  };
  std::string out;
  for (std::size_t i = 0; i < text.size(); i += 2) {
    const int hi = nibble(text[i]), lo = nibble(text[i + 1]);
    if (hi < 0 || lo < 0) return std::nullopt;
    out.push_back(static_cast<char>(hi * 16 + lo));
  }
  return out;
}

std::string cache_header(const ModuleSpace& space, const std::string& digest, std::size_t cap) {
  return "phaseforge-closure 1\nring=" + space.ring()->name() + " n=" + std::to_string(space.rank()) +
         "\ndigest=" + digest + "\ncap=" + std::to_string(cap) + "\n";
}

std::optional<ClosureResult> load_cache(const std::filesystem::path& file, const std::string& header,
                                        const SpacePtr& space) {
  std::ifstream in(file);
  if (!in) return std::nullopt;
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  if (!text.starts_with(header)) return std::nullopt;
  std::istringstream body(text.substr(header.size()));
  std::string line;
  ClosureResult result;
  std::size_t count = 0;
  if (!std::getline(body, line) || !line.starts_with("fixpoint=")) return std::nullopt;
  result.reached_fixpoint = line == "fixpoint=1";
  result.cap_hit = !result.reached_fixpoint;
  if (!std::getline(body, line) || !line.starts_with("count=")) return std::nullopt;
  count = std::stoull(line.substr(6));
  while (std::getline(body, line)) {
    auto key = from_hex(line);
    if (!key || key->size() != space->size() + 4) return std::nullopt;
    result.keys.push_back(std::move(*key));
  }
  if (result.keys.size() != count || !std::is_sorted(result.keys.begin(), result.keys.end())) return std::nullopt;
  for (const auto& k : result.keys) result.elements.push_back(PhaseGroupElement::from_key(space, k));
  return result;
}

}  // namespace

ClosureResult cached_closure(std::span<const PhaseGroupElement> generators, const ClosureOptions& options,
                             const std::filesystem::path& cache_dir, bool* hit) {
  if (hit) *hit = false;
  const std::string digest = generator_digest(generators, options.cap);
  const SpacePtr space = generators.front().domain();
  const std::string header = cache_header(*space, digest, options.cap);
  const auto file = cache_dir / ("closure-" + digest + ".keys");
  if (auto cached = load_cache(file, header, space)) {
    cached->generator_count = generators.size();
    annotate_closure(*cached, options.strategy);
    if (hit) *hit = true;
    return std::move(*cached);
  }
  ClosureResult result = closure(generators, options);
  std::error_code ec;
  std::filesystem::create_directories(cache_dir, ec);
  std::ofstream out(file, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write closure cache " + file.string());
  out << header << "fixpoint=" << (result.reached_fixpoint ? 1 : 0) << "\ncount=" << result.keys.size() << "\n";
  for (const auto& k : result.keys) out << to_hex(k) << "\n";
  return result;
}

void annotate_closure(ClosureResult& result, Strategy strategy) {
  result.stratum_census.clear();
  result.max_phase_degree = 0;
  std::unordered_map<std::string, std::pair<std::size_t, std::size_t>> cache;  // table -> (strategy, additive)
  for (std::size_t i = 0; i < result.elements.size(); ++i) {
    const auto& psi = result.elements[i].phase();
    const std::string table(result.keys[i].begin(), result.keys[i].end() - 4);
    auto it = cache.find(table);
    if (it == cache.end())
      it = cache.emplace(table, std::pair{defect_degree(psi, strategy), additive_degree(psi)}).first;
    ++result.stratum_census[it->second.first];
    result.max_phase_degree = std::max(result.max_phase_degree, it->second.second);
  }
}

ExponentMatrix operator*(const ExponentMatrix& a, const ExponentMatrix& b) {
  if (a.size != b.size || a.modulus != b.modulus) throw DomainError("exponent matrices do not match");
  ExponentMatrix out{a.size, a.modulus, std::vector<std::uint32_t>(a.size), std::vector<std::uint32_t>(a.size)};
  for (std::size_t x = 0; x < a.size; ++x) {
    const std::uint32_t mid = a.column[x];
    out.column[x] = b.column[mid];
    out.exponent[x] = (a.exponent[x] + b.exponent[mid]) % a.modulus;
  }
  return out;
}

ExponentMatrix operator_matrix(const PhaseGroupElement& g, const AdditiveCharacter& chi) {
  const auto& space = *g.domain();
  if (space.size() > 4096) throw CapacityError("operator matrices are limited to |A| <= 4096");
  if (chi.ring()->name() != space.ring()->name())
    throw DomainError("character and module use different rings");
  ExponentMatrix m{space.size(), chi.modulus(), std::vector<std::uint32_t>(space.size()),
                   std::vector<std::uint32_t>(space.size())};
  for (std::uint32_t x = 0; x < space.size(); ++x) {
    m.column[x] = space.add({x}, g.shift()).packed;
    m.exponent[x] = chi.exponent(g.phase().at(x));
  }
  return m;
}

}  // namespace phaseforge
