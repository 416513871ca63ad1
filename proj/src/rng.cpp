#include "catorder/rng.hpp"

#include <algorithm>

namespace catorder {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, Stream purpose, std::uint64_t index) {
  return mix64(mix64(mix64(master) ^ static_cast<std::uint64_t>(purpose)) ^ index);
}

std::mt19937_64 make_rng(std::uint64_t master, Stream purpose, std::uint64_t index) {
  return std::mt19937_64(derive_seed(master, purpose, index));
}

std::vector<std::int64_t> sample_multinomial(std::mt19937_64& rng, std::int64_t n, std::span<const double> probs) {
  std::vector<std::int64_t> out(probs.size(), 0);
  double remaining_mass = 0.0;
  for (double p : probs) remaining_mass += p;
  std::int64_t remaining = n;
  for (std::size_t k = 0; k + 1 < probs.size() && remaining > 0; ++k) {
    const double p = remaining_mass > 0.0 ? std::clamp(probs[k] / remaining_mass, 0.0, 1.0) : 0.0;
    std::binomial_distribution<std::int64_t> draw(remaining, p);
    out[k] = draw(rng);
    remaining -= out[k];
    remaining_mass -= probs[k];
  }
  if (!probs.empty()) out.back() += remaining;
  return out;
}

}  // namespace catorder
