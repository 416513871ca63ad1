#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace catorder {

/// Purposes of independent random streams derived from one master seed.
enum class Stream : std::uint64_t {
  Allocation = 1,       // design-point allocation of a simulated dataset
  Responses = 2,        // multinomial responses of a simulated dataset
  CrossValidation = 3,  // train/test shuffle of one repetition
  Test = 4,             // free for test code
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Seed of stream (purpose, index) under `master`; distinct triples give
/// statistically independent streams.
std::uint64_t derive_seed(std::uint64_t master, Stream purpose, std::uint64_t index);

std::mt19937_64 make_rng(std::uint64_t master, Stream purpose, std::uint64_t index);

/// Multinomial(n; probs) by sequential conditional binomials.
std::vector<std::int64_t> sample_multinomial(std::mt19937_64& rng, std::int64_t n, std::span<const double> probs);

}  // namespace catorder
