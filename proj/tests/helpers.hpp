#pragma once

#include <cstdint>
#include <vector>

#include "evbreak/copula_lab.hpp"
#include "evbreak/random.hpp"
#include "evbreak/sample.hpp"

namespace evbreak::testing {

inline Sample gumbel_sample(std::size_t n, double vartheta, std::uint64_t seed, std::size_t d = 2) {
  Rng rng(seed);
  return sample_gumbel(n, d, GumbelHougaardParams{vartheta}, rng);
}

inline std::vector<double> unit_grid() { return {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}; }

}  // namespace evbreak::testing
