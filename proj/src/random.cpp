#include "evbreak/random.hpp"

#include <cmath>

namespace evbreak {
namespace {

std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index, StreamPurpose purpose) {
  std::uint64_t h = mix(master);
  h = mix(h ^ mix(index + 0x632be59bd9b4e019ULL));
  h = mix(h ^ static_cast<std::uint64_t>(purpose));
  return h;
}

double open_unit(Rng& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

double standard_exponential(Rng& rng) { return -std::log(open_unit(rng)); }

}  // namespace evbreak
