#pragma once

#include <cstdint>
#include <random>

namespace evbreak {

using Rng = std::mt19937_64;

// Purpose tags keep data and multiplier streams of one replication disjoint.
enum class StreamPurpose : std::uint64_t {
  data = 0x64617461,
  multipliers = 0x6d756c74,
};

/// Seed for the stream (master, index, purpose). Streams depend only on these
/// three values, never on which worker consumes them.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index, StreamPurpose purpose);

inline Rng make_stream(std::uint64_t master, std::uint64_t index, StreamPurpose purpose) {
  return Rng(derive_seed(master, index, purpose));
}

/// Uniform draw on the open interval (0,1), never exactly 0 or 1.
double open_unit(Rng& rng);

/// Standard exponential draw.
double standard_exponential(Rng& rng);

}  // namespace evbreak
