#pragma once

namespace evbreak::simd::detail {

// exp(x) for x below this floor is returned as exactly 0 by every variant,
// so scalar and vector kernels agree in the deep underflow region.
inline constexpr double kExpFloor = -700.0;
inline constexpr double kExpCeil = 700.0;

}  // namespace evbreak::simd::detail
