#pragma once

#include <array>
#include <cstdint>

namespace msstab {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key);

/// Standard normal draw determined by (seed, path, step, noise). Distinct
/// tuples give independent values; the same tuple always gives the same one.
double gaussian_stream(std::uint64_t seed, std::uint64_t path, std::uint32_t step, std::uint32_t noise = 0);

}  // namespace msstab
