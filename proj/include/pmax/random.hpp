#pragma once

#include <cstdint>
#include <random>

namespace pmax {

using Rng = std::mt19937_64;

/// splitmix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t hash_key(std::uint64_t a, std::uint64_t b) noexcept {
  return mix64(a ^ mix64(b + 0x632be59bd9b4e019ULL));
}

constexpr std::uint64_t hash_key(std::uint64_t a, std::uint64_t b, std::uint64_t c) noexcept {
  return hash_key(hash_key(a, b), c);
}

/// Uniform double in [0,1) from a 64-bit hash.
constexpr double unit_double(std::uint64_t h) noexcept {
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

/// Independent stream number `stream` of master seed `seed`.  The result
/// depends only on (seed, stream), never on which thread asks for it.
inline Rng make_stream(std::uint64_t seed, std::uint64_t stream) {
  return Rng{hash_key(seed, stream)};
}

/// Stream-id namespaces so pipeline stages never share a stream.
namespace stream_tag {
inline constexpr std::uint64_t kRrBatch = 0x100;
inline constexpr std::uint64_t kTimKpt = 0x200;
inline constexpr std::uint64_t kTimRefine = 0x300;
inline constexpr std::uint64_t kTimSelect = 0x400;
inline constexpr std::uint64_t kOptEval = 0x500;
inline constexpr std::uint64_t kRmgSample = 0x600;
inline constexpr std::uint64_t kMcEval = 0x700;
inline constexpr std::uint64_t kBaseline = 0x800;
inline constexpr std::uint64_t kComponent = 0x900;
inline constexpr std::uint64_t kSynthetic = 0xA00;
}  // namespace stream_tag

/// Number of OpenMP workers used by parallel loops (1 when built without OpenMP).
void set_workers(int workers);
int workers();

}  // namespace pmax
