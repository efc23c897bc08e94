#pragma once

#include "ats/common.hpp"

#include <initializer_list>
#include <random>

namespace ats {

using Rng = std::mt19937_64;

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Deterministic child seed from a parent seed and a path of integer tags.
/// Used everywhere a stream must not depend on execution order.
inline Seed derive_seed(Seed root, std::initializer_list<std::uint64_t> path) {
    std::uint64_t h = mix64(root);
    for (auto tag : path) h = mix64(h ^ mix64(tag + 0x632be59bd9b4e019ULL));
    return h;
}

// Sub-stream tags for one batch point.
namespace stream {
inline constexpr std::uint64_t kMcmc = 0;
inline constexpr std::uint64_t kJitter = 1;
inline constexpr std::uint64_t kSearch = 2;
inline constexpr std::uint64_t kFunction = 3;
inline constexpr std::uint64_t kCoin = 4;
inline constexpr std::uint64_t kInitDesign = 0xD0E;
}  // namespace stream

}  // namespace ats
