#pragma once

#include <cstdint>
#include <random>

namespace cdolab {

using Engine = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Per-path seed: the run seed XOR the hashed path index, hashed once more.
constexpr std::uint64_t path_seed(std::uint64_t seed, std::uint64_t path_index) {
    return splitmix64(seed ^ splitmix64(path_index));
}

// Independent sub-streams of one path (increments, loss thinning, ...).
constexpr std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(seed + 0x632be59bd9b4e019ULL * (stream + 1));
}

}  // namespace cdolab
