// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>

namespace pnc {

using Rng = std::mt19937_64;

/// Independent random streams drawn for one Monte-Carlo trial.
enum class Stream : std::uint64_t {
    Channel = 1,
    PhaseNoise = 2,
    Payload = 3,
    Noise = 4,
    Pilots = 5,
    Aux = 6,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Counter-based derivation: the engine depends only on (master, trial, stream).
inline Rng derive_rng(std::uint64_t master, std::uint64_t trial, Stream stream) {
    const std::uint64_t a = splitmix64(master);
    const std::uint64_t b = splitmix64(a ^ splitmix64(trial + 0x632be59bd9b4e019ULL));
    const std::uint64_t c = splitmix64(b ^ static_cast<std::uint64_t>(stream));
    std::seed_seq seq{static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    return Rng(seq);
}

}  // namespace pnc
