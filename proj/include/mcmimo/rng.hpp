#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace mcmimo {

using Rng = std::mt19937_64;

/// splitmix64 finalizer; decorrelates nearby integers into seed material.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

/// Derive an independent substream seed from (base, stream). Used so that
/// molecules, trials, frames and sweep points each own their own generator
/// and results do not depend on scheduling or thread count.
constexpr std::uint64_t substream(std::uint64_t base, std::uint64_t stream) {
    return mix64(base ^ mix64(stream + 0x517cc1b727220a95ull));
}

constexpr std::uint64_t substream(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
    return substream(substream(base, a), b);
}

/// Index of the maximum element; exact ties are broken uniformly at random.
template <typename T>
int argmax_tiebreak(std::span<const T> values, Rng& rng) {
    int best = 0;
    int n_ties = 1;
    for (int i = 1; i < static_cast<int>(values.size()); ++i) {
        if (values[i] > values[best]) {
            best = i;
            n_ties = 1;
        } else if (values[i] == values[best]) {
            ++n_ties;
            // reservoir pick keeps the selection uniform over the tie set
            if (std::uniform_int_distribution<int>(1, n_ties)(rng) == 1) best = i;
        }
    }
    return best;
}

} // namespace mcmimo
