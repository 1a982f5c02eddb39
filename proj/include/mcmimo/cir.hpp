#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mcmimo/geometry.hpp"

namespace mcmimo {

struct DiffusionParams {
    double d_coeff = 79.4;          ///< diffusion coefficient, um^2/s
    double dt = 1e-4;               ///< time step, s
    Vec3 drift{0.0, 0.0, 0.0};      ///< uniform flow velocity, um/s
    std::uint64_t n_molecules = 1'000'000;  ///< particles per impulse-response run

    void validate() const;  ///< throws Error(config)
};

/// How rows of the tap tensor are produced: a single source run plus the
/// circular-shift symmetry of the array, or one independent run per source.
enum class CirFill { shift, per_antenna };

const char* cir_fill_name(CirFill f);

/// Channel impulse response: h[i][j][n] is the probability that a molecule
/// emitted by source i is absorbed by receiver j during the n-th symbol
/// interval after emission (n 0-based here, 1-based in reports).
struct ChannelResponse {
    int n_tx = 0;
    int n_rx = 0;
    int taps = 0;       ///< channel memory L, symbol intervals
    double t_s = 0.0;   ///< binning interval, seconds
    std::vector<double> h;  ///< flattened [i][j][n]

    // generation metadata
    Topology topology;
    DiffusionParams params;
    std::uint64_t seed = 0;
    CirFill fill = CirFill::shift;
    std::uint64_t absorbed_total = 0;    ///< molecules absorbed within the horizon
    std::uint64_t survived_total = 0;    ///< molecules still diffusing at the horizon
    std::uint64_t correction_failures = 0;  ///< reflection corrections that did not converge

    double tap(int i, int j, int n) const {
        return h[(static_cast<std::size_t>(i) * n_rx + j) * taps + n];
    }
    double& tap(int i, int j, int n) {
        return h[(static_cast<std::size_t>(i) * n_rx + j) * taps + n];
    }

    /// Copy with the memory cut to new_taps intervals (no re-simulation).
    ChannelResponse truncated(int new_taps) const;

    /// Bounds and total-probability checks; throws Error(data).
    void validate() const;

    /// Cache text: `key = value` header, a checksum line, then the
    /// n_tx*n_rx*taps probabilities in (i, j, n) row-major order. Doubles are
    /// written with 17 significant digits so the round-trip is bit-exact.
    std::string serialize() const;
    static ChannelResponse deserialize(const std::string& text);

    /// Parameter-identifying subset of the header (everything except the
    /// checksum, result statistics and taps). Exact-match cache key.
    std::string fingerprint() const;
};

std::uint64_t fnv1a64(const void* data, std::size_t size);

} // namespace mcmimo
