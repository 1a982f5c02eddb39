#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "mcmimo/cir.hpp"
#include "mcmimo/geometry.hpp"
#include "mcmimo/modulation.hpp"
#include "mcmimo/rng.hpp"

namespace mcmimo {

/// One Brownian increment: each coordinate moves by an independent draw from
/// Normal(drift_component * dt, 2 * D * dt). Degenerate D = 0 reduces to the
/// deterministic drift displacement.
Vec3 step(const Vec3& pos, const DiffusionParams& params, Rng& rng);

struct CollisionOutcome {
    enum class Kind { moved, absorbed };
    Kind kind = Kind::moved;
    Vec3 position;      ///< valid when moved
    int rx_index = -1;  ///< valid when absorbed, 0-based
};

/// Applies the absorption / reflection rules to one step segment. Absorption
/// uses the endpoint-inside test; when the endpoint lands inside a sphere the
/// event is attributed to the sphere whose surface the segment crosses first.
/// Spheres flagged non-absorbing (per molecule type) reflect instead: the
/// overshoot is mirrored radially across the surface, repeated across spheres
/// up to a bounded number of corrections. A non-converging correction throws
/// Error(simulation). An empty `absorbing` mask means every sphere absorbs.
CollisionOutcome resolve_collision(const Vec3& prev, const Vec3& next, const Topology& topology,
                                   std::span<const std::uint8_t> absorbing = {});

/// Monte Carlo channel impulse response: walks params.n_molecules molecules
/// per source row, bins first-arrival times per receiver into `taps`
/// intervals of width t_s. With CirFill::shift (circular arrays only) a
/// single source is simulated, mirror pairs equidistant from it are averaged
/// (the array is reflection symmetric) and the remaining rows follow by the
/// circular-shift symmetry; per_antenna runs every source independently.
/// Seeded per molecule, so results are identical for any thread count.
ChannelResponse simulate_cir(const Topology& topology, const DiffusionParams& params, double t_s,
                             int taps, std::uint64_t seed,
                             std::optional<CirFill> fill = std::nullopt, int n_threads = 0);

struct ParticleBerResult {
    std::uint64_t bit_errors = 0;
    std::uint64_t bits = 0;
    double ber = 0.0;
};

/// Particle-based bit error rate of the space-shift-keying scheme: each trial
/// draws `memory` random symbols, walks every emitted molecule through the
/// full horizon and decodes only the final symbol by maximum count, so every
/// counted symbol faces the whole channel memory.
ParticleBerResult particle_ber_mssk(const Topology& topology, const DiffusionParams& params,
                                    double t_b, double m_tx, int memory, Mapping mapping,
                                    std::uint64_t n_trials, std::uint64_t seed, int n_threads = 0);

} // namespace mcmimo
