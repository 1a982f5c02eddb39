#pragma once

#include <vector>

#include "mcmimo/cir.hpp"
#include "mcmimo/geometry.hpp"

namespace mcmimo::test {

/// Measured first-five taps of the 8x8 reference arrangement (d_x = 10 um,
/// d_yz = 10 um, r_r = 5 um, D = 79.4 um^2/s, t_s = 0.75 s), row for source 1;
/// the full tensor follows from the circular-shift symmetry.
inline ChannelResponse reference_cir_8x8() {
    static const double row[8][5] = {
        {0.1042, 0.0346, 0.0141, 0.0078, 0.0049},
        {0.0357, 0.0227, 0.0106, 0.0062, 0.0039},
        {0.0052, 0.0090, 0.0057, 0.0036, 0.0026},
        {0.0014, 0.0045, 0.0033, 0.0023, 0.0017},
        {0.0009, 0.0035, 0.0029, 0.0021, 0.0014},
        {0.0014, 0.0045, 0.0033, 0.0023, 0.0017},
        {0.0052, 0.0090, 0.0057, 0.0036, 0.0026},
        {0.0357, 0.0227, 0.0106, 0.0062, 0.0039},
    };
    ChannelResponse cir;
    cir.n_tx = 8;
    cir.n_rx = 8;
    cir.taps = 5;
    cir.t_s = 0.75;
    cir.topology = build_uca_topology(8, 8, 5.0, 10.0, 10.0);
    cir.h.assign(8 * 8 * 5, 0.0);
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j)
            for (int n = 0; n < 5; ++n) cir.tap(i, j, n) = row[(j - i + 8) % 8][n];
    return cir;
}

/// Small hand-built response for detector tests: n x n antennas, `taps`
/// geometric taps per subchannel, diagonal-dominant.
inline ChannelResponse toy_cir(int n, int taps, double direct = 0.2, double cross = 0.05,
                               double decay = 0.4) {
    ChannelResponse cir;
    cir.n_tx = n;
    cir.n_rx = n;
    cir.taps = taps;
    cir.t_s = 1.0;
    cir.h.assign(static_cast<std::size_t>(n) * n * taps, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double p = i == j ? direct : cross;
            for (int t = 0; t < taps; ++t) {
                cir.tap(i, j, t) = p;
                p *= decay;
            }
        }
    }
    return cir;
}

} // namespace mcmimo::test
