#pragma once

#include <span>
#include <vector>

#include "mcmimo/cir.hpp"
#include "mcmimo/modulation.hpp"
#include "mcmimo/rng.hpp"

namespace mcmimo {

enum class SampleMode { binomial, gaussian };

const char* sample_mode_name(SampleMode m);
SampleMode sample_mode_from_name(const std::string& name);

/// Received molecule counts R[j][k][m] per receiver antenna, symbol interval
/// and molecule type.
struct ArrivalMatrix {
    int n_rx = 0;
    int n_intervals = 0;
    int beta = 1;
    std::vector<long long> counts;

    long long& at(int j, int k, int m) {
        return counts[(static_cast<std::size_t>(j) * n_intervals + k) * beta + m];
    }
    long long at(int j, int k, int m) const {
        return counts[(static_cast<std::size_t>(j) * n_intervals + k) * beta + m];
    }
};

struct Moments {
    double mean = 0.0;
    double variance = 0.0;
};

/// Mean and variance of the type-m arrival count at receiver `rx` in interval
/// `k` (0-based), summing every emission within the channel memory window:
/// mean  = sum_z sum_i s_i[z] h[i][rx][k-z], variance the same with a (1 - h)
/// factor per term. Intervals before the schedule start contribute nothing.
Moments arrival_moments(const ChannelResponse& cir, const TransmissionSchedule& s, int rx, int k,
                        int m);

/// Draws one arrival matrix for the whole schedule. Binomial mode draws an
/// independent Binomial(count, tap) per (emission batch, tap, receiver);
/// gaussian mode draws a single normal per (receiver, interval, type) from
/// arrival_moments, rounded and clamped to non-negative integers. A zero
/// variance yields the mean deterministically.
ArrivalMatrix sample_arrivals(const ChannelResponse& cir, const TransmissionSchedule& s,
                              SampleMode mode, Rng& rng);

/// Shared kernel: accumulate (mean, variance) at one receiver for a list of
/// emissions with known tap ages. Used by the schedule-level API above and by
/// the streaming link simulator.
Moments accumulate_moments(const ChannelResponse& cir,
                           std::span<const Emission> emissions_by_age,
                           std::span<const int> ages, int rx, int m);

/// Gaussian arrival draw with the degenerate-variance rule applied.
long long draw_gaussian_count(const Moments& mo, Rng& rng);

} // namespace mcmimo
