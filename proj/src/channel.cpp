#include "mcmimo/channel.hpp"

#include <algorithm>
#include <cmath>

#include "mcmimo/error.hpp"

namespace mcmimo {

const char* sample_mode_name(SampleMode m) {
    return m == SampleMode::binomial ? "binomial" : "gaussian";
}

SampleMode sample_mode_from_name(const std::string& name) {
    if (name == "binomial") return SampleMode::binomial;
    if (name == "gaussian") return SampleMode::gaussian;
    fail(ErrorCode::config, "unknown channel mode '" + name + "'");
}

Moments arrival_moments(const ChannelResponse& cir, const TransmissionSchedule& s, int rx, int k,
                        int m) {
    Moments mo;
    const int z_lo = std::max(0, k - cir.taps + 1);
    for (int z = z_lo; z <= k && z < s.n_intervals; ++z) {
        const int age = k - z;  // tap index, 0-based
        for (const Emission& e : s.intervals[z]) {
            if (e.type != m || e.count == 0) continue;
            const double p = cir.tap(e.tx, rx, age);
            mo.mean += static_cast<double>(e.count) * p;
            mo.variance += static_cast<double>(e.count) * p * (1.0 - p);
        }
    }
    return mo;
}

Moments accumulate_moments(const ChannelResponse& cir,
                           std::span<const Emission> emissions_by_age,
                           std::span<const int> ages, int rx, int m) {
    Moments mo;
    for (std::size_t idx = 0; idx < emissions_by_age.size(); ++idx) {
        const Emission& e = emissions_by_age[idx];
        if (e.type != m || e.count == 0) continue;
        const double p = cir.tap(e.tx, rx, ages[idx]);
        mo.mean += static_cast<double>(e.count) * p;
        mo.variance += static_cast<double>(e.count) * p * (1.0 - p);
    }
    return mo;
}

long long draw_gaussian_count(const Moments& mo, Rng& rng) {
    if (mo.variance <= 0.0) return std::llround(mo.mean);
    std::normal_distribution<double> nd(mo.mean, std::sqrt(mo.variance));
    const double v = nd(rng);
    return v <= 0.0 ? 0 : std::llround(v);
}

ArrivalMatrix sample_arrivals(const ChannelResponse& cir, const TransmissionSchedule& s,
                              SampleMode mode, Rng& rng) {
    for (double v : cir.h)
        require(v >= 0.0 && v <= 1.0, ErrorCode::data, "channel taps outside [0, 1]");

    ArrivalMatrix r;
    r.n_rx = cir.n_rx;
    r.n_intervals = s.n_intervals;
    r.beta = s.beta;
    r.counts.assign(static_cast<std::size_t>(r.n_rx) * r.n_intervals * r.beta, 0);

    for (int j = 0; j < r.n_rx; ++j) {
        for (int k = 0; k < s.n_intervals; ++k) {
            for (int m = 0; m < s.beta; ++m) {
                if (mode == SampleMode::gaussian) {
                    r.at(j, k, m) = draw_gaussian_count(arrival_moments(cir, s, j, k, m), rng);
                } else {
                    long long total = 0;
                    const int z_lo = std::max(0, k - cir.taps + 1);
                    for (int z = z_lo; z <= k; ++z) {
                        for (const Emission& e : s.intervals[z]) {
                            if (e.type != m || e.count == 0) continue;
                            const double p = cir.tap(e.tx, j, k - z);
                            if (p <= 0.0) continue;
                            if (p >= 1.0) {
                                total += e.count;
                                continue;
                            }
                            std::binomial_distribution<long long> bd(e.count, p);
                            total += bd(rng);
                        }
                    }
                    r.at(j, k, m) = total;
                }
            }
        }
    }
    return r;
}

} // namespace mcmimo
