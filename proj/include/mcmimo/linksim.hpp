#pragma once

#include <cstdint>
#include <string>

#include "mcmimo/channel.hpp"
#include "mcmimo/detection.hpp"
#include "mcmimo/modulation.hpp"

namespace mcmimo {

enum class DetectorKind { automatic, ftd, atd, mcd, symbol_ml, theory };

const char* detector_name(DetectorKind d);
DetectorKind detector_from_name(const std::string& name);

/// The scheme-appropriate default detector: threshold decoding for the
/// on-off-keying family (adaptive for repetition coding), maximum count for
/// the index schemes.
DetectorKind resolve_detector(Scheme scheme, DetectorKind requested);

enum class Combiner { egc, sc };

const char* combiner_name(Combiner c);
Combiner combiner_from_name(const std::string& name);

struct LinkConfig {
    SchemeConfig scheme;
    DetectorKind detector = DetectorKind::automatic;
    Combiner combiner = Combiner::egc;  ///< repetition coding only
    SampleMode mode = SampleMode::gaussian;
    int warmup = -1;  ///< decoded-but-uncounted symbols per frame; -1 -> channel memory
    std::uint64_t max_symbols = 2'000'000;  ///< counted-symbol budget
    std::uint64_t target_errors = 100;      ///< stop once this many bit errors observed
    std::uint64_t seed = 1;
    int frame_symbols = 2048;        ///< counted symbols per independent frame
    long long ftd_gamma = -1;        ///< fixed threshold; -1 -> calibrate
    int calibration_symbols = 10000;
};

struct LinkResult {
    std::uint64_t symbols = 0;
    std::uint64_t bits = 0;
    std::uint64_t bit_errors = 0;
    double ber = 0.0;
    double ci_half = 0.0;         ///< 95% normal-approximation half-width
    bool low_confidence = true;   ///< fewer than 10 error events observed
    long long ftd_gamma = -1;     ///< threshold actually used (threshold detectors)
};

/// Continuous-stream Monte Carlo over the statistical channel: independent
/// frames of warmup + frame_symbols intervals, every post-warmup symbol
/// decoded and counted, stopping at the error target or the symbol budget.
/// Frame f draws from substream(seed, f + 1); identical configurations give
/// identical results for any thread count (frames run sequentially).
LinkResult simulate_link(const ChannelResponse& cir, const LinkConfig& cfg);

/// Offline grid search for the fixed-threshold detector: simulates a
/// calibration stream of known bits under substream(seed, 0) and returns the
/// count threshold minimizing its bit errors (smallest gamma on ties).
long long calibrate_ftd_threshold(const ChannelResponse& cir, const LinkConfig& cfg);

} // namespace mcmimo
