#include "mcmimo/linksim.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "mcmimo/error.hpp"

namespace mcmimo {

const char* detector_name(DetectorKind d) {
    switch (d) {
        case DetectorKind::automatic: return "auto";
        case DetectorKind::ftd: return "ftd";
        case DetectorKind::atd: return "atd";
        case DetectorKind::mcd: return "mcd";
        case DetectorKind::symbol_ml: return "symbol_ml";
        case DetectorKind::theory: return "theory";
    }
    return "?";
}

DetectorKind detector_from_name(const std::string& name) {
    for (DetectorKind d : {DetectorKind::automatic, DetectorKind::ftd, DetectorKind::atd,
                           DetectorKind::mcd, DetectorKind::symbol_ml, DetectorKind::theory}) {
        if (name == detector_name(d)) return d;
    }
    fail(ErrorCode::config, "unknown detector '" + name + "'");
}

const char* combiner_name(Combiner c) { return c == Combiner::egc ? "egc" : "sc"; }

Combiner combiner_from_name(const std::string& name) {
    if (name == "egc") return Combiner::egc;
    if (name == "sc") return Combiner::sc;
    fail(ErrorCode::config, "unknown combiner '" + name + "'");
}

DetectorKind resolve_detector(Scheme scheme, DetectorKind requested) {
    const bool index_scheme =
        scheme == Scheme::mssk || scheme == Scheme::qmssk || scheme == Scheme::msm;
    if (requested == DetectorKind::automatic) {
        if (index_scheme) return DetectorKind::mcd;
        return scheme == Scheme::rc_bcsk ? DetectorKind::atd : DetectorKind::ftd;
    }
    if (requested == DetectorKind::theory) {
        require(scheme == Scheme::mssk, ErrorCode::config,
                "the analytical error rate is implemented for the space-shift-keying scheme");
        return requested;
    }
    const bool threshold = requested == DetectorKind::ftd || requested == DetectorKind::atd;
    require(index_scheme != threshold, ErrorCode::config,
            std::string("detector ") + detector_name(requested) + " does not apply to scheme " +
                scheme_name(scheme));
    return requested;
}

namespace {

/// Rolling emission window plus arrival sampling for one stream.
struct Stream {
    const ChannelResponse& cir;
    SchemeConfig cfg;
    DerivedParams dp;
    SampleMode mode;
    std::vector<int> inv;
    std::vector<std::vector<Emission>> ring;  ///< slot = interval % taps
    std::vector<long long> counts;            ///< [m][j] for the current interval
    std::uint64_t interval = 0;

    Stream(const ChannelResponse& cir_, const SchemeConfig& cfg_, SampleMode mode_)
        : cir(cir_), cfg(cfg_), dp(derive_params(cfg_)), mode(mode_) {
        if (cfg.scheme == Scheme::mssk || cfg.scheme == Scheme::qmssk || cfg.scheme == Scheme::msm)
            inv = inverse_codes(codes_for(cfg.n_tx, cfg.mapping));
        ring.assign(cir.taps, {});
        counts.assign(static_cast<std::size_t>(dp.beta) * cir.n_rx, 0);
    }

    void restart() {
        for (auto& slot : ring) slot.clear();
        interval = 0;
    }

    std::span<const long long> counts_of(int m) const {
        return {counts.data() + static_cast<std::size_t>(m) * cir.n_rx,
                static_cast<std::size_t>(cir.n_rx)};
    }

    /// Emits one symbol's molecules and samples this interval's arrivals.
    void push_symbol(std::span<const std::uint8_t> bits, Rng& rng) {
        auto& slot = ring[interval % ring.size()];
        map_symbol_emissions(cfg, dp, bits, inv, slot);

        const std::uint64_t z_lo =
            interval + 1 >= ring.size() ? interval + 1 - ring.size() : 0;
        for (int m = 0; m < dp.beta; ++m) {
            for (int j = 0; j < cir.n_rx; ++j) {
                long long& out = counts[static_cast<std::size_t>(m) * cir.n_rx + j];
                if (mode == SampleMode::gaussian) {
                    Moments mo;
                    for (std::uint64_t z = z_lo; z <= interval; ++z) {
                        const int age = static_cast<int>(interval - z);
                        for (const Emission& e : ring[z % ring.size()]) {
                            if (e.type != m || e.count == 0) continue;
                            const double p = cir.tap(e.tx, j, age);
                            mo.mean += static_cast<double>(e.count) * p;
                            mo.variance += static_cast<double>(e.count) * p * (1.0 - p);
                        }
                    }
                    out = draw_gaussian_count(mo, rng);
                } else {
                    long long total = 0;
                    for (std::uint64_t z = z_lo; z <= interval; ++z) {
                        const int age = static_cast<int>(interval - z);
                        for (const Emission& e : ring[z % ring.size()]) {
                            if (e.type != m || e.count == 0) continue;
                            const double p = cir.tap(e.tx, j, age);
                            if (p <= 0.0) continue;
                            if (p >= 1.0) {
                                total += e.count;
                                continue;
                            }
                            std::binomial_distribution<long long> bd(e.count, p);
                            total += bd(rng);
                        }
                    }
                    out = total;
                }
            }
        }
        ++interval;
    }
};

/// Decision state for the threshold detectors (one sub-stream per parallel
/// on-off bit: antenna pairs for spatial multiplexing, molecule types for the
/// dual-molecule baseline, the combined count for repetition coding).
struct ThresholdState {
    std::vector<long long> prev;
    bool first = true;

    void restart(std::size_t n_substreams) {
        prev.assign(n_substreams, 0);
        first = true;
    }
};

struct Decoder {
    const ChannelResponse& cir;
    SchemeConfig cfg;
    DerivedParams dp;
    DetectorKind detector;
    Combiner combiner;
    long long gamma = 0;
    std::vector<std::uint32_t> codes;
    ThresholdState thr;
    std::vector<SymbolMlDetector> sml;  // one per molecule type (index schemes)
    std::unique_ptr<MsmSymbolMlDetector> msm_sml;
    std::vector<std::uint8_t> decoded;

    Decoder(const ChannelResponse& cir_, const SchemeConfig& cfg_, DetectorKind det,
            Combiner comb, long long gamma_)
        : cir(cir_), cfg(cfg_), dp(derive_params(cfg_)), detector(det), combiner(comb),
          gamma(gamma_) {
        if (cfg.scheme == Scheme::mssk || cfg.scheme == Scheme::qmssk || cfg.scheme == Scheme::msm)
            codes = codes_for(cfg.n_tx, cfg.mapping);
        if (detector == DetectorKind::symbol_ml) {
            const long long unit = std::llround(dp.emission);
            if (cfg.scheme == Scheme::msm) {
                msm_sml = std::make_unique<MsmSymbolMlDetector>(cir, cir.taps,
                                                                static_cast<double>(unit));
            } else {
                for (int m = 0; m < dp.beta; ++m)
                    sml.emplace_back(cir, cir.taps, static_cast<double>(unit));
            }
        }
        decoded.resize(dp.bits_per_symbol);
    }

    void restart() {
        std::size_t substreams = 1;
        if (cfg.scheme == Scheme::smux_bcsk) substreams = static_cast<std::size_t>(cfg.n_tx);
        if (cfg.scheme == Scheme::siso_dmosk) substreams = 2;
        thr.restart(substreams);
        for (auto& d : sml) d.reset();
        if (msm_sml) msm_sml->reset();
    }

    void threshold_bit(std::size_t sub, long long count, std::uint8_t& out) {
        if (detector == DetectorKind::atd && !thr.first)
            out = static_cast<std::uint8_t>(atd(count, thr.prev[sub]));
        else
            out = static_cast<std::uint8_t>(ftd(count, gamma));
        thr.prev[sub] = count;
    }

    void unpack(std::uint32_t code, int width, std::uint8_t* out) {
        for (int i = 0; i < width; ++i) out[i] = (code >> (width - 1 - i)) & 1u;
    }

    /// Decodes the current interval's counts into dp.bits_per_symbol bits.
    std::span<const std::uint8_t> decide(const Stream& stream, Rng& rng) {
        const int n = cir.n_rx;
        const int bps = dp.bits_per_symbol;
        switch (cfg.scheme) {
            case Scheme::siso_bcsk:
                threshold_bit(0, stream.counts_of(type_a)[0], decoded[0]);
                break;
            case Scheme::siso_dmosk:
                threshold_bit(0, stream.counts_of(type_a)[0], decoded[0]);
                threshold_bit(1, stream.counts_of(type_b)[0], decoded[1]);
                break;
            case Scheme::rc_bcsk: {
                const auto counts = stream.counts_of(type_a);
                const long long combined =
                    combiner == Combiner::egc ? combine_egc(counts) : combine_sc(counts);
                threshold_bit(0, combined, decoded[0]);
                break;
            }
            case Scheme::smux_bcsk: {
                const auto counts = stream.counts_of(type_a);
                for (int j = 0; j < n; ++j) threshold_bit(j, counts[j], decoded[j]);
                break;
            }
            case Scheme::mssk: {
                const int idx = detector == DetectorKind::symbol_ml
                                    ? sml[0].decide(stream.counts_of(type_a), rng)
                                    : mcd_mssk(stream.counts_of(type_a), rng);
                unpack(codes[idx], bps, decoded.data());
                break;
            }
            case Scheme::qmssk: {
                const int half = bps / 2;
                for (int m = 0; m < 2; ++m) {
                    const int idx = detector == DetectorKind::symbol_ml
                                        ? sml[m].decide(stream.counts_of(m), rng)
                                        : mcd_mssk(stream.counts_of(m), rng);
                    unpack(codes[idx], half, decoded.data() + m * half);
                }
                break;
            }
            case Scheme::msm: {
                const MsmDecision d =
                    detector == DetectorKind::symbol_ml
                        ? msm_sml->decide(stream.counts_of(type_a), stream.counts_of(type_b), rng)
                        : mcd_msm(stream.counts_of(type_a), stream.counts_of(type_b), rng);
                decoded[0] = static_cast<std::uint8_t>(d.type);
                unpack(codes[d.antenna], bps - 1, decoded.data() + 1);
                break;
            }
        }
        if (thr.first) thr.first = false;
        return {decoded.data(), static_cast<std::size_t>(bps)};
    }
};

} // namespace

long long calibrate_ftd_threshold(const ChannelResponse& cir, const LinkConfig& cfg) {
    Stream stream(cir, cfg.scheme, cfg.mode);
    const DerivedParams dp = stream.dp;
    Rng rng(substream(cfg.seed, 0));
    std::uniform_int_distribution<int> bit01(0, 1);

    // per-(substream, symbol) observed count with its transmitted bit
    std::vector<std::vector<std::uint64_t>> hist{{}, {}};  // [bit][count]
    auto record = [&](long long count, int bit) {
        auto& h = hist[bit];
        if (static_cast<std::size_t>(count) >= h.size()) h.resize(count + 1, 0);
        ++h[static_cast<std::size_t>(count)];
    };

    std::vector<std::uint8_t> bits(dp.bits_per_symbol);
    for (int k = 0; k < cfg.calibration_symbols; ++k) {
        for (auto& b : bits) b = static_cast<std::uint8_t>(bit01(rng));
        stream.push_symbol(bits, rng);
        switch (cfg.scheme.scheme) {
            case Scheme::siso_bcsk:
                record(stream.counts_of(type_a)[0], bits[0]);
                break;
            case Scheme::siso_dmosk:
                record(stream.counts_of(type_a)[0], bits[0]);
                record(stream.counts_of(type_b)[0], bits[1]);
                break;
            case Scheme::rc_bcsk: {
                const auto counts = stream.counts_of(type_a);
                record(cfg.combiner == Combiner::egc ? combine_egc(counts) : combine_sc(counts),
                       bits[0]);
                break;
            }
            case Scheme::smux_bcsk: {
                const auto counts = stream.counts_of(type_a);
                for (int j = 0; j < cir.n_rx; ++j) record(counts[j], bits[j]);
                break;
            }
            default:
                fail(ErrorCode::config, "threshold calibration applies to on-off schemes only");
        }
    }

    const std::size_t max_count = std::max(hist[0].size(), hist[1].size());
    hist[0].resize(max_count + 1, 0);
    hist[1].resize(max_count + 1, 0);

    // errors(gamma) = #(bit-1 counts < gamma) + #(bit-0 counts >= gamma)
    std::uint64_t ones_below = 0;
    std::uint64_t zeros_at_or_above = 0;
    for (std::uint64_t v : hist[0]) zeros_at_or_above += v;
    long long best_gamma = 0;
    std::uint64_t best_errors = zeros_at_or_above;  // gamma = 0 decides all-ones
    for (std::size_t gamma = 1; gamma <= max_count + 1; ++gamma) {
        ones_below += hist[1][gamma - 1];
        zeros_at_or_above -= hist[0][gamma - 1];
        const std::uint64_t err = ones_below + zeros_at_or_above;
        if (err < best_errors) {
            best_errors = err;
            best_gamma = static_cast<long long>(gamma);
        }
    }
    return best_gamma;
}

LinkResult simulate_link(const ChannelResponse& cir, const LinkConfig& cfg) {
    cfg.scheme.validate();
    require(cfg.scheme.n_rx == cir.n_rx && cfg.scheme.n_tx == cir.n_tx, ErrorCode::config,
            "scheme antenna counts must match the channel response");
    const DetectorKind det = resolve_detector(cfg.scheme.scheme, cfg.detector);
    require(det != DetectorKind::theory, ErrorCode::config,
            "the theory evaluator is not a stream detector; request it at the sweep level");

    LinkResult out;
    long long gamma = cfg.ftd_gamma;
    if ((det == DetectorKind::ftd || det == DetectorKind::atd) && gamma < 0)
        gamma = calibrate_ftd_threshold(cir, cfg);
    out.ftd_gamma = gamma;

    Stream stream(cir, cfg.scheme, cfg.mode);
    Decoder decoder(cir, cfg.scheme, det, cfg.combiner, gamma);
    const int bps = stream.dp.bits_per_symbol;
    const int warmup = cfg.warmup >= 0 ? cfg.warmup : cir.taps;

    std::vector<std::uint8_t> bits(bps);
    std::uint64_t frame = 0;
    while (out.bit_errors < cfg.target_errors && out.symbols < cfg.max_symbols) {
        Rng rng(substream(cfg.seed, frame + 1));
        std::uniform_int_distribution<int> bit01(0, 1);
        stream.restart();
        decoder.restart();
        const std::uint64_t counted = std::min<std::uint64_t>(
            cfg.frame_symbols, cfg.max_symbols - out.symbols);
        const std::uint64_t frame_total = counted + static_cast<std::uint64_t>(warmup);
        for (std::uint64_t k = 0; k < frame_total; ++k) {
            for (auto& b : bits) b = static_cast<std::uint8_t>(bit01(rng));
            stream.push_symbol(bits, rng);
            const auto decoded = decoder.decide(stream, rng);
            if (k < static_cast<std::uint64_t>(warmup)) continue;
            ++out.symbols;
            out.bits += static_cast<std::uint64_t>(bps);
            for (int b = 0; b < bps; ++b)
                out.bit_errors += static_cast<std::uint64_t>(bits[b] != decoded[b]);
        }
        ++frame;
    }

    if (out.bits > 0) {
        out.ber = static_cast<double>(out.bit_errors) / static_cast<double>(out.bits);
        out.ci_half = 1.96 * std::sqrt(std::max(out.ber * (1.0 - out.ber), 0.0) /
                                       static_cast<double>(out.bits));
    }
    out.low_confidence = out.bit_errors < 10;
    return out;
}

} // namespace mcmimo
