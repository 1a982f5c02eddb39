#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mcmimo/cir.hpp"
#include "mcmimo/linksim.hpp"

namespace mcmimo {

/// One experiment sweep: a parameter axis, the schemes/detectors/mappings to
/// run at every point, and the fixed defaults behind everything else.
struct SweepSpec {
    std::string parameter = "M_tx";  ///< M_tx | t_b | d_yz | drift_vx
    std::vector<double> values;      ///< non-empty, strictly increasing
    std::vector<Scheme> schemes;
    std::vector<DetectorKind> detectors{DetectorKind::automatic};
    std::vector<Mapping> mappings{Mapping::natural};
    std::uint64_t trial_budget = 2'000'000;  ///< counted symbols per point
    std::uint64_t target_errors = 100;
    std::uint64_t seed = 1;

    // defaults for everything not swept
    int n_tx = 8;
    int n_rx = 8;
    double r_r = 5.0;
    double d_x = 10.0;
    double d_yz = 10.0;
    double d_coeff = 79.4;
    int memory_l = 30;
    double m_tx = 300.0;
    double t_b = 0.25;
    double drift_vx = 0.0;
    double dt = 1e-4;
    std::uint64_t n_molecules = 1'000'000;
    SampleMode mode = SampleMode::gaussian;
    Combiner combiner = Combiner::egc;
    int warmup = -1;

    void validate() const;

    /// Parses `key = value` lines with `#` comments; unknown keys and
    /// malformed values raise Error(config).
    static SweepSpec parse(const std::string& text);
    static SweepSpec parse_file(const std::string& path);
};

/// One sweep point result. wall_time_s is informational only and is excluded
/// from the CSV so that identically seeded runs emit identical bytes.
struct BerRecord {
    std::string parameter;
    double value = 0.0;
    Scheme scheme = Scheme::mssk;
    DetectorKind detector = DetectorKind::mcd;
    Mapping mapping = Mapping::natural;
    int n_tx = 0;
    int n_rx = 0;
    double r_r = 0, d_x = 0, d_yz = 0, d_coeff = 0;
    int memory_l = 0;
    double m_tx = 0, t_b = 0, t_s = 0, drift_vx = 0, dt = 0;
    SampleMode mode = SampleMode::gaussian;
    std::uint64_t seed = 0;
    std::uint64_t bits = 0;
    std::uint64_t bit_errors = 0;
    double ber = 0.0;
    double ci_half = 0.0;
    bool low_confidence = true;
    std::string status = "ok";  ///< ok | cache_regenerated | skipped_infeasible
    double wall_time_s = 0.0;
};

/// Directory-backed store of channel responses keyed by the exact parameter
/// fingerprint. Lookup of a corrupted file raises Error(data); writes are
/// atomic (temp file + rename). An empty directory string disables disk use.
class CirCache {
public:
    explicit CirCache(std::string dir);

    std::optional<ChannelResponse> lookup(const std::string& fingerprint) const;
    void store(const ChannelResponse& cir) const;

    /// Cache hit, or simulate-and-store. `regenerated` reports a corrupt or
    /// mismatching cache entry that had to be rebuilt.
    ChannelResponse get_or_generate(const Topology& topology, const DiffusionParams& params,
                                    double t_s, int taps, std::uint64_t seed, int n_threads,
                                    bool* regenerated = nullptr) const;

    const std::string& dir() const { return dir_; }
    std::string path_for(const std::string& fingerprint) const;

private:
    std::string dir_;
};

/// Runs every (value x scheme x detector x mapping) point of the sweep.
/// Points run in parallel; each owns substream(seed, point_index). The
/// record order is the deterministic enumeration order.
std::vector<BerRecord> run_sweep(const SweepSpec& spec, const CirCache& cache, int n_threads = 0);

/// Header row plus one row per record, >= 6 significant digits, byte-stable
/// for identical inputs.
std::string emit_csv(std::span<const BerRecord> records);

} // namespace mcmimo
