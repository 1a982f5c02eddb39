#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace mcmimo {

enum class Scheme {
    siso_bcsk,
    siso_dmosk,
    rc_bcsk,
    smux_bcsk,
    mssk,
    qmssk,
    msm,
};

enum class Mapping { natural, gray };

const char* scheme_name(Scheme s);
Scheme scheme_from_name(const std::string& name);
const char* mapping_name(Mapping m);
Mapping mapping_from_name(const std::string& name);

/// Molecule types; single-molecule schemes use only type_a.
inline constexpr int type_a = 0;
inline constexpr int type_b = 1;

struct SchemeConfig {
    Scheme scheme = Scheme::mssk;
    int n_tx = 8;
    int n_rx = 8;
    double t_b = 0.25;   ///< bit duration budget, seconds
    double m_tx = 300;   ///< molecule budget parameter (per-bit average = m_tx / 2)
    Mapping mapping = Mapping::natural;
    int beta = 1;        ///< molecule-type count (set from the scheme when 0)

    void validate() const;  ///< throws Error(config) on unusable combinations
};

/// Per-transmission normalization derived from the scheme: symbol duration,
/// per-emission molecule count (may be fractional before rounding), bits per
/// symbol and the number of molecule types in play.
struct DerivedParams {
    double t_s = 0.0;
    double emission = 0.0;
    int bits_per_symbol = 0;
    int beta = 1;
};

DerivedParams derive_params(const SchemeConfig& cfg);

/// index (0-based) -> codeword, natural binary order.
std::vector<std::uint32_t> natural_codes(int n);

/// index (0-based) -> codeword, reflected Gray order: circularly adjacent
/// indices (including the wrap pair) differ in exactly one bit.
std::vector<std::uint32_t> gray_codes(int n);

std::vector<std::uint32_t> codes_for(int n, Mapping mapping);

/// codeword -> index (inverse of codes_for).
std::vector<int> inverse_codes(const std::vector<std::uint32_t>& codes);

inline int hamming(std::uint32_t a, std::uint32_t b) {
    return static_cast<int>(__builtin_popcount(a ^ b));
}

/// One emission batch: `count` molecules of `type` from transmit antenna `tx`.
struct Emission {
    int tx = 0;
    int type = type_a;
    long long count = 0;
};

struct TransmissionSchedule {
    int n_tx = 0;
    int beta = 1;
    double t_s = 0.0;
    int n_intervals = 0;
    int n_padding_bits = 0;  ///< zero bits appended to fill the last symbol
    std::vector<std::vector<Emission>> intervals;  ///< [k], k 0-based

    long long total_molecules() const;
};

/// Maps an information bit sequence onto per-interval emissions for the
/// configured scheme. Short sequences are zero-padded to a whole number of
/// symbols (recorded in n_padding_bits); non-binary input is rejected.
TransmissionSchedule modulate(const SchemeConfig& cfg, std::span<const std::uint8_t> bits,
                              int n_symbols);

/// One symbol's worth of emissions (the kernel behind modulate, shared with
/// the streaming simulator). `inverse_map` is inverse_codes(codes_for(...))
/// for the index schemes, ignored otherwise.
void map_symbol_emissions(const SchemeConfig& cfg, const DerivedParams& dp,
                          std::span<const std::uint8_t> sym_bits,
                          const std::vector<int>& inverse_map, std::vector<Emission>& out);

/// Reads the active antenna / molecule type pattern back into bits. Only
/// meaningful for noiseless schedules; used for round-trip checks.
std::vector<std::uint8_t> demodulate_schedule(const SchemeConfig& cfg,
                                              const TransmissionSchedule& schedule);

} // namespace mcmimo
