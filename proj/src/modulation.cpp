#include "mcmimo/modulation.hpp"

#include <bit>
#include <cmath>

#include "mcmimo/error.hpp"

namespace mcmimo {

namespace {

int log2_exact(int n) {
    require(n >= 2 && std::has_single_bit(static_cast<unsigned>(n)), ErrorCode::config,
            "alphabet size must be a power of two >= 2, got " + std::to_string(n));
    return std::countr_zero(static_cast<unsigned>(n));
}

bool is_index_scheme(Scheme s) {
    return s == Scheme::mssk || s == Scheme::qmssk || s == Scheme::msm;
}

int scheme_beta(Scheme s) {
    switch (s) {
        case Scheme::siso_dmosk:
        case Scheme::qmssk:
        case Scheme::msm:
            return 2;
        default:
            return 1;
    }
}

long long round_count(double v) { return std::llround(v); }

} // namespace

const char* scheme_name(Scheme s) {
    switch (s) {
        case Scheme::siso_bcsk: return "siso_bcsk";
        case Scheme::siso_dmosk: return "siso_dmosk";
        case Scheme::rc_bcsk: return "rc_bcsk";
        case Scheme::smux_bcsk: return "smux_bcsk";
        case Scheme::mssk: return "mssk";
        case Scheme::qmssk: return "qmssk";
        case Scheme::msm: return "msm";
    }
    return "?";
}

Scheme scheme_from_name(const std::string& name) {
    for (Scheme s : {Scheme::siso_bcsk, Scheme::siso_dmosk, Scheme::rc_bcsk, Scheme::smux_bcsk,
                     Scheme::mssk, Scheme::qmssk, Scheme::msm}) {
        if (name == scheme_name(s)) return s;
    }
    fail(ErrorCode::config, "unknown scheme '" + name + "'");
}

const char* mapping_name(Mapping m) { return m == Mapping::natural ? "natural" : "gray"; }

Mapping mapping_from_name(const std::string& name) {
    if (name == "natural") return Mapping::natural;
    if (name == "gray") return Mapping::gray;
    fail(ErrorCode::config, "unknown mapping '" + name + "'");
}

void SchemeConfig::validate() const {
    require(n_tx >= 1 && n_rx >= 1, ErrorCode::config, "antenna counts must be positive");
    require(t_b > 0.0, ErrorCode::config, "t_b must be positive");
    require(m_tx >= 0.0, ErrorCode::config, "m_tx must be non-negative");
    const int want_beta = scheme_beta(scheme);
    require(beta == 0 || beta == want_beta, ErrorCode::config,
            std::string("scheme ") + scheme_name(scheme) + " uses beta=" + std::to_string(want_beta));
    if (scheme == Scheme::siso_bcsk || scheme == Scheme::siso_dmosk) {
        require(n_tx == 1 && n_rx == 1, ErrorCode::config, "SISO schemes use a 1x1 topology");
    }
    if (is_index_scheme(scheme)) {
        log2_exact(n_tx);  // power-of-two check
        require(n_tx == n_rx, ErrorCode::config, "index schemes pair n_tx with n_rx");
    }
}

DerivedParams derive_params(const SchemeConfig& cfg) {
    cfg.validate();
    DerivedParams d;
    d.beta = scheme_beta(cfg.scheme);
    switch (cfg.scheme) {
        case Scheme::siso_bcsk:
            d.t_s = cfg.t_b;
            d.emission = cfg.m_tx;
            d.bits_per_symbol = 1;
            break;
        case Scheme::siso_dmosk:
            // two parallel on-off streams, one per molecule type
            d.t_s = 2.0 * cfg.t_b;
            d.emission = cfg.m_tx;
            d.bits_per_symbol = 2;
            break;
        case Scheme::rc_bcsk:
            d.t_s = cfg.t_b;
            d.emission = cfg.m_tx / cfg.n_tx;
            d.bits_per_symbol = 1;
            break;
        case Scheme::smux_bcsk:
            d.t_s = cfg.n_tx * cfg.t_b;
            d.emission = cfg.m_tx;
            d.bits_per_symbol = cfg.n_tx;
            break;
        case Scheme::mssk: {
            const int b = log2_exact(cfg.n_tx);
            d.t_s = b * cfg.t_b;
            d.emission = b / 2.0 * cfg.m_tx;
            d.bits_per_symbol = b;
            break;
        }
        case Scheme::qmssk: {
            const int b = log2_exact(cfg.n_tx);
            d.t_s = 2.0 * b * cfg.t_b;
            d.emission = b / 2.0 * cfg.m_tx;  // per molecule type
            d.bits_per_symbol = 2 * b;
            break;
        }
        case Scheme::msm: {
            const int b = log2_exact(cfg.n_tx);
            d.t_s = (1 + b) * cfg.t_b;
            d.emission = (1 + b) / 2.0 * cfg.m_tx;
            d.bits_per_symbol = 1 + b;
            break;
        }
    }
    return d;
}

std::vector<std::uint32_t> natural_codes(int n) {
    log2_exact(n);
    std::vector<std::uint32_t> c(n);
    for (int i = 0; i < n; ++i) c[i] = static_cast<std::uint32_t>(i);
    return c;
}

std::vector<std::uint32_t> gray_codes(int n) {
    log2_exact(n);
    std::vector<std::uint32_t> c(n);
    for (int i = 0; i < n; ++i) c[i] = static_cast<std::uint32_t>(i ^ (i >> 1));
    return c;
}

std::vector<std::uint32_t> codes_for(int n, Mapping mapping) {
    return mapping == Mapping::natural ? natural_codes(n) : gray_codes(n);
}

std::vector<int> inverse_codes(const std::vector<std::uint32_t>& codes) {
    std::vector<int> inv(codes.size(), -1);
    for (int i = 0; i < static_cast<int>(codes.size()); ++i) inv[codes[i]] = i;
    return inv;
}

long long TransmissionSchedule::total_molecules() const {
    long long total = 0;
    for (const auto& iv : intervals)
        for (const auto& e : iv) total += e.count;
    return total;
}

namespace {

/// bits (MSB first) -> value
std::uint32_t pack_bits(std::span<const std::uint8_t> bits) {
    std::uint32_t v = 0;
    for (std::uint8_t b : bits) v = (v << 1) | b;
    return v;
}

void unpack_bits(std::uint32_t v, int width, std::vector<std::uint8_t>& out) {
    for (int i = width - 1; i >= 0; --i) out.push_back((v >> i) & 1u);
}

} // namespace

TransmissionSchedule modulate(const SchemeConfig& cfg, std::span<const std::uint8_t> bits,
                              int n_symbols) {
    const DerivedParams dp = derive_params(cfg);
    require(n_symbols >= 0, ErrorCode::config, "n_symbols must be non-negative");
    for (std::uint8_t b : bits)
        require(b == 0 || b == 1, ErrorCode::data, "bit sequence contains non-binary symbols");

    const std::size_t needed = static_cast<std::size_t>(n_symbols) * dp.bits_per_symbol;
    require(bits.size() <= needed, ErrorCode::config, "more bits than the schedule can carry");

    std::vector<std::uint8_t> padded(bits.begin(), bits.end());
    padded.resize(needed, 0);

    TransmissionSchedule sch;
    sch.n_tx = cfg.n_tx;
    sch.beta = dp.beta;
    sch.t_s = dp.t_s;
    sch.n_intervals = n_symbols;
    sch.n_padding_bits = static_cast<int>(needed - bits.size());
    sch.intervals.resize(n_symbols);

    const long long unit = round_count(dp.emission);
    std::vector<int> inv;
    if (cfg.scheme == Scheme::mssk || cfg.scheme == Scheme::qmssk || cfg.scheme == Scheme::msm)
        inv = inverse_codes(codes_for(cfg.n_tx, cfg.mapping));

    for (int k = 0; k < n_symbols; ++k) {
        std::span<const std::uint8_t> sym(padded.data() + static_cast<std::size_t>(k) * dp.bits_per_symbol,
                                          dp.bits_per_symbol);
        map_symbol_emissions(cfg, dp, sym, inv, sch.intervals[k]);
    }
    return sch;
}

void map_symbol_emissions(const SchemeConfig& cfg, const DerivedParams& dp,
                          std::span<const std::uint8_t> sym, const std::vector<int>& inv,
                          std::vector<Emission>& iv) {
    const long long unit = round_count(dp.emission);
    iv.clear();
    switch (cfg.scheme) {
        case Scheme::siso_bcsk:
            if (sym[0]) iv.push_back({0, type_a, unit});
            break;
        case Scheme::siso_dmosk:
            if (sym[0]) iv.push_back({0, type_a, unit});
            if (sym[1]) iv.push_back({0, type_b, unit});
            break;
        case Scheme::rc_bcsk:
            if (sym[0])
                for (int i = 0; i < cfg.n_tx; ++i) iv.push_back({i, type_a, unit});
            break;
        case Scheme::smux_bcsk:
            for (int i = 0; i < cfg.n_tx; ++i)
                if (sym[i]) iv.push_back({i, type_a, unit});
            break;
        case Scheme::mssk:
            iv.push_back({inv[pack_bits(sym)], type_a, unit});
            break;
        case Scheme::qmssk: {
            const int b = dp.bits_per_symbol / 2;
            iv.push_back({inv[pack_bits(sym.subspan(0, b))], type_a, unit});
            iv.push_back({inv[pack_bits(sym.subspan(b, b))], type_b, unit});
            break;
        }
        case Scheme::msm: {
            const int type = sym[0] ? type_b : type_a;
            iv.push_back({inv[pack_bits(sym.subspan(1))], type, unit});
            break;
        }
    }
}

std::vector<std::uint8_t> demodulate_schedule(const SchemeConfig& cfg,
                                              const TransmissionSchedule& sch) {
    const DerivedParams dp = derive_params(cfg);
    std::vector<std::uint8_t> bits;
    bits.reserve(static_cast<std::size_t>(sch.n_intervals) * dp.bits_per_symbol);
    std::vector<std::uint32_t> codes;
    if (cfg.scheme == Scheme::mssk || cfg.scheme == Scheme::qmssk || cfg.scheme == Scheme::msm)
        codes = codes_for(cfg.n_tx, cfg.mapping);

    for (const auto& iv : sch.intervals) {
        auto active = [&](int type) -> int {
            for (const auto& e : iv)
                if (e.type == type && e.count > 0) return e.tx;
            return -1;
        };
        switch (cfg.scheme) {
            case Scheme::siso_bcsk:
                bits.push_back(active(type_a) >= 0 ? 1 : 0);
                break;
            case Scheme::siso_dmosk:
                bits.push_back(active(type_a) >= 0 ? 1 : 0);
                bits.push_back(active(type_b) >= 0 ? 1 : 0);
                break;
            case Scheme::rc_bcsk:
                bits.push_back(iv.empty() ? 0 : 1);
                break;
            case Scheme::smux_bcsk: {
                std::vector<std::uint8_t> per(cfg.n_tx, 0);
                for (const auto& e : iv)
                    if (e.count > 0) per[e.tx] = 1;
                bits.insert(bits.end(), per.begin(), per.end());
                break;
            }
            case Scheme::mssk:
                unpack_bits(codes[active(type_a)], dp.bits_per_symbol, bits);
                break;
            case Scheme::qmssk:
                unpack_bits(codes[active(type_a)], dp.bits_per_symbol / 2, bits);
                unpack_bits(codes[active(type_b)], dp.bits_per_symbol / 2, bits);
                break;
            case Scheme::msm: {
                const int a = active(type_a);
                bits.push_back(a >= 0 ? 0 : 1);
                unpack_bits(codes[a >= 0 ? a : active(type_b)], dp.bits_per_symbol - 1, bits);
                break;
            }
        }
    }
    return bits;
}

} // namespace mcmimo
