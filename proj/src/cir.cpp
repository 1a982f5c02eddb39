#include "mcmimo/cir.hpp"

#include <cstdio>
#include <cstring>
#include <sstream>

#include "mcmimo/error.hpp"

namespace mcmimo {

namespace {

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

void DiffusionParams::validate() const {
    require(d_coeff > 0.0, ErrorCode::config, "diffusion coefficient must be positive");
    require(dt > 0.0, ErrorCode::config, "time step must be positive");
    require(n_molecules >= 1, ErrorCode::config, "n_molecules must be >= 1");
}

const char* cir_fill_name(CirFill f) { return f == CirFill::shift ? "shift" : "per_antenna"; }

ChannelResponse ChannelResponse::truncated(int new_taps) const {
    require(new_taps >= 1 && new_taps <= taps, ErrorCode::config,
            "truncation length must be in [1, taps]");
    ChannelResponse out = *this;
    out.taps = new_taps;
    out.h.assign(static_cast<std::size_t>(n_tx) * n_rx * new_taps, 0.0);
    for (int i = 0; i < n_tx; ++i)
        for (int j = 0; j < n_rx; ++j)
            for (int n = 0; n < new_taps; ++n) out.tap(i, j, n) = tap(i, j, n);
    return out;
}

void ChannelResponse::validate() const {
    require(n_tx >= 1 && n_rx >= 1 && taps >= 1, ErrorCode::data, "empty channel response");
    require(h.size() == static_cast<std::size_t>(n_tx) * n_rx * taps, ErrorCode::data,
            "tap tensor size mismatch");
    for (int i = 0; i < n_tx; ++i) {
        double row_sum = 0.0;
        for (int j = 0; j < n_rx; ++j) {
            for (int n = 0; n < taps; ++n) {
                const double v = tap(i, j, n);
                require(v >= 0.0 && v <= 1.0, ErrorCode::data, "tap outside [0, 1]");
                row_sum += v;
            }
        }
        require(row_sum <= 1.0 + 1e-9, ErrorCode::data,
                "total absorption probability for source " + std::to_string(i + 1) + " exceeds 1");
    }
}

std::uint64_t fnv1a64(const void* data, std::size_t size) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (std::size_t i = 0; i < size; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string ChannelResponse::fingerprint() const {
    std::ostringstream os;
    os << "format = mcmimo-cir-1\n";
    os << topology.to_kv();
    os << "D = " << g17(params.d_coeff) << "\n";
    os << "dt = " << g17(params.dt) << "\n";
    os << "drift = " << g17(params.drift.x) << ' ' << g17(params.drift.y) << ' '
       << g17(params.drift.z) << "\n";
    os << "n_molecules = " << params.n_molecules << "\n";
    os << "t_s = " << g17(t_s) << "\n";
    os << "taps = " << taps << "\n";
    os << "seed = " << seed << "\n";
    os << "fill = " << cir_fill_name(fill) << "\n";
    return os.str();
}

std::string ChannelResponse::serialize() const {
    std::ostringstream taps_os;
    for (int i = 0; i < n_tx; ++i) {
        for (int j = 0; j < n_rx; ++j) {
            for (int n = 0; n < taps; ++n) {
                taps_os << g17(tap(i, j, n)) << (n + 1 == taps ? "" : " ");
            }
            taps_os << "\n";
        }
    }
    const std::string payload = taps_os.str();

    std::ostringstream os;
    os << fingerprint();
    os << "absorbed = " << absorbed_total << "\n";
    os << "survived = " << survived_total << "\n";
    os << "correction_failures = " << correction_failures << "\n";
    char sum[24];
    std::snprintf(sum, sizeof(sum), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(payload.data(), payload.size())));
    os << "checksum = " << sum << "\n";
    os << payload;
    return os.str();
}

ChannelResponse ChannelResponse::deserialize(const std::string& text) {
    // header ends at the checksum line; everything after it is the payload
    const std::string key = "checksum = ";
    const auto pos = text.find(key);
    require(pos != std::string::npos, ErrorCode::data, "channel response text has no checksum line");
    const auto eol = text.find('\n', pos);
    require(eol != std::string::npos, ErrorCode::data, "truncated checksum line");
    const std::string stated = text.substr(pos + key.size(), eol - pos - key.size());
    const std::string payload = text.substr(eol + 1);
    char sum[24];
    std::snprintf(sum, sizeof(sum), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(payload.data(), payload.size())));
    require(stated == sum, ErrorCode::data, "channel response checksum mismatch");

    const std::string header = text.substr(0, eol + 1);
    auto get = [&](const std::string& k, bool required_key = true) -> std::string {
        const std::string needle = k + " = ";
        auto p = header.find(needle);
        if (p == std::string::npos) {
            require(!required_key, ErrorCode::data, "channel response header missing '" + k + "'");
            return "";
        }
        const auto e = header.find('\n', p);
        return header.substr(p + needle.size(), e - p - needle.size());
    };

    require(get("format") == "mcmimo-cir-1", ErrorCode::data, "unknown channel response format");

    ChannelResponse cir;
    cir.topology = Topology::from_kv(header);
    cir.n_tx = cir.topology.n_tx;
    cir.n_rx = cir.topology.n_rx;
    cir.params.d_coeff = std::stod(get("D"));
    cir.params.dt = std::stod(get("dt"));
    {
        std::istringstream ds(get("drift"));
        ds >> cir.params.drift.x >> cir.params.drift.y >> cir.params.drift.z;
    }
    cir.params.n_molecules = std::stoull(get("n_molecules"));
    cir.t_s = std::stod(get("t_s"));
    cir.taps = std::stoi(get("taps"));
    cir.seed = std::stoull(get("seed"));
    const std::string fill = get("fill");
    require(fill == "shift" || fill == "per_antenna", ErrorCode::data, "unknown fill mode");
    cir.fill = fill == "shift" ? CirFill::shift : CirFill::per_antenna;
    cir.absorbed_total = std::stoull(get("absorbed"));
    cir.survived_total = std::stoull(get("survived"));
    cir.correction_failures = std::stoull(get("correction_failures"));

    cir.h.reserve(static_cast<std::size_t>(cir.n_tx) * cir.n_rx * cir.taps);
    std::istringstream ps(payload);
    double v;
    while (ps >> v) cir.h.push_back(v);
    require(cir.h.size() == static_cast<std::size_t>(cir.n_tx) * cir.n_rx * cir.taps,
            ErrorCode::data, "channel response payload has wrong tap count");
    cir.validate();
    return cir;
}

} // namespace mcmimo
