#include "mcmimo.h"

#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "mcmimo/error.hpp"
#include "mcmimo/harness.hpp"
#include "mcmimo/particle.hpp"
#include "mcmimo/theory.hpp"

using namespace mcmimo;

struct mcm_topology {
    Topology value;
};
struct mcm_cir {
    ChannelResponse value;
};
struct mcm_records {
    std::vector<BerRecord> value;
};

namespace {

thread_local std::string t_last_error;

mcm_status status_of(ErrorCode code) {
    switch (code) {
        case ErrorCode::config: return MCM_ERR_CONFIG;
        case ErrorCode::infeasible: return MCM_ERR_INFEASIBLE;
        case ErrorCode::io: return MCM_ERR_IO;
        case ErrorCode::geometry: return MCM_ERR_GEOMETRY;
        case ErrorCode::data: return MCM_ERR_DATA;
        case ErrorCode::simulation: return MCM_ERR_SIMULATION;
    }
    return MCM_ERR_CONFIG;
}

template <typename Fn>
mcm_status guarded(Fn&& fn) {
    try {
        fn();
        t_last_error.clear();
        return MCM_OK;
    } catch (const Error& e) {
        t_last_error = e.what();
        return status_of(e.code());
    } catch (const std::exception& e) {
        t_last_error = e.what();
        return MCM_ERR_CONFIG;
    }
}

DiffusionParams to_params(const mcm_diffusion* d) {
    require(d != nullptr, ErrorCode::config, "diffusion parameters are required");
    DiffusionParams p;
    p.d_coeff = d->d_coeff;
    p.dt = d->dt;
    p.drift = {d->drift_x, d->drift_y, d->drift_z};
    p.n_molecules = d->n_molecules;
    return p;
}

Mapping to_mapping(int32_t m) {
    require(m == 0 || m == 1, ErrorCode::config, "mapping must be 0 (natural) or 1 (gray)");
    return m == 0 ? Mapping::natural : Mapping::gray;
}

} // namespace

extern "C" {

const char* mcm_status_name(mcm_status s) {
    switch (s) {
        case MCM_OK: return "ok";
        case MCM_ERR_CONFIG: return "configuration error";
        case MCM_ERR_INFEASIBLE: return "infeasible request";
        case MCM_ERR_IO: return "io error";
        case MCM_ERR_GEOMETRY: return "geometry error";
        case MCM_ERR_DATA: return "data error";
        case MCM_ERR_SIMULATION: return "simulation error";
    }
    return "unknown";
}

const char* mcm_last_error(void) { return t_last_error.c_str(); }

mcm_status mcm_topology_uca(int32_t n_tx, int32_t n_rx, double r_r_um, double d_x_um,
                            double d_yz_um, mcm_topology** out) {
    return guarded([&] {
        require(out != nullptr, ErrorCode::config, "output pointer is required");
        *out = new mcm_topology{build_uca_topology(n_tx, n_rx, r_r_um, d_x_um, d_yz_um)};
    });
}

mcm_status mcm_topology_custom(const double* tx_xyz, int32_t n_tx, const double* rx_xyz,
                               int32_t n_rx, double r_r_um, mcm_topology** out) {
    return guarded([&] {
        require(out != nullptr && tx_xyz != nullptr && rx_xyz != nullptr, ErrorCode::config,
                "coordinate arrays and output pointer are required");
        std::vector<Vec3> tx(n_tx), rx(n_rx);
        for (int32_t i = 0; i < n_tx; ++i)
            tx[i] = {tx_xyz[3 * i], tx_xyz[3 * i + 1], tx_xyz[3 * i + 2]};
        for (int32_t j = 0; j < n_rx; ++j)
            rx[j] = {rx_xyz[3 * j], rx_xyz[3 * j + 1], rx_xyz[3 * j + 2]};
        *out = new mcm_topology{make_custom_topology(std::move(tx), std::move(rx), r_r_um)};
    });
}

void mcm_topology_free(mcm_topology* t) { delete t; }

mcm_status mcm_cir_simulate(const mcm_topology* topology, const mcm_diffusion* diffusion,
                            double t_s, int32_t taps, uint64_t seed, int32_t fill,
                            int32_t n_threads, mcm_cir** out) {
    return guarded([&] {
        require(topology != nullptr && out != nullptr, ErrorCode::config,
                "topology and output pointer are required");
        std::optional<CirFill> f;
        if (fill == 1) f = CirFill::shift;
        else if (fill == 2) f = CirFill::per_antenna;
        else require(fill == 0, ErrorCode::config, "fill must be 0 (auto), 1 (shift) or 2 (per-antenna)");
        *out = new mcm_cir{
            simulate_cir(topology->value, to_params(diffusion), t_s, taps, seed, f, n_threads)};
    });
}

mcm_status mcm_cir_save(const mcm_cir* cir, const char* path) {
    return guarded([&] {
        require(cir != nullptr && path != nullptr, ErrorCode::config, "cir and path are required");
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        require(f.good(), ErrorCode::io, std::string("cannot open for writing: ") + path);
        f << cir->value.serialize();
        require(f.good(), ErrorCode::io, std::string("write failed: ") + path);
    });
}

mcm_status mcm_cir_load(const char* path, mcm_cir** out) {
    return guarded([&] {
        require(path != nullptr && out != nullptr, ErrorCode::config,
                "path and output pointer are required");
        std::ifstream f(path, std::ios::binary);
        require(f.good(), ErrorCode::io, std::string("cannot open: ") + path);
        std::ostringstream os;
        os << f.rdbuf();
        *out = new mcm_cir{ChannelResponse::deserialize(os.str())};
    });
}

void mcm_cir_free(mcm_cir* cir) { delete cir; }

int32_t mcm_cir_n_tx(const mcm_cir* cir) { return cir ? cir->value.n_tx : 0; }
int32_t mcm_cir_n_rx(const mcm_cir* cir) { return cir ? cir->value.n_rx : 0; }
int32_t mcm_cir_taps(const mcm_cir* cir) { return cir ? cir->value.taps : 0; }
double mcm_cir_t_s(const mcm_cir* cir) { return cir ? cir->value.t_s : 0.0; }

double mcm_cir_tap(const mcm_cir* cir, int32_t i, int32_t j, int32_t n) {
    if (!cir) return 0.0;
    const ChannelResponse& c = cir->value;
    if (i < 0 || i >= c.n_tx || j < 0 || j >= c.n_rx || n < 0 || n >= c.taps) return 0.0;
    return c.tap(i, j, n);
}

mcm_status mcm_theory_ber_mssk(const mcm_cir* cir, int32_t memory_l, int32_t mapping, double m_tx,
                               int32_t n_threads, double* out_ber) {
    return guarded([&] {
        require(cir != nullptr && out_ber != nullptr, ErrorCode::config,
                "cir and output pointer are required");
        const ChannelResponse& full = cir->value;
        require(memory_l >= 1 && memory_l <= full.taps, ErrorCode::config,
                "memory_l must lie in [1, taps]");
        const ChannelResponse view =
            memory_l < full.taps ? full.truncated(memory_l) : full;
        *out_ber = theoretical_ber_mssk(view, memory_l, to_mapping(mapping), m_tx, 1e7, n_threads);
    });
}

mcm_status mcm_particle_ber_mssk(const mcm_topology* topology, const mcm_diffusion* diffusion,
                                 double t_b, double m_tx, int32_t memory_l, int32_t mapping,
                                 uint64_t n_trials, uint64_t seed, int32_t n_threads,
                                 double* out_ber, uint64_t* out_bit_errors, uint64_t* out_bits) {
    return guarded([&] {
        require(topology != nullptr && out_ber != nullptr, ErrorCode::config,
                "topology and output pointer are required");
        const ParticleBerResult r =
            particle_ber_mssk(topology->value, to_params(diffusion), t_b, m_tx, memory_l,
                              to_mapping(mapping), n_trials, seed, n_threads);
        *out_ber = r.ber;
        if (out_bit_errors) *out_bit_errors = r.bit_errors;
        if (out_bits) *out_bits = r.bits;
    });
}

mcm_status mcm_sweep_run_file(const char* config_path, const char* cache_dir, int32_t n_threads,
                              mcm_records** out) {
    return guarded([&] {
        require(config_path != nullptr && out != nullptr, ErrorCode::config,
                "config path and output pointer are required");
        const SweepSpec spec = SweepSpec::parse_file(config_path);
        CirCache cache(cache_dir ? cache_dir : "");
        *out = new mcm_records{run_sweep(spec, cache, n_threads)};
    });
}

mcm_status mcm_sweep_run_text(const char* config_text, const char* cache_dir, int32_t n_threads,
                              mcm_records** out) {
    return guarded([&] {
        require(config_text != nullptr && out != nullptr, ErrorCode::config,
                "config text and output pointer are required");
        const SweepSpec spec = SweepSpec::parse(config_text);
        CirCache cache(cache_dir ? cache_dir : "");
        *out = new mcm_records{run_sweep(spec, cache, n_threads)};
    });
}

size_t mcm_records_count(const mcm_records* records) {
    return records ? records->value.size() : 0;
}

mcm_status mcm_records_csv(const mcm_records* records, char* buf, size_t cap, size_t* needed) {
    return guarded([&] {
        require(records != nullptr && needed != nullptr, ErrorCode::config,
                "records and size pointer are required");
        const std::string csv = emit_csv(records->value);
        *needed = csv.size();
        if (buf && cap > 0) {
            const size_t n = csv.size() < cap - 1 ? csv.size() : cap - 1;
            std::memcpy(buf, csv.data(), n);
            buf[n] = '\0';
        }
    });
}

mcm_status mcm_records_save_csv(const mcm_records* records, const char* path) {
    return guarded([&] {
        require(records != nullptr && path != nullptr, ErrorCode::config,
                "records and path are required");
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        require(f.good(), ErrorCode::io, std::string("cannot open for writing: ") + path);
        f << emit_csv(records->value);
        require(f.good(), ErrorCode::io, std::string("write failed: ") + path);
    });
}

void mcm_records_free(mcm_records* records) { delete records; }

} // extern "C"
