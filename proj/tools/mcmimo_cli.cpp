// Command-line front end. Talks to the simulator exclusively through the C
// API in mcmimo.h; exit codes: 0 success, 1 configuration error,
// 2 infeasible request, 3 I/O error.

#include <cinttypes>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mcmimo.h"

namespace {

int exit_code_of(mcm_status s) {
    switch (s) {
        case MCM_OK: return 0;
        case MCM_ERR_INFEASIBLE: return 2;
        case MCM_ERR_IO: return 3;
        default: return 1;  // configuration, geometry, data, simulation
    }
}

int bail(mcm_status s) {
    std::fprintf(stderr, "error: %s: %s\n", mcm_status_name(s), mcm_last_error());
    return exit_code_of(s);
}

struct TopologyArgs {
    int n_tx = 8;
    int n_rx = 8;
    double r_r = 5.0;
    double d_x = 10.0;
    double d_yz = 10.0;

    void attach(CLI::App* cmd) {
        cmd->add_option("--n-tx", n_tx, "transmit antennas");
        cmd->add_option("--n-rx", n_rx, "receiver antennas");
        cmd->add_option("--r-r", r_r, "receiver sphere radius, um");
        cmd->add_option("--d-x", d_x, "tx-to-paired-sphere surface distance, um");
        cmd->add_option("--d-yz", d_yz, "sphere surface to array axis distance, um");
    }
};

struct DiffusionArgs {
    mcm_diffusion d{79.4, 1e-4, 0.0, 0.0, 0.0, 1000000};

    void attach(CLI::App* cmd) {
        cmd->add_option("--diffusion,-D", d.d_coeff, "diffusion coefficient, um^2/s");
        cmd->add_option("--dt", d.dt, "time step, s");
        cmd->add_option("--drift-vx", d.drift_x, "drift velocity along +x, um/s");
        cmd->add_option("--n-molecules", d.n_molecules, "molecules per response run");
    }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Link-level simulator for index-modulation molecular MIMO"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "worker threads (0 = all cores)");

    // ---- cir ----
    auto* cir_cmd = app.add_subcommand("cir", "generate a channel impulse response");
    TopologyArgs cir_topo;
    DiffusionArgs cir_diff;
    cir_topo.attach(cir_cmd);
    cir_diff.attach(cir_cmd);
    double cir_t_s = 0.75;
    int cir_taps = 30;
    std::uint64_t cir_seed = 1;
    std::string cir_fill = "auto";
    std::string cir_out;
    cir_cmd->add_option("--t-s", cir_t_s, "symbol duration used for binning, s");
    cir_cmd->add_option("--taps,-L", cir_taps, "channel memory, intervals");
    cir_cmd->add_option("--seed", cir_seed, "random seed");
    cir_cmd->add_option("--fill", cir_fill, "auto | shift | per-antenna");
    cir_cmd->add_option("--out,-o", cir_out, "output file")->required();

    // ---- sweep ----
    auto* sweep_cmd = app.add_subcommand("sweep", "run a BER sweep from a config file");
    std::string sweep_config, sweep_out, sweep_cache;
    sweep_cmd->add_option("--config,-c", sweep_config, "sweep config file")->required();
    sweep_cmd->add_option("--out,-o", sweep_out, "output CSV path")->required();
    sweep_cmd->add_option("--cache-dir", sweep_cache, "response cache directory");

    // ---- theory ----
    auto* theory_cmd = app.add_subcommand("theory", "evaluate the analytical error rate");
    std::string theory_cir;
    int theory_memory = 5;
    std::string theory_mapping = "gray";
    std::vector<double> theory_m{300.0};
    theory_cmd->add_option("--cir", theory_cir, "channel response file")->required();
    theory_cmd->add_option("--memory,-L", theory_memory, "sequence memory");
    theory_cmd->add_option("--mapping", theory_mapping, "natural | gray");
    theory_cmd->add_option("--m-tx", theory_m, "molecule budget value(s)");

    // ---- particle-ber ----
    auto* pber_cmd = app.add_subcommand("particle-ber", "particle-based BER evaluation");
    TopologyArgs pber_topo;
    DiffusionArgs pber_diff;
    pber_topo.attach(pber_cmd);
    pber_diff.attach(pber_cmd);
    double pber_t_b = 0.25, pber_m_tx = 300.0;
    int pber_memory = 5;
    std::string pber_mapping = "gray";
    std::uint64_t pber_trials = 1000, pber_seed = 1;
    pber_cmd->add_option("--t-b", pber_t_b, "bit duration, s");
    pber_cmd->add_option("--m-tx", pber_m_tx, "molecule budget parameter");
    pber_cmd->add_option("--memory,-L", pber_memory, "channel memory, symbols");
    pber_cmd->add_option("--mapping", pber_mapping, "natural | gray");
    pber_cmd->add_option("--trials", pber_trials, "Monte Carlo trials");
    pber_cmd->add_option("--seed", pber_seed, "random seed");

    CLI11_PARSE(app, argc, argv);

    if (cir_cmd->parsed()) {
        int fill = 0;
        if (cir_fill == "shift") fill = 1;
        else if (cir_fill == "per-antenna") fill = 2;
        else if (cir_fill != "auto") {
            std::fprintf(stderr, "error: unknown fill mode '%s'\n", cir_fill.c_str());
            return 1;
        }
        mcm_topology* topo = nullptr;
        mcm_status s = mcm_topology_uca(cir_topo.n_tx, cir_topo.n_rx, cir_topo.r_r, cir_topo.d_x,
                                        cir_topo.d_yz, &topo);
        if (s != MCM_OK) return bail(s);
        mcm_cir* cir = nullptr;
        s = mcm_cir_simulate(topo, &cir_diff.d, cir_t_s, cir_taps, cir_seed, fill, threads, &cir);
        mcm_topology_free(topo);
        if (s != MCM_OK) return bail(s);
        s = mcm_cir_save(cir, cir_out.c_str());
        if (s == MCM_OK) {
            std::printf("wrote %s (%d x %d antennas, %d taps, t_s = %g s)\n", cir_out.c_str(),
                        mcm_cir_n_tx(cir), mcm_cir_n_rx(cir), mcm_cir_taps(cir), mcm_cir_t_s(cir));
        }
        mcm_cir_free(cir);
        return s == MCM_OK ? 0 : bail(s);
    }

    if (sweep_cmd->parsed()) {
        mcm_records* records = nullptr;
        mcm_status s = mcm_sweep_run_file(sweep_config.c_str(),
                                          sweep_cache.empty() ? nullptr : sweep_cache.c_str(),
                                          threads, &records);
        if (s != MCM_OK) return bail(s);
        s = mcm_records_save_csv(records, sweep_out.c_str());
        if (s == MCM_OK)
            std::printf("wrote %s (%zu records)\n", sweep_out.c_str(), mcm_records_count(records));
        mcm_records_free(records);
        return s == MCM_OK ? 0 : bail(s);
    }

    if (theory_cmd->parsed()) {
        const int mapping = theory_mapping == "gray" ? 1 : 0;
        if (theory_mapping != "gray" && theory_mapping != "natural") {
            std::fprintf(stderr, "error: unknown mapping '%s'\n", theory_mapping.c_str());
            return 1;
        }
        mcm_cir* cir = nullptr;
        mcm_status s = mcm_cir_load(theory_cir.c_str(), &cir);
        if (s != MCM_OK) return bail(s);
        std::printf("m_tx,ber\n");
        for (double m : theory_m) {
            double ber = 0.0;
            s = mcm_theory_ber_mssk(cir, theory_memory, mapping, m, threads, &ber);
            if (s != MCM_OK) {
                mcm_cir_free(cir);
                return bail(s);
            }
            std::printf("%g,%.9g\n", m, ber);
        }
        mcm_cir_free(cir);
        return 0;
    }

    if (pber_cmd->parsed()) {
        const int mapping = pber_mapping == "gray" ? 1 : 0;
        if (pber_mapping != "gray" && pber_mapping != "natural") {
            std::fprintf(stderr, "error: unknown mapping '%s'\n", pber_mapping.c_str());
            return 1;
        }
        mcm_topology* topo = nullptr;
        mcm_status s = mcm_topology_uca(pber_topo.n_tx, pber_topo.n_rx, pber_topo.r_r,
                                        pber_topo.d_x, pber_topo.d_yz, &topo);
        if (s != MCM_OK) return bail(s);
        double ber = 0.0;
        std::uint64_t errors = 0, bits = 0;
        s = mcm_particle_ber_mssk(topo, &pber_diff.d, pber_t_b, pber_m_tx, pber_memory, mapping,
                                  pber_trials, pber_seed, threads, &ber, &errors, &bits);
        mcm_topology_free(topo);
        if (s != MCM_OK) return bail(s);
        std::printf("trials,bits,bit_errors,ber\n");
        std::printf("%" PRIu64 ",%" PRIu64 ",%" PRIu64 ",%.9g\n", pber_trials, bits, errors, ber);
        return 0;
    }

    return 0;
}
