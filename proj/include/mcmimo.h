/* C interface to the molecular-MIMO link simulator. Opaque handles own the
 * C++ objects; every call returns a status code and leaves a human-readable
 * message for the calling thread in mcm_last_error() on failure. */

#ifndef MCMIMO_H
#define MCMIMO_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mcm_status {
    MCM_OK = 0,
    MCM_ERR_CONFIG = 1,     /* bad parameters or configuration */
    MCM_ERR_INFEASIBLE = 2, /* enumeration guard exceeded */
    MCM_ERR_IO = 3,         /* file system failure */
    MCM_ERR_GEOMETRY = 4,   /* invalid antenna arrangement */
    MCM_ERR_DATA = 5,       /* corrupt or inconsistent data */
    MCM_ERR_SIMULATION = 6, /* simulation step failure */
} mcm_status;

typedef struct mcm_topology mcm_topology;
typedef struct mcm_cir mcm_cir;
typedef struct mcm_records mcm_records;

const char* mcm_status_name(mcm_status s);

/* Message from the most recent failing call on this thread ("" if none). */
const char* mcm_last_error(void);

/* ---- geometry ---- */

mcm_status mcm_topology_uca(int32_t n_tx, int32_t n_rx, double r_r_um, double d_x_um,
                            double d_yz_um, mcm_topology** out);

/* xyz: 3 doubles per antenna, micrometers */
mcm_status mcm_topology_custom(const double* tx_xyz, int32_t n_tx, const double* rx_xyz,
                               int32_t n_rx, double r_r_um, mcm_topology** out);

void mcm_topology_free(mcm_topology* t);

/* ---- diffusion / channel impulse response ---- */

typedef struct mcm_diffusion {
    double d_coeff;  /* um^2/s */
    double dt;       /* s */
    double drift_x;  /* um/s */
    double drift_y;
    double drift_z;
    uint64_t n_molecules;
} mcm_diffusion;

/* fill: 0 = auto (shift for circular arrays), 1 = shift, 2 = per-antenna */
mcm_status mcm_cir_simulate(const mcm_topology* topology, const mcm_diffusion* diffusion,
                            double t_s, int32_t taps, uint64_t seed, int32_t fill,
                            int32_t n_threads, mcm_cir** out);

mcm_status mcm_cir_save(const mcm_cir* cir, const char* path);
mcm_status mcm_cir_load(const char* path, mcm_cir** out);
void mcm_cir_free(mcm_cir* cir);

int32_t mcm_cir_n_tx(const mcm_cir* cir);
int32_t mcm_cir_n_rx(const mcm_cir* cir);
int32_t mcm_cir_taps(const mcm_cir* cir);
double mcm_cir_t_s(const mcm_cir* cir);

/* tap probability; i, j, n all 0-based */
double mcm_cir_tap(const mcm_cir* cir, int32_t i, int32_t j, int32_t n);

/* ---- analytical error rate ---- */

/* mapping: 0 = natural, 1 = gray. memory_l <= taps uses a truncated response. */
mcm_status mcm_theory_ber_mssk(const mcm_cir* cir, int32_t memory_l, int32_t mapping, double m_tx,
                               int32_t n_threads, double* out_ber);

/* ---- particle-based error rate ---- */

mcm_status mcm_particle_ber_mssk(const mcm_topology* topology, const mcm_diffusion* diffusion,
                                 double t_b, double m_tx, int32_t memory_l, int32_t mapping,
                                 uint64_t n_trials, uint64_t seed, int32_t n_threads,
                                 double* out_ber, uint64_t* out_bit_errors, uint64_t* out_bits);

/* ---- sweeps ---- */

/* cache_dir may be NULL or "" to disable the on-disk response cache. */
mcm_status mcm_sweep_run_file(const char* config_path, const char* cache_dir, int32_t n_threads,
                              mcm_records** out);
mcm_status mcm_sweep_run_text(const char* config_text, const char* cache_dir, int32_t n_threads,
                              mcm_records** out);

size_t mcm_records_count(const mcm_records* records);

/* Writes the CSV into buf (cap bytes including the terminator) and stores the
 * full length (excluding the terminator) in *needed. Call with buf = NULL to
 * query the size. Truncated output is still NUL-terminated. */
mcm_status mcm_records_csv(const mcm_records* records, char* buf, size_t cap, size_t* needed);

mcm_status mcm_records_save_csv(const mcm_records* records, const char* path);
void mcm_records_free(mcm_records* records);

#ifdef __cplusplus
}
#endif

#endif /* MCMIMO_H */
