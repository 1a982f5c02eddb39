// Acceptance suite: one pass/fail line per criterion. Heavy Monte Carlo runs
// use desk-scale particle counts by default; set MCMIMO_ACCEPT_FULL=1 to run
// the reference-scale variant of criterion 1 (10^6 molecules, tighter bands).
//
// Usage: acceptance [criterion numbers...]   (no arguments = all)

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mcmimo/detection.hpp"
#include "mcmimo/harness.hpp"
#include "mcmimo/linksim.hpp"
#include "mcmimo/parallel.hpp"
#include "mcmimo/particle.hpp"
#include "mcmimo/theory.hpp"

using namespace mcmimo;
namespace fs = std::filesystem;

namespace {

struct Ctx {
    int threads = 0;
    bool full_scale = false;
    CirCache cache{"acceptance_cache"};
    std::ostringstream detail;
};

// Table-defaults topology and diffusion
Topology default_topology(double d_yz = 10.0) { return build_uca_topology(8, 8, 5.0, 10.0, d_yz); }

DiffusionParams desk_params(std::uint64_t n_molecules, double drift_vx = 0.0) {
    DiffusionParams p;
    p.d_coeff = 79.4;
    p.dt = 1e-4;
    p.drift = {drift_vx, 0.0, 0.0};
    p.n_molecules = n_molecules;
    return p;
}

constexpr double kTable1[8][5] = {
    {0.1042, 0.0346, 0.0141, 0.0078, 0.0049},
    {0.0357, 0.0227, 0.0106, 0.0062, 0.0039},
    {0.0052, 0.0090, 0.0057, 0.0036, 0.0026},
    {0.0014, 0.0045, 0.0033, 0.0023, 0.0017},
    {0.0009, 0.0035, 0.0029, 0.0021, 0.0014},
    {0.0014, 0.0045, 0.0033, 0.0023, 0.0017},
    {0.0052, 0.0090, 0.0057, 0.0036, 0.0026},
    {0.0357, 0.0227, 0.0106, 0.0062, 0.0039},
};

SchemeConfig make_scheme(Scheme s, Mapping m, double m_tx, double t_b) {
    SchemeConfig cfg;
    cfg.scheme = s;
    const bool siso = s == Scheme::siso_bcsk || s == Scheme::siso_dmosk;
    cfg.n_tx = cfg.n_rx = siso ? 1 : 8;
    cfg.t_b = t_b;
    cfg.m_tx = m_tx;
    cfg.mapping = m;
    cfg.beta = 0;
    return cfg;
}

/// Simulated point with the stated stopping rule.
LinkResult run_point(Ctx& ctx, const ChannelResponse& cir, Scheme s, Mapping m, double m_tx,
                     double t_b, DetectorKind det, std::uint64_t target_errors,
                     std::uint64_t max_symbols, std::uint64_t seed) {
    LinkConfig cfg;
    cfg.scheme = make_scheme(s, m, m_tx, t_b);
    cfg.detector = det;
    cfg.max_symbols = max_symbols;
    cfg.target_errors = target_errors;
    cfg.seed = seed;
    return simulate_link(cir, cfg);
}

ChannelResponse cir_for(Ctx& ctx, const Topology& topo, const DiffusionParams& params, double t_s,
                        int taps, std::uint64_t seed) {
    return ctx.cache.get_or_generate(topo, params, t_s, taps, seed, ctx.threads);
}

bool no_confident_increase(const LinkResult& a, const LinkResult& b) {
    // b may not sit confidently above a
    return b.ber - b.ci_half <= a.ber + a.ci_half;
}

bool no_confident_decrease(const LinkResult& a, const LinkResult& b) {
    return b.ber + b.ci_half >= a.ber - a.ci_half;
}

bool confidently_less(const LinkResult& a, const LinkResult& b) {
    return a.ber + a.ci_half < b.ber - b.ci_half;
}

// ---------------------------------------------------------------- criterion 1

bool criterion_table1(Ctx& ctx) {
    const std::uint64_t n_mol = ctx.full_scale ? 1'000'000 : 100'000;
    const double grid_tol = ctx.full_scale ? 0.005 : 0.01;
    const auto cir = cir_for(ctx, default_topology(), desk_params(n_mol), 0.75, 5, 101);

    bool ok = true;
    double worst = 0.0;
    for (int j = 0; j < 8; ++j) {
        for (int n = 0; n < 5; ++n) {
            const double diff = std::abs(cir.tap(0, j, n) - kTable1[j][n]);
            worst = std::max(worst, diff);
            if (diff > grid_tol) ok = false;
        }
    }
    // named entries carry their own bands at full scale
    const double named_tol_11 = ctx.full_scale ? 0.005 : grid_tol;
    const double named_tol_12 = ctx.full_scale ? 0.004 : grid_tol;
    const double named_tol_15 = ctx.full_scale ? 0.0005 : grid_tol;
    ok = ok && std::abs(cir.tap(0, 0, 0) - 0.1042) <= named_tol_11;
    ok = ok && std::abs(cir.tap(0, 1, 0) - 0.0357) <= named_tol_12;
    ok = ok && std::abs(cir.tap(0, 4, 0) - 0.0009) <= named_tol_15;

    ctx.detail << "h[1][1][1] = " << cir.tap(0, 0, 0) << ", h[1][2][1] = " << cir.tap(0, 1, 0)
               << ", h[1][5][1] = " << cir.tap(0, 4, 0) << ", worst |diff| = " << worst << " (tol "
               << grid_tol << ", " << n_mol << " molecules)";
    return ok;
}

// ---------------------------------------------------------------- criterion 2

bool criterion_symmetry(Ctx& ctx) {
    const Topology topo = default_topology();
    const auto params = desk_params(20'000);
    const auto folded = cir_for(ctx, topo, params, 0.75, 3, 102);

    bool exact = true;
    for (int i = 0; i < 8 && exact; ++i)
        for (int j = 0; j < 8 && exact; ++j)
            for (int n = 0; n < 3; ++n)
                if (folded.tap(i, j, n) != folded.tap(0, (j - i + 8) % 8, n)) {
                    exact = false;
                    break;
                }

    const auto raw = simulate_cir(topo, params, 0.75, 3, 102, CirFill::per_antenna, ctx.threads);
    int violations = 0;
    double worst_z = 0.0;
    for (int i = 0; i < 8; ++i) {
        for (int j = 0; j < 8; ++j) {
            for (int n = 0; n < 3; ++n) {
                const double a = raw.tap(i, j, n);
                const double b = folded.tap(i, j, n);
                const double se =
                    std::sqrt((a * (1 - a) + b * (1 - b)) / static_cast<double>(params.n_molecules));
                if (se == 0.0) continue;
                const double z = std::abs(a - b) / se;
                worst_z = std::max(worst_z, z);
                if (z > 3.0) ++violations;
            }
        }
    }
    ctx.detail << "shift relation exact = " << (exact ? "yes" : "no")
               << ", raw-vs-folded worst z = " << worst_z << ", 3-sigma violations = " << violations
               << "/192";
    return exact && violations == 0;
}

// ---------------------------------------------------------------- criterion 3

bool criterion_single_absorber(Ctx& ctx) {
    const Topology topo = build_uca_topology(1, 1, 5.0, 10.0, 0.0);
    const auto cir = cir_for(ctx, topo, desk_params(100'000), 0.75, 4, 103);
    const double d_c = 15.0;

    bool ok = true;
    double cumulative = 0.0;
    for (int n = 0; n < 4; ++n) {
        cumulative += cir.tap(0, 0, n);
        const double t = 0.75 * (n + 1);
        if (n == 0 || n == 1 || n == 3) {  // t in {0.75, 1.5, 3.0}
            const double expect =
                (5.0 / d_c) * std::erfc((d_c - 5.0) / std::sqrt(4.0 * 79.4 * t));
            const double diff = std::abs(cumulative - expect);
            ctx.detail << "t=" << t << ": sim " << cumulative << " vs analytic " << expect << " ";
            if (diff > 0.01) ok = false;
        }
    }
    return ok;
}

// ---------------------------------------------------------------- criterion 4

bool criterion_theory_vs_simulation(Ctx& ctx) {
    const auto cir = cir_for(ctx, default_topology(), desk_params(100'000), 0.75, 5, 101);

    bool ok = true;
    int compared = 0;
    double worst_rel = 0.0;
    for (Mapping m : {Mapping::natural, Mapping::gray}) {
        for (int i = 0; i < 10; ++i) {
            const double m_tx = 50.0 * (i + 1);
            const double theory = theoretical_ber_mssk(cir, 5, m, m_tx, 1e7, ctx.threads);
            if (theory < 1e-3) continue;
            const LinkResult sim = run_point(ctx, cir, Scheme::mssk, m, m_tx, 0.25,
                                             DetectorKind::mcd, 400, 4'000'000,
                                             substream(104, i, static_cast<int>(m)));
            const double rel = std::abs(sim.ber - theory) / theory;
            worst_rel = std::max(worst_rel, rel);
            ++compared;
            if (rel > 0.15) {
                ok = false;
                ctx.detail << "[" << mapping_name(m) << " M=" << m_tx << ": theory " << theory
                           << " vs sim " << sim.ber << " rel " << rel << "] ";
            }
        }
    }

    // particle-engine spot check at two budgets. The statistical channel
    // samples antennas independently while true molecule arrivals are
    // negatively correlated (one absorption precludes another), a known
    // approximation of the channel model that biases the particle engine a
    // little high; at spot-check power the two agree within the Monte Carlo
    // scatter, and the residual relative gap is reported here openly.
    for (double m_tx : {50.0, 100.0}) {
        const LinkResult sim = run_point(ctx, cir, Scheme::mssk, Mapping::natural, m_tx, 0.25,
                                         DetectorKind::mcd, 2000, 2'000'000, 1040 + (int)m_tx);
        const auto particle = particle_ber_mssk(default_topology(), desk_params(1), 0.25, m_tx, 5,
                                                Mapping::natural, 500, 105, ctx.threads);
        const double se_particle =
            std::sqrt(particle.ber * (1 - particle.ber) / static_cast<double>(particle.bits));
        const double se_sim = sim.ci_half / 1.96;
        const double z = std::abs(particle.ber - sim.ber) /
                         std::sqrt(se_particle * se_particle + se_sim * se_sim);
        ctx.detail << "[particle M=" << m_tx << ": " << particle.ber << " vs channel " << sim.ber
                   << ", rel " << (particle.ber / sim.ber - 1.0) << ", z = " << z << "] ";
        if (z > 3.0) ok = false;
    }
    ctx.detail << compared << " theory points compared, worst rel diff " << worst_rel;
    return ok;
}

// ---------------------------------------------------------------- criterion 5

bool criterion_scheme_ordering(Ctx& ctx) {
    const std::uint64_t n_mol = 100'000;
    const Topology topo8 = default_topology();
    const Topology topo1 = build_uca_topology(1, 1, 5.0, 10.0, 0.0);
    const auto params = desk_params(n_mol);

    // responses per distinct symbol duration
    const auto cir_mssk = cir_for(ctx, topo8, params, 0.75, 30, 105);
    const auto cir_smux = cir_for(ctx, topo8, params, 2.00, 30, 105);
    const auto cir_siso = cir_for(ctx, topo1, params, 0.25, 30, 105);
    const auto cir_qmssk = cir_for(ctx, topo8, params, 1.50, 30, 105);
    const auto cir_msm = cir_for(ctx, topo8, params, 1.00, 30, 105);

    const std::uint64_t budget = 3'000'000;
    const LinkResult mssk_gray = run_point(ctx, cir_mssk, Scheme::mssk, Mapping::gray, 300, 0.25,
                                           DetectorKind::mcd, 150, budget, 501);
    const LinkResult mssk_nat = run_point(ctx, cir_mssk, Scheme::mssk, Mapping::natural, 300, 0.25,
                                          DetectorKind::mcd, 150, budget, 502);
    const LinkResult siso = run_point(ctx, cir_siso, Scheme::siso_bcsk, Mapping::natural, 300,
                                      0.25, DetectorKind::ftd, 150, budget, 503);
    const LinkResult smux = run_point(ctx, cir_smux, Scheme::smux_bcsk, Mapping::natural, 300,
                                      0.25, DetectorKind::ftd, 150, budget, 504);

    bool ok = true;
    if (!(mssk_gray.ber <= mssk_nat.ber)) ok = false;
    if (!(mssk_nat.ber < siso.ber)) ok = false;
    if (!(smux.ber >= 10.0 * mssk_gray.ber)) ok = false;
    ctx.detail << "mssk gray " << mssk_gray.ber << " <= nat " << mssk_nat.ber << " < siso "
               << siso.ber << "; smux " << smux.ber << " >= 10x gray; ";

    // dual molecule: spatial modulation wins at t_b = 0.25, loses at 0.15
    const LinkResult msm_25 = run_point(ctx, cir_msm, Scheme::msm, Mapping::gray, 300, 0.25,
                                        DetectorKind::mcd, 150, budget, 505);
    const LinkResult qmssk_25 = run_point(ctx, cir_qmssk, Scheme::qmssk, Mapping::gray, 300, 0.25,
                                          DetectorKind::mcd, 150, budget, 506);
    const auto cir_qmssk15 = cir_for(ctx, topo8, params, 0.90, 30, 105);
    const auto cir_msm15 = cir_for(ctx, topo8, params, 0.60, 30, 105);
    const LinkResult msm_15 = run_point(ctx, cir_msm15, Scheme::msm, Mapping::gray, 300, 0.15,
                                        DetectorKind::mcd, 150, budget, 507);
    const LinkResult qmssk_15 = run_point(ctx, cir_qmssk15, Scheme::qmssk, Mapping::gray, 300,
                                          0.15, DetectorKind::mcd, 150, budget, 508);
    if (!(msm_25.ber < qmssk_25.ber)) ok = false;
    if (!(qmssk_15.ber < msm_15.ber)) ok = false;
    ctx.detail << "msm@0.25 " << msm_25.ber << " < qmssk@0.25 " << qmssk_25.ber << "; qmssk@0.15 "
               << qmssk_15.ber << " < msm@0.15 " << msm_15.ber;
    return ok;
}

// ---------------------------------------------------------------- criterion 6

bool criterion_trends(Ctx& ctx) {
    const std::uint64_t n_mol = 50'000;
    const std::uint64_t budget = 2'000'000;
    const std::uint64_t errors = 120;
    bool ok = true;

    // t_b sweep: spatial multiplexing never confidently improves; the
    // natural-to-gray error ratio widens
    {
        const double tbs[] = {0.15, 0.20, 0.25, 0.35, 0.50};
        std::vector<LinkResult> smux, nat, gray;
        for (int i = 0; i < 5; ++i) {
            const auto params = desk_params(n_mol);
            const auto cir_s =
                cir_for(ctx, default_topology(), params, 8.0 * tbs[i], 30, 106);
            smux.push_back(run_point(ctx, cir_s, Scheme::smux_bcsk, Mapping::natural, 300, tbs[i],
                                     DetectorKind::ftd, errors, budget, 600 + i));
            const auto cir_m =
                cir_for(ctx, default_topology(), params, 3.0 * tbs[i], 30, 106);
            nat.push_back(run_point(ctx, cir_m, Scheme::mssk, Mapping::natural, 300, tbs[i],
                                    DetectorKind::mcd, errors, budget, 610 + i));
            gray.push_back(run_point(ctx, cir_m, Scheme::mssk, Mapping::gray, 300, tbs[i],
                                     DetectorKind::mcd, errors, budget, 620 + i));
        }
        for (int i = 0; i + 1 < 5; ++i)
            if (!no_confident_decrease(smux[i], smux[i + 1])) {
                ok = false;
                ctx.detail << "[smux decreased at t_b " << tbs[i + 1] << "] ";
            }
        const double r_first = nat[0].ber / gray[0].ber;
        const double r_last = nat[4].ber / gray[4].ber;
        if (!(r_last > r_first)) {
            ok = false;
            ctx.detail << "[gray gap did not widen: " << r_first << " -> " << r_last << "] ";
        }
        ctx.detail << "smux " << smux[0].ber << ".." << smux[4].ber << ", nat/gray ratio "
                   << r_first << " -> " << r_last << "; ";
    }

    // d_yz sweep: interior minimum for the index scheme
    {
        const double dyz[] = {8.5, 10.0, 13.0, 17.0, 22.0};
        std::vector<LinkResult> res;
        for (int i = 0; i < 5; ++i) {
            const auto cir = cir_for(ctx, default_topology(dyz[i]), desk_params(n_mol), 0.75, 30, 107);
            res.push_back(run_point(ctx, cir, Scheme::mssk, Mapping::gray, 300, 0.25,
                                    DetectorKind::mcd, errors, budget, 630 + i));
        }
        int arg = 0;
        for (int i = 1; i < 5; ++i)
            if (res[i].ber < res[arg].ber) arg = i;
        ctx.detail << "d_yz bers:";
        for (const auto& r : res) ctx.detail << " " << r.ber;
        if (arg == 0 || arg == 4 || !confidently_less(res[arg], res[0]) ||
            !confidently_less(res[arg], res[4])) {
            ok = false;
            ctx.detail << " [no interior minimum]";
        }
        ctx.detail << "; ";
    }

    // drift sweep: flow toward the receiver never confidently hurts
    {
        const double vxs[] = {0.0, 5.0, 10.0, 20.0, 40.0};
        std::vector<LinkResult> res;
        for (int i = 0; i < 5; ++i) {
            const auto cir =
                cir_for(ctx, default_topology(), desk_params(n_mol, vxs[i]), 0.75, 30, 108);
            res.push_back(run_point(ctx, cir, Scheme::mssk, Mapping::gray, 300, 0.25,
                                    DetectorKind::mcd, errors, budget, 640 + i));
        }
        ctx.detail << "drift bers:";
        for (const auto& r : res) ctx.detail << " " << r.ber;
        for (int i = 0; i + 1 < 5; ++i)
            if (!no_confident_increase(res[i], res[i + 1])) {
                ok = false;
                ctx.detail << " [increase at v_x " << vxs[i + 1] << "]";
            }
    }
    return ok;
}

// ---------------------------------------------------------------- criterion 7

bool criterion_detectors(Ctx& ctx) {
    bool ok = true;

    // channel-aware symbol detector dominates the count detector
    const auto cir = cir_for(ctx, default_topology(), desk_params(100'000), 0.75, 30, 105);
    ctx.detail << "mcd vs symbol_ml:";
    for (double m_tx : {100.0, 150.0, 200.0, 250.0, 300.0}) {
        const LinkResult mcd = run_point(ctx, cir, Scheme::mssk, Mapping::gray, m_tx, 0.25,
                                         DetectorKind::mcd, 150, 3'000'000, 700 + (int)m_tx);
        const LinkResult sml = run_point(ctx, cir, Scheme::mssk, Mapping::gray, m_tx, 0.25,
                                         DetectorKind::symbol_ml, 150, 3'000'000, 700 + (int)m_tx);
        ctx.detail << " [M=" << m_tx << ": " << mcd.ber << " vs " << sml.ber << "]";
        if (!(sml.ber <= mcd.ber)) ok = false;
    }

    // exhaustive equivalence with a direct likelihood search (2 antennas, 2 taps)
    {
        ChannelResponse toy;
        toy.n_tx = toy.n_rx = 2;
        toy.taps = 2;
        toy.t_s = 1.0;
        toy.h = {0.25, 0.10, 0.08, 0.03, 0.08, 0.03, 0.25, 0.10};
        const double emission = 40.0;
        bool all = true;
        for (long long a = 0; a <= 20 && all; ++a)
            for (long long b = 0; b <= 20 && all; ++b)
                for (long long c = 0; c <= 20 && all; ++c)
                    for (long long d = 0; d <= 20; ++d) {
                        ArrivalMatrix q;
                        q.n_rx = 2;
                        q.n_intervals = 2;
                        q.beta = 1;
                        q.counts = {a, b, c, d};
                        const auto got = ml_sequence_detect(q, toy, 2, emission);
                        double best = std::numeric_limits<double>::infinity();
                        for (int s0 = 0; s0 < 2; ++s0)
                            for (int s1 = 0; s1 < 2; ++s1) {
                                const int seq[] = {s0, s1};
                                best = std::min(best, seq_ml_metric(seq, q, toy, emission));
                            }
                        if (std::abs(got.metric - best) > 1e-9) {
                            all = false;
                            break;
                        }
                    }
        if (!all) {
            ok = false;
            ctx.detail << " [sequence detector diverged from brute force]";
        } else {
            ctx.detail << " seq-ML == brute force on 21^4 inputs;";
        }
    }

    // memory-1 sequence detection == symbol detection, exhaustively
    {
        bool all = true;
        for (int n : {2, 4}) {
            ChannelResponse toy;
            toy.n_tx = toy.n_rx = n;
            toy.taps = 1;
            toy.t_s = 1.0;
            toy.h.assign(static_cast<std::size_t>(n) * n, 0.0);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) toy.tap(i, j, 0) = i == j ? 0.22 : 0.06;
            const double emission = 30.0;
            const int cmax = n == 2 ? 15 : 6;
            std::vector<long long> counts(n, 0);
            const std::function<void(int)> rec = [&](int pos) {
                if (!all) return;
                if (pos == n) {
                    ArrivalMatrix q;
                    q.n_rx = n;
                    q.n_intervals = 1;
                    q.beta = 1;
                    q.counts = counts;
                    const auto seq_res = ml_sequence_detect(q, toy, 1, emission);
                    SymbolMlDetector det(toy, 1, emission);
                    Rng rng(1);
                    const int sym = det.decide(counts, rng);
                    // equal optimal sets: both optima must beat or match the other
                    const int seq_sym[] = {seq_res.sequence[0]};
                    const int sym_seq[] = {sym};
                    if (std::abs(seq_ml_metric(sym_seq, q, toy, emission) - seq_res.metric) > 1e-9 &&
                        std::abs(seq_ml_metric(seq_sym, q, toy, emission) - seq_res.metric) > 1e-9)
                        all = false;
                    const auto scores = det.last_scores();
                    if (scores[seq_res.sequence[0]] < scores[sym] - 1e-9) all = false;
                    return;
                }
                for (long long v = 0; v <= cmax; ++v) {
                    counts[pos] = v;
                    rec(pos + 1);
                }
            };
            rec(0);
        }
        if (!all) {
            ok = false;
            ctx.detail << " [memory-1 sequence vs symbol mismatch]";
        } else {
            ctx.detail << " seq-ML(L=1) == symbol-ML exhaustively";
        }
    }
    return ok;
}

// ---------------------------------------------------------------- criterion 8

bool criterion_normalization(Ctx& ctx) {
    struct Row {
        Scheme scheme;
        double t_s, emission;
        int bits;
    };
    const Row rows[] = {
        {Scheme::siso_bcsk, 0.25, 300.0, 1},  {Scheme::siso_dmosk, 0.50, 300.0, 2},
        {Scheme::rc_bcsk, 0.25, 37.5, 1},     {Scheme::smux_bcsk, 2.00, 300.0, 8},
        {Scheme::mssk, 0.75, 450.0, 3},       {Scheme::qmssk, 1.50, 450.0, 6},
        {Scheme::msm, 1.00, 600.0, 4},
    };
    bool ok = true;
    Rng rng(801);
    std::uniform_int_distribution<int> bit01(0, 1);
    double worst = 0.0;
    for (const Row& row : rows) {
        const SchemeConfig cfg = make_scheme(row.scheme, Mapping::natural, 300.0, 0.25);
        const DerivedParams d = derive_params(cfg);
        if (d.t_s != row.t_s || d.emission != row.emission || d.bits_per_symbol != row.bits) {
            ok = false;
            ctx.detail << " [" << scheme_name(row.scheme) << " table mismatch]";
        }
        const std::size_t total_bits = 100'000;
        const int n_symbols = static_cast<int>(total_bits / d.bits_per_symbol);
        std::vector<std::uint8_t> bits(static_cast<std::size_t>(n_symbols) * d.bits_per_symbol);
        for (auto& b : bits) b = static_cast<std::uint8_t>(bit01(rng));
        const auto sch = modulate(cfg, bits, n_symbols);
        const double per_bit = static_cast<double>(sch.total_molecules()) / bits.size();
        const double rel = std::abs(per_bit - 150.0) / 150.0;
        worst = std::max(worst, rel);
        if (rel > 0.015) {
            ok = false;
            ctx.detail << " [" << scheme_name(row.scheme) << " spends " << per_bit << "/bit]";
        }
    }
    ctx.detail << "7 schemes exact; worst per-bit deviation " << worst * 100 << "%";
    return ok;
}

// ---------------------------------------------------------------- criterion 9

bool criterion_kernels(Ctx& ctx) {
    bool ok = true;
    if (std::abs(q_function(0.0) - 0.5) > 1e-12) ok = false;

    Rng rng(901);
    std::uniform_real_distribution<double> mu_d(0.0, 60.0);
    std::uniform_real_distribution<double> var_d(0.1, 40.0);
    double worst_sum = 0.0;
    for (int rep = 0; rep < 40; ++rep) {
        const int n = 2 + static_cast<int>(rng() % 7);
        std::vector<double> mu(n), var(n);
        for (int j = 0; j < n; ++j) {
            mu[j] = mu_d(rng);
            var[j] = (rep % 7 == 0 && j == 0) ? 0.0 : var_d(rng);
        }
        double total = 0.0;
        for (int j = 0; j < n; ++j) total += p_max_antenna(mu, var, j);
        worst_sum = std::max(worst_sum, std::abs(total - 1.0));
    }
    if (worst_sum > 1e-6) ok = false;

    double worst_sym = 0.0;
    for (int n : {2, 4, 8}) {
        std::vector<double> mu(n, 30.0), var(n, 12.0);
        for (int j = 0; j < n; ++j)
            worst_sym = std::max(worst_sym, std::abs(p_max_antenna(mu, var, j) - 1.0 / n));
    }
    if (worst_sym > 1e-6) ok = false;

    ctx.detail << "Q(0) exact, worst |sum-1| = " << worst_sum << ", worst |p - 1/n| = " << worst_sym;
    return ok;
}

// --------------------------------------------------------------- criterion 10

bool criterion_determinism(Ctx& ctx) {
    const char* config =
        "parameter = M_tx\n"
        "values = 100, 300\n"
        "schemes = mssk, smux_bcsk\n"
        "mappings = gray\n"
        "seed = 10\n"
        "L = 3\n"
        "n_molecules = 20000\n"
        "trial_budget = 20000\n"
        "target_errors = 80\n";
    const SweepSpec spec = SweepSpec::parse(config);

    const fs::path dir_a = fs::temp_directory_path() / "mcmimo_accept_det_a";
    const fs::path dir_b = fs::temp_directory_path() / "mcmimo_accept_det_b";
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
    CirCache cache_a(dir_a.string());
    CirCache cache_b(dir_b.string());

    const std::string csv_1 = emit_csv(run_sweep(spec, cache_a, 1));
    const std::string csv_2 = emit_csv(run_sweep(spec, cache_b, 2));
    const std::string csv_3 = emit_csv(run_sweep(spec, cache_a, 2));  // warm cache

    const auto cir_a = simulate_cir(default_topology(), desk_params(20'000), 0.75, 3, 42,
                                    std::nullopt, 1);
    const auto cir_b = simulate_cir(default_topology(), desk_params(20'000), 0.75, 3, 42,
                                    std::nullopt, 2);
    const bool cir_ok = cir_a.serialize() == cir_b.serialize();

    bool cache_ok = true;
    for (const auto& entry : fs::directory_iterator(dir_a)) {
        const fs::path other = dir_b / entry.path().filename();
        if (!fs::exists(other) || fs::file_size(other) != fs::file_size(entry.path()))
            cache_ok = false;
    }

    fs::remove_all(dir_a);
    fs::remove_all(dir_b);

    ctx.detail << "csv 1-thread == 2-thread: " << (csv_1 == csv_2 ? "yes" : "NO")
               << ", warm-cache rerun identical: " << (csv_1 == csv_3 ? "yes" : "NO")
               << ", response bytes thread-independent: " << (cir_ok ? "yes" : "NO")
               << ", cache files identical: " << (cache_ok ? "yes" : "NO");
    return csv_1 == csv_2 && csv_1 == csv_3 && cir_ok && cache_ok;
}

struct Criterion {
    int number;
    const char* title;
    bool (*run)(Ctx&);
};

const Criterion kCriteria[] = {
    {1, "reference tap grid reproduction", criterion_table1},
    {2, "circular-shift symmetry", criterion_symmetry},
    {3, "single-absorber analytic oracle", criterion_single_absorber},
    {4, "analysis vs Monte Carlo consistency", criterion_theory_vs_simulation},
    {5, "scheme ordering at defaults", criterion_scheme_ordering},
    {6, "trend suite (t_b, d_yz, drift)", criterion_trends},
    {7, "detector suite", criterion_detectors},
    {8, "normalization suite", criterion_normalization},
    {9, "numeric kernels", criterion_kernels},
    {10, "determinism", criterion_determinism},
};

} // namespace

int main(int argc, char** argv) {
    Ctx ctx;
    ctx.threads = resolve_threads(0);
    const char* full = std::getenv("MCMIMO_ACCEPT_FULL");
    ctx.full_scale = full && std::strcmp(full, "1") == 0;

    std::set<int> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

    int failures = 0;
    for (const Criterion& c : kCriteria) {
        if (!selected.empty() && !selected.count(c.number)) continue;
        ctx.detail.str("");
        const auto t0 = std::chrono::steady_clock::now();
        bool ok = false;
        try {
            ok = c.run(ctx);
        } catch (const std::exception& e) {
            ctx.detail << "exception: " << e.what();
        }
        const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("[%s] criterion %2d: %s (%.1fs) — %s\n", ok ? "PASS" : "FAIL", c.number,
                    c.title, dt, ctx.detail.str().c_str());
        std::fflush(stdout);
        if (!ok) ++failures;
    }
    if (failures) std::printf("%d criterion(s) FAILED\n", failures);
    return failures == 0 ? 0 : 1;
}
