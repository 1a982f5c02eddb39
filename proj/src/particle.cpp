#include "mcmimo/particle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

#include "mcmimo/error.hpp"
#include "mcmimo/parallel.hpp"

namespace mcmimo {

Vec3 step(const Vec3& pos, const DiffusionParams& params, Rng& rng) {
    const double sigma = std::sqrt(2.0 * params.d_coeff * params.dt);
    std::normal_distribution<double> unit(0.0, 1.0);
    Vec3 out = pos;
    out.x += params.drift.x * params.dt + sigma * unit(rng);
    out.y += params.drift.y * params.dt + sigma * unit(rng);
    out.z += params.drift.z * params.dt + sigma * unit(rng);
    return out;
}

namespace {

struct Spheres {
    std::vector<Vec3> c;
    double r = 0.0;
    double r2 = 0.0;
    int n = 0;

    explicit Spheres(const Topology& t)
        : c(t.rx_centers), r(t.r_r), r2(t.r_r * t.r_r), n(t.n_rx) {}

    /// Surface distance of the nearest sphere (negative inside) and the index
    /// of the containing sphere, -1 when outside all. Containment is unique
    /// because the spheres are disjoint.
    void nearest(const Vec3& p, double& d_surf, int& inside) const {
        double best = std::numeric_limits<double>::max();
        int best_idx = -1;
        for (int j = 0; j < n; ++j) {
            const double dx = p.x - c[j].x, dy = p.y - c[j].y, dz = p.z - c[j].z;
            const double d2 = dx * dx + dy * dy + dz * dz;
            if (d2 < best) {
                best = d2;
                best_idx = j;
            }
        }
        d_surf = std::sqrt(best) - r;
        inside = best < r2 ? best_idx : -1;
    }

    /// Sphere whose surface the segment prev->next crosses first (smallest
    /// parametric t in [0, 1]); -1 when no crossing is found.
    int first_crossing(const Vec3& prev, const Vec3& next) const {
        const Vec3 u = next - prev;
        const double uu = u.dot(u);
        if (uu == 0.0) return -1;
        double best_t = std::numeric_limits<double>::max();
        int best_idx = -1;
        for (int j = 0; j < n; ++j) {
            const Vec3 w = prev - c[j];
            const double b = w.dot(u);
            const double cc = w.dot(w) - r2;
            const double disc = b * b - uu * cc;
            if (disc < 0.0) continue;
            const double t = (-b - std::sqrt(disc)) / uu;  // entering root
            if (t >= 0.0 && t <= 1.0 && t < best_t) {
                best_t = t;
                best_idx = j;
            }
        }
        return best_idx;
    }
};

constexpr int kMaxReflectionCorrections = 16;

/// Mirror a penetrating point radially across the sphere surface:
/// overshoot depth delta ends up at radial distance r + delta.
Vec3 reflect_radial(const Vec3& p, const Vec3& center, double r) {
    const Vec3 w = p - center;
    double rho = w.norm();
    if (rho < 1e-12) return {center.x + 2.0 * r, center.y, center.z};  // degenerate dead-center hit
    return center + w * ((2.0 * r - rho) / rho);
}

struct WalkResult {
    bool absorbed = false;
    int rx = -1;
    std::uint64_t arrival_step = 0;  ///< 1-based step count at absorption
    Vec3 end_pos;
};

/// Conservative number of steps guaranteed (to ~8 sigma per axis) not to
/// reach a sphere at surface distance d: drift * dt * k + 8 * sigma *
/// sqrt(3k) <= d.
std::uint64_t safe_steps(double d, double drift_speed_dt, double sigma) {
    if (d <= 0.0) return 0;
    const double b = 8.0 * sigma * std::sqrt(3.0);
    if (drift_speed_dt <= 0.0) {
        const double k = (d / b) * (d / b);
        return k >= 1e18 ? static_cast<std::uint64_t>(1e18) : static_cast<std::uint64_t>(k);
    }
    const double sk = (-b + std::sqrt(b * b + 4.0 * drift_speed_dt * d)) / (2.0 * drift_speed_dt);
    if (sk <= 0.0) return 0;
    const double k = sk * sk;
    return k >= 1e18 ? static_cast<std::uint64_t>(1e18) : static_cast<std::uint64_t>(k);
}

struct Walker {
    const Spheres& sph;
    const std::uint8_t* absorbing;  // nullptr -> all absorbing
    double sigma;
    Vec3 drift_dt;
    double drift_speed_dt;
    std::atomic<std::uint64_t>* correction_failures;

    bool absorbs(int j) const { return absorbing == nullptr || absorbing[j] != 0; }

    /// Repeated radial mirroring until the point is outside every sphere. A
    /// reflection may push the point into an absorbing sphere, which counts
    /// as a hit. Non-convergence is tallied and the point is clamped just
    /// outside the last offending surface.
    int correct_reflections(Vec3& p) const {
        for (int iter = 0; iter < kMaxReflectionCorrections; ++iter) {
            double d_surf;
            int inside;
            sph.nearest(p, d_surf, inside);
            if (inside < 0) return -1;
            if (absorbs(inside)) return inside;
            p = reflect_radial(p, sph.c[inside], sph.r);
        }
        double d_surf;
        int inside;
        sph.nearest(p, d_surf, inside);
        if (inside >= 0) {
            if (correction_failures) correction_failures->fetch_add(1, std::memory_order_relaxed);
            const Vec3 w = p - sph.c[inside];
            p = sph.c[inside] + w * (sph.r * (1.0 + 1e-9) / w.norm());
        }
        return -1;
    }

    /// Walk up to max_steps increments of dt from pos; molecules start
    /// outside all spheres. Absorption happens when a step's endpoint lands
    /// inside an absorbing sphere (attributed to the first surface the step
    /// segment crossed). Far from every obstacle, k single steps are replaced
    /// by one statistically identical aggregate jump of variance k*sigma^2.
    WalkResult walk(Vec3 pos, std::uint64_t max_steps, Rng& rng) const {
        std::normal_distribution<double> unit(0.0, 1.0);
        std::uint64_t m = 0;
        double d_surf;
        int inside;
        sph.nearest(pos, d_surf, inside);
        while (m < max_steps) {
            std::uint64_t k = safe_steps(d_surf, drift_speed_dt, sigma);
            if (k >= 2) {
                k = std::min(k, max_steps - m);
                const double s = sigma * std::sqrt(static_cast<double>(k));
                pos.x += drift_dt.x * k + s * unit(rng);
                pos.y += drift_dt.y * k + s * unit(rng);
                pos.z += drift_dt.z * k + s * unit(rng);
                m += k;
                sph.nearest(pos, d_surf, inside);
                if (inside >= 0) {  // beyond the 8-sigma guard; vanishingly rare
                    if (absorbs(inside)) return {true, inside, m, pos};
                    const int hit = correct_reflections(pos);
                    if (hit >= 0) return {true, hit, m, pos};
                    sph.nearest(pos, d_surf, inside);
                }
                continue;
            }
            const Vec3 prev = pos;
            pos.x += drift_dt.x + sigma * unit(rng);
            pos.y += drift_dt.y + sigma * unit(rng);
            pos.z += drift_dt.z + sigma * unit(rng);
            ++m;
            sph.nearest(pos, d_surf, inside);
            if (inside >= 0) {
                if (absorbs(inside)) {
                    const int hit = sph.first_crossing(prev, pos);
                    const int target = (hit >= 0 && absorbs(hit)) ? hit : inside;
                    return {true, target, m, pos};
                }
                const int hit = correct_reflections(pos);
                if (hit >= 0) return {true, hit, m, pos};
                sph.nearest(pos, d_surf, inside);
            }
        }
        return {false, -1, 0, pos};
    }
};

} // namespace

CollisionOutcome resolve_collision(const Vec3& prev, const Vec3& next, const Topology& topology,
                                   std::span<const std::uint8_t> absorbing) {
    require(absorbing.empty() || absorbing.size() == static_cast<std::size_t>(topology.n_rx),
            ErrorCode::config, "absorbing mask length must match n_rx");
    Spheres sph(topology);
    Walker w{sph, absorbing.empty() ? nullptr : absorbing.data(), 0.0, {}, 0.0, nullptr};

    double d_surf;
    int inside;
    sph.nearest(next, d_surf, inside);
    if (inside < 0) return {CollisionOutcome::Kind::moved, next, -1};
    if (w.absorbs(inside)) {
        const int hit = sph.first_crossing(prev, next);
        const int target = (hit >= 0 && w.absorbs(hit)) ? hit : inside;
        return {CollisionOutcome::Kind::absorbed, next, target};
    }
    Vec3 corrected = next;
    std::atomic<std::uint64_t> failures{0};
    Walker wc{sph, absorbing.empty() ? nullptr : absorbing.data(), 0.0, {}, 0.0, &failures};
    const int hit = wc.correct_reflections(corrected);
    if (hit >= 0) return {CollisionOutcome::Kind::absorbed, corrected, hit};
    if (failures.load() > 0)
        fail(ErrorCode::simulation, "reflection correction did not converge");
    return {CollisionOutcome::Kind::moved, corrected, -1};
}

namespace {

std::int64_t steps_per_interval(double t_s, double dt) {
    const double ratio = t_s / dt;
    const std::int64_t sps = std::llround(ratio);
    require(sps >= 1, ErrorCode::config, "t_s must be at least one time step");
    return sps;
}

} // namespace

ChannelResponse simulate_cir(const Topology& topology, const DiffusionParams& params, double t_s,
                             int taps, std::uint64_t seed, std::optional<CirFill> fill_opt,
                             int n_threads) {
    topology.validate();
    params.validate();
    require(t_s > 0.0, ErrorCode::config, "t_s must be positive");
    require(taps >= 1, ErrorCode::config, "channel memory must be >= 1");

    const CirFill fill =
        fill_opt.value_or(topology.uca ? CirFill::shift : CirFill::per_antenna);
    require(fill == CirFill::per_antenna || topology.uca, ErrorCode::config,
            "shift fill requires the circular-array symmetry; run per-antenna instead");

    const std::int64_t sps = steps_per_interval(t_s, params.dt);
    const std::uint64_t total_steps = static_cast<std::uint64_t>(sps) * taps;
    const int n_rx = topology.n_rx;
    const int n_tx = topology.n_tx;

    ChannelResponse cir;
    cir.n_tx = n_tx;
    cir.n_rx = n_rx;
    cir.taps = taps;
    cir.t_s = t_s;
    cir.topology = topology;
    cir.params = params;
    cir.seed = seed;
    cir.fill = fill;
    cir.h.assign(static_cast<std::size_t>(n_tx) * n_rx * taps, 0.0);

    const Spheres sph(topology);
    const double sigma = std::sqrt(2.0 * params.d_coeff * params.dt);
    const Vec3 drift_dt = params.drift * params.dt;
    const Walker walker{sph, nullptr, sigma, drift_dt, drift_dt.norm(), nullptr};

    const std::vector<int> sources = [&] {
        std::vector<int> s;
        if (fill == CirFill::shift) {
            s.push_back(0);
        } else {
            for (int i = 0; i < n_tx; ++i) s.push_back(i);
        }
        return s;
    }();

    std::uint64_t absorbed_total = 0;
    const std::uint64_t n_mol = params.n_molecules;

    for (int src : sources) {
        const std::uint64_t chunk = 4096;
        const std::uint64_t n_chunks = (n_mol + chunk - 1) / chunk;
        std::vector<std::vector<std::uint64_t>> tally(
            n_chunks, std::vector<std::uint64_t>());

        parallel_chunks(n_mol, chunk, n_threads,
                        [&](std::uint64_t c, std::uint64_t begin, std::uint64_t end) {
                            std::vector<std::uint64_t> local(
                                static_cast<std::size_t>(n_rx) * taps, 0);
                            for (std::uint64_t mol = begin; mol < end; ++mol) {
                                Rng rng(substream(seed, static_cast<std::uint64_t>(src), mol));
                                const WalkResult res =
                                    walker.walk(topology.tx_points[src], total_steps, rng);
                                if (res.absorbed) {
                                    const std::uint64_t bin = (res.arrival_step - 1) /
                                                              static_cast<std::uint64_t>(sps);
                                    ++local[static_cast<std::size_t>(res.rx) * taps + bin];
                                }
                            }
                            tally[c] = std::move(local);
                        });

        std::vector<std::uint64_t> counts(static_cast<std::size_t>(n_rx) * taps, 0);
        for (const auto& local : tally)
            for (std::size_t idx = 0; idx < counts.size(); ++idx) counts[idx] += local[idx];
        for (std::uint64_t v : counts) absorbed_total += v;

        for (int j = 0; j < n_rx; ++j)
            for (int nn = 0; nn < taps; ++nn)
                cir.tap(src, j, nn) =
                    static_cast<double>(counts[static_cast<std::size_t>(j) * taps + nn]) /
                    static_cast<double>(n_mol);
    }

    if (fill == CirFill::shift) {
        // the array is reflection symmetric about the source: average the
        // equidistant mirror pairs, then fill the other rows by rotation
        for (int j = 1; j < (n_rx + 1) / 2; ++j) {
            const int jm = n_rx - j;
            for (int nn = 0; nn < taps; ++nn) {
                const double avg = 0.5 * (cir.tap(0, j, nn) + cir.tap(0, jm, nn));
                cir.tap(0, j, nn) = avg;
                cir.tap(0, jm, nn) = avg;
            }
        }
        for (int i = 1; i < n_tx; ++i)
            for (int j = 0; j < n_rx; ++j)
                for (int nn = 0; nn < taps; ++nn)
                    cir.tap(i, j, nn) = cir.tap(0, (j - i + n_rx) % n_rx, nn);
    }

    cir.absorbed_total = absorbed_total;
    cir.survived_total =
        n_mol * static_cast<std::uint64_t>(sources.size()) - absorbed_total;
    cir.validate();
    return cir;
}

ParticleBerResult particle_ber_mssk(const Topology& topology, const DiffusionParams& params,
                                    double t_b, double m_tx, int memory, Mapping mapping,
                                    std::uint64_t n_trials, std::uint64_t seed, int n_threads) {
    topology.validate();
    params.validate();
    require(n_trials >= 1, ErrorCode::config, "n_trials must be >= 1");
    require(memory >= 1, ErrorCode::config, "memory must be >= 1");
    require(t_b > 0.0, ErrorCode::config, "t_b must be positive");
    require(m_tx >= 0.0, ErrorCode::config, "m_tx must be non-negative");
    require(topology.n_tx == topology.n_rx, ErrorCode::config,
            "space shift keying pairs n_tx with n_rx");

    const int n = topology.n_tx;
    const auto codes = codes_for(n, mapping);
    const int bits = static_cast<int>(std::countr_zero(static_cast<unsigned>(n)));
    const double t_s = bits * t_b;
    const std::int64_t sps = steps_per_interval(t_s, params.dt);
    const std::uint64_t total_steps = static_cast<std::uint64_t>(sps) * memory;
    const long long emission = std::llround(bits / 2.0 * m_tx);

    const Spheres sph(topology);
    const double sigma = std::sqrt(2.0 * params.d_coeff * params.dt);
    const Vec3 drift_dt = params.drift * params.dt;
    const Walker walker{sph, nullptr, sigma, drift_dt, drift_dt.norm(), nullptr};

    const std::uint64_t chunk = 8;
    const std::uint64_t n_chunks = (n_trials + chunk - 1) / chunk;
    std::vector<std::uint64_t> chunk_errors(n_chunks, 0);

    parallel_chunks(n_trials, chunk, n_threads,
                    [&](std::uint64_t c, std::uint64_t begin, std::uint64_t end) {
                        std::uint64_t errors = 0;
                        std::vector<long long> final_counts(n);
                        for (std::uint64_t trial = begin; trial < end; ++trial) {
                            Rng rng(substream(seed, trial));
                            std::vector<int> symbols(memory);
                            std::uniform_int_distribution<int> upick(0, n - 1);
                            for (int z = 0; z < memory; ++z) symbols[z] = upick(rng);

                            std::fill(final_counts.begin(), final_counts.end(), 0);
                            for (int z = 0; z < memory; ++z) {
                                const std::uint64_t start =
                                    static_cast<std::uint64_t>(z) * sps;
                                const Vec3 origin = topology.tx_points[symbols[z]];
                                for (long long molecule = 0; molecule < emission; ++molecule) {
                                    const WalkResult res =
                                        walker.walk(origin, total_steps - start, rng);
                                    if (!res.absorbed) continue;
                                    const std::uint64_t bin =
                                        (start + res.arrival_step - 1) /
                                        static_cast<std::uint64_t>(sps);
                                    if (bin == static_cast<std::uint64_t>(memory - 1))
                                        ++final_counts[res.rx];
                                }
                            }
                            const int decoded = argmax_tiebreak(
                                std::span<const long long>(final_counts), rng);
                            errors += static_cast<std::uint64_t>(
                                hamming(codes[symbols[memory - 1]], codes[decoded]));
                        }
                        chunk_errors[c] = errors;
                    });

    ParticleBerResult out;
    for (std::uint64_t e : chunk_errors) out.bit_errors += e;
    out.bits = n_trials * static_cast<std::uint64_t>(bits);
    out.ber = static_cast<double>(out.bit_errors) / static_cast<double>(out.bits);
    return out;
}

} // namespace mcmimo
