#include "mcmimo/theory.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "mcmimo/error.hpp"
#include "mcmimo/parallel.hpp"

namespace mcmimo {

double q_function(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

namespace {

double normal_pdf(double r, double mu, double sigma) {
    const double u = (r - mu) / sigma;
    return std::exp(-0.5 * u * u) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

// 15-point Kronrod nodes/weights with the embedded 7-point Gauss rule
// (QUADPACK dqk15 constants), positive half.
constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
constexpr double kWg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

template <typename F>
void gk15(const F& f, double a, double b, double& kronrod, double& err) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double resk = 0.0, resg = 0.0;
    for (int i = 0; i < 8; ++i) {
        const double dx = h * kXgk[i];
        const double fv = i == 7 ? f(c) : f(c - dx) + f(c + dx);
        resk += kWgk[i] * fv;
        if (i % 2 == 1) resg += kWg[i / 2] * fv;  // odd indices (incl. center) are Gauss nodes
    }
    kronrod = resk * h;
    err = std::abs((resk - resg) * h);
}

/// Adaptive bisection with an absolute error budget: negligible-mass panels
/// terminate immediately instead of chasing an unreachable relative target.
template <typename F>
double adaptive_gk15(const F& f, double a, double b, double abs_tol, int depth) {
    double value, err;
    gk15(f, a, b, value, err);
    if (err <= abs_tol || depth <= 0) return value;
    const double c = 0.5 * (a + b);
    return adaptive_gk15(f, a, c, 0.5 * abs_tol, depth - 1) +
           adaptive_gk15(f, c, b, 0.5 * abs_tol, depth - 1);
}

} // namespace

double p_max_antenna(std::span<const double> means, std::span<const double> variances, int j,
                     double rel_tol) {
    const int n = static_cast<int>(means.size());
    require(n >= 1 && variances.size() == means.size(), ErrorCode::config,
            "means/variances must be non-empty and equally sized");
    require(j >= 0 && j < n, ErrorCode::config, "antenna index out of range");
    for (double v : variances)
        require(v >= 0.0, ErrorCode::config, "variances must be non-negative");
    if (n == 1) return 1.0;

    const double var_j = variances[j];
    const double mu_j = means[j];

    if (var_j <= 0.0) {
        // point mass at mu_j; exact ties with other point masses split evenly
        double prob = 1.0;
        int tie_group = 1;
        for (int t = 0; t < n; ++t) {
            if (t == j) continue;
            if (variances[t] <= 0.0) {
                if (means[t] > mu_j) return 0.0;
                if (means[t] == mu_j) ++tie_group;
            } else {
                prob *= 1.0 - q_function((mu_j - means[t]) / std::sqrt(variances[t]));
            }
        }
        return prob / tie_group;
    }

    const double sigma_j = std::sqrt(var_j);
    std::vector<double> sigmas(n);
    for (int t = 0; t < n; ++t) sigmas[t] = std::sqrt(variances[t]);

    double lo = means[0] - 10.0 * sigmas[0];
    double hi = means[0] + 10.0 * sigmas[0];
    for (int t = 1; t < n; ++t) {
        lo = std::min(lo, means[t] - 10.0 * sigmas[t]);
        hi = std::max(hi, means[t] + 10.0 * sigmas[t]);
    }

    // only antenna j's own 10-sigma slice of the envelope carries mass
    const double support_lo = std::max(lo, mu_j - 10.0 * sigma_j);
    const double support_hi = std::min(hi, mu_j + 10.0 * sigma_j);

    // a competitor sitting entirely above that slice wins outright
    for (int t = 0; t < n; ++t) {
        if (t == j) continue;
        if (means[t] - 10.0 * sigmas[t] > support_hi) return 0.0;
    }

    // panel boundaries at every transition landmark inside the slice keep
    // each panel either smooth or negligible; point masses are step factors
    std::vector<double> cuts{support_lo, support_hi};
    for (int t = 0; t < n; ++t) {
        for (const double edge :
             {means[t] - 10.0 * sigmas[t], means[t], means[t] + 10.0 * sigmas[t]}) {
            if (edge > support_lo && edge < support_hi) cuts.push_back(edge);
        }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    const auto integrand = [&](double r) {
        double f = normal_pdf(r, mu_j, sigma_j);
        for (int t = 0; t < n && f > 0.0; ++t) {
            if (t == j) continue;
            if (variances[t] <= 0.0) {
                if (r <= means[t]) return 0.0;  // competitor point mass not yet below r
            } else {
                f *= 1.0 - q_function((r - means[t]) / sigmas[t]);
            }
        }
        return f;
    };

    // absolute budget per panel; the result is a probability, so rel_tol of
    // the Sum-to-one scale is an absolute scale
    const double panel_tol = rel_tol * 0.01;
    double total = 0.0;
    for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
        total += adaptive_gk15(integrand, cuts[p], cuts[p + 1], panel_tol, 12);
    }
    return std::clamp(total, 0.0, 1.0);
}

namespace {

int bits_per_symbol_of(int n) {
    require(n >= 2 && std::has_single_bit(static_cast<unsigned>(n)), ErrorCode::config,
            "antenna count must be a power of two >= 2");
    return std::countr_zero(static_cast<unsigned>(n));
}

/// Error contribution of one sequence given final-interval moments.
double weighted_error(std::span<const double> mu, std::span<const double> var, int x_final,
                      std::span<const int> hamming_row, int bits) {
    double err = 0.0;
    for (int j = 0; j < static_cast<int>(mu.size()); ++j) {
        if (j == x_final) continue;  // zero Hamming weight
        const double pj = p_max_antenna(mu, var, j);
        err += pj * hamming_row[j];
    }
    return err / bits;
}

} // namespace

double conditional_ber(std::span<const int> seq, const ChannelResponse& cir, Mapping mapping,
                       double emission) {
    const int len = static_cast<int>(seq.size());
    require(len >= 1, ErrorCode::config, "sequence must be non-empty");
    const int n = cir.n_rx;
    const int bits = bits_per_symbol_of(n);
    const auto codes = codes_for(n, mapping);

    std::vector<double> mu(n, 0.0), var(n, 0.0);
    for (int z = 0; z < len; ++z) {
        const int age = len - 1 - z;
        if (age >= cir.taps) continue;
        for (int j = 0; j < n; ++j) {
            const double p = cir.tap(seq[z], j, age);
            mu[j] += emission * p;
            var[j] += emission * p * (1.0 - p);
        }
    }

    const int x = seq[len - 1];
    std::vector<int> hamming_row(n);
    for (int j = 0; j < n; ++j) hamming_row[j] = hamming(codes[x], codes[j]);
    return weighted_error(mu, var, x, hamming_row, bits);
}

SequenceEnumerator::SequenceEnumerator(int alphabet, int length) : alphabet_(alphabet) {
    require(alphabet >= 1 && length >= 1, ErrorCode::config,
            "enumerator needs positive alphabet and length");
    current_.assign(length, 0);
    total_ = 1;
    for (int i = 0; i < length; ++i) total_ *= static_cast<std::uint64_t>(alphabet);
}

void SequenceEnumerator::advance() {
    for (int pos = static_cast<int>(current_.size()) - 1; pos >= 0; --pos) {
        if (++current_[pos] < alphabet_) return;
        current_[pos] = 0;
    }
    done_ = true;
}

double theoretical_ber_mssk(const ChannelResponse& cir, int memory, Mapping mapping, double m_tx,
                            double enumeration_guard, int n_threads) {
    require(memory >= 1, ErrorCode::config, "memory must be >= 1");
    require(cir.n_tx == cir.n_rx, ErrorCode::config, "analysis assumes n_tx == n_rx");
    const int n = cir.n_tx;
    const int bits = bits_per_symbol_of(n);
    const double emission = bits / 2.0 * m_tx;

    const double count = std::pow(static_cast<double>(n), memory);
    if (count > enumeration_guard) {
        char msg[160];
        std::snprintf(msg, sizeof(msg),
                      "theoretical BER needs %d^%d = %.4g sequence evaluations, above the %.4g guard",
                      n, memory, count, enumeration_guard);
        fail(ErrorCode::infeasible, msg);
    }

    const auto codes = codes_for(n, mapping);
    std::vector<int> hamming_all(static_cast<std::size_t>(n) * n);
    for (int x = 0; x < n; ++x)
        for (int j = 0; j < n; ++j) hamming_all[static_cast<std::size_t>(x) * n + j] = hamming(codes[x], codes[j]);

    // DFS over sequences; only final-interval moments matter, so placing the
    // symbol for interval z touches exactly one tap (age = memory-1-z).
    struct Walker {
        const ChannelResponse* cir;
        int n, memory, bits;
        double emission;
        const std::vector<int>* hamming_all;
        std::vector<double> mu, var;
        double sum = 0.0;

        void place(int z, int a, double sign) {
            const int age = memory - 1 - z;
            if (age >= cir->taps) return;
            for (int j = 0; j < n; ++j) {
                const double p = cir->tap(a, j, age);
                mu[j] += sign * emission * p;
                var[j] += sign * emission * p * (1.0 - p);
            }
        }
        void visit(int z) {
            for (int a = 0; a < n; ++a) {
                place(z, a, +1.0);
                if (z + 1 == memory) {
                    sum += weighted_error(mu, var, a,
                                          std::span<const int>(&(*hamming_all)[static_cast<std::size_t>(a) * n], n),
                                          bits);
                } else {
                    visit(z + 1);
                }
                place(z, a, -1.0);
            }
        }
    };

    // parallel over the first symbol; partial sums combined in index order
    std::vector<double> partial(n, 0.0);
    parallel_chunks(static_cast<std::uint64_t>(n), 1, n_threads,
                    [&](std::uint64_t chunk, std::uint64_t begin, std::uint64_t) {
                        Walker w{&cir, n, memory, bits, emission, &hamming_all, {}, {}, 0.0};
                        w.mu.assign(n, 0.0);
                        w.var.assign(n, 0.0);
                        const int a = static_cast<int>(begin);
                        w.place(0, a, +1.0);
                        if (memory == 1) {
                            w.sum += weighted_error(
                                w.mu, w.var, a,
                                std::span<const int>(&hamming_all[static_cast<std::size_t>(a) * n], n), bits);
                        } else {
                            w.visit(1);
                        }
                        partial[chunk] = w.sum;
                    });

    double total = 0.0;
    for (double p : partial) total += p;
    return total / count;
}

} // namespace mcmimo
