#include "mcmimo/detection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "mcmimo/error.hpp"

namespace mcmimo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Trellis branch cost for one receiver and interval. A zero variance is a
/// point mass: exact agreement costs nothing, disagreement is impossible.
double branch_term(double count, double mean, double variance, SeqMetric metric) {
    if (variance <= 0.0) return count == mean ? 0.0 : kInf;
    const double r = count - mean;
    if (metric == SeqMetric::gaussian_ll) return std::log(variance) + r * r / variance;
    return std::log(variance) + r / variance;
}

/// Gaussian log density with the same degenerate-variance rule.
double log_likelihood(double count, double mean, double variance) {
    if (variance <= 0.0) return count == mean ? 0.0 : -kInf;
    const double r = count - mean;
    return -0.5 * std::log(2.0 * std::numbers::pi * variance) - r * r / (2.0 * variance);
}

} // namespace

long long combine_sc(std::span<const long long> counts) {
    require(!counts.empty(), ErrorCode::config, "selection combining over empty input");
    return *std::max_element(counts.begin(), counts.end());
}

long long combine_egc(std::span<const long long> counts) {
    require(!counts.empty(), ErrorCode::config, "equal-gain combining over empty input");
    long long total = 0;
    for (long long c : counts) total += c;
    return total;
}

int mcd_mssk(std::span<const long long> counts, Rng& rng) {
    require(counts.size() >= 2, ErrorCode::config, "maximum count detection needs >= 2 antennas");
    return argmax_tiebreak(counts, rng);
}

MsmDecision mcd_msm(std::span<const long long> counts_a, std::span<const long long> counts_b,
                    Rng& rng) {
    require(counts_a.size() == counts_b.size() && !counts_a.empty(), ErrorCode::config,
            "type-A and type-B count vectors must have equal, non-zero length");
    std::vector<long long> joint(counts_a.size());
    for (std::size_t j = 0; j < joint.size(); ++j) joint[j] = std::max(counts_a[j], counts_b[j]);
    MsmDecision d;
    d.antenna = argmax_tiebreak(std::span<const long long>(joint), rng);
    d.type = counts_a[d.antenna] >= counts_b[d.antenna] ? 0 : 1;
    return d;
}

double seq_ml_metric(std::span<const int> seq, const ArrivalMatrix& q, const ChannelResponse& cir,
                     double emission, SeqMetric metric) {
    const int len = static_cast<int>(seq.size());
    double total = 0.0;
    for (int z = 0; z < len; ++z) {
        for (int j = 0; j < cir.n_rx; ++j) {
            double mu = 0.0, var = 0.0;
            for (int w = std::max(0, z - cir.taps + 1); w <= z; ++w) {
                const double p = cir.tap(seq[w], j, z - w);
                mu += emission * p;
                var += emission * p * (1.0 - p);
            }
            total += branch_term(static_cast<double>(q.at(j, z, 0)), mu, var, metric);
        }
    }
    return total;
}

namespace {

struct SeqSearch {
    const ArrivalMatrix* q;
    const ChannelResponse* cir;
    int memory;
    double emission;
    SeqMetric metric;
    Rng* tie_rng;

    std::vector<double> mu;   // [z][j] accumulated means
    std::vector<double> var;  // [z][j]
    std::vector<int> current;
    std::vector<int> best_seq;
    double best = kInf;
    int n_ties = 0;

    double& mu_at(int z, int j) { return mu[static_cast<std::size_t>(z) * cir->n_rx + j]; }
    double& var_at(int z, int j) { return var[static_cast<std::size_t>(z) * cir->n_rx + j]; }

    void apply(int z, int a, double sign) {
        const int t_hi = std::min(cir->taps, memory - z);
        for (int t = 0; t < t_hi; ++t) {
            for (int j = 0; j < cir->n_rx; ++j) {
                const double p = cir->tap(a, j, t);
                mu_at(z + t, j) += sign * emission * p;
                var_at(z + t, j) += sign * emission * p * (1.0 - p);
            }
        }
    }

    void visit(int z, double cost_so_far) {
        for (int a = 0; a < cir->n_rx; ++a) {
            apply(z, a, +1.0);
            current[z] = a;
            double cost = cost_so_far;
            for (int j = 0; j < cir->n_rx; ++j) {
                cost += branch_term(static_cast<double>(q->at(j, z, 0)), mu_at(z, j), var_at(z, j),
                                    metric);
                if (cost >= kInf) break;
            }
            if (z + 1 == memory) {
                if (cost < best) {
                    best = cost;
                    best_seq = current;
                    n_ties = 1;
                } else if (cost == best) {
                    ++n_ties;
                    if (tie_rng &&
                        std::uniform_int_distribution<int>(1, n_ties)(*tie_rng) == 1) {
                        best_seq = current;
                    }
                }
            } else if (cost < kInf) {
                visit(z + 1, cost);
            }
            apply(z, a, -1.0);
        }
    }
};

} // namespace

SeqMlResult ml_sequence_detect(const ArrivalMatrix& q, const ChannelResponse& cir, int memory,
                               double emission, SeqMetric metric, Rng* tie_rng,
                               double enumeration_guard) {
    require(memory >= 1, ErrorCode::config, "sequence memory must be >= 1");
    require(q.n_intervals >= memory, ErrorCode::config,
            "arrival matrix has fewer intervals than the sequence memory");
    require(q.n_rx == cir.n_rx, ErrorCode::config, "arrival matrix / response antenna mismatch");

    const double count = std::pow(static_cast<double>(cir.n_rx), memory);
    if (count > enumeration_guard) {
        char msg[160];
        std::snprintf(msg, sizeof(msg),
                      "sequence ML needs %d^%d = %.4g candidate sequences, above the %.4g guard",
                      cir.n_rx, memory, count, enumeration_guard);
        fail(ErrorCode::infeasible, msg);
    }

    SeqSearch s{&q, &cir, memory, emission, metric, tie_rng, {}, {}, {}, {}, kInf, 0};
    s.mu.assign(static_cast<std::size_t>(memory) * cir.n_rx, 0.0);
    s.var.assign(static_cast<std::size_t>(memory) * cir.n_rx, 0.0);
    s.current.assign(memory, 0);
    s.visit(0, 0.0);
    return {std::move(s.best_seq), s.best};
}

SymbolMlDetector::SymbolMlDetector(const ChannelResponse& cir, int memory, double emission)
    : cir_(&cir), memory_(memory), emission_(emission) {
    require(memory >= 1, ErrorCode::config, "detector memory must be >= 1");
    require(cir.taps >= 1, ErrorCode::config, "symbol-ML needs the channel response");
    scores_.resize(cir.n_rx);
}

void SymbolMlDetector::reset() { history_.clear(); }

int SymbolMlDetector::decide(std::span<const long long> counts, Rng& rng) {
    const int n = cir_->n_rx;
    require(static_cast<int>(counts.size()) == n, ErrorCode::config, "count vector length mismatch");

    // interference moments from the fed-back decisions (age 1 = most recent)
    std::vector<double> past_mu(n, 0.0), past_var(n, 0.0);
    const int len = static_cast<int>(history_.size());
    for (int age = 1; age <= len && age < cir_->taps; ++age) {
        const int src = history_[len - age];
        for (int j = 0; j < n; ++j) {
            const double p = cir_->tap(src, j, age);
            past_mu[j] += emission_ * p;
            past_var[j] += emission_ * p * (1.0 - p);
        }
    }

    for (int i = 0; i < n; ++i) {
        double score = 0.0;
        for (int j = 0; j < n; ++j) {
            const double p = cir_->tap(i, j, 0);
            const double mu = past_mu[j] + emission_ * p;
            const double var = past_var[j] + emission_ * p * (1.0 - p);
            score += log_likelihood(static_cast<double>(counts[j]), mu, var);
        }
        scores_[i] = score;
    }

    const int decision = argmax_tiebreak(std::span<const double>(scores_), rng);
    if (memory_ > 1) {
        history_.push_back(decision);
        if (static_cast<int>(history_.size()) > memory_ - 1) history_.erase(history_.begin());
    }
    return decision;
}

MsmSymbolMlDetector::MsmSymbolMlDetector(const ChannelResponse& cir, int memory, double emission)
    : cir_(&cir), memory_(memory), emission_(emission) {
    require(memory >= 1, ErrorCode::config, "detector memory must be >= 1");
    scores_.resize(2 * static_cast<std::size_t>(cir.n_rx));
}

void MsmSymbolMlDetector::reset() { history_.clear(); }

MsmDecision MsmSymbolMlDetector::decide(std::span<const long long> counts_a,
                                        std::span<const long long> counts_b, Rng& rng) {
    const int n = cir_->n_rx;
    require(static_cast<int>(counts_a.size()) == n && static_cast<int>(counts_b.size()) == n,
            ErrorCode::config, "count vector length mismatch");

    std::vector<double> past_mu[2] = {std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
    std::vector<double> past_var[2] = {std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
    const int len = static_cast<int>(history_.size());
    for (int age = 1; age <= len && age < cir_->taps; ++age) {
        const MsmDecision& d = history_[len - age];
        for (int j = 0; j < n; ++j) {
            const double p = cir_->tap(d.antenna, j, age);
            past_mu[d.type][j] += emission_ * p;
            past_var[d.type][j] += emission_ * p * (1.0 - p);
        }
    }

    auto counts_of = [&](int m, int j) {
        return static_cast<double>(m == 0 ? counts_a[j] : counts_b[j]);
    };
    for (int m = 0; m < 2; ++m) {
        for (int i = 0; i < n; ++i) {
            double score = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p = cir_->tap(i, j, 0);
                // active type gets the fresh emission on top of its residue
                score += log_likelihood(counts_of(m, j), past_mu[m][j] + emission_ * p,
                                        past_var[m][j] + emission_ * p * (1.0 - p));
                const int o = 1 - m;
                score += log_likelihood(counts_of(o, j), past_mu[o][j], past_var[o][j]);
            }
            scores_[static_cast<std::size_t>(m) * n + i] = score;
        }
    }

    const int flat = argmax_tiebreak(std::span<const double>(scores_), rng);
    const MsmDecision decision{flat / n, flat % n};
    if (memory_ > 1) {
        history_.push_back(decision);
        if (static_cast<int>(history_.size()) > memory_ - 1) history_.erase(history_.begin());
    }
    return decision;
}

} // namespace mcmimo
