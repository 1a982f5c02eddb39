#pragma once

#include <span>
#include <vector>

#include "mcmimo/channel.hpp"
#include "mcmimo/cir.hpp"
#include "mcmimo/rng.hpp"

namespace mcmimo {

/// Fixed threshold decoder: bit-1 iff count >= gamma (boundary inclusive).
inline int ftd(long long count, long long gamma) { return count >= gamma ? 1 : 0; }

/// Adaptive threshold decoder: bit-1 iff this interval outgrew the previous
/// one. The first interval of a stream has no predecessor; callers fall back
/// to ftd there.
inline int atd(long long count_k, long long count_prev) { return count_k > count_prev ? 1 : 0; }

long long combine_sc(std::span<const long long> counts);   ///< selection combining (max)
long long combine_egc(std::span<const long long> counts);  ///< equal-gain combining (sum)

/// Maximum count detector: index of the largest arrival, exact ties broken
/// uniformly at random.
int mcd_mssk(std::span<const long long> counts, Rng& rng);

struct MsmDecision {
    int type = 0;     ///< type_a or type_b
    int antenna = 0;  ///< 0-based index
};

/// Dual-molecule maximum count detector: the antenna maximizing
/// max(R_A, R_B), then the dominant type at that antenna (tie -> type A).
MsmDecision mcd_msm(std::span<const long long> counts_a, std::span<const long long> counts_b,
                    Rng& rng);

/// Branch metric flavor for the sequence detector. gaussian_ll is the proper
/// Gaussian log-likelihood with a squared residual; literal_residual keeps
/// the residual un-squared for side-by-side comparison.
enum class SeqMetric { gaussian_ll, literal_residual };

struct SeqMlResult {
    std::vector<int> sequence;  ///< decided antenna indices, 0-based
    double metric = 0.0;        ///< minimized path cost
};

/// Exhaustive maximum-likelihood sequence detector over one block of
/// `memory` intervals: minimizes sum_z sum_j [ln sigma^2 + (R - mu)^2 / sigma^2]
/// over all n_rx^memory activated-antenna sequences. Guarded: above
/// `enumeration_guard` candidate sequences the call fails with an
/// infeasibility error naming the required count.
SeqMlResult ml_sequence_detect(const ArrivalMatrix& q, const ChannelResponse& cir, int memory,
                               double emission, SeqMetric metric = SeqMetric::gaussian_ll,
                               Rng* tie_rng = nullptr, double enumeration_guard = 1e7);

/// Path cost of one candidate sequence; the independent-check hook used by
/// the brute-force tests.
double seq_ml_metric(std::span<const int> seq, const ArrivalMatrix& q, const ChannelResponse& cir,
                     double emission, SeqMetric metric = SeqMetric::gaussian_ll);

/// Symbol-by-symbol ML detector with decision feedback: keeps the last
/// memory-1 decisions, forms per-antenna interference moments from them,
/// scores every current-symbol hypothesis by summed per-antenna Gaussian
/// log-likelihoods and picks the maximum.
class SymbolMlDetector {
public:
    SymbolMlDetector(const ChannelResponse& cir, int memory, double emission);

    int decide(std::span<const long long> counts, Rng& rng);
    std::span<const double> last_scores() const { return scores_; }
    void reset();

private:
    const ChannelResponse* cir_;
    int memory_;
    double emission_;
    std::vector<int> history_;  ///< oldest first, length <= memory-1
    std::vector<double> scores_;
};

/// Symbol-ML extended to the (molecule type, antenna) alphabet used by the
/// dual-molecule spatial modulation scheme.
class MsmSymbolMlDetector {
public:
    MsmSymbolMlDetector(const ChannelResponse& cir, int memory, double emission);

    MsmDecision decide(std::span<const long long> counts_a, std::span<const long long> counts_b,
                       Rng& rng);
    void reset();

private:
    const ChannelResponse* cir_;
    int memory_;
    double emission_;
    std::vector<MsmDecision> history_;
    std::vector<double> scores_;
};

} // namespace mcmimo
