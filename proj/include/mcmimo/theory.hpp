#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mcmimo/cir.hpp"
#include "mcmimo/modulation.hpp"

namespace mcmimo {

/// Tail of the standard normal distribution, Q(x) = 0.5 erfc(x / sqrt(2)).
double q_function(double x);

/// Probability that a Normal(means[j], variances[j]) draw exceeds the draws
/// of every other antenna:
///   integral of prod_{tau != j} [1 - Q((r - mu_tau) / sigma_tau)] *
///   phi_{mu_j, sigma_j}(r) dr
/// over the +-10-sigma envelope of all antennas, by adaptive Gauss-Kronrod
/// quadrature. Zero-variance entries act as point masses; exact ties between
/// point masses split the tie mass uniformly.
double p_max_antenna(std::span<const double> means, std::span<const double> variances, int j,
                     double rel_tol = 1e-6);

/// Expected bit error rate of the maximum count detector conditioned on the
/// activated-antenna sequence `seq` (0-based, length = memory): each
/// antenna's win probability weighted by its Hamming distance to the final
/// transmitted symbol, normalized by bits per symbol.
double conditional_ber(std::span<const int> seq, const ChannelResponse& cir, Mapping mapping,
                       double emission);

/// Uniform average of conditional_ber over all n_tx^memory sequences. Above
/// `enumeration_guard` sequences the call fails with an infeasibility error
/// naming the required count. `m_tx` is the molecule budget parameter; the
/// per-transmission emission follows the space-shift-keying normalization.
double theoretical_ber_mssk(const ChannelResponse& cir, int memory, Mapping mapping, double m_tx,
                            double enumeration_guard = 1e7, int n_threads = 0);

/// Odometer over all alphabet^length index sequences, lexicographic order.
class SequenceEnumerator {
public:
    SequenceEnumerator(int alphabet, int length);

    std::uint64_t total() const { return total_; }
    bool done() const { return done_; }
    std::span<const int> current() const { return current_; }
    void advance();

private:
    int alphabet_;
    std::vector<int> current_;
    std::uint64_t total_;
    bool done_ = false;
};

} // namespace mcmimo
