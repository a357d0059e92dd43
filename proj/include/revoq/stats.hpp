#pragma once

#include <cstdint>
#include <string>

namespace revoq {

/// Empirical success rate with a Wilson score interval.
struct SuccessEstimate {
    uint64_t trials = 0;
    uint64_t wins = 0;
    double p_hat = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    double z = 0.0;

    /// True when `p` lies inside the interval.
    bool covers(double p) const { return p >= ci_lo && p <= ci_hi; }
};

/// Wilson score interval. Reported estimates default to the 95% interval;
/// Monte-Carlo assertions gate at z = 3 (see binomial_consistent).
SuccessEstimate wilson_estimate(uint64_t wins, uint64_t trials, double z = 1.96);

/// 3-sigma binomial consistency: |wins/trials - p| within z*sqrt(p(1-p)/trials)
/// plus a 1/trials continuity allowance.
bool binomial_consistent(uint64_t wins, uint64_t trials, double p, double z = 3.0);

std::string to_string(const SuccessEstimate& e);

}  // namespace revoq
