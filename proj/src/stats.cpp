#include "revoq/stats.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "revoq/errors.hpp"

namespace revoq {

SuccessEstimate wilson_estimate(uint64_t wins, uint64_t trials, double z) {
    if (trials == 0) throw BadParameter("wilson_estimate: trials must be positive");
    if (wins > trials) throw BadParameter("wilson_estimate: wins exceed trials");
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(wins) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = (z / denom) * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
    SuccessEstimate e;
    e.trials = trials;
    e.wins = wins;
    e.p_hat = p;
    e.ci_lo = std::max(0.0, center - half);
    e.ci_hi = std::min(1.0, center + half);
    e.z = z;
    return e;
}

bool binomial_consistent(uint64_t wins, uint64_t trials, double p, double z) {
    const double n = static_cast<double>(trials);
    const double sigma = std::sqrt(std::max(p * (1.0 - p), 1e-12) / n);
    const double gap = std::abs(static_cast<double>(wins) / n - p);
    return gap <= z * sigma + 1.0 / n;
}

std::string to_string(const SuccessEstimate& e) {
    std::ostringstream out;
    out.precision(6);
    out << e.wins << "/" << e.trials << " p=" << e.p_hat << " ci=[" << e.ci_lo << "," << e.ci_hi
        << "]";
    return out.str();
}

}  // namespace revoq
