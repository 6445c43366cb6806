#include "spread_edge/gaussian.hpp"

#include "spread_edge/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace spread_edge {

namespace {

void require_positive_sd(double sd) {
    if (!(sd > 0.0) || !std::isfinite(sd)) {
        throw DomainError("standard deviation must be positive and finite, got " + std::to_string(sd));
    }
}

} // namespace

double std_normal_cdf(double z) {
    return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

double std_normal_sf(double z) {
    return 0.5 * std::erfc(z / std::numbers::sqrt2);
}

Probability interval_prob(const Interval& interval, double mean, double sd) {
    require_positive_sd(sd);
    if (interval.lo && interval.hi && *interval.lo > *interval.hi) {
        throw DomainError("interval lower bound exceeds upper bound");
    }
    if (!interval.lo && !interval.hi) return Probability(1.0);
    if (!interval.lo) return Probability(std_normal_cdf((*interval.hi - mean) / sd));
    if (!interval.hi) return Probability(std_normal_sf((*interval.lo - mean) / sd));

    const double z_lo = (*interval.lo - mean) / sd;
    const double z_hi = (*interval.hi - mean) / sd;
    // Difference the tail the interval sits in. This also makes the result
    // for (lo, hi; mean) bitwise equal to the result for (-hi, -lo; -mean).
    if (z_lo + z_hi > 0.0) {
        return Probability(std_normal_sf(z_lo) - std_normal_sf(z_hi));
    }
    return Probability(std_normal_cdf(z_hi) - std_normal_cdf(z_lo));
}

Probability interval_prob(double lo, double hi, double mean, double sd) {
    return interval_prob(Interval::between(lo, hi), mean, sd);
}

Probability stern_cover_probability(SpreadPoints projection, SpreadPoints line, double sd) {
    require_positive_sd(sd);
    return Probability(std_normal_cdf((line.value - projection.value) / sd));
}

Probability absolute_bin_prob(int d, double sd) {
    if (d < 0) {
        throw DomainError("absolute differential must be non-negative, got " + std::to_string(d));
    }
    require_positive_sd(sd);
    if (d == 0) {
        return interval_prob(-0.5, 0.5, 0.0, sd);
    }
    return Probability(2.0 * interval_prob(d - 0.5, d + 0.5, 0.0, sd).value());
}

} // namespace spread_edge
