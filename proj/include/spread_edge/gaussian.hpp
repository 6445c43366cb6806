#pragma once

#include "spread_edge/odds.hpp"

#include <optional>

namespace spread_edge {

/// Final score differential from the bet team's side: positive means the bet team won.
struct MarginPoints {
    double value = 0.0;
};

/// A handicap in spread convention: negative means the bet team is favored by |value|.
/// The expected margin implied by a spread is its negation.
struct SpreadPoints {
    double value = 0.0;

    MarginPoints to_margin() const noexcept { return MarginPoints{-value}; }
    static SpreadPoints from_margin(MarginPoints m) noexcept { return SpreadPoints{-m.value}; }
};

/// Interval on the real line; an absent bound is open-ended (infinite).
struct Interval {
    std::optional<double> lo;
    std::optional<double> hi;

    static Interval between(double lo, double hi) { return {lo, hi}; }
    static Interval below(double hi) { return {std::nullopt, hi}; }
    static Interval above(double lo) { return {lo, std::nullopt}; }
    static Interval whole() { return {}; }
};

/// Standard normal CDF, computed through erfc so that both tails keep full
/// relative precision. Absolute error is at the level of double rounding.
double std_normal_cdf(double z);

/// Upper tail 1 - Phi(z), without the cancellation of subtracting from one.
double std_normal_sf(double z);

/// Mass of N(mean, sd^2) on the interval. Throws DomainError for sd <= 0 or lo > hi.
Probability interval_prob(const Interval& interval, double mean, double sd);
Probability interval_prob(double lo, double hi, double mean, double sd);

/// Continuous normal model: probability the bet team's margin beats the line
/// when the margin is N(-projection, sd^2).
Probability stern_cover_probability(SpreadPoints projection, SpreadPoints line, double sd);

/// Probability that |X| rounds to d for X ~ N(0, sd^2), folding the two
/// half-point bins at +d and -d together. d = 0 is the single bin (-0.5, 0.5).
Probability absolute_bin_prob(int d, double sd);

} // namespace spread_edge
