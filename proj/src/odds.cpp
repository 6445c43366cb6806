#include "spread_edge/odds.hpp"

#include "spread_edge/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace spread_edge {

namespace {

// Sums of rounded probabilities can land a few ulps outside [0, 1].
constexpr double kProbabilitySlack = 1e-12;

} // namespace

Probability::Probability(double value) {
    if (!(value >= -kProbabilitySlack && value <= 1.0 + kProbabilitySlack)) {
        throw DomainError("probability out of [0, 1]: " + std::to_string(value));
    }
    value_ = std::clamp(value, 0.0, 1.0);
}

OddsFormat parse_odds_format(std::string_view name) {
    if (name == "american") return OddsFormat::american;
    if (name == "decimal") return OddsFormat::decimal;
    throw DomainError("unknown odds format '" + std::string(name) + "' (expected american or decimal)");
}

std::string_view to_string(OddsFormat format) {
    return format == OddsFormat::american ? "american" : "decimal";
}

Odds::Odds(OddsFormat format, double value) : format_(format), value_(value) {
    if (!std::isfinite(value)) {
        throw DomainError("odds must be finite");
    }
    if (format == OddsFormat::american && std::abs(value) < 100.0) {
        throw DomainError("american odds must be <= -100 or >= +100, got " + std::to_string(value));
    }
    if (format == OddsFormat::decimal && value <= 1.0) {
        throw DomainError("decimal odds must exceed 1.0, got " + std::to_string(value));
    }
}

double Odds::decimal_multiplier() const noexcept {
    if (format_ == OddsFormat::decimal) return value_;
    return value_ > 0.0 ? 1.0 + value_ / 100.0 : 1.0 + 100.0 / -value_;
}

Probability break_even(const Odds& odds) {
    if (odds.format() == OddsFormat::decimal) {
        return Probability(1.0 / odds.value());
    }
    const double v = odds.value();
    return Probability(std::abs(std::min(100.0, v)) / (100.0 + std::abs(v)));
}

Odds convert_odds(const Odds& odds, OddsFormat target) {
    if (odds.format() == target) return odds;
    if (target == OddsFormat::decimal) {
        return Odds::decimal(odds.decimal_multiplier());
    }
    const double profit = odds.value() - 1.0;
    // Even money (2.0) maps to +100; shorter prices go negative.
    return Odds::american(profit >= 1.0 ? profit * 100.0 : -100.0 / profit);
}

double edge(Probability cover, const Odds& odds) {
    return cover.value() - break_even(odds).value();
}

double ev_per_unit(Probability p_win, Probability p_push, const Odds& odds) {
    const double p_lose = 1.0 - p_win.value() - p_push.value();
    if (p_lose < -kProbabilitySlack) {
        throw DomainError("win and push probabilities sum to more than 1");
    }
    return p_win.value() * (odds.decimal_multiplier() - 1.0) - std::max(p_lose, 0.0);
}

} // namespace spread_edge
