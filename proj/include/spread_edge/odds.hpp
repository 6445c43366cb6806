#pragma once

#include <string_view>

namespace spread_edge {

/// Probability in [0, 1]. Construction outside that range throws DomainError.
class Probability {
public:
    constexpr Probability() = default;
    explicit Probability(double value);

    constexpr double value() const noexcept { return value_; }

private:
    double value_ = 0.0;
};

enum class OddsFormat { american, decimal };

OddsFormat parse_odds_format(std::string_view name);
std::string_view to_string(OddsFormat format);

/// A quoted price. American prices are stake-relative to 100 (-120 risks 120
/// to win 100, +110 risks 100 to win 110) and may be fractional; decimal prices
/// are total return per unit staked.
class Odds {
public:
    Odds(OddsFormat format, double value);

    static Odds american(double value) { return Odds(OddsFormat::american, value); }
    static Odds decimal(double value) { return Odds(OddsFormat::decimal, value); }

    OddsFormat format() const noexcept { return format_; }
    double value() const noexcept { return value_; }

    /// Total return per unit staked, whatever the quoted format.
    double decimal_multiplier() const noexcept;

private:
    OddsFormat format_;
    double value_;
};

/// Win rate at which the bet has zero expected profit.
Probability break_even(const Odds& odds);

Odds convert_odds(const Odds& odds, OddsFormat target);

/// Cover probability minus break-even probability; negative means no bet.
double edge(Probability cover, const Odds& odds);

/// Expected profit per unit staked. Push mass refunds the stake.
double ev_per_unit(Probability p_win, Probability p_push, const Odds& odds);

} // namespace spread_edge
