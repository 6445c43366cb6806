#pragma once

#include "spread_edge/gaussian.hpp"

#include <chrono>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

namespace spread_edge {

struct GameRecord {
    int season = 0;
    std::chrono::year_month_day date{};
    std::string home_team;
    std::string away_team;
    int home_score = 0;
    int away_score = 0;
    SpreadPoints closing_spread_home; // negative = home favored

    int margin_home() const noexcept { return home_score - away_score; }
    int abs_differential() const noexcept;

    /// Margin from the closing favorite's side; empty for pick'em games.
    std::optional<int> favorite_margin() const noexcept;
};

/// Column order of the games CSV header.
inline constexpr const char* kGamesCsvHeader =
    "season,date,home_team,away_team,home_score,away_score,closing_spread_home";

/// Reads the games CSV. Throws ParseError naming the file line and column.
std::vector<GameRecord> ingest_games(std::istream& in);

/// Relative frequency of each absolute final-score differential.
///
/// Tables built from game data are complete (frequencies sum to one).
/// Transcribed reference tables may list only the first few differentials;
/// those carry `partial = true` and no game count.
struct DifferentialTable {
    std::map<int, double> freq;
    std::optional<std::size_t> n_games;
    std::string source;
    bool partial = false;

    double frequency(int d) const;
    int max_differential() const;
    void validate() const;
};

DifferentialTable empirical_differential_table(const std::vector<GameRecord>& games,
                                               std::string source = "games");

/// College football differential frequencies for 1980-2014 (Jimmy Boyd),
/// d = 0..15, at published three-digit precision. Partial: the rows sum to 0.516.
const DifferentialTable& boyd_reference_table();

/// Per-differential multipliers applied to half-point normal bin masses.
struct WeightTable {
    double sigma_ref = 22.0;
    std::map<int, double> weights;
    double default_weight = 1.0;
    std::string version = "unversioned";

    double weight(int d) const;
    void validate() const;
};

/// weights(d) = freq(d) / absolute_bin_prob(d, sigma) for d in 0..max tabled d.
WeightTable derive_weights(const DifferentialTable& table, double sigma);

/// Weights derived from the reference table at sigma 22.
const WeightTable& reference_weights();

struct BandStats {
    std::size_t count = 0;
    // Empty when the band holds too few games for the statistic.
    std::optional<double> mean_margin;
    std::optional<double> sd_margin;
    std::optional<double> exceedance_rate;
};

/// Statistics of favorite-relative margins for games whose closing spread
/// magnitude lies in [spread_lo, spread_hi]. The exceedance rate counts margins
/// strictly outside mean +- k_sd * sd_ref. Pick'em games are skipped.
BandStats spread_band_stats(const std::vector<GameRecord>& games, double spread_lo, double spread_hi,
                            double k_sd, double sd_ref);

struct CoverRate {
    std::optional<double> rate;
    std::size_t n = 0;
};

/// Fraction of favorites (closing spread magnitude in [spread_lo, spread_hi])
/// whose margin exceeded the threshold.
CoverRate binned_cover_rate(const std::vector<GameRecord>& games, double spread_lo, double spread_hi,
                            MarginPoints margin_threshold);

enum class LossKind { sse, sae };

LossKind parse_loss_kind(std::string_view name);
std::string_view to_string(LossKind kind);

struct FitReport {
    double best_sigma = 0.0;
    double loss_at_best = 0.0;
    std::vector<std::pair<double, double>> grid; // (sigma, loss)
    LossKind loss_kind = LossKind::sse;
};

/// Loss between the table's d >= 1 frequencies and folded normal bins at sigma.
double fit_loss(const DifferentialTable& table, double sigma, LossKind kind);

/// Grid search over sigma in [grid_lo, grid_hi] by step; ties go to the smaller sigma.
FitReport fit_sigma(const DifferentialTable& table, double grid_lo, double grid_hi, double step,
                    LossKind kind = LossKind::sse);

/// Season-long expected wins from points scored and allowed.
double pythagorean_wins(double points_for, double points_against, double r, double n_games);

// JSON persistence. Unknown keys are rejected with DomainError.
nlohmann::json to_json(const DifferentialTable& table);
nlohmann::json to_json(const WeightTable& table);
DifferentialTable differential_table_from_json(const nlohmann::json& j);
WeightTable weight_table_from_json(const nlohmann::json& j);

} // namespace spread_edge
