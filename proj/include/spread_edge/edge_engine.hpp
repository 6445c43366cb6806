#pragma once

#include "spread_edge/gaussian.hpp"
#include "spread_edge/historical.hpp"
#include "spread_edge/odds.hpp"

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace spread_edge {

inline constexpr int kDefaultRowHalfwidth = 60;
inline constexpr int kDefaultColHalfwidth = 39;
inline constexpr double kDefaultCellSd = 15.0;

/// Conditional distributions of the final margin, one per integer projected
/// margin. Column mu holds P(margin = s | projected margin mu) for
/// s in [-row_halfwidth, row_halfwidth]. Immutable once built.
class EdgeMatrix {
public:
    EdgeMatrix(int row_halfwidth, int col_halfwidth, double cell_sd, std::string weight_table_id,
               std::vector<std::vector<double>> columns);

    int row_halfwidth() const noexcept { return row_halfwidth_; }
    int col_halfwidth() const noexcept { return col_halfwidth_; }
    int row_count() const noexcept { return 2 * row_halfwidth_ + 1; }
    int col_count() const noexcept { return 2 * col_halfwidth_ + 1; }
    double cell_sd() const noexcept { return cell_sd_; }
    const std::string& weight_table_id() const noexcept { return weight_table_id_; }

    /// P(margin = s | projected margin mu); both must be in range.
    double cell(int s, int mu) const;

    /// Stored column for an integer projected margin. Throws OutOfModelError if |mu| > col_halfwidth.
    std::span<const double> column(int mu) const;

    int margin_at(std::size_t row_index) const noexcept { return static_cast<int>(row_index) - row_halfwidth_; }

private:
    int row_halfwidth_;
    int col_halfwidth_;
    double cell_sd_;
    std::string weight_table_id_;
    std::vector<std::vector<double>> columns_; // column index = mu + col_halfwidth
};

/// Weighted, column-normalized matrix: raw cell = N(mu, cell_sd) mass on
/// (s - 0.5, s + 0.5) times weights.weight(|s|).
EdgeMatrix build_matrix(const WeightTable& weights, double cell_sd = kDefaultCellSd,
                        int row_halfwidth = kDefaultRowHalfwidth, int col_halfwidth = kDefaultColHalfwidth);

std::vector<double> column_distribution(const EdgeMatrix& matrix, int mu);

/// Linear blend of the two neighbouring columns: mu = n + f gives (1 - f) col(n) + f col(n + 1).
std::vector<double> interpolated_distribution(const EdgeMatrix& matrix, double mu);

struct CoverPush {
    Probability cover;
    Probability push;
};

/// Cover means the margin strictly beats -line; landing exactly on an integer line is a push.
CoverPush cover_push_probabilities(const EdgeMatrix& matrix, MarginPoints mu, SpreadPoints line);

struct EdgeQuote {
    Probability cover;
    Probability push;
    Probability lose;
    Probability break_even;
    double edge = 0.0;
    double ev_per_unit = 0.0;
};

/// Full quote for a bet on one side. Projection and line are both in spread
/// convention from the bet team's view. Throws OutOfModelError when
/// |projection| exceeds the matrix columns, DomainError when |line| exceeds the rows.
EdgeQuote edge_quote(const EdgeMatrix& matrix, SpreadPoints projection, SpreadPoints line, const Odds& odds);

/// Expected margin under the interpolated distribution.
double conditional_mean(const EdgeMatrix& matrix, double mu);

nlohmann::json to_json(const EdgeMatrix& matrix);
EdgeMatrix edge_matrix_from_json(const nlohmann::json& j);

} // namespace spread_edge
