#include "spread_edge/edge_engine.hpp"

#include "spread_edge/errors.hpp"

#include <charconv>
#include <cmath>
#include <string>

namespace spread_edge {

namespace {

constexpr double kColumnSumTolerance = 1e-9;

// Sums v[center] then each pair (v[center + k] + v[center - k]) outward, so a
// vector and its mirror image produce bitwise-identical sums.
double symmetric_sum(std::span<const double> v) {
    const std::size_t center = v.size() / 2;
    double total = v[center];
    for (std::size_t k = 1; k <= center; ++k) total += v[center + k] + v[center - k];
    return total;
}

void require_projection(const EdgeMatrix& m, double mu) {
    if (!std::isfinite(mu) || std::abs(mu) > m.col_halfwidth()) {
        throw OutOfModelError("projected margin " + std::to_string(mu) + " is outside the model range [-" +
                              std::to_string(m.col_halfwidth()) + ", " + std::to_string(m.col_halfwidth()) + "]");
    }
}

} // namespace

EdgeMatrix::EdgeMatrix(int row_halfwidth, int col_halfwidth, double cell_sd, std::string weight_table_id,
                       std::vector<std::vector<double>> columns)
    : row_halfwidth_(row_halfwidth),
      col_halfwidth_(col_halfwidth),
      cell_sd_(cell_sd),
      weight_table_id_(std::move(weight_table_id)),
      columns_(std::move(columns)) {
    if (row_halfwidth_ < 1 || col_halfwidth_ < 1) throw DomainError("matrix halfwidths must be >= 1");
    if (!(cell_sd_ > 0.0) || !std::isfinite(cell_sd_)) throw DomainError("cell_sd must be positive");
    if (columns_.size() != static_cast<std::size_t>(col_count())) {
        throw DomainError("matrix needs " + std::to_string(col_count()) + " columns, got " +
                          std::to_string(columns_.size()));
    }
    for (std::size_t c = 0; c < columns_.size(); ++c) {
        const auto& col = columns_[c];
        const int mu = static_cast<int>(c) - col_halfwidth_;
        if (col.size() != static_cast<std::size_t>(row_count())) {
            throw DomainError("column " + std::to_string(mu) + " needs " + std::to_string(row_count()) +
                              " entries, got " + std::to_string(col.size()));
        }
        for (const double p : col) {
            if (!(p >= 0.0 && p <= 1.0)) throw DomainError("column " + std::to_string(mu) + " has a cell outside [0, 1]");
        }
        if (std::abs(symmetric_sum(col) - 1.0) > kColumnSumTolerance) {
            throw DomainError("column " + std::to_string(mu) + " does not sum to 1");
        }
    }
}

double EdgeMatrix::cell(int s, int mu) const {
    if (std::abs(s) > row_halfwidth_) throw DomainError("margin row " + std::to_string(s) + " out of range");
    return column(mu)[static_cast<std::size_t>(s + row_halfwidth_)];
}

std::span<const double> EdgeMatrix::column(int mu) const {
    require_projection(*this, mu);
    return columns_[static_cast<std::size_t>(mu + col_halfwidth_)];
}

EdgeMatrix build_matrix(const WeightTable& weights, double cell_sd, int row_halfwidth, int col_halfwidth) {
    weights.validate();
    if (!(cell_sd > 0.0) || !std::isfinite(cell_sd)) throw DomainError("cell_sd must be positive");
    if (row_halfwidth < 1 || col_halfwidth < 1) throw DomainError("matrix halfwidths must be >= 1");

    std::vector<double> row_weight;
    for (int s = -row_halfwidth; s <= row_halfwidth; ++s) row_weight.push_back(weights.weight(s));

    std::vector<std::vector<double>> columns;
    columns.reserve(static_cast<std::size_t>(2 * col_halfwidth + 1));
    for (int mu = -col_halfwidth; mu <= col_halfwidth; ++mu) {
        std::vector<double> col;
        col.reserve(row_weight.size());
        for (int s = -row_halfwidth; s <= row_halfwidth; ++s) {
            const double mass = interval_prob(s - 0.5, s + 0.5, mu, cell_sd).value();
            col.push_back(mass * row_weight[static_cast<std::size_t>(s + row_halfwidth)]);
        }
        const double total = symmetric_sum(col);
        if (!(total > 0.0)) {
            throw DomainError("column " + std::to_string(mu) + " has zero weighted mass; check the weight table");
        }
        for (double& p : col) p /= total;
        columns.push_back(std::move(col));
    }
    return EdgeMatrix(row_halfwidth, col_halfwidth, cell_sd, weights.version, std::move(columns));
}

std::vector<double> column_distribution(const EdgeMatrix& matrix, int mu) {
    const auto col = matrix.column(mu);
    return {col.begin(), col.end()};
}

std::vector<double> interpolated_distribution(const EdgeMatrix& matrix, double mu) {
    require_projection(matrix, mu);
    const double lower = std::floor(mu);
    const double f = mu - lower;
    const int n = static_cast<int>(lower);
    if (f == 0.0) return column_distribution(matrix, n);

    const auto a = matrix.column(n);
    const auto b = matrix.column(n + 1);
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = (1.0 - f) * a[i] + f * b[i];
    return out;
}

CoverPush cover_push_probabilities(const EdgeMatrix& matrix, MarginPoints mu, SpreadPoints line) {
    if (!std::isfinite(line.value) || std::abs(line.value) > matrix.row_halfwidth()) {
        throw DomainError("line " + std::to_string(line.value) + " is outside +-" +
                          std::to_string(matrix.row_halfwidth()));
    }
    const auto dist = interpolated_distribution(matrix, mu.value);
    const double threshold = line.to_margin().value;
    double cover = 0.0;
    double push = 0.0;
    for (std::size_t i = 0; i < dist.size(); ++i) {
        const int s = matrix.margin_at(i);
        if (s > threshold) {
            cover += dist[i];
        } else if (s == threshold) {
            push += dist[i];
        }
    }
    return {Probability(cover), Probability(push)};
}

EdgeQuote edge_quote(const EdgeMatrix& matrix, SpreadPoints projection, SpreadPoints line, const Odds& odds) {
    const auto [cover, push] = cover_push_probabilities(matrix, projection.to_margin(), line);
    EdgeQuote q;
    q.cover = cover;
    q.push = push;
    q.lose = Probability(1.0 - cover.value() - push.value());
    q.break_even = break_even(odds);
    q.edge = edge(cover, odds);
    q.ev_per_unit = ev_per_unit(cover, push, odds);
    return q;
}

double conditional_mean(const EdgeMatrix& matrix, double mu) {
    const auto dist = interpolated_distribution(matrix, mu);
    const std::size_t center = dist.size() / 2;
    double mean = 0.0;
    for (std::size_t k = 1; k <= center; ++k) {
        const double s = static_cast<double>(k);
        mean += s * dist[center + k] - s * dist[center - k];
    }
    return mean;
}

nlohmann::json to_json(const EdgeMatrix& matrix) {
    nlohmann::json j;
    j["cell_sd"] = matrix.cell_sd();
    j["col_range"] = {-matrix.col_halfwidth(), matrix.col_halfwidth()};
    j["row_range"] = {-matrix.row_halfwidth(), matrix.row_halfwidth()};
    j["weight_table_id"] = matrix.weight_table_id();
    auto cols = nlohmann::json::object();
    for (int mu = -matrix.col_halfwidth(); mu <= matrix.col_halfwidth(); ++mu) {
        const auto col = matrix.column(mu);
        cols[std::to_string(mu)] = std::vector<double>(col.begin(), col.end());
    }
    j["columns"] = std::move(cols);
    return j;
}

EdgeMatrix edge_matrix_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw DomainError("matrix JSON must be an object");
    for (const auto& [key, _] : j.items()) {
        if (key != "cell_sd" && key != "col_range" && key != "row_range" && key != "columns" &&
            key != "weight_table_id") {
            throw DomainError("unknown key '" + key + "' in matrix JSON");
        }
    }
    for (const char* key : {"cell_sd", "col_range", "row_range", "columns"}) {
        if (!j.contains(key)) throw DomainError(std::string("matrix JSON is missing '") + key + "'");
    }
    const auto symmetric_range = [&](const char* key) {
        const auto& r = j.at(key);
        if (!r.is_array() || r.size() != 2 || !r[0].is_number_integer() || !r[1].is_number_integer() ||
            r[0].get<int>() != -r[1].get<int>()) {
            throw DomainError(std::string(key) + " must be [-n, n]");
        }
        return r[1].get<int>();
    };
    const int col_half = symmetric_range("col_range");
    const int row_half = symmetric_range("row_range");

    const auto& cols = j.at("columns");
    if (!cols.is_object() || cols.size() != static_cast<std::size_t>(2 * col_half + 1)) {
        throw DomainError("columns must hold one entry per projected margin");
    }
    std::vector<std::vector<double>> columns;
    for (int mu = -col_half; mu <= col_half; ++mu) {
        const auto key = std::to_string(mu);
        if (!cols.contains(key)) throw DomainError("columns is missing '" + key + "'");
        columns.push_back(cols.at(key).get<std::vector<double>>());
    }
    const std::string id = j.contains("weight_table_id") ? j.at("weight_table_id").get<std::string>() : "";
    return EdgeMatrix(row_half, col_half, j.at("cell_sd").get<double>(), id, std::move(columns));
}

} // namespace spread_edge
