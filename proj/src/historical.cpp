#include "spread_edge/historical.hpp"

#include "spread_edge/errors.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <limits>
#include <numeric>
#include <string_view>

namespace spread_edge {

namespace {

constexpr std::array<std::string_view, 7> kColumns = {
    "season", "date", "home_team", "away_team", "home_score", "away_score", "closing_spread_home"};

constexpr double kSumTolerance = 1e-9;

// Splits one CSV line. Double-quoted fields may contain commas and "" escapes.
std::vector<std::string> split_csv_line(std::string_view line, std::size_t row) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                field += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                field += c;
            }
        } else if (c == '"' && field.empty()) {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else {
            field += c;
        }
    }
    if (quoted) {
        throw ParseError(row, "", "row " + std::to_string(row) + ": unterminated quoted field");
    }
    fields.push_back(std::move(field));
    return fields;
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t");
    return s.substr(first, last - first + 1);
}

[[noreturn]] void field_error(std::size_t row, std::string_view column, const std::string& detail) {
    throw ParseError(row, std::string(column),
                     "row " + std::to_string(row) + ", column " + std::string(column) + ": " + detail);
}

int parse_int_field(std::string_view text, std::size_t row, std::string_view column) {
    text = trim(text);
    int value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
        field_error(row, column, "expected an integer, got '" + std::string(text) + "'");
    }
    return value;
}

double parse_real_field(std::string_view text, std::size_t row, std::string_view column) {
    text = trim(text);
    const std::string copy(text);
    char* end = nullptr;
    const double value = std::strtod(copy.c_str(), &end);
    if (copy.empty() || end != copy.c_str() + copy.size() || !std::isfinite(value)) {
        field_error(row, column, "expected a number, got '" + copy + "'");
    }
    return value;
}

std::chrono::year_month_day parse_date_field(std::string_view text, std::size_t row) {
    text = trim(text);
    const auto bad = [&] { field_error(row, "date", "expected YYYY-MM-DD, got '" + std::string(text) + "'"); };
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') bad();
    const auto number = [&](std::string_view part) {
        unsigned v = 0;
        const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
        if (ec != std::errc{} || ptr != part.data() + part.size()) bad();
        return v;
    };
    const std::chrono::year_month_day ymd{std::chrono::year(static_cast<int>(number(text.substr(0, 4)))),
                                          std::chrono::month(number(text.substr(5, 2))),
                                          std::chrono::day(number(text.substr(8, 2)))};
    if (!ymd.ok()) bad();
    return ymd;
}

void require_key(const nlohmann::json& j, const char* key) {
    if (!j.contains(key)) throw DomainError(std::string("missing key '") + key + "'");
}

void reject_unknown_keys(const nlohmann::json& j, std::initializer_list<std::string_view> known) {
    if (!j.is_object()) throw DomainError("expected a JSON object");
    for (const auto& [key, _] : j.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw DomainError("unknown key '" + key + "'");
        }
    }
}

std::map<int, double> differential_map_from_json(const nlohmann::json& j, const char* what) {
    if (!j.is_object()) throw DomainError(std::string(what) + " must be an object");
    std::map<int, double> out;
    for (const auto& [key, value] : j.items()) {
        int d = -1;
        const auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), d);
        if (ec != std::errc{} || ptr != key.data() + key.size() || d < 0) {
            throw DomainError(std::string(what) + " key '" + key + "' is not a non-negative integer");
        }
        if (!value.is_number()) {
            throw DomainError(std::string(what) + " value for '" + key + "' is not a number");
        }
        out[d] = value.get<double>();
    }
    return out;
}

nlohmann::json differential_map_to_json(const std::map<int, double>& m) {
    auto j = nlohmann::json::object();
    for (const auto& [d, v] : m) j[std::to_string(d)] = v;
    return j;
}

bool in_band(const GameRecord& g, double lo, double hi) {
    const double magnitude = std::abs(g.closing_spread_home.value);
    return magnitude >= lo && magnitude <= hi;
}

void require_band(double lo, double hi) {
    if (!(lo <= hi)) throw DomainError("spread band lower bound exceeds upper bound");
}

} // namespace

int GameRecord::abs_differential() const noexcept {
    return std::abs(margin_home());
}

std::optional<int> GameRecord::favorite_margin() const noexcept {
    if (closing_spread_home.value < 0.0) return margin_home();
    if (closing_spread_home.value > 0.0) return -margin_home();
    return std::nullopt;
}

std::vector<GameRecord> ingest_games(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw ParseError(0, "", "empty games file: header row required");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);

    const auto header = split_csv_line(line, 1);
    for (std::size_t i = 0; i < kColumns.size(); ++i) {
        if (i >= header.size() || trim(header[i]) != kColumns[i]) {
            const bool present = std::any_of(header.begin(), header.end(),
                                             [&](const std::string& h) { return trim(h) == kColumns[i]; });
            throw ParseError(1, std::string(kColumns[i]),
                             present ? "header column " + std::to_string(i + 1) + " must be '" +
                                           std::string(kColumns[i]) + "'"
                                     : "header is missing column '" + std::string(kColumns[i]) + "'");
        }
    }
    if (header.size() > kColumns.size()) {
        throw ParseError(1, header[kColumns.size()], "unexpected header column '" + header[kColumns.size()] + "'");
    }

    std::vector<GameRecord> games;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        const auto fields = split_csv_line(line, row);
        if (fields.size() < kColumns.size()) {
            field_error(row, kColumns[fields.size()], "missing value");
        }
        if (fields.size() > kColumns.size()) {
            throw ParseError(row, "", "row " + std::to_string(row) + ": expected " +
                                          std::to_string(kColumns.size()) + " fields, got " +
                                          std::to_string(fields.size()));
        }
        GameRecord g;
        g.season = parse_int_field(fields[0], row, kColumns[0]);
        g.date = parse_date_field(fields[1], row);
        g.home_team = std::string(trim(fields[2]));
        g.away_team = std::string(trim(fields[3]));
        if (g.home_team.empty()) field_error(row, kColumns[2], "empty team name");
        if (g.away_team.empty()) field_error(row, kColumns[3], "empty team name");
        g.home_score = parse_int_field(fields[4], row, kColumns[4]);
        g.away_score = parse_int_field(fields[5], row, kColumns[5]);
        if (g.home_score < 0) field_error(row, kColumns[4], "negative score");
        if (g.away_score < 0) field_error(row, kColumns[5], "negative score");
        g.closing_spread_home = SpreadPoints{parse_real_field(fields[6], row, kColumns[6])};
        games.push_back(std::move(g));
    }
    if (games.empty()) {
        throw ParseError(0, "", "games file has a header but no data rows");
    }
    return games;
}

double DifferentialTable::frequency(int d) const {
    const auto it = freq.find(d);
    return it == freq.end() ? 0.0 : it->second;
}

int DifferentialTable::max_differential() const {
    return freq.empty() ? -1 : freq.rbegin()->first;
}

void DifferentialTable::validate() const {
    if (freq.empty()) throw DomainError("differential table is empty");
    double sum = 0.0;
    for (const auto& [d, f] : freq) {
        if (d < 0) throw DomainError("negative differential in table");
        if (!(f >= 0.0) || !std::isfinite(f)) {
            throw DomainError("frequency for differential " + std::to_string(d) + " must be >= 0");
        }
        sum += f;
    }
    if (sum > 1.0 + kSumTolerance || (!partial && std::abs(sum - 1.0) > kSumTolerance)) {
        throw DomainError("differential frequencies sum to " + std::to_string(sum) +
                          (partial ? " (partial table may not exceed 1)" : " (expected 1)"));
    }
}

DifferentialTable empirical_differential_table(const std::vector<GameRecord>& games, std::string source) {
    if (games.empty()) throw DomainError("cannot build a differential table from zero games");
    std::map<int, std::size_t> counts;
    int max_d = 0;
    for (const auto& g : games) {
        ++counts[g.abs_differential()];
        max_d = std::max(max_d, g.abs_differential());
    }
    DifferentialTable table;
    table.n_games = games.size();
    table.source = std::move(source);
    const auto n = static_cast<double>(games.size());
    // Dense support so that unseen differentials read back as explicit zeros.
    for (int d = 0; d <= max_d; ++d) {
        const auto it = counts.find(d);
        table.freq[d] = it == counts.end() ? 0.0 : static_cast<double>(it->second) / n;
    }
    return table;
}

const DifferentialTable& boyd_reference_table() {
    static const DifferentialTable table = [] {
        DifferentialTable t;
        t.freq = {{0, 0.0},    {1, 0.034},  {2, 0.027},  {3, 0.096}, {4, 0.039},  {5, 0.026},
                  {6, 0.029},  {7, 0.073},  {8, 0.024},  {9, 0.012}, {10, 0.043}, {11, 0.023},
                  {12, 0.018}, {13, 0.018}, {14, 0.043}, {15, 0.011}};
        t.source = "boyd-cfb-1980-2014";
        t.partial = true;
        return t;
    }();
    return table;
}

double WeightTable::weight(int d) const {
    const auto it = weights.find(std::abs(d));
    return it == weights.end() ? default_weight : it->second;
}

void WeightTable::validate() const {
    if (!(sigma_ref > 0.0) || !std::isfinite(sigma_ref)) throw DomainError("sigma_ref must be positive");
    if (!(default_weight >= 0.0) || !std::isfinite(default_weight)) {
        throw DomainError("default_weight must be >= 0");
    }
    for (const auto& [d, w] : weights) {
        if (d < 0) throw DomainError("negative differential in weight table");
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw DomainError("weight for differential " + std::to_string(d) + " must be >= 0");
        }
    }
}

WeightTable derive_weights(const DifferentialTable& table, double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("sigma must be positive");
    table.validate();
    WeightTable out;
    out.sigma_ref = sigma;
    for (int d = 0; d <= table.max_differential(); ++d) {
        out.weights[d] = table.frequency(d) / absolute_bin_prob(d, sigma).value();
    }
    return out;
}

const WeightTable& reference_weights() {
    static const WeightTable table = [] {
        auto w = derive_weights(boyd_reference_table(), 22.0);
        w.version = "boyd-cfb-1980-2014-sd22";
        return w;
    }();
    return table;
}

BandStats spread_band_stats(const std::vector<GameRecord>& games, double spread_lo, double spread_hi,
                            double k_sd, double sd_ref) {
    require_band(spread_lo, spread_hi);
    std::vector<double> margins;
    for (const auto& g : games) {
        if (!in_band(g, spread_lo, spread_hi)) continue;
        if (const auto m = g.favorite_margin()) margins.push_back(*m);
    }
    BandStats stats;
    stats.count = margins.size();
    if (margins.empty()) return stats;

    const double n = static_cast<double>(margins.size());
    const double mean = std::accumulate(margins.begin(), margins.end(), 0.0) / n;
    stats.mean_margin = mean;
    if (margins.size() >= 2) {
        double ss = 0.0;
        for (const double m : margins) ss += (m - mean) * (m - mean);
        stats.sd_margin = std::sqrt(ss / (n - 1.0));
    }
    const double reach = k_sd * sd_ref;
    const auto outside = std::count_if(margins.begin(), margins.end(),
                                       [&](double m) { return m > mean + reach || m < mean - reach; });
    stats.exceedance_rate = static_cast<double>(outside) / n;
    return stats;
}

CoverRate binned_cover_rate(const std::vector<GameRecord>& games, double spread_lo, double spread_hi,
                            MarginPoints margin_threshold) {
    require_band(spread_lo, spread_hi);
    CoverRate out;
    std::size_t covered = 0;
    for (const auto& g : games) {
        if (!in_band(g, spread_lo, spread_hi)) continue;
        const auto m = g.favorite_margin();
        if (!m) continue;
        ++out.n;
        if (*m > margin_threshold.value) ++covered;
    }
    if (out.n > 0) out.rate = static_cast<double>(covered) / static_cast<double>(out.n);
    return out;
}

LossKind parse_loss_kind(std::string_view name) {
    if (name == "sse") return LossKind::sse;
    if (name == "sae") return LossKind::sae;
    throw DomainError("unknown loss '" + std::string(name) + "' (expected sse or sae)");
}

std::string_view to_string(LossKind kind) {
    return kind == LossKind::sse ? "sse" : "sae";
}

double fit_loss(const DifferentialTable& table, double sigma, LossKind kind) {
    double loss = 0.0;
    bool any = false;
    for (const auto& [d, f] : table.freq) {
        if (d < 1) continue;
        any = true;
        const double r = f - absolute_bin_prob(d, sigma).value();
        loss += kind == LossKind::sse ? r * r : std::abs(r);
    }
    if (!any) throw DomainError("differential table has no support at d >= 1");
    return loss;
}

FitReport fit_sigma(const DifferentialTable& table, double grid_lo, double grid_hi, double step,
                    LossKind kind) {
    if (!(grid_lo > 0.0) || !(grid_lo <= grid_hi) || !std::isfinite(grid_hi)) {
        throw DomainError("sigma grid requires 0 < min <= max");
    }
    if (!(step > 0.0) || !std::isfinite(step)) throw DomainError("sigma grid step must be positive");

    FitReport report;
    report.loss_kind = kind;
    report.loss_at_best = std::numeric_limits<double>::infinity();
    // Indexing from grid_lo avoids drift from repeated addition.
    for (std::size_t i = 0;; ++i) {
        const double sigma = grid_lo + static_cast<double>(i) * step;
        if (sigma > grid_hi + 1e-9 * step) break;
        const double loss = fit_loss(table, sigma, kind);
        report.grid.emplace_back(sigma, loss);
        if (loss < report.loss_at_best) {
            report.loss_at_best = loss;
            report.best_sigma = sigma;
        }
    }
    return report;
}

double pythagorean_wins(double points_for, double points_against, double r, double n_games) {
    if (!(points_for >= 0.0) || !(points_against >= 0.0)) throw DomainError("points must be non-negative");
    if (points_for == 0.0 && points_against == 0.0) throw DomainError("points for and against are both zero");
    if (!(r > 0.0)) throw DomainError("exponent must be positive");
    if (!(n_games > 0.0)) throw DomainError("game count must be positive");
    const double pf = std::pow(points_for, r);
    const double pa = std::pow(points_against, r);
    return n_games * pf / (pf + pa);
}

nlohmann::json to_json(const DifferentialTable& table) {
    nlohmann::json j;
    j["n_games"] = table.n_games ? nlohmann::json(*table.n_games) : nlohmann::json(nullptr);
    j["freq"] = differential_map_to_json(table.freq);
    if (!table.source.empty()) j["source"] = table.source;
    if (table.partial) j["partial"] = true;
    return j;
}

nlohmann::json to_json(const WeightTable& table) {
    nlohmann::json j;
    j["sigma_ref"] = table.sigma_ref;
    j["default_weight"] = table.default_weight;
    j["weights"] = differential_map_to_json(table.weights);
    j["version"] = table.version;
    return j;
}

DifferentialTable differential_table_from_json(const nlohmann::json& j) {
    reject_unknown_keys(j, {"n_games", "freq", "source", "partial"});
    require_key(j, "freq");
    DifferentialTable t;
    t.freq = differential_map_from_json(j.at("freq"), "freq");
    if (j.contains("n_games") && !j.at("n_games").is_null()) {
        if (!j.at("n_games").is_number_unsigned()) throw DomainError("n_games must be a non-negative integer");
        t.n_games = j.at("n_games").get<std::size_t>();
    }
    if (j.contains("source")) t.source = j.at("source").get<std::string>();
    if (j.contains("partial")) t.partial = j.at("partial").get<bool>();
    t.validate();
    return t;
}

WeightTable weight_table_from_json(const nlohmann::json& j) {
    reject_unknown_keys(j, {"sigma_ref", "default_weight", "weights", "version"});
    require_key(j, "weights");
    WeightTable t;
    t.weights = differential_map_from_json(j.at("weights"), "weights");
    if (j.contains("sigma_ref")) t.sigma_ref = j.at("sigma_ref").get<double>();
    if (j.contains("default_weight")) t.default_weight = j.at("default_weight").get<double>();
    if (j.contains("version")) t.version = j.at("version").get<std::string>();
    t.validate();
    return t;
}

} // namespace spread_edge
