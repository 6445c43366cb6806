#pragma once

// Synthetic game data for tests.

#include "spread_edge/historical.hpp"

#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace fixtures {

/// Random season: scores in football-ish increments, spreads on the half point, some pick'ems.
inline std::vector<spread_edge::GameRecord> random_games(unsigned seed, int n = 200) {
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> score(0, 56);
    std::uniform_int_distribution<int> half_points(-60, 60);
    std::bernoulli_distribution pickem(0.05);
    std::vector<spread_edge::GameRecord> games;
    for (int i = 0; i < n; ++i) {
        spread_edge::GameRecord g;
        g.season = 2021;
        g.date = std::chrono::year_month_day{std::chrono::year(2021), std::chrono::month(9),
                                             std::chrono::day(1 + static_cast<unsigned>(i % 28))};
        g.home_team = "Home" + std::to_string(i);
        g.away_team = "Away" + std::to_string(i);
        g.home_score = score(rng);
        g.away_score = score(rng);
        g.closing_spread_home = spread_edge::SpreadPoints{pickem(rng) ? 0.0 : half_points(rng) / 2.0};
        games.push_back(g);
    }
    return games;
}

inline std::string to_csv(const std::vector<spread_edge::GameRecord>& games) {
    std::ostringstream out;
    out << spread_edge::kGamesCsvHeader << '\n';
    for (const auto& g : games) {
        out << g.season << ',' << static_cast<int>(g.date.year()) << '-' << (unsigned(g.date.month()) < 10 ? "0" : "")
            << unsigned(g.date.month()) << '-' << (unsigned(g.date.day()) < 10 ? "0" : "") << unsigned(g.date.day())
            << ',' << g.home_team << ',' << g.away_team << ',' << g.home_score << ',' << g.away_score << ','
            << g.closing_spread_home.value << '\n';
    }
    return out.str();
}

/// Ten games, three decided by exactly three points.
inline const char* ten_game_csv() {
    return "season,date,home_team,away_team,home_score,away_score,closing_spread_home\n"
           "2021,2021-09-04,Alabama,Miami,44,13,-19.5\n"
           "2021,2021-09-04,Georgia,Clemson,10,7,3\n"
           "2021,2021-09-11,Texas,Arkansas,21,40,-6\n"
           "2021,2021-10-30,Baylor,Texas,27,24,-2.5\n"
           "2021,2021-10-30,Iowa,Wisconsin,7,27,3.5\n"
           "2021,2021-11-06,Oregon,Washington,26,16,-7\n"
           "2021,2021-11-13,Auburn,Mississippi State,33,43,-6.5\n"
           "2021,2021-11-20,Utah,Oregon,38,7,2.5\n"
           "2021,2021-11-27,Ohio State,Michigan,27,42,-7.5\n"
           "2021,2021-12-04,Kansas State,Iowa State,20,17,2\n";
}

} // namespace fixtures
