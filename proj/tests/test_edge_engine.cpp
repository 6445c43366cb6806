#include "oracles.hpp"
#include "spread_edge/edge_engine.hpp"
#include "spread_edge/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace spread_edge;

namespace {

const EdgeMatrix& shipped() {
    static const EdgeMatrix m = build_matrix(reference_weights());
    return m;
}

WeightTable unit_weights() {
    WeightTable w;
    w.default_weight = 1.0;
    return w;
}

// Column rebuilt from scratch: erf-based bin masses times weights, normalized.
std::vector<double> oracle_column(const WeightTable& w, int mu, double sd = 15.0) {
    std::vector<double> col;
    double total = 0;
    for (int s = -60; s <= 60; ++s) {
        const double mass = oracle::phi_erf((s + 0.5 - mu) / sd) - oracle::phi_erf((s - 0.5 - mu) / sd);
        col.push_back(mass * w.weight(s));
        total += col.back();
    }
    for (double& p : col) p /= total;
    return col;
}

double oracle_cover(const WeightTable& w, double mu, double line) {
    const int n = static_cast<int>(std::floor(mu));
    const double f = mu - n;
    const auto a = oracle_column(w, n);
    const auto b = n < 39 ? oracle_column(w, n + 1) : a;
    double cover = 0;
    for (int s = -60; s <= 60; ++s) {
        if (s > -line) cover += (1 - f) * a[s + 60] + f * b[s + 60];
    }
    return cover;
}

} // namespace

TEST_CASE("matrix shape and column stochasticity") {
    const auto& m = shipped();
    CHECK(m.row_count() == 121);
    CHECK(m.col_count() == 79);
    CHECK(m.cell_sd() == 15.0);
    CHECK(m.weight_table_id() == reference_weights().version);
    for (int mu = -39; mu <= 39; ++mu) {
        double sum = 0;
        for (const double p : m.column(mu)) {
            REQUIRE(p >= 0.0);
            REQUIRE(p <= 1.0);
            sum += p;
        }
        REQUIRE(std::abs(sum - 1.0) <= 1e-9);
        REQUIRE(m.cell(0, mu) == 0.0);
    }
}

TEST_CASE("matrix mirror symmetry is exact") {
    const auto& m = shipped();
    for (int mu = -39; mu <= 39; ++mu) {
        for (int s = -60; s <= 60; ++s) REQUIRE(m.cell(s, mu) == m.cell(-s, -mu));
    }
}

TEST_CASE("unit weights give the truncated discretized normal") {
    const auto m = build_matrix(unit_weights());
    for (int mu : {-39, -12, 0, 5, 39}) {
        const auto expected = oracle_column(unit_weights(), mu);
        const auto col = m.column(mu);
        for (std::size_t i = 0; i < col.size(); ++i) REQUIRE(col[i] == doctest::Approx(expected[i]).epsilon(1e-10));
    }
}

TEST_CASE("key numbers stand out") {
    const auto& m = shipped();
    CHECK(m.cell(3, 3) > m.cell(2, 3));
    CHECK(m.cell(7, 3) > m.cell(6, 3));
    CHECK(m.cell(3, 3) > m.cell(4, 3));
    CHECK(m.cell(7, 7) > m.cell(8, 7));
}

TEST_CASE("build_matrix errors") {
    WeightTable zero;
    zero.default_weight = 0.0;
    CHECK_THROWS_AS(build_matrix(zero), DomainError);
    CHECK_THROWS_AS(build_matrix(reference_weights(), 0.0), DomainError);
    CHECK_THROWS_AS(build_matrix(reference_weights(), 15.0, 0, 39), DomainError);
}

TEST_CASE("column_distribution") {
    const auto& m = shipped();
    const auto zero = column_distribution(m, 0);
    for (int s = 1; s <= 60; ++s) REQUIRE(zero[60 + s] == zero[60 - s]);

    const auto hi = column_distribution(m, 39);
    const auto lo = column_distribution(m, -39);
    for (int s = -60; s <= 60; ++s) REQUIRE(hi[60 + s] == lo[60 - s]);

    const auto col3 = column_distribution(m, 3);
    CHECK(col3[63] == doctest::Approx(oracle_column(reference_weights(), 3)[63]).epsilon(1e-12));

    CHECK_THROWS_AS(column_distribution(m, 40), DomainError);
    CHECK_THROWS_AS(column_distribution(m, -40), OutOfModelError);
}

TEST_CASE("interpolated_distribution") {
    const auto& m = shipped();
    for (int mu = -39; mu <= 39; ++mu) REQUIRE(interpolated_distribution(m, mu) == column_distribution(m, mu));

    const auto c2 = column_distribution(m, 2);
    const auto c3 = column_distribution(m, 3);
    const auto mid = interpolated_distribution(m, 2.5);
    const auto near2 = interpolated_distribution(m, 2.3);
    double sum = 0;
    for (std::size_t i = 0; i < mid.size(); ++i) {
        REQUIRE(mid[i] == doctest::Approx(0.5 * (c2[i] + c3[i])).epsilon(1e-14));
        REQUIRE(near2[i] == doctest::Approx(0.7 * c2[i] + 0.3 * c3[i]).epsilon(1e-14));
        sum += near2[i];
    }
    CHECK(std::abs(sum - 1.0) <= 1e-12);

    CHECK_THROWS_AS(interpolated_distribution(m, 39.01), OutOfModelError);
    CHECK_THROWS_AS(interpolated_distribution(m, NAN), OutOfModelError);
}

TEST_CASE("cover_push_probabilities") {
    const auto& m = shipped();
    SUBCASE("Baylor -2.5 with a -2.9 projection") {
        const auto [cover, push] = cover_push_probabilities(m, MarginPoints{2.9}, SpreadPoints{-2.5});
        CHECK(push.value() == 0.0);
        CHECK(cover.value() == doctest::Approx(0.532).epsilon(0.02));
        double by_hand = 0;
        const auto dist = interpolated_distribution(m, 2.9);
        for (int s = 3; s <= 60; ++s) by_hand += dist[60 + s];
        CHECK(cover.value() == doctest::Approx(by_hand).epsilon(1e-14));
    }
    SUBCASE("pick'em projection and a half-point line") {
        CHECK(cover_push_probabilities(m, MarginPoints{0}, SpreadPoints{-0.5}).cover.value() ==
              doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("integer lines push, half-point lines never do") {
        const auto on3 = cover_push_probabilities(m, MarginPoints{3}, SpreadPoints{-3});
        CHECK(on3.push.value() == doctest::Approx(m.cell(3, 3)));
        CHECK(on3.push.value() > 0.0);
        for (double line = -20.5; line <= 20.5; line += 1.0) {
            REQUIRE(cover_push_probabilities(m, MarginPoints{1.7}, SpreadPoints{line}).push.value() == 0.0);
        }
    }
    SUBCASE("range checks") {
        CHECK_THROWS_AS(cover_push_probabilities(m, MarginPoints{0}, SpreadPoints{60.5}), DomainError);
        CHECK_THROWS_AS(cover_push_probabilities(m, MarginPoints{45}, SpreadPoints{-3}), OutOfModelError);
    }
}

TEST_CASE("cover mirror: both sides plus push make one") {
    const auto& m = shipped();
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> proj(-39, 39);
    std::uniform_int_distribution<int> half_line(-80, 80);
    for (int i = 0; i < 200; ++i) {
        const double p = proj(rng);
        const double line = half_line(rng) / 2.0;
        const auto mine = cover_push_probabilities(m, SpreadPoints{p}.to_margin(), SpreadPoints{line});
        const auto theirs = cover_push_probabilities(m, SpreadPoints{-p}.to_margin(), SpreadPoints{-line});
        REQUIRE(std::abs(mine.cover.value() + theirs.cover.value() + mine.push.value() - 1.0) <= 1e-9);
        REQUIRE(mine.push.value() == doctest::Approx(theirs.push.value()).epsilon(1e-9));
    }
}

TEST_CASE("cover agrees with a from-scratch rebuild") {
    const auto& m = shipped();
    std::mt19937 rng(53);
    std::uniform_real_distribution<double> mu_dist(-39, 39);
    std::uniform_int_distribution<int> half_line(-100, 100);
    for (int i = 0; i < 60; ++i) {
        const double mu = mu_dist(rng);
        const double line = half_line(rng) / 2.0;
        const double cover = cover_push_probabilities(m, MarginPoints{mu}, SpreadPoints{line}).cover.value();
        REQUIRE(std::abs(cover - oracle_cover(reference_weights(), mu, line)) <= 1e-9);
    }
}

TEST_CASE("unit-weight matrix tracks the continuous normal model") {
    const auto m = build_matrix(unit_weights());
    for (double mu = -20; mu <= 20; mu += 0.7) {
        for (double offset = -10.5; offset <= 10.5; offset += 1.0) {
            const double line = std::round(-mu) + offset;
            const double matrix_cover = cover_push_probabilities(m, MarginPoints{mu}, SpreadPoints{line}).cover.value();
            const double stern = stern_cover_probability(SpreadPoints::from_margin(MarginPoints{mu}), SpreadPoints{line}, 15).value();
            REQUIRE(std::abs(matrix_cover - stern) <= 0.01);
        }
    }
}

TEST_CASE("edge_quote") {
    const auto& m = shipped();
    const auto book = Odds::american(-110);
    SUBCASE("Baylor") {
        const auto q = edge_quote(m, SpreadPoints{-2.9}, SpreadPoints{-2.5}, book);
        CHECK(std::abs(q.edge - 0.008) <= 0.01);
        CHECK(q.edge == doctest::Approx(q.cover.value() - q.break_even.value()));
        CHECK(q.cover.value() + q.push.value() + q.lose.value() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(q.ev_per_unit == doctest::Approx(ev_per_unit(q.cover, q.push, book)));
    }
    SUBCASE("underdog projected to lose by 8 getting 7.5") {
        const auto q = edge_quote(m, SpreadPoints{8}, SpreadPoints{7.5}, book);
        CHECK(std::abs(q.edge - 0.012) <= 0.01);
        CHECK(q.edge > 0.0);
    }
    SUBCASE("odds priced at the model's cover give zero edge") {
        const double cover = edge_quote(m, SpreadPoints{-6}, SpreadPoints{-6.5}, book).cover.value();
        const auto fair = Odds::decimal(1.0 / cover);
        CHECK(edge_quote(m, SpreadPoints{-6}, SpreadPoints{-6.5}, fair).edge == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("out of model and out of range") {
        CHECK_THROWS_AS(edge_quote(m, SpreadPoints{-45}, SpreadPoints{-44}, book), OutOfModelError);
        CHECK_THROWS_AS(edge_quote(m, SpreadPoints{-3}, SpreadPoints{-61}, book), DomainError);
    }
}

TEST_CASE("conditional_mean") {
    const auto& m = shipped();
    CHECK(conditional_mean(m, 0) == 0.0);
    for (double mu = 0.5; mu <= 39; mu += 1.3) CHECK(conditional_mean(m, mu) == doctest::Approx(-conditional_mean(m, -mu)).epsilon(1e-12));
    for (int mu = -10; mu <= 10; ++mu) REQUIRE(std::abs(conditional_mean(m, mu) - mu) <= 0.5);
    // Interpolation is linear, so means are too.
    CHECK(conditional_mean(m, 2.3) == doctest::Approx(0.7 * conditional_mean(m, 2) + 0.3 * conditional_mean(m, 3)));
}

TEST_CASE("matrix JSON export and import") {
    const auto& m = shipped();
    const auto j = to_json(m);
    CHECK(j.at("col_range") == nlohmann::json::array({-39, 39}));
    CHECK(j.at("row_range") == nlohmann::json::array({-60, 60}));
    CHECK(j.at("columns").size() == 79);
    CHECK(j.at("columns").at("-39").size() == 121);

    const auto back = edge_matrix_from_json(nlohmann::json::parse(j.dump()));
    for (int mu = -39; mu <= 39; ++mu) {
        for (int s = -60; s <= 60; ++s) REQUIRE(back.cell(s, mu) == m.cell(s, mu));
    }

    auto broken = j;
    broken["columns"]["0"][60] = 0.5;
    CHECK_THROWS_AS(edge_matrix_from_json(broken), DomainError);
    auto extra = j;
    extra["bogus"] = 1;
    CHECK_THROWS_AS(edge_matrix_from_json(extra), DomainError);
    auto short_col = j;
    short_col["columns"]["3"].erase(0);
    CHECK_THROWS_AS(edge_matrix_from_json(short_col), DomainError);
}
