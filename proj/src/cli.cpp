#include "spread_edge/cli.hpp"

#include "spread_edge/edge_engine.hpp"
#include "spread_edge/errors.hpp"
#include "spread_edge/historical.hpp"
#include "spread_edge/service.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

namespace spread_edge {

namespace {

constexpr const char* kWeightsEnv = "SPREAD_EDGE_WEIGHTS";

/// Failure that maps to a specific exit code.
struct CliFailure {
    int code;
    std::string message;
};

std::string percent(double p, bool signed_value = false) {
    char buf[32];
    std::snprintf(buf, sizeof buf, signed_value ? "%+.1f%%" : "%.1f%%", 100.0 * p);
    return buf;
}

std::string fixed(double x, int digits, bool signed_value = false) {
    char buf[48];
    std::snprintf(buf, sizeof buf, signed_value ? "%+.*f" : "%.*f", digits, x);
    return buf;
}

std::string weights_version(const std::string& source, double sigma) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "-sd%g", sigma);
    return source + buf;
}

nlohmann::json read_json_file(const std::string& path, const char* what) {
    std::ifstream in(path);
    if (!in) throw CliFailure{kExitIo, std::string("cannot open ") + what + " '" + path + "'"};
    auto j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) throw CliFailure{kExitIo, std::string(what) + " '" + path + "' is not valid JSON"};
    return j;
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw CliFailure{kExitIo, "cannot write '" + path + "'"};
    out << j.dump(2) << '\n';
    if (!out) throw CliFailure{kExitIo, "failed writing '" + path + "'"};
}

template <typename Parse>
auto load_table(const std::string& path, const char* what, Parse parse) {
    const auto j = read_json_file(path, what);
    try {
        return parse(j);
    } catch (const DomainError& e) {
        throw CliFailure{kExitIo, std::string(what) + " '" + path + "': " + e.what()};
    } catch (const nlohmann::json::exception& e) {
        throw CliFailure{kExitIo, std::string(what) + " '" + path + "': " + e.what()};
    }
}

std::vector<GameRecord> load_games(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CliFailure{kExitIo, "cannot open games file '" + path + "'"};
    try {
        return ingest_games(in);
    } catch (const ParseError& e) {
        throw CliFailure{kExitIo, path + ": " + e.what()};
    }
}

/// Weight table from --weights, then $SPREAD_EDGE_WEIGHTS, then the built-in reference table at ref_sigma.
WeightTable resolve_weights(const std::string& flag_path, double ref_sigma) {
    std::string path = flag_path;
    if (path.empty()) {
        if (const char* env = std::getenv(kWeightsEnv); env != nullptr && *env != '\0') path = env;
    }
    if (!path.empty()) return load_table(path, "weight table", weight_table_from_json);
    if (ref_sigma == 22.0) return reference_weights();
    auto w = derive_weights(boyd_reference_table(), ref_sigma);
    w.version = weights_version(boyd_reference_table().source, ref_sigma);
    return w;
}

ServiceModel resolve_model(const std::string& weights_path, const std::string& matrix_path, double ref_sigma,
                           double cell_sd) {
    auto weights = resolve_weights(weights_path, ref_sigma);
    if (!matrix_path.empty()) {
        auto matrix = load_table(matrix_path, "matrix", edge_matrix_from_json);
        return {std::move(weights), std::move(matrix)};
    }
    auto matrix = build_matrix(weights, cell_sd);
    return {std::move(weights), std::move(matrix)};
}

std::string optional_number(const std::optional<double>& v, int digits) {
    return v ? fixed(*v, digits) : std::string("undefined");
}

nlohmann::json optional_json(const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

struct Options {
    bool json = false;
    std::string weights_path;
    std::string matrix_path;
    double ref_sigma = 22.0;
    double cell_sd = kDefaultCellSd;

    // edge
    double projection = -3.0;
    double line = 0.0;
    double odds = -110.0;
    std::string odds_format = "american";

    // ingest / stats
    std::string data_path;
    std::string out_path;
    std::string table_path;

    // fit / weights
    double grid_min = 21.0;
    double grid_max = 22.0;
    double grid_step = 1.0;
    std::string loss = "sse";
    double sigma = 22.0;

    // stats
    double spread_lo = 0.0;
    double spread_hi = 60.0;
    double threshold = 0.0;
    double k_sd = 2.0;
    double sd_ref = 15.0;

    // serve
    std::string host = "127.0.0.1";
    int port = 8080;
    std::string cors_origin = "*";
};

int cmd_edge(const Options& o, std::ostream& out) {
    if (!std::isfinite(o.projection) || std::abs(o.projection) > kDefaultColHalfwidth) {
        throw CliFailure{kExitOutOfModel, "--projection " + fixed(o.projection, 1) +
                                              " is out of model: projected spreads must be within +-" +
                                              std::to_string(kDefaultColHalfwidth)};
    }
    if (!std::isfinite(o.line) || std::abs(o.line) > kDefaultRowHalfwidth) {
        throw CliFailure{kExitUsage, "--line must be within +-" + std::to_string(kDefaultRowHalfwidth)};
    }
    std::optional<Odds> odds;
    try {
        odds = Odds(parse_odds_format(o.odds_format), o.odds);
    } catch (const DomainError& e) {
        const bool bad_format = o.odds_format != "american" && o.odds_format != "decimal";
        throw CliFailure{kExitUsage, std::string(bad_format ? "--odds-format: " : "--odds: ") + e.what()};
    }

    const auto model = resolve_model(o.weights_path, o.matrix_path, o.ref_sigma, o.cell_sd);
    const auto q = edge_quote(model.matrix, SpreadPoints{o.projection}, SpreadPoints{o.line}, *odds);

    if (o.json) {
        nlohmann::json j{{"projected_spread", o.projection},
                         {"book_spread", o.line},
                         {"odds", o.odds},
                         {"odds_format", o.odds_format},
                         {"cover_probability", q.cover.value()},
                         {"push_probability", q.push.value()},
                         {"lose_probability", q.lose.value()},
                         {"break_even_probability", q.break_even.value()},
                         {"edge", q.edge},
                         {"ev_per_unit", q.ev_per_unit},
                         {"cell_sd", model.matrix.cell_sd()},
                         {"weights_version", model.weights.version}};
        out << j.dump() << '\n';
        return kExitOk;
    }
    out << "Cover:       " << percent(q.cover.value()) << '\n'
        << "Push:        " << percent(q.push.value()) << '\n'
        << "Lose:        " << percent(q.lose.value()) << '\n'
        << "Break-even:  " << percent(q.break_even.value()) << '\n'
        << "Edge:        " << percent(q.edge, true) << '\n'
        << "EV per unit: " << fixed(q.ev_per_unit, 4, true) << '\n';
    return kExitOk;
}

int cmd_ingest(const Options& o, std::ostream& out) {
    const auto games = load_games(o.data_path);
    const auto table = empirical_differential_table(games, o.data_path);
    if (!o.out_path.empty()) write_json_file(o.out_path, to_json(table));
    if (o.json) {
        out << nlohmann::json{{"n_games", games.size()}, {"table", to_json(table)}}.dump() << '\n';
    } else {
        out << "n_games: " << games.size() << '\n';
        if (!o.out_path.empty()) out << "wrote " << o.out_path << '\n';
    }
    return kExitOk;
}

DifferentialTable resolve_table(const std::string& path) {
    if (path.empty()) return boyd_reference_table();
    return load_table(path, "differential table", differential_table_from_json);
}

int cmd_weights(const Options& o, std::ostream& out) {
    const auto table = resolve_table(o.table_path);
    auto weights = derive_weights(table, o.sigma);
    weights.version = weights_version(table.source.empty() ? std::filesystem::path(o.table_path).stem().string()
                                                           : table.source,
                                      o.sigma);
    if (!o.out_path.empty()) write_json_file(o.out_path, to_json(weights));
    if (o.json) {
        out << to_json(weights).dump() << '\n';
        return kExitOk;
    }
    out << "sigma_ref: " << fixed(weights.sigma_ref, 2) << '\n';
    for (const auto& [d, w] : weights.weights) out << std::setw(4) << d << "  " << fixed(w, 3) << '\n';
    out << "default_weight: " << fixed(weights.default_weight, 3) << '\n';
    return kExitOk;
}

int cmd_fit(const Options& o, std::ostream& out) {
    const auto table = resolve_table(o.table_path);
    LossKind kind{};
    try {
        kind = parse_loss_kind(o.loss);
    } catch (const DomainError& e) {
        throw CliFailure{kExitUsage, std::string("--loss: ") + e.what()};
    }
    if (o.grid_min > o.grid_max) throw CliFailure{kExitUsage, "--min must not exceed --max"};
    const auto report = fit_sigma(table, o.grid_min, o.grid_max, o.grid_step, kind);
    if (o.json) {
        auto grid = nlohmann::json::array();
        for (const auto& [sigma, loss] : report.grid) grid.push_back({{"sigma", sigma}, {"loss", loss}});
        out << nlohmann::json{{"best_sigma", report.best_sigma},
                              {"loss_at_best", report.loss_at_best},
                              {"loss_kind", to_string(report.loss_kind)},
                              {"grid", grid}}
                   .dump()
            << '\n';
        return kExitOk;
    }
    out << "sigma     " << to_string(kind) << '\n';
    for (const auto& [sigma, loss] : report.grid) out << fixed(sigma, 4) << "  " << std::scientific << loss << std::defaultfloat << '\n';
    out << "best_sigma: " << fixed(report.best_sigma, 4) << '\n';
    return kExitOk;
}

int cmd_build(const Options& o, std::ostream& out) {
    const auto weights = resolve_weights(o.weights_path, o.ref_sigma);
    const auto matrix = build_matrix(weights, o.cell_sd);
    write_json_file(o.out_path, to_json(matrix));
    if (o.json) {
        out << nlohmann::json{{"out", o.out_path},
                              {"cell_sd", matrix.cell_sd()},
                              {"columns", matrix.col_count()},
                              {"rows", matrix.row_count()}}
                   .dump()
            << '\n';
    } else {
        out << "wrote " << matrix.col_count() << "x" << matrix.row_count() << " matrix (cell_sd "
            << fixed(matrix.cell_sd(), 2) << ") to " << o.out_path << '\n';
    }
    return kExitOk;
}

int cmd_stats(const Options& o, std::ostream& out) {
    if (o.spread_lo > o.spread_hi) throw CliFailure{kExitUsage, "--spread-lo must not exceed --spread-hi"};
    const auto games = load_games(o.data_path);
    const auto band = spread_band_stats(games, o.spread_lo, o.spread_hi, o.k_sd, o.sd_ref);
    const auto rate = binned_cover_rate(games, o.spread_lo, o.spread_hi, MarginPoints{o.threshold});
    if (o.json) {
        out << nlohmann::json{{"n_games", games.size()},
                              {"band", {o.spread_lo, o.spread_hi}},
                              {"count", band.count},
                              {"mean_margin", optional_json(band.mean_margin)},
                              {"sd_margin", optional_json(band.sd_margin)},
                              {"exceedance_rate", optional_json(band.exceedance_rate)},
                              {"threshold", o.threshold},
                              {"cover_rate", optional_json(rate.rate)},
                              {"cover_n", rate.n}}
                   .dump()
            << '\n';
        return kExitOk;
    }
    out << "games:           " << games.size() << '\n'
        << "band:            [" << fixed(o.spread_lo, 1) << ", " << fixed(o.spread_hi, 1) << "]\n"
        << "count:           " << band.count << '\n'
        << "mean_margin:     " << optional_number(band.mean_margin, 2) << '\n'
        << "sd_margin:       " << optional_number(band.sd_margin, 2) << '\n'
        << "exceedance_rate: " << (band.exceedance_rate ? percent(*band.exceedance_rate) : "undefined") << '\n'
        << "cover_rate:      " << (rate.rate ? percent(*rate.rate) : "undefined") << " (n = " << rate.n
        << ", margin > " << fixed(o.threshold, 1) << ")\n";
    return kExitOk;
}

int cmd_serve(const Options& o, std::ostream& out, const CliHooks& hooks) {
    if (o.port < 0 || o.port > 65535) throw CliFailure{kExitUsage, "--port must be in [0, 65535]"};
    EdgeService service(ServiceOptions{o.host, o.port, o.cors_origin});
    const int port = service.bind();
    service.load(resolve_model(o.weights_path, o.matrix_path, o.ref_sigma, o.cell_sd));
    out << "listening on http://" << o.host << ":" << port << std::endl;
    if (hooks.on_serving) hooks.on_serving(service, port);
    service.listen();
    return kExitOk;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const CliHooks& hooks) {
    CLI::App app{"Point-spread cover probability and betting edge from a key-number weighted margin model",
                 "spread-edge"};
    app.require_subcommand(1);
    app.fallthrough();

    Options o;
    std::string format = "text";
    app.add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json"}));

    const auto add_model_flags = [&](CLI::App* sub) {
        sub->add_option("--weights", o.weights_path, "Weight table JSON (default: $SPREAD_EDGE_WEIGHTS or built-in)");
        sub->add_option("--ref-sigma", o.ref_sigma, "Reference sigma for the built-in weight table")
            ->check(CLI::PositiveNumber);
        sub->add_option("--sd", o.cell_sd, "Standard deviation of each matrix column")->check(CLI::PositiveNumber);
    };

    auto* edge_cmd = app.add_subcommand("edge", "Quote cover, push and edge for one bet");
    edge_cmd->add_option("--projection", o.projection, "Your projected spread for the bet team (negative = favored)");
    edge_cmd->add_option("--line", o.line, "Sportsbook spread for the bet team")->required();
    edge_cmd->add_option("--odds", o.odds, "Price attached to the spread");
    edge_cmd->add_option("--odds-format", o.odds_format, "american or decimal");
    edge_cmd->add_option("--matrix", o.matrix_path, "Prebuilt matrix JSON");
    add_model_flags(edge_cmd);

    auto* ingest_cmd = app.add_subcommand("ingest", "Build a differential table from a games CSV");
    ingest_cmd->add_option("--data", o.data_path, "Games CSV")->required();
    ingest_cmd->add_option("--out", o.out_path, "Differential table JSON to write");

    auto* weights_cmd = app.add_subcommand("weights", "Derive per-differential multipliers from a table");
    weights_cmd->add_option("--table", o.table_path, "Differential table JSON (default: built-in reference)");
    weights_cmd->add_option("--sigma", o.sigma, "Reference normal sigma")->check(CLI::PositiveNumber);
    weights_cmd->add_option("--out", o.out_path, "Weight table JSON to write");

    auto* fit_cmd = app.add_subcommand("fit", "Grid-search the reference sigma for a table");
    fit_cmd->add_option("--table", o.table_path, "Differential table JSON (default: built-in reference)");
    fit_cmd->add_option("--min", o.grid_min, "Smallest sigma")->check(CLI::PositiveNumber);
    fit_cmd->add_option("--max", o.grid_max, "Largest sigma")->check(CLI::PositiveNumber);
    fit_cmd->add_option("--step", o.grid_step, "Grid step")->check(CLI::PositiveNumber);
    fit_cmd->add_option("--loss", o.loss, "sse or sae");

    auto* build_cmd = app.add_subcommand("build", "Build and export the conditional margin matrix");
    add_model_flags(build_cmd);
    build_cmd->add_option("--out", o.out_path, "Matrix JSON to write")->required();

    auto* stats_cmd = app.add_subcommand("stats", "Spread-band statistics and binned cover rate");
    stats_cmd->add_option("--data", o.data_path, "Games CSV")->required();
    stats_cmd->add_option("--spread-lo", o.spread_lo, "Smallest closing spread magnitude");
    stats_cmd->add_option("--spread-hi", o.spread_hi, "Largest closing spread magnitude");
    stats_cmd->add_option("--threshold", o.threshold, "Favorite must win by more than this");
    stats_cmd->add_option("--k-sd", o.k_sd, "Exceedance reach in reference sds");
    stats_cmd->add_option("--sd-ref", o.sd_ref, "Reference sd for the exceedance rate")->check(CLI::PositiveNumber);

    auto* serve_cmd = app.add_subcommand("serve", "Serve the HTTP API");
    add_model_flags(serve_cmd);
    serve_cmd->add_option("--matrix", o.matrix_path, "Prebuilt matrix JSON");
    serve_cmd->add_option("--host", o.host, "Bind address");
    serve_cmd->add_option("--port", o.port, "Port (0 = ephemeral)");
    serve_cmd->add_option("--cors-origin", o.cors_origin, "Allowed browser origin");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }
    o.json = format == "json";

    try {
        if (*edge_cmd) return cmd_edge(o, out);
        if (*ingest_cmd) return cmd_ingest(o, out);
        if (*weights_cmd) return cmd_weights(o, out);
        if (*fit_cmd) return cmd_fit(o, out);
        if (*build_cmd) return cmd_build(o, out);
        if (*stats_cmd) return cmd_stats(o, out);
        if (*serve_cmd) return cmd_serve(o, out, hooks);
    } catch (const CliFailure& f) {
        err << "error: " << f.message << '\n';
        return f.code;
    } catch (const OutOfModelError& e) {
        err << "error: " << e.what() << '\n';
        return kExitOutOfModel;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::runtime_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    }
    return kExitUsage;
}

} // namespace spread_edge
