#include "spread_edge/service.hpp"

#include "spread_edge/errors.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

#ifndef CPPHTTPLIB_LISTEN_BACKLOG
#define CPPHTTPLIB_LISTEN_BACKLOG 128
#endif
#include <httplib.h>

namespace spread_edge {

namespace {

HttpReply error_reply(int status, const std::string& message, const std::string& field = {}) {
    nlohmann::json body{{"error", message}};
    if (!field.empty()) body["field"] = field;
    return {status, std::move(body)};
}

HttpReply not_ready() {
    return {503, {{"status", "loading"}, {"error", "model is not loaded yet"}}};
}

nlohmann::json model_summary(const ServiceModel& model) {
    return {{"cell_sd", model.matrix.cell_sd()},
            {"ref_sigma", model.weights.sigma_ref},
            {"weights_version", model.weights.version}};
}

// Reads a numeric field into out; on failure returns the 400 reply naming it.
std::optional<HttpReply> read_number(const nlohmann::json& body, const char* field, double& out) {
    if (!body.contains(field)) return error_reply(400, std::string("missing field '") + field + "'", field);
    const auto& v = body.at(field);
    if (!v.is_number()) return error_reply(400, std::string("field '") + field + "' must be a number", field);
    out = v.get<double>();
    return std::nullopt;
}

std::optional<double> parse_number(const std::string& text) {
    if (text.empty()) return std::nullopt;
    char* end = nullptr;
    const double x = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size() || !std::isfinite(x)) return std::nullopt;
    return x;
}

HttpReply edge_reply(const ServiceModel& model, std::string_view raw) {
    const auto body = nlohmann::json::parse(raw.begin(), raw.end(), nullptr, false);
    if (body.is_discarded() || !body.is_object()) return error_reply(400, "request body must be a JSON object");

    double projected = 0.0;
    double book = 0.0;
    double price = 0.0;
    for (auto [field, out] : {std::pair{"projected_spread", &projected}, {"book_spread", &book}, {"odds", &price}}) {
        if (auto err = read_number(body, field, *out)) return *err;
    }
    std::string format_name = "american";
    if (body.contains("odds_format")) {
        if (!body.at("odds_format").is_string()) {
            return error_reply(400, "field 'odds_format' must be \"american\" or \"decimal\"", "odds_format");
        }
        format_name = body.at("odds_format").get<std::string>();
    }

    std::optional<Odds> odds;
    try {
        odds = Odds(parse_odds_format(format_name), price);
    } catch (const DomainError& e) {
        const bool format_bad = format_name != "american" && format_name != "decimal";
        return error_reply(400, e.what(), format_bad ? "odds_format" : "odds");
    }
    const int row_half = model.matrix.row_halfwidth();
    const int col_half = model.matrix.col_halfwidth();
    if (std::abs(book) > row_half) {
        return error_reply(400, "book_spread must be within +-" + std::to_string(row_half), "book_spread");
    }
    if (std::abs(projected) > col_half) {
        return error_reply(422,
                           "projected_spread " + std::to_string(projected) + " is outside the model range +-" +
                               std::to_string(col_half) + "; lopsided projections are not priced",
                           "projected_spread");
    }

    const auto q = edge_quote(model.matrix, SpreadPoints{projected}, SpreadPoints{book}, *odds);
    return {200,
            {{"cover_probability", q.cover.value()},
             {"push_probability", q.push.value()},
             {"break_even_probability", q.break_even.value()},
             {"edge", q.edge},
             {"ev_per_unit", q.ev_per_unit},
             {"model", model_summary(model)},
             {"request",
              {{"projected_spread", projected},
               {"book_spread", book},
               {"odds", price},
               {"odds_format", format_name}}}}};
}

} // namespace

HttpReply handle_edge(const ServiceModel* model, std::string_view body) {
    if (model == nullptr) return not_ready();
    try {
        return edge_reply(*model, body);
    } catch (const OutOfModelError& e) {
        return error_reply(422, e.what(), "projected_spread");
    } catch (const DomainError& e) {
        return error_reply(400, e.what());
    }
}

HttpReply handle_distribution(const ServiceModel* model, const std::optional<std::string>& projected_spread) {
    if (model == nullptr) return not_ready();
    if (!projected_spread) {
        return error_reply(400, "missing query parameter 'projected_spread'", "projected_spread");
    }
    const auto x = parse_number(*projected_spread);
    if (!x) return error_reply(400, "projected_spread must be a number", "projected_spread");
    const int col_half = model->matrix.col_halfwidth();
    if (std::abs(*x) > col_half) {
        return error_reply(422, "projected_spread is outside the model range +-" + std::to_string(col_half),
                           "projected_spread");
    }
    const auto dist = interpolated_distribution(model->matrix, SpreadPoints{*x}.to_margin().value);
    std::vector<int> margins;
    margins.reserve(dist.size());
    for (std::size_t i = 0; i < dist.size(); ++i) margins.push_back(model->matrix.margin_at(i));
    return {200, {{"projected_spread", *x}, {"margins", margins}, {"probabilities", dist}}};
}

HttpReply handle_health(const ServiceModel* model) {
    if (model == nullptr) return not_ready();
    return {200, {{"status", "ok"}, {"weights_version", model->weights.version}}};
}

HttpReply handle_config(const ServiceModel* model) {
    if (model == nullptr) return not_ready();
    auto body = model_summary(*model);
    body["default_weight"] = model->weights.default_weight;
    body["weights"] = to_json(model->weights).at("weights");
    body["row_range"] = {-model->matrix.row_halfwidth(), model->matrix.row_halfwidth()};
    body["col_range"] = {-model->matrix.col_halfwidth(), model->matrix.col_halfwidth()};
    return {200, std::move(body)};
}

struct EdgeService::Impl {
    ServiceOptions options;
    httplib::Server server;
    std::unique_ptr<const ServiceModel> model;
    std::atomic<const ServiceModel*> published{nullptr};

    static void send(httplib::Response& res, const HttpReply& reply) {
        res.status = reply.status;
        res.set_content(reply.body.dump(), "application/json");
    }
};

EdgeService::EdgeService(ServiceOptions options) : impl_(std::make_unique<Impl>()) {
    impl_->options = std::move(options);
    auto& server = impl_->server;
    Impl* impl = impl_.get();

    server.set_default_headers({{"Access-Control-Allow-Origin", impl->options.cors_origin}});
    server.Options(R"(/api/v1/.*)", [](const httplib::Request&, httplib::Response& res) {
        res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
        res.status = 204;
    });
    server.Post("/api/v1/edge", [impl](const httplib::Request& req, httplib::Response& res) {
        Impl::send(res, handle_edge(impl->published.load(std::memory_order_acquire), req.body));
    });
    server.Get("/api/v1/distribution", [impl](const httplib::Request& req, httplib::Response& res) {
        std::optional<std::string> x;
        if (req.has_param("projected_spread")) x = req.get_param_value("projected_spread");
        Impl::send(res, handle_distribution(impl->published.load(std::memory_order_acquire), x));
    });
    server.Get("/api/v1/health", [impl](const httplib::Request&, httplib::Response& res) {
        Impl::send(res, handle_health(impl->published.load(std::memory_order_acquire)));
    });
    server.Get("/api/v1/config", [impl](const httplib::Request&, httplib::Response& res) {
        Impl::send(res, handle_config(impl->published.load(std::memory_order_acquire)));
    });
}

EdgeService::~EdgeService() {
    stop();
}

void EdgeService::load(ServiceModel model) {
    if (impl_->model) throw std::logic_error("service model is already loaded");
    impl_->model = std::make_unique<const ServiceModel>(std::move(model));
    impl_->published.store(impl_->model.get(), std::memory_order_release);
}

bool EdgeService::ready() const noexcept {
    return impl_->published.load(std::memory_order_acquire) != nullptr;
}

int EdgeService::bind() {
    const auto& opts = impl_->options;
    if (opts.port == 0) {
        const int port = impl_->server.bind_to_any_port(opts.host);
        if (port < 0) throw std::runtime_error("could not bind " + opts.host);
        return port;
    }
    if (!impl_->server.bind_to_port(opts.host, opts.port)) {
        throw std::runtime_error("could not bind " + opts.host + ":" + std::to_string(opts.port));
    }
    return opts.port;
}

void EdgeService::listen() {
    impl_->server.listen_after_bind();
}

void EdgeService::stop() {
    impl_->server.stop();
}

} // namespace spread_edge
