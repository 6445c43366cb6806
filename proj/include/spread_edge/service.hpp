#pragma once

#include "spread_edge/edge_engine.hpp"
#include "spread_edge/historical.hpp"

#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

namespace spread_edge {

/// Everything a request handler reads. Built once at startup, then shared read-only.
struct ServiceModel {
    WeightTable weights;
    EdgeMatrix matrix;
};

struct HttpReply {
    int status = 200;
    nlohmann::json body;
};

// Transport-independent handlers. A null model means startup has not finished.
HttpReply handle_edge(const ServiceModel* model, std::string_view body);
HttpReply handle_distribution(const ServiceModel* model, const std::optional<std::string>& projected_spread);
HttpReply handle_health(const ServiceModel* model);
HttpReply handle_config(const ServiceModel* model);

struct ServiceOptions {
    std::string host = "127.0.0.1";
    int port = 8080; // 0 binds an ephemeral port
    std::string cors_origin = "*";
};

/// HTTP front end for the handlers above.
///
/// Routes answer 503 until load() installs the model; after that every
/// handler reads the same immutable ServiceModel without locking.
class EdgeService {
public:
    explicit EdgeService(ServiceOptions options);
    ~EdgeService();

    EdgeService(const EdgeService&) = delete;
    EdgeService& operator=(const EdgeService&) = delete;

    /// Installs the model. May be called once.
    void load(ServiceModel model);
    bool ready() const noexcept;

    /// Binds the listening socket and returns the bound port.
    int bind();
    /// Serves until stop(). Requires bind().
    void listen();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace spread_edge
