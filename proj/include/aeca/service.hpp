#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include <json.hpp>

#include "aeca/analysis.hpp"
#include "aeca/store.hpp"

namespace httplib {
class Server;
}

namespace aeca {

struct ServiceConfig {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::filesystem::path data_dir = "aeca-data";
    std::size_t max_upload_bytes = 64 * 1024 * 1024;
    std::optional<std::filesystem::path> static_dir;  // built web UI assets, mounted at "/"
};

/// Reads AECA_LISTEN (host:port), AECA_DATA_DIR, AECA_MAX_UPLOAD and AECA_STATIC_DIR over the defaults.
ServiceConfig service_config_from_env(ServiceConfig base = {});

/// Parses an analysis request body. Thresholds may be numbers (fractions)
/// or strings such as "4.76%". Throws InvalidConfig.
AnalysisRequest analysis_request_from_json(const nlohmann::json& body);

// HTTP JSON API under /v1/:
//   POST /v1/datasets                      upload (query: name, id, group, grade, domain, term, cycle)
//   GET  /v1/datasets                      list handles
//   GET  /v1/datasets/{id}                 one handle
//   POST /v1/datasets/{id}/analysis        run CA (query format=svg for the figure)
//   GET  /v1/datasets/{id}/frequency       frequency table (query: level, cycle, format=text)
// Errors are {code, message, details} objects.
class Service {
public:
    explicit Service(ServiceConfig config);
    ~Service();
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    /// Binds and serves until stop(). Returns false if binding failed.
    bool listen();
    /// Binds to an ephemeral port on host and returns it (for tests); then call serve().
    int bind_ephemeral();
    bool serve();
    void stop();
    void wait_until_ready() const;

    const ServiceConfig& config() const noexcept { return config_; }
    DatasetStore& store() noexcept { return store_; }

private:
    void routes();

    ServiceConfig config_;
    DatasetStore store_;
    std::unique_ptr<httplib::Server> server_;
};

}  // namespace aeca
