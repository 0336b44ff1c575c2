#pragma once

#include <memory>
#include <string>

#include "trust_atlas/error.hpp"
#include "trust_atlas/service.hpp"

namespace trust_atlas::service {

/// HTTP/JSON front end for a Service under /v1.
class HttpServer {
public:
    explicit HttpServer(Service& service);
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Binds and serves until stop(); returns false if the port is unavailable.
    bool listen(const std::string& host, int port);
    /// Binds to a free port and returns it (or -1); call serve() afterwards.
    int bind_any_port(const std::string& host);
    bool serve();
    void stop();
    void wait_until_ready() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// HTTP status for a service error code.
int http_status(ErrorCode code);

}  // namespace trust_atlas::service
