#include "trust_atlas/http_server.hpp"

#include <httplib.h>

#include "trust_atlas/error.hpp"

namespace trust_atlas::service {

namespace {

using io::json;

constexpr const char* kJson = "application/json";

void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), kJson);
}

void send_error(httplib::Response& res, int status, std::string_view code, const std::string& message) {
    send_json(res, status, json{{"code", code}, {"message", message}});
}

json parse_body(const httplib::Request& req) {
    json body = json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.is_object()) throw Error(ErrorCode::ParseError, "request body must be a JSON object");
    return body;
}

std::string required_string(const json& body, const char* key) {
    auto it = body.find(key);
    if (it == body.end() || !it->is_string())
        throw Error(ErrorCode::ParseError, std::string("'") + key + "' must be a string");
    return it->get<std::string>();
}

std::string trajectory_url(const std::string& id) { return "/v1/behaviors/" + id + "/trajectory"; }

}  // namespace

int http_status(ErrorCode code) {
    switch (code) {
        case ErrorCode::UnknownSession:
        case ErrorCode::UnknownPair:
        case ErrorCode::NoData:
            return 404;
        case ErrorCode::AlreadyAnswered:
            return 409;
        case ErrorCode::StorageFailure:
            return 500;
        default:
            return 400;
    }
}

struct HttpServer::Impl {
    Service& service;
    httplib::Server server;

    explicit Impl(Service& s) : service(s) { routes(); }

    template <typename Fn>
    httplib::Server::Handler guarded(Fn fn) {
        return [fn](const httplib::Request& req, httplib::Response& res) {
            try {
                fn(req, res);
            } catch (const Error& e) {
                send_error(res, http_status(e.code()), code_name(e.code()), e.what());
            } catch (const std::exception& e) {
                send_error(res, 500, "Internal", e.what());
            }
        };
    }

    void routes() {
        server.Post("/v1/sessions", guarded([this](const httplib::Request& req, httplib::Response& res) {
            const json body = parse_body(req);
            const std::string participant = required_string(body, "participant");
            std::vector<BehaviorId> behaviors;
            if (auto it = body.find("behavior_set"); it != body.end() && !it->is_null()) {
                if (!it->is_array()) throw Error(ErrorCode::ParseError, "'behavior_set' must be an array");
                for (const auto& b : *it) {
                    if (!b.is_string()) throw Error(ErrorCode::ParseError, "behavior ids must be strings");
                    behaviors.push_back(b.get<std::string>());
                }
                if (behaviors.empty()) throw Error(ErrorCode::InvalidSpec, "'behavior_set' is empty");
            }
            std::optional<SelectionMode> mode;
            if (auto it = body.find("mode"); it != body.end() && it->is_string())
                mode = parse_selection_mode(it->get<std::string>());
            std::uint64_t seed = 0;
            if (auto it = body.find("seed"); it != body.end() && it->is_number_unsigned())
                seed = it->get<std::uint64_t>();
            const auto id = service.create_session(participant, std::move(behaviors), mode, seed);
            send_json(res, 201, json{{"session_id", id}});
        }));

        server.Get(R"(/v1/sessions/([^/]+)/next-pair)", guarded([this](const httplib::Request& req, httplib::Response& res) {
            const auto next = service.next_pair(req.matches[1]);
            if (next.complete) {
                send_json(res, 200, json{{"complete", true}});
                return;
            }
            send_json(res, 200,
                      json{{"pair_id", next.pair_id},
                           {"first", next.first},
                           {"second", next.second},
                           {"trajectories", json::array({trajectory_url(next.first), trajectory_url(next.second)})}});
        }));

        server.Post(R"(/v1/sessions/([^/]+)/preferences)",
                    guarded([this](const httplib::Request& req, httplib::Response& res) {
                        const json body = parse_body(req);
                        service.record_preference(req.matches[1], required_string(body, "pair_id"),
                                                  required_string(body, "preferred"));
                        res.status = 204;
                    }));

        server.Get(R"(/v1/sessions/([^/]+)/report)", guarded([this](const httplib::Request& req, httplib::Response& res) {
            send_json(res, 200, service.session_report(req.matches[1]));
        }));

        server.Get("/v1/population/report", guarded([this](const httplib::Request&, httplib::Response& res) {
            send_json(res, 200, service.population_report());
        }));

        server.Get("/v1/behaviors", guarded([this](const httplib::Request&, httplib::Response& res) {
            send_json(res, 200, json(service.catalog().behaviors()));
        }));

        server.Get(R"(/v1/behaviors/([^/]+)/trajectory)",
                   guarded([this](const httplib::Request& req, httplib::Response& res) {
                       const auto& trajectories = service.catalog().trajectories;
                       auto it = trajectories.find(req.matches[1]);
                       if (it == trajectories.end()) {
                           send_error(res, 404, code_name(ErrorCode::UnknownBehavior),
                                      "no trajectory for behavior '" + std::string(req.matches[1]) + "'");
                           return;
                       }
                       send_json(res, 200, io::to_json(it->second));
                   }));
    }
};

HttpServer::HttpServer(Service& service) : impl_(std::make_unique<Impl>(service)) {}
HttpServer::~HttpServer() { stop(); }

bool HttpServer::listen(const std::string& host, int port) { return impl_->server.listen(host, port); }
int HttpServer::bind_any_port(const std::string& host) { return impl_->server.bind_to_any_port(host); }
bool HttpServer::serve() { return impl_->server.listen_after_bind(); }
void HttpServer::stop() {
    if (impl_) impl_->server.stop();
}
void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace trust_atlas::service
