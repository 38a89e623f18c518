#include "dialsim/service/http_server.hpp"

#include <httplib.h>

#include <stdexcept>

namespace dialsim::service {
namespace {

void send_json(httplib::Response& res, int status, const nlohmann::json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

template <class F>
void guarded(httplib::Response& res, F&& f) {
  try {
    send_json(res, 200, f());
  } catch (const ServiceError& e) {
    send_json(res, e.status(), e.body());
  } catch (const std::exception& e) {
    send_json(res, 500, {{"code", "internal"}, {"message", e.what()}, {"hint", ""}});
  }
}

nlohmann::json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return nlohmann::json::object();
  try {
    return nlohmann::json::parse(req.body);
  } catch (const nlohmann::json::exception& e) {
    throw ServiceError(400, "invalid_json", std::string("request body is not JSON: ") + e.what(),
                       "send Content-Type: application/json");
  }
}

}  // namespace

void register_routes(httplib::Server& server, SessionManager& manager) {
  server.Post("/api/sessions", [&](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { return manager.create_session(parse_body(req)); });
  });
  server.Post(R"(/api/sessions/([^/]+)/action)", [&](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { return manager.post_action(req.matches[1], parse_body(req)); });
  });
  server.Get(R"(/api/sessions/([^/]+))", [&](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { return manager.get_session(req.matches[1]); });
  });
  server.Get("/api/schema", [&](const httplib::Request&, httplib::Response& res) {
    guarded(res, [&] { return manager.schema_json(); });
  });
  server.Get("/api/templates", [&](const httplib::Request&, httplib::Response& res) {
    guarded(res, [&] { return manager.templates_json(); });
  });
}

void serve(SessionManager& manager, const std::string& host, int port) {
  httplib::Server server;
  register_routes(server, manager);
  if (!server.listen(host, port))
    throw std::runtime_error("cannot listen on " + host + ":" + std::to_string(port));
}

}  // namespace dialsim::service
