#pragma once

#include <string>

#include "dialsim/service/session_manager.hpp"

namespace httplib {
class Server;
}

namespace dialsim::service {

/// Installs the /api routes on `server`. The manager must outlive it.
void register_routes(httplib::Server& server, SessionManager& manager);

/// Blocks serving on host:port until the server is stopped.
void serve(SessionManager& manager, const std::string& host, int port);

}  // namespace dialsim::service
