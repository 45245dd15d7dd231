#pragma once

#include <memory>
#include <optional>
#include <string>

#include "spatialprompt/session.hpp"

namespace spatialprompt {

namespace detail {
struct WsServerState;
}

struct ServerOptions {
  std::string address = "127.0.0.1";
  unsigned short port = 0;  // 0 picks a free port
  BackendConfig backend;
  ValidationTolerances tolerances;
  std::size_t generation_threads = 2;
};

/// WebSocket endpoint at ws://host:port/session/{session_id}, one JSON message
/// per text frame. Session state lives on a single I/O thread; generation jobs
/// run on a small pool and report back to that thread.
class WebSocketServer {
 public:
  explicit WebSocketServer(ServerOptions options);
  ~WebSocketServer();
  WebSocketServer(const WebSocketServer&) = delete;
  WebSocketServer& operator=(const WebSocketServer&) = delete;

  /// Binds, starts the I/O thread and returns the bound port.
  unsigned short start();
  /// Blocks until stop() is called from another thread or a signal handler.
  void wait();
  void stop();

  /// Thread-safe; nullopt when the session does not exist.
  std::optional<session::SessionCore::Snapshot> snapshot(const std::string& session_id);

 private:
  std::unique_ptr<detail::WsServerState> impl_;
};

}  // namespace spatialprompt
