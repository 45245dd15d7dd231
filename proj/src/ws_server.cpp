#include "spatialprompt/ws_server.hpp"

#include <boost/asio.hpp>
#include <boost/beast.hpp>

#include <deque>
#include <future>
#include <map>
#include <thread>

namespace spatialprompt {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;
using session::ConnectionId;
using session::Effects;

namespace {

constexpr std::string_view kSessionPrefix = "/session/";

std::optional<std::string> session_from_target(std::string_view target) {
  if (const auto q = target.find('?'); q != std::string_view::npos) target = target.substr(0, q);
  if (!target.starts_with(kSessionPrefix)) return std::nullopt;
  const std::string_view id = target.substr(kSessionPrefix.size());
  if (id.empty() || id.find('/') != std::string_view::npos) return std::nullopt;
  return std::string(id);
}

}  // namespace

class Connection;

struct detail::WsServerState {
  explicit WsServerState(ServerOptions o) : options(std::move(o)), pool(std::max<std::size_t>(1, options.generation_threads)) {}

  ServerOptions options;
  asio::io_context ioc{1};
  tcp::acceptor acceptor{ioc};
  asio::thread_pool pool;
  std::thread io_thread;
  SystemClock clock;

  // Owned by the I/O thread.
  session::SessionRegistry registry;
  std::map<ConnectionId, std::weak_ptr<Connection>> connections;
  ConnectionId next_connection = 1;

  std::promise<void> stopped;
  std::shared_future<void> stopped_future = stopped.get_future().share();
  std::once_flag stop_once;

  void accept();
  void dispatch(session::SessionCore& core, Effects fx);
  void on_frame(ConnectionId conn, const std::string& session_id, const std::string& frame);
  void on_close(ConnectionId conn, const std::string& session_id);
};

class Connection : public std::enable_shared_from_this<Connection> {
 public:
  Connection(tcp::socket socket, detail::WsServerState& server, ConnectionId id)
      : ws_(std::move(socket)), server_(server), id_(id) {}

  void start() {
    http::async_read(ws_.next_layer(), buffer_, request_,
                     [self = shared_from_this()](beast::error_code ec, std::size_t) { self->on_request(ec); });
  }

  void send(std::string frame) {
    outbox_.push_back(std::move(frame));
    if (outbox_.size() == 1 && open_) write_next();
  }

  void close() {
    if (!open_) return;
    beast::error_code ec;
    ws_.next_layer().shutdown(tcp::socket::shutdown_both, ec);
    ws_.next_layer().close(ec);
  }

 private:
  void on_request(beast::error_code ec) {
    if (ec) return;
    auto session_id = session_from_target(std::string_view(request_.target().data(), request_.target().size()));
    if (!session_id || !websocket::is_upgrade(request_)) {
      auto res = std::make_shared<http::response<http::string_body>>(http::status::not_found, request_.version());
      res->set(http::field::content_type, "text/plain");
      res->body() = "expected a WebSocket upgrade at /session/{id}\n";
      res->prepare_payload();
      http::async_write(ws_.next_layer(), *res, [self = shared_from_this(), res](beast::error_code, std::size_t) {
        beast::error_code ignored;
        self->ws_.next_layer().shutdown(tcp::socket::shutdown_both, ignored);
      });
      return;
    }
    session_id_ = std::move(*session_id);
    ws_.text(true);
    ws_.read_message_max(64u * 1024u * 1024u);
    ws_.async_accept(request_, [self = shared_from_this()](beast::error_code ec2) {
      if (ec2) return;
      self->open_ = true;
      self->server_.connections[self->id_] = self;
      if (!self->outbox_.empty()) self->write_next();
      self->read_next();
    });
  }

  void read_next() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->open_ = false;
        self->server_.on_close(self->id_, self->session_id_);
        return;
      }
      const std::string frame = beast::buffers_to_string(self->buffer_.data());
      self->buffer_.consume(self->buffer_.size());
      self->server_.on_frame(self->id_, self->session_id_, frame);
      self->read_next();
    });
  }

  void write_next() {
    ws_.async_write(asio::buffer(outbox_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return;
      self->outbox_.pop_front();
      if (!self->outbox_.empty()) self->write_next();
    });
  }

  websocket::stream<tcp::socket> ws_;
  detail::WsServerState& server_;
  ConnectionId id_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> request_;
  std::string session_id_;
  std::deque<std::string> outbox_;
  bool open_ = false;
};

void detail::WsServerState::accept() {
  acceptor.async_accept(asio::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
    if (ec) return;  // acceptor closed
    std::make_shared<Connection>(std::move(socket), *this, next_connection++)->start();
    accept();
  });
}

void detail::WsServerState::dispatch(session::SessionCore& core, Effects fx) {
  for (auto& [conn, msg] : fx.sends)
    if (auto it = connections.find(conn); it != connections.end())
      if (auto c = it->second.lock()) c->send(session::encode(msg));
  if (!fx.job) return;

  session::GenerationJob job = std::move(*fx.job);
  const std::string session_id = core.session_id();
  dispatch(core, core.generation_started(job.request_id));
  asio::post(pool, [this, job = std::move(job), session_id] {
    session::GenerationOutcome outcome = session::run_generation_job(job, options.backend, clock, options.tolerances);
    asio::post(ioc, [this, outcome = std::move(outcome), session_id] {
      if (auto* c = registry.find(session_id)) dispatch(*c, c->generation_finished(outcome));
    });
  });
}

void detail::WsServerState::on_frame(ConnectionId conn, const std::string& session_id, const std::string& frame) {
  auto reject = [&](ErrorCode code) {
    if (auto c = connections[conn].lock())
      c->send(session::encode({session_id, "server", session::OpRejected{"", std::string(to_string(code))}}));
  };
  session::SessionMessage msg;
  try {
    msg = session::decode(frame);
  } catch (const Error&) {
    reject(ErrorCode::ProtocolError);
    return;
  }
  session::SessionCore* core = std::holds_alternative<session::Join>(msg.payload) ? &registry.open(session_id)
                                                                                  : registry.find(session_id);
  if (core == nullptr) {
    reject(ErrorCode::UnknownSession);
    return;
  }
  dispatch(*core, core->handle(conn, msg));
}

void detail::WsServerState::on_close(ConnectionId conn, const std::string& session_id) {
  if (auto* core = registry.find(session_id)) dispatch(*core, core->disconnect(conn));
  connections.erase(conn);
}

// ---------------------------------------------------------------------------

WebSocketServer::WebSocketServer(ServerOptions options) : impl_(std::make_unique<detail::WsServerState>(std::move(options))) {
  check_config(impl_->options.backend);
}

WebSocketServer::~WebSocketServer() { stop(); }

unsigned short WebSocketServer::start() {
  detail::WsServerState& s = *impl_;
  const tcp::endpoint endpoint(asio::ip::make_address(s.options.address), s.options.port);
  s.acceptor.open(endpoint.protocol());
  s.acceptor.set_option(asio::socket_base::reuse_address(true));
  s.acceptor.bind(endpoint);
  s.acceptor.listen();
  const unsigned short port = s.acceptor.local_endpoint().port();
  s.accept();
  s.io_thread = std::thread([&s] {
    auto guard = asio::make_work_guard(s.ioc);
    s.ioc.run();
  });
  return port;
}

void WebSocketServer::wait() { impl_->stopped_future.wait(); }

void WebSocketServer::stop() {
  detail::WsServerState& s = *impl_;
  std::call_once(s.stop_once, [&s] {
    asio::post(s.ioc, [&s] {
      beast::error_code ec;
      s.acceptor.close(ec);
      for (auto& [id, weak] : s.connections)
        if (auto c = weak.lock()) c->close();
      s.ioc.stop();
    });
    if (s.io_thread.joinable()) s.io_thread.join();
    s.pool.join();
    s.stopped.set_value();
  });
}

std::optional<session::SessionCore::Snapshot> WebSocketServer::snapshot(const std::string& session_id) {
  detail::WsServerState& s = *impl_;
  std::promise<std::optional<session::SessionCore::Snapshot>> result;
  auto future = result.get_future();
  asio::post(s.ioc, [&] {
    auto* core = s.registry.find(session_id);
    result.set_value(core ? std::optional(core->snapshot()) : std::nullopt);
  });
  return future.get();
}

}  // namespace spatialprompt
