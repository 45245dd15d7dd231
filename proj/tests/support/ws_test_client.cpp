#include "ws_test_client.hpp"

#include <boost/asio.hpp>
#include <boost/beast.hpp>

namespace sptest {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

struct WsTestClient::State {
  asio::io_context ioc;
  websocket::stream<beast::tcp_stream> ws{ioc};
  beast::flat_buffer buffer;
};

WsTestClient::WsTestClient(unsigned short port, const std::string& target) : state_(std::make_unique<State>()) {
  tcp::resolver resolver(state_->ioc);
  beast::get_lowest_layer(state_->ws).connect(resolver.resolve("127.0.0.1", std::to_string(port)));
  state_->ws.handshake("127.0.0.1", target);
  state_->ws.text(true);
}

WsTestClient::~WsTestClient() { close(); }

void WsTestClient::send(const spatialprompt::session::SessionMessage& message) {
  send_raw(spatialprompt::session::encode(message));
}

void WsTestClient::send_raw(const std::string& frame) { state_->ws.write(asio::buffer(frame)); }

std::optional<std::string> WsTestClient::receive_raw(int timeout_ms) {
  std::optional<std::string> out;
  bool done = false;
  state_->ws.async_read(state_->buffer, [&](beast::error_code ec, std::size_t) {
    done = true;
    if (ec) return;
    out = beast::buffers_to_string(state_->buffer.data());
    state_->buffer.consume(state_->buffer.size());
  });
  state_->ioc.restart();
  state_->ioc.run_for(std::chrono::milliseconds(timeout_ms));
  if (!done) {
    // Abandon the pending read; the stream is unusable afterwards.
    beast::get_lowest_layer(state_->ws).cancel();
    state_->ioc.restart();
    state_->ioc.run();
  }
  return out;
}

std::optional<spatialprompt::session::SessionMessage> WsTestClient::receive(int timeout_ms) {
  auto frame = receive_raw(timeout_ms);
  if (!frame) return std::nullopt;
  return spatialprompt::session::decode(*frame);
}

void WsTestClient::close() {
  if (!state_ || !state_->ws.is_open()) return;
  beast::error_code ec;
  state_->ws.close(websocket::close_code::normal, ec);
}

int http_get_status(unsigned short port, const std::string& target) {
  asio::io_context ioc;
  beast::tcp_stream stream(ioc);
  tcp::resolver resolver(ioc);
  stream.connect(resolver.resolve("127.0.0.1", std::to_string(port)));
  http::request<http::empty_body> req{http::verb::get, target, 11};
  req.set(http::field::host, "127.0.0.1");
  http::write(stream, req);
  beast::flat_buffer buffer;
  http::response<http::string_body> res;
  http::read(stream, buffer, res);
  return static_cast<int>(res.result_int());
}

}  // namespace sptest
