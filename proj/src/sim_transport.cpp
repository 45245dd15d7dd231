#include "spatialprompt/sim_transport.hpp"

#include <cmath>
#include <deque>
#include <numbers>
#include <random>

namespace spatialprompt::session {

namespace {

struct Peer {
  SessionClient client;
  std::deque<std::string> up;    // client -> server
  std::deque<std::string> down;  // server -> client
  std::size_t budget = 0;
  std::size_t made = 0;
};

class OpFactory {
 public:
  explicit OpFactory(std::mt19937_64& rng) : rng_(rng) {}

  EditOp make(std::size_t client, std::size_t n, const SketchDocument& view) {
    const std::string op_id = "c" + std::to_string(client) + "-op" + std::to_string(n);
    // Strokes are picked from the overlay, so concurrent deletes and
    // transforms of the same stroke collide regularly.
    std::vector<std::string> ids;
    for (const auto& [id, s] : view.strokes) ids.push_back(id);
    const int kind = ids.empty() ? 0 : pick(0, 9);
    if (kind <= 3) return {op_id, "", AddStroke{random_stroke(client, n)}, std::nullopt};
    const std::string target = ids[static_cast<std::size_t>(pick(0, static_cast<int>(ids.size()) - 1))];
    if (kind <= 5) return {op_id, "", DeleteStroke{target}, std::nullopt};
    if (kind <= 7) {
      TransformStroke t;
      t.stroke_id = target;
      t.rotation = Quaternion::from_axis_angle(normalized(Vec3{uniform(-1, 1), uniform(-1, 1), uniform(0.1, 1)}),
                                               uniform(-std::numbers::pi, std::numbers::pi));
      t.translation = {uniform(-0.1, 0.1), uniform(-0.1, 0.1), uniform(-0.1, 0.1)};
      t.uniform_scale = uniform(0.8, 1.25);
      return {op_id, "", t, std::nullopt};
    }
    if (kind == 8) return {op_id, "", SetRole{target, static_cast<StrokeRole>(pick(0, 2))}, std::nullopt};
    return {op_id, "", SetCalibration{uniform(0.5, 2.0)}, std::nullopt};
  }

 private:
  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

  Stroke random_stroke(std::size_t client, std::size_t n) {
    Stroke s;
    s.stroke_id = "s" + std::to_string(client) + "-" + std::to_string(n);
    s.role = static_cast<StrokeRole>(pick(0, 2));
    s.created_at = static_cast<std::int64_t>(n);
    s.color_index = pick(0, 9);  // the server overwrites this
    Point3 p{uniform(-0.5, 0.5), uniform(0.0, 1.0), uniform(-0.5, 0.5)};
    const int count = pick(2, 6);
    for (int i = 0; i < count; ++i) {
      s.points.push_back(p);
      p = p + Vec3{uniform(-0.1, 0.1), uniform(-0.1, 0.1), uniform(-0.1, 0.1)} + Vec3{0.02, 0, 0};
    }
    return s;
  }

  std::mt19937_64& rng_;
};

}  // namespace

SimulationResult run_simulation(const SimulationConfig& config) {
  const std::string session_id = "sim";
  std::mt19937_64 rng(config.seed);
  OpFactory factory(rng);
  SessionCore server(session_id);
  SimulationResult result;

  std::vector<Peer> peers;
  peers.reserve(config.clients);
  for (std::size_t i = 0; i < config.clients; ++i) {
    peers.push_back({SessionClient(session_id, "p" + std::to_string(i), "Player " + std::to_string(i)), {}, {},
                     config.ops_per_client, 0});
    peers.back().up.push_back(encode(peers.back().client.join()));
  }

  auto deliver_to_server = [&](std::size_t i) {
    const std::string frame = std::move(peers[i].up.front());
    peers[i].up.pop_front();
    result.transcript.push_back("up " + std::to_string(i) + " " + frame);
    const Effects fx = server.handle(static_cast<ConnectionId>(i), decode(frame));
    for (const auto& [conn, msg] : fx.sends) {
      if (std::holds_alternative<OpApplied>(msg.payload) && conn == static_cast<ConnectionId>(i)) ++result.applied;
      if (std::holds_alternative<OpRejected>(msg.payload)) ++result.rejected;
      peers[static_cast<std::size_t>(conn)].down.push_back(encode(msg));
    }
  };
  auto deliver_to_client = [&](std::size_t i) {
    const std::string frame = std::move(peers[i].down.front());
    peers[i].down.pop_front();
    result.transcript.push_back("down " + std::to_string(i) + " " + frame);
    for (const auto& msg : peers[i].client.apply(decode(frame)).sends) peers[i].up.push_back(encode(msg));
  };
  auto act = [&](std::size_t i) {
    Peer& peer = peers[i];
    EditOp op = factory.make(i, peer.made++, peer.client.overlay());
    --peer.budget;
    if (auto frame = peer.client.submit(std::move(op))) peer.up.push_back(encode(*frame));
  };

  enum class Action { Act, Up, Down };
  std::vector<std::pair<Action, std::size_t>> enabled;
  for (;;) {
    enabled.clear();
    for (std::size_t i = 0; i < peers.size(); ++i) {
      if (peers[i].budget > 0 && peers[i].client.phase() == ClientPhase::Synced) enabled.emplace_back(Action::Act, i);
      if (!peers[i].up.empty()) enabled.emplace_back(Action::Up, i);
      if (!peers[i].down.empty()) enabled.emplace_back(Action::Down, i);
    }
    if (enabled.empty()) break;
    const auto [action, i] = enabled[std::uniform_int_distribution<std::size_t>(0, enabled.size() - 1)(rng)];
    switch (action) {
      case Action::Act: act(i); break;
      case Action::Up: deliver_to_server(i); break;
      case Action::Down: deliver_to_client(i); break;
    }
  }

  for (const auto& peer : peers) {
    result.client_digests.push_back(document_digest(peer.client.document()));
    result.pending_left += peer.client.pending().size();
  }
  result.server_document = server.document();
  result.server_digest = document_digest(result.server_document);
  result.participants = server.participants();
  return result;
}

}  // namespace spatialprompt::session
