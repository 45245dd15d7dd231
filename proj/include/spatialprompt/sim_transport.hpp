#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spatialprompt/session.hpp"

namespace spatialprompt::session {

struct SimulationConfig {
  std::size_t clients = 2;
  std::size_t ops_per_client = 20;
  std::uint64_t seed = 0;
};

struct SimulationResult {
  std::vector<std::string> client_digests;
  std::string server_digest;
  /// One line per delivered frame: "<direction> <client index> <frame>".
  std::vector<std::string> transcript;
  SketchDocument server_document;
  std::vector<Participant> participants;
  std::size_t applied = 0;
  std::size_t rejected = 0;
  std::size_t pending_left = 0;
};

/// In-process transport with per-connection FIFO queues. A seeded scheduler
/// picks which client acts or which queue head is delivered next, so a seed
/// fully determines the interleaving. Runs until every queue drains.
SimulationResult run_simulation(const SimulationConfig& config);

}  // namespace spatialprompt::session
