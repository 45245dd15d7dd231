#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "spatialprompt/mesh.hpp"
#include "spatialprompt/prompt.hpp"

namespace spatialprompt {

using Seconds = std::chrono::duration<double>;

/// Time source for polling and retry back-off; swapped for ManualClock in tests.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual Seconds now() = 0;
  virtual void sleep_for(Seconds d) = 0;
};

class SystemClock final : public Clock {
 public:
  Seconds now() override;
  void sleep_for(Seconds d) override;
};

/// Deterministic clock: sleeping advances time instantly and is recorded.
class ManualClock final : public Clock {
 public:
  Seconds now() override;
  void sleep_for(Seconds d) override;
  std::vector<double> sleeps() const;

 private:
  mutable std::mutex mu_;
  Seconds now_{0.0};
  std::vector<double> sleeps_;
};

enum class BackendKind { Mock, Remote };
std::string_view to_string(BackendKind k) noexcept;

struct BackendConfig {
  BackendKind kind = BackendKind::Mock;
  std::string endpoint;  // remote only, e.g. http://127.0.0.1:8080
  std::string api_key;   // remote only
  Seconds poll_initial{2.0};
  double poll_multiplier = 1.5;
  Seconds poll_cap{15.0};
  Seconds overall_timeout{300.0};
  int max_retries = 3;  // per HTTP call, on transport failure or 5xx
  Seconds retry_backoff{0.5};
  std::size_t max_asset_bytes = 64u << 20;
};

/// Throws ConfigError when the config is unusable (missing api_key/endpoint for
/// remote, non-positive timeouts, multiplier <= 1).
void check_config(const BackendConfig& config);

/// Geometric poll intervals: initial, x multiplier, capped.
class PollBackoff {
 public:
  explicit PollBackoff(const BackendConfig& config);
  Seconds next();

 private:
  Seconds current_;
  double multiplier_;
  Seconds cap_;
};

enum class TaskState { Pending, Running, Succeeded, Failed };
std::string_view to_string(TaskState s) noexcept;
TaskState parse_task_state(std::string_view text);

struct TaskStatus {
  TaskState state = TaskState::Pending;
  std::optional<int> progress;
  std::optional<std::string> failure_reason;
  std::optional<TriangleMesh> asset;  // present iff Succeeded
};

class GenerationBackend {
 public:
  virtual ~GenerationBackend() = default;
  virtual BackendKind kind() const = 0;
  virtual std::string submit(const GenerationRequest& req) = 0;
  virtual TaskStatus poll(const std::string& task_id) = 0;
};

/// Procedural stand-in: completes on the first poll with mock_generate output.
class MockBackend final : public GenerationBackend {
 public:
  BackendKind kind() const override { return BackendKind::Mock; }
  std::string submit(const GenerationRequest& req) override;
  TaskStatus poll(const std::string& task_id) override;

 private:
  std::mutex mu_;
  std::map<std::string, GenerationRequest> tasks_;
};

/// REST adapter: POST /tasks, GET /tasks/{id}, GET asset_url (OBJ).
class RemoteBackend final : public GenerationBackend {
 public:
  RemoteBackend(BackendConfig config, Clock& clock);
  BackendKind kind() const override { return BackendKind::Remote; }
  std::string submit(const GenerationRequest& req) override;
  TaskStatus poll(const std::string& task_id) override;

 private:
  BackendConfig config_;
  Clock& clock_;
};

std::unique_ptr<GenerationBackend> make_backend(const BackendConfig& config, Clock& clock);

/// Tube radius used by the mock for strokes of a component.
double mock_tube_radius(const Component& component);

/// Closed 8-gon tubes along every scaffold edge plus an octahedron per junction node.
TriangleMesh mock_generate(const GenerationRequest& req);

struct FitResult {
  TriangleMesh mesh;
  double scale = 1.0;
  int zero_extent_axes = 0;  // axes ignored when choosing the scale
};

/// Uniform scale to the tightest box axis, then bounding-box center onto box center.
FitResult enforce_fit(const TriangleMesh& mesh, const OrientedBox& box);

struct GenerationMetadata {
  BackendKind backend = BackendKind::Mock;
  std::int64_t elapsed_ms = 0;
  std::string task_id;
  bool enforced = false;
  double fit_scale = 1.0;
  bool degenerate_fit = false;
};

struct GenerationResult {
  TriangleMesh mesh;
  GenerationMetadata metadata;
};

/// submit, poll with geometric back-off until done or timed out, then (remote only) enforce_fit.
GenerationResult generate(const GenerationRequest& req, GenerationBackend& backend, const BackendConfig& config,
                          Clock& clock);
GenerationResult generate(const GenerationRequest& req, const BackendConfig& config, Clock& clock);

}  // namespace spatialprompt
