#include "spatialprompt/backend.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <thread>

namespace spatialprompt {

Seconds SystemClock::now() {
  return std::chrono::duration_cast<Seconds>(std::chrono::steady_clock::now().time_since_epoch());
}

void SystemClock::sleep_for(Seconds d) {
  if (d.count() > 0.0) std::this_thread::sleep_for(d);
}

Seconds ManualClock::now() {
  std::lock_guard lock(mu_);
  return now_;
}

void ManualClock::sleep_for(Seconds d) {
  std::lock_guard lock(mu_);
  sleeps_.push_back(d.count());
  now_ += d;
}

std::vector<double> ManualClock::sleeps() const {
  std::lock_guard lock(mu_);
  return sleeps_;
}

std::string_view to_string(BackendKind k) noexcept { return k == BackendKind::Mock ? "mock" : "remote"; }

void check_config(const BackendConfig& c) {
  if (!(c.poll_initial.count() > 0.0) || !(c.poll_cap.count() > 0.0) || !(c.overall_timeout.count() > 0.0))
    throw Error(ErrorCode::ConfigError, "poll intervals and timeout must be positive");
  if (!(c.poll_multiplier > 1.0)) throw Error(ErrorCode::ConfigError, "poll multiplier must exceed 1");
  if (c.max_retries < 0) throw Error(ErrorCode::ConfigError, "negative retry count");
  if (c.kind == BackendKind::Remote) {
    if (c.api_key.empty()) throw Error(ErrorCode::ConfigError, "remote backend requires an api key");
    if (c.endpoint.empty()) throw Error(ErrorCode::ConfigError, "remote backend requires an endpoint URL");
  }
}

PollBackoff::PollBackoff(const BackendConfig& config)
    : current_(config.poll_initial), multiplier_(config.poll_multiplier), cap_(config.poll_cap) {}

Seconds PollBackoff::next() {
  const Seconds out = std::min(current_, cap_);
  current_ = std::min(current_ * multiplier_, cap_);
  return out;
}

std::string_view to_string(TaskState s) noexcept {
  switch (s) {
    case TaskState::Pending: return "Pending";
    case TaskState::Running: return "Running";
    case TaskState::Succeeded: return "Succeeded";
    case TaskState::Failed: return "Failed";
  }
  return "Pending";
}

TaskState parse_task_state(std::string_view text) {
  std::string t;
  for (char c : text) t.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (t == "pending" || t == "queued") return TaskState::Pending;
  if (t == "running" || t == "in_progress") return TaskState::Running;
  if (t == "succeeded" || t == "success") return TaskState::Succeeded;
  if (t == "failed" || t == "canceled" || t == "expired") return TaskState::Failed;
  throw Error(ErrorCode::BackendRejected, "unknown task state '" + std::string(text) + "'");
}

// ---------------------------------------------------------------------------

std::string MockBackend::submit(const GenerationRequest& req) {
  std::lock_guard lock(mu_);
  const std::string id = "mock-" + req.request_id + "-" + std::to_string(tasks_.size());
  tasks_.emplace(id, req);
  return id;
}

TaskStatus MockBackend::poll(const std::string& task_id) {
  GenerationRequest req;
  {
    std::lock_guard lock(mu_);
    auto it = tasks_.find(task_id);
    if (it == tasks_.end()) throw Error(ErrorCode::BackendRejected, "unknown task " + task_id);
    req = it->second;
  }
  TaskStatus status;
  status.state = TaskState::Succeeded;
  status.progress = 100;
  status.asset = mock_generate(req);
  return status;
}

std::unique_ptr<GenerationBackend> make_backend(const BackendConfig& config, Clock& clock) {
  check_config(config);
  if (config.kind == BackendKind::Mock) return std::make_unique<MockBackend>();
  return std::make_unique<RemoteBackend>(config, clock);
}

// ---------------------------------------------------------------------------

FitResult enforce_fit(const TriangleMesh& mesh, const OrientedBox& box) {
  if (mesh.vertices.empty() || mesh.triangles.empty()) throw Error(ErrorCode::EmptyMesh);
  std::array<double, 3> lo{}, hi{};
  lo.fill(std::numeric_limits<double>::infinity());
  hi.fill(-std::numeric_limits<double>::infinity());
  std::vector<Vec3> local;
  local.reserve(mesh.vertices.size());
  for (const auto& v : mesh.vertices) {
    local.push_back(box.to_local(v));
    for (std::size_t i = 0; i < 3; ++i) {
      lo[i] = std::min(lo[i], local.back()[static_cast<int>(i)]);
      hi[i] = std::max(hi[i], local.back()[static_cast<int>(i)]);
    }
  }
  const double largest = std::max({hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2]});
  FitResult out;
  out.scale = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < 3; ++i) {
    const double extent = hi[i] - lo[i];
    if (!(extent > 1e-12 * largest) || extent <= 0.0) {
      ++out.zero_extent_axes;
      continue;
    }
    out.scale = std::min(out.scale, 2.0 * box.half_extents[i] / extent);
  }
  if (out.zero_extent_axes == 3) throw Error(ErrorCode::DegenerateMesh, "mesh has zero extent on every axis");

  const Vec3 mid{(lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0, (lo[2] + hi[2]) / 2.0};
  out.mesh.triangles = mesh.triangles;
  out.mesh.vertices.reserve(local.size());
  for (const auto& l : local) out.mesh.vertices.push_back(box.from_local((l - mid) * out.scale));
  return out;
}

// ---------------------------------------------------------------------------

GenerationResult generate(const GenerationRequest& req, GenerationBackend& backend, const BackendConfig& config,
                          Clock& clock) {
  check_config(config);
  const Seconds start = clock.now();
  const Seconds deadline = start + config.overall_timeout;

  GenerationResult result;
  result.metadata.backend = backend.kind();
  result.metadata.task_id = backend.submit(req);

  PollBackoff backoff(config);
  TaskStatus status;
  for (;;) {
    status = backend.poll(result.metadata.task_id);
    if (status.state == TaskState::Succeeded) break;
    if (status.state == TaskState::Failed)
      throw Error(ErrorCode::BackendRejected, status.failure_reason.value_or("task failed"));
    const Seconds remaining = deadline - clock.now();
    if (remaining.count() <= 0.0) throw Error(ErrorCode::Timeout, "task " + result.metadata.task_id);
    clock.sleep_for(std::min(backoff.next(), remaining));
    if (clock.now() >= deadline) throw Error(ErrorCode::Timeout, "task " + result.metadata.task_id);
  }
  if (!status.asset) throw Error(ErrorCode::MalformedAsset, "succeeded task without an asset");

  if (backend.kind() == BackendKind::Remote) {
    FitResult fit = enforce_fit(*status.asset, req.constraint_set.global_box);
    result.mesh = std::move(fit.mesh);
    result.metadata.enforced = true;
    result.metadata.fit_scale = fit.scale;
    result.metadata.degenerate_fit = fit.zero_extent_axes > 0;
  } else {
    result.mesh = std::move(*status.asset);
  }
  result.metadata.elapsed_ms = static_cast<std::int64_t>(std::llround((clock.now() - start).count() * 1000.0));
  return result;
}

GenerationResult generate(const GenerationRequest& req, const BackendConfig& config, Clock& clock) {
  auto backend = make_backend(config, clock);
  return generate(req, *backend, config, clock);
}

}  // namespace spatialprompt
