#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

#include <cmath>

#include "spatialprompt/backend.hpp"

namespace spatialprompt {

namespace {

struct Url {
  std::string origin;  // scheme://host[:port]
  std::string path;    // starts with '/' or empty
};

Url split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw Error(ErrorCode::ConfigError, "URL needs a scheme: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, ""};
  return {url.substr(0, path_start), url.substr(path_start)};
}

bool is_absolute(const std::string& url) {
  return url.rfind("http://", 0) == 0 || url.rfind("https://", 0) == 0;
}

httplib::Client make_client(const std::string& origin) {
  httplib::Client client(origin);
  client.set_connection_timeout(5);
  client.set_read_timeout(30);
  client.set_write_timeout(30);
  return client;
}

}  // namespace

RemoteBackend::RemoteBackend(BackendConfig config, Clock& clock) : config_(std::move(config)), clock_(clock) {
  check_config(config_);
  if (config_.kind != BackendKind::Remote) throw Error(ErrorCode::ConfigError, "RemoteBackend needs kind=remote");
  split_url(config_.endpoint);
}

namespace {

// One logical HTTP call: transport failures and 5xx are retried up to
// `max_retries` times with doubling back-off; other non-2xx fail at once.
template <class Send>
std::string call_with_retries(const BackendConfig& config, Clock& clock, const std::string& what, Send&& send,
                              const bool* abort = nullptr) {
  std::string last_error;
  bool last_was_transport = false;
  for (int attempt = 0; attempt <= config.max_retries; ++attempt) {
    if (attempt > 0) clock.sleep_for(config.retry_backoff * std::pow(2.0, attempt - 1));
    httplib::Result res = send();
    if (!res) {
      if (abort != nullptr && *abort) break;
      last_was_transport = true;
      last_error = what + ": " + httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 200 && res->status < 300) return res->body;
    last_was_transport = false;
    last_error = what + ": HTTP " + std::to_string(res->status) + " " + res->body;
    if (res->status < 500) break;
  }
  throw Error(last_was_transport ? ErrorCode::NetworkError : ErrorCode::BackendRejected, last_error);
}

Json parse_body(const std::string& body, const std::string& what) {
  Json j = Json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw Error(ErrorCode::BackendRejected, what + ": response is not a JSON object");
  return j;
}

}  // namespace

std::string RemoteBackend::submit(const GenerationRequest& req) {
  const Url base = split_url(config_.endpoint);
  const Json body{{"face_count", req.target_face_count}, {"prompt", render_backend_prompt(req)}, {"seed", req.seed}};
  const std::string payload = body.dump();
  const httplib::Headers headers{{"Authorization", "Bearer " + config_.api_key}};
  const std::string response = call_with_retries(config_, clock_, "create task", [&] {
    auto client = make_client(base.origin);
    return client.Post(base.path + "/tasks", headers, payload, "application/json");
  });
  const Json j = parse_body(response, "create task");
  if (j.contains("task_id") && j["task_id"].is_string()) return j["task_id"].get<std::string>();
  if (j.contains("result") && j["result"].is_string()) return j["result"].get<std::string>();
  throw Error(ErrorCode::BackendRejected, "create task: response lacks task_id");
}

TaskStatus RemoteBackend::poll(const std::string& task_id) {
  const Url base = split_url(config_.endpoint);
  const httplib::Headers headers{{"Authorization", "Bearer " + config_.api_key}};
  const std::string response = call_with_retries(config_, clock_, "poll task", [&] {
    auto client = make_client(base.origin);
    return client.Get(base.path + "/tasks/" + httplib::detail::encode_url(task_id), headers);
  });
  const Json j = parse_body(response, "poll task");

  TaskStatus status;
  const char* state_key = j.contains("state") ? "state" : "status";
  if (!j.contains(state_key) || !j[state_key].is_string())
    throw Error(ErrorCode::BackendRejected, "poll task: response lacks state");
  status.state = parse_task_state(j[state_key].get<std::string>());
  if (j.contains("progress") && j["progress"].is_number()) status.progress = j["progress"].get<int>();
  if (j.contains("failure_reason") && j["failure_reason"].is_string())
    status.failure_reason = j["failure_reason"].get<std::string>();
  if (status.state != TaskState::Succeeded) return status;

  std::string asset_url;
  if (j.contains("asset_url") && j["asset_url"].is_string()) {
    asset_url = j["asset_url"].get<std::string>();
  } else if (j.contains("model_urls") && j["model_urls"].is_object() && j["model_urls"].contains("obj")) {
    asset_url = j["model_urls"]["obj"].get<std::string>();
  } else {
    throw Error(ErrorCode::MalformedAsset, "succeeded task without asset_url");
  }
  const Url target = is_absolute(asset_url) ? split_url(asset_url) : Url{base.origin, base.path + asset_url};

  bool too_large = false;
  const std::size_t cap = config_.max_asset_bytes;
  std::string bytes;
  try {
    call_with_retries(config_, clock_, "download asset", [&] {
      bytes.clear();
      auto client = make_client(target.origin);
      return client.Get(target.path.empty() ? "/" : target.path, headers,
                        [&](const char* data, std::size_t len) {
                          if (bytes.size() + len > cap) {
                            too_large = true;
                            return false;
                          }
                          bytes.append(data, len);
                          return true;
                        });
    }, &too_large);
  } catch (const Error&) {
    if (too_large) throw Error(ErrorCode::AssetTooLarge, "asset exceeds " + std::to_string(cap) + " bytes");
    throw;
  }
  try {
    status.asset = load_mesh_obj(bytes);
  } catch (const Error& e) {
    throw Error(ErrorCode::MalformedAsset, e.what());
  }
  if (status.asset->triangles.empty()) throw Error(ErrorCode::MalformedAsset, "asset has no faces");
  return status;
}

}  // namespace spatialprompt
