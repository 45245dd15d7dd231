#include <gtest/gtest.h>

#include "generators.hpp"
#include "stub_service.hpp"
#include "spatialprompt/backend.hpp"

namespace sp = spatialprompt;
using Mode = sptest::StubService::Mode;

namespace {

sp::GenerationRequest chair_request() {
  return sp::assemble(sp::compile(sptest::cube_wireframe(2.0)), {"a chair", {}, std::nullopt}, 1);
}

sp::BackendConfig remote_config(const std::string& endpoint) {
  sp::BackendConfig c;
  c.kind = sp::BackendKind::Remote;
  c.endpoint = endpoint;
  c.api_key = "test-key";
  return c;
}

sp::ErrorCode generate_error(const sp::BackendConfig& config, sp::Clock& clock) {
  try {
    sp::generate(chair_request(), config, clock);
  } catch (const sp::Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "generate succeeded";
  return sp::ErrorCode::ProtocolError;
}

}  // namespace

TEST(Remote, SuccessPathFitsIntoBox) {
  sptest::StubService stub(Mode::Success);
  stub.running_polls = 2;
  sp::ManualClock clock;
  const auto req = chair_request();
  const auto result = sp::generate(req, remote_config(stub.endpoint()), clock);
  EXPECT_EQ(stub.last_authorization(), "Bearer test-key");
  EXPECT_TRUE(result.metadata.enforced);
  EXPECT_EQ(result.metadata.task_id, "task-1");
  EXPECT_EQ(result.mesh.triangles.size(), 12u);
  for (const auto& v : result.mesh.vertices) EXPECT_TRUE(req.constraint_set.global_box.contains(v, 1e-9));
  EXPECT_EQ(clock.sleeps(), (std::vector<double>{2.0, 3.0}));
  EXPECT_EQ(stub.polls(), 3);
}

TEST(Remote, ServerErrorsExhaustRetries) {
  sptest::StubService stub(Mode::AlwaysServerError);
  sp::ManualClock clock;
  EXPECT_EQ(generate_error(remote_config(stub.endpoint()), clock), sp::ErrorCode::BackendRejected);
  EXPECT_EQ(stub.requests(), 4);  // first attempt plus 3 retries
  EXPECT_EQ(clock.sleeps(), (std::vector<double>{0.5, 1.0, 2.0}));
}

TEST(Remote, TransientErrorsRecover) {
  sptest::StubService stub(Mode::FlakyThenSuccess);
  stub.flaky_failures = 2;
  sp::ManualClock clock;
  EXPECT_NO_THROW(sp::generate(chair_request(), remote_config(stub.endpoint()), clock));
}

TEST(Remote, ClientErrorsAreNotRetried) {
  sptest::StubService stub(Mode::Unauthorized);
  sp::ManualClock clock;
  EXPECT_EQ(generate_error(remote_config(stub.endpoint()), clock), sp::ErrorCode::BackendRejected);
  EXPECT_EQ(stub.requests(), 1);
}

TEST(Remote, NeverCompletingTaskTimesOut) {
  sptest::StubService stub(Mode::NeverComplete);
  sp::ManualClock clock;
  EXPECT_EQ(generate_error(remote_config(stub.endpoint()), clock), sp::ErrorCode::Timeout);
  EXPECT_DOUBLE_EQ(clock.now().count(), 300.0);
}

TEST(Remote, OversizedAssetRejected) {
  sptest::StubService stub(Mode::OversizedAsset);
  stub.running_polls = 0;
  stub.oversized_bytes = 1 << 20;
  auto config = remote_config(stub.endpoint());
  config.max_asset_bytes = 64 * 1024;
  sp::ManualClock clock;
  EXPECT_EQ(generate_error(config, clock), sp::ErrorCode::AssetTooLarge);
}

TEST(Remote, UnreachableServiceIsNetworkError) {
  int port = 0;
  {
    sptest::StubService stub(Mode::Success);
    port = std::stoi(stub.endpoint().substr(stub.endpoint().rfind(':') + 1));
  }
  sp::ManualClock clock;
  EXPECT_EQ(generate_error(remote_config("http://127.0.0.1:" + std::to_string(port)), clock),
            sp::ErrorCode::NetworkError);
  EXPECT_EQ(clock.sleeps().size(), 3u);
}

TEST(Remote, MissingKeyFailsBeforeNetwork) {
  sptest::StubService stub(Mode::Success);
  auto config = remote_config(stub.endpoint());
  config.api_key.clear();
  sp::ManualClock clock;
  EXPECT_EQ(generate_error(config, clock), sp::ErrorCode::ConfigError);
  EXPECT_EQ(stub.requests(), 0);
}
