#include <gtest/gtest.h>

#include "generators.hpp"
#include "process.hpp"
#include "stub_service.hpp"
#include "spatialprompt/constraints.hpp"
#include "spatialprompt/mesh.hpp"
#include "spatialprompt/validator.hpp"

namespace sp = spatialprompt;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override { dir.write("sketch.json", sp::canonical_serialize(sptest::cube_wireframe(0.6))); }

  sptest::CommandResult run(const std::string& args, const std::string& env = "") const {
    return sptest::run_command("cd '" + dir.path().string() + "' && env -u SPATIALPROMPT_API_KEY " + env + " '" +
                               SPATIALPROMPT_CLI + "' " + args + " 2>/dev/null");
  }

  sptest::TempDir dir;
};

}  // namespace

TEST_F(Cli, PipelineExitCodes) {
  ASSERT_EQ(run("compile --in sketch.json --out cs.json").exit_code, 0);
  ASSERT_EQ(run("generate --in sketch.json --prompt 'a cube' --out mesh.obj --report gen.json").exit_code, 0);
  EXPECT_TRUE(sp::parse_report(dir.read("gen.json")).overall_pass);
  EXPECT_EQ(run("validate --mesh mesh.obj --constraints cs.json --report val.json").exit_code, 0);

  auto mesh = sp::load_mesh_obj(dir.read("mesh.obj"));
  for (auto& v : mesh.vertices) v.x += 10.0;
  dir.write("far.obj", sp::export_mesh_obj(mesh));
  EXPECT_EQ(run("validate --mesh far.obj --constraints cs.json --report far.json").exit_code, 1);
  EXPECT_FALSE(sp::parse_report(dir.read("far.json")).overall_pass);
}

TEST_F(Cli, CompileToStdoutMatchesLibrary) {
  const auto r = run("compile --in sketch.json --out -");
  ASSERT_EQ(r.exit_code, 0);
  EXPECT_EQ(r.out, sp::serialize_constraints(sp::compile(sptest::cube_wireframe(0.6))));
}

TEST_F(Cli, ReplayAndDigest) {
  const auto r = run("replay --in sketch.json");
  EXPECT_EQ(r.exit_code, 0);
  const std::string digest = sp::document_digest(sptest::cube_wireframe(0.6));
  EXPECT_EQ(r.out, digest + "\n");
  EXPECT_EQ(run("digest --in sketch.json").out, digest + "\n");

  auto j = sp::Json::parse(dir.read("sketch.json"));
  j["strokes"][0]["points"][0][0] = 0.25;  // edit a stroke without a matching op
  dir.write("tampered.json", j.dump());
  EXPECT_EQ(run("replay --in tampered.json").exit_code, 1);

  dir.write("blob.bin", "abc");
  EXPECT_EQ(run("digest --in blob.bin").out, "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad\n");
}

TEST_F(Cli, InputErrorsExitTwo) {
  EXPECT_EQ(run("generate --in sketch.json --out m.obj --report r.json").exit_code, 2);  // no prompt
  EXPECT_EQ(run("compile --in missing.json --out cs.json").exit_code, 2);
  dir.write("bad.json", "{\"doc_id\":");
  EXPECT_EQ(run("compile --in bad.json --out cs.json").exit_code, 2);
  EXPECT_EQ(run("generate --in sketch.json --prompt '   ' --out m.obj --report r.json").exit_code, 2);
  EXPECT_EQ(run("frobnicate").exit_code, 2);
  EXPECT_EQ(run("").exit_code, 2);
}

TEST_F(Cli, RemoteWithoutKeyIsConfigError) {
  EXPECT_EQ(run("generate --in sketch.json --prompt x --out m.obj --report r.json --backend remote "
                "--endpoint http://127.0.0.1:1")
                .exit_code,
            2);
  dir.write("cfg.json", R"({"backend":"remote","endpoint":"http://127.0.0.1:1"})");
  EXPECT_EQ(run("--config cfg.json generate --in sketch.json --prompt x --out m.obj --report r.json").exit_code, 2);
}

TEST_F(Cli, RemoteTimeoutExitsThree) {
  sptest::StubService stub(sptest::StubService::Mode::NeverComplete);
  const auto r = run("generate --in sketch.json --prompt x --out m.obj --report r.json --backend remote --endpoint " +
                         stub.endpoint() + " --poll-initial 0.05 --poll-cap 0.1 --timeout 0.5",
                     "SPATIALPROMPT_API_KEY=secret");
  EXPECT_EQ(r.exit_code, 3);
  EXPECT_EQ(stub.last_authorization(), "Bearer secret");
}

TEST_F(Cli, RemoteSuccessThroughConfigFile) {
  sptest::StubService stub(sptest::StubService::Mode::Success);
  dir.write("cfg.json", "{\"backend\":\"remote\",\"endpoint\":\"" + stub.endpoint() +
                            "\",\"api_key\":\"from-file\",\"poll_initial\":0.01,\"poll_cap\":0.02}");
  const auto r = run("--config cfg.json generate --in sketch.json --prompt x --out m.obj --report r.json");
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_EQ(stub.last_authorization(), "Bearer from-file");
  EXPECT_EQ(sp::load_mesh_obj(dir.read("m.obj")).triangles.size(), 12u);
}
