// spatialprompt: batch pipeline commands and the collaborative session server.
//
// Exit codes: 0 success, 1 validation failure, 2 input or config error, 3 backend error.

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "spatialprompt/backend.hpp"
#include "spatialprompt/constraints.hpp"
#include "spatialprompt/prompt.hpp"
#include "spatialprompt/sketch.hpp"
#include "spatialprompt/validator.hpp"
#include "spatialprompt/ws_server.hpp"

namespace sp = spatialprompt;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitInput = 2;
constexpr int kExitBackend = 3;

int exit_code_for(sp::ErrorCode code) {
  switch (code) {
    case sp::ErrorCode::Timeout:
    case sp::ErrorCode::BackendRejected:
    case sp::ErrorCode::NetworkError:
    case sp::ErrorCode::MalformedAsset:
    case sp::ErrorCode::EmptyConstraintSet:
    case sp::ErrorCode::DegenerateMesh:
    case sp::ErrorCode::AssetTooLarge:
      return kExitBackend;
    default:
      return kExitInput;
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw sp::Error(sp::ErrorCode::ConfigError, "cannot read " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_output(const std::string& path, const std::string& bytes) {
  if (path == "-") {
    std::cout << bytes;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !out.write(bytes.data(), static_cast<std::streamsize>(bytes.size())))
    throw sp::Error(sp::ErrorCode::ConfigError, "cannot write " + path);
}

// Layering: built-in defaults, then the config file, then the environment,
// then explicit flags.
struct Settings {
  sp::BackendConfig backend;
  sp::ValidationTolerances tolerances;
  sp::CompileParams compile;
  std::string listen = "127.0.0.1:8080";
};

struct Flags {
  std::string config_path;
  std::optional<std::string> backend;
  std::optional<std::string> endpoint;
  std::optional<double> poll_initial, poll_cap, timeout;
  std::optional<double> containment_fraction, proportion_tolerance, proximity_fraction, proximity_floor;
  std::optional<double> spacing, epsilon;
  std::optional<std::string> listen;
};

sp::BackendKind parse_backend(const std::string& name) {
  if (name == "mock") return sp::BackendKind::Mock;
  if (name == "remote") return sp::BackendKind::Remote;
  throw sp::Error(sp::ErrorCode::ConfigError, "backend must be mock or remote, got '" + name + "'");
}

void apply_config_file(Settings& s, const std::string& path) {
  using sp::json_io::number;
  constexpr auto code = sp::ErrorCode::ConfigError;
  const sp::Json j = sp::json_io::parse_object(read_file(path), code);
  auto num = [&](const sp::Json& obj, const char* key, auto&& apply) {
    if (obj.contains(key)) apply(number(obj[key], code));
  };
  if (j.contains("backend")) s.backend.kind = parse_backend(sp::json_io::string(j["backend"], code));
  if (j.contains("endpoint")) s.backend.endpoint = sp::json_io::string(j["endpoint"], code);
  if (j.contains("api_key")) s.backend.api_key = sp::json_io::string(j["api_key"], code);
  if (j.contains("listen")) s.listen = sp::json_io::string(j["listen"], code);
  num(j, "poll_initial", [&](double v) { s.backend.poll_initial = sp::Seconds(v); });
  num(j, "poll_cap", [&](double v) { s.backend.poll_cap = sp::Seconds(v); });
  num(j, "timeout", [&](double v) { s.backend.overall_timeout = sp::Seconds(v); });
  num(j, "resample_spacing", [&](double v) { s.compile.resample_spacing = v; });
  num(j, "epsilon", [&](double v) { s.compile.epsilon = v; });
  if (j.contains("tolerances")) {
    const sp::Json& t = j["tolerances"];
    num(t, "containment_fraction", [&](double v) { s.tolerances.containment_min_fraction = v; });
    num(t, "proportion", [&](double v) { s.tolerances.proportion_tolerance = v; });
    num(t, "proximity_fraction", [&](double v) { s.tolerances.proximity_fraction = v; });
    num(t, "proximity_floor", [&](double v) { s.tolerances.proximity_floor = v; });
  }
}

Settings resolve(const Flags& f) {
  Settings s;
  if (!f.config_path.empty()) apply_config_file(s, f.config_path);
  if (const char* key = std::getenv("SPATIALPROMPT_API_KEY"); key != nullptr && *key != '\0') s.backend.api_key = key;
  if (const char* url = std::getenv("SPATIALPROMPT_BACKEND_URL"); url != nullptr && *url != '\0')
    s.backend.endpoint = url;

  if (f.backend) s.backend.kind = parse_backend(*f.backend);
  if (f.endpoint) s.backend.endpoint = *f.endpoint;
  if (f.poll_initial) s.backend.poll_initial = sp::Seconds(*f.poll_initial);
  if (f.poll_cap) s.backend.poll_cap = sp::Seconds(*f.poll_cap);
  if (f.timeout) s.backend.overall_timeout = sp::Seconds(*f.timeout);
  if (f.containment_fraction) s.tolerances.containment_min_fraction = *f.containment_fraction;
  if (f.proportion_tolerance) s.tolerances.proportion_tolerance = *f.proportion_tolerance;
  if (f.proximity_fraction) s.tolerances.proximity_fraction = *f.proximity_fraction;
  if (f.proximity_floor) s.tolerances.proximity_floor = *f.proximity_floor;
  if (f.spacing) s.compile.resample_spacing = *f.spacing;
  if (f.epsilon) s.compile.epsilon = *f.epsilon;
  if (f.listen) s.listen = *f.listen;
  return s;
}

void add_tolerance_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--containment-fraction", f.containment_fraction, "Minimum fraction of vertices inside the box");
  cmd->add_option("--proportion-tol", f.proportion_tolerance, "Allowed aspect deviation");
  cmd->add_option("--proximity-fraction", f.proximity_fraction, "Scaffold p95 limit as a fraction of the diagonal");
  cmd->add_option("--proximity-floor", f.proximity_floor, "Scaffold p95 lower limit in meters");
}

void add_compile_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--spacing", f.spacing, "Resample spacing in meters");
  cmd->add_option("--epsilon", f.epsilon, "Junction distance in meters");
}

void add_backend_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--backend", f.backend, "mock or remote");
  cmd->add_option("--endpoint", f.endpoint, "Remote service base URL");
  cmd->add_option("--poll-initial", f.poll_initial, "First poll interval in seconds");
  cmd->add_option("--poll-cap", f.poll_cap, "Longest poll interval in seconds");
  cmd->add_option("--timeout", f.timeout, "Overall generation timeout in seconds");
}

void print_report_summary(const sp::ValidationReport& report) {
  for (const auto& c : report.checks)
    if (!c.pass)
      std::cerr << (c.kind == sp::CheckKind::Hard ? "FAIL " : "warn ") << c.name << ": measured " << c.measured
                << ", tolerance " << c.tolerance << "\n";
  std::cerr << "score " << report.score << (report.overall_pass ? ", pass\n" : ", hard check failed\n");
}

std::pair<std::string, unsigned short> split_listen(const std::string& listen) {
  const auto colon = listen.rfind(':');
  if (colon == std::string::npos) throw sp::Error(sp::ErrorCode::ConfigError, "--listen expects host:port");
  int port = 0;
  try {
    port = std::stoi(listen.substr(colon + 1));
  } catch (const std::exception&) {
    port = -1;
  }
  if (port < 0 || port > 65535) throw sp::Error(sp::ErrorCode::ConfigError, "bad port in '" + listen + "'");
  return {listen.substr(0, colon), static_cast<unsigned short>(port)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sketch-constrained 3D generation: compile, generate, validate, and serve shared sketches."};
  app.require_subcommand(1);
  Flags flags;
  app.add_option("--config", flags.config_path, "JSON config file")->check(CLI::ExistingFile);

  std::string in_path, out_path, report_path, mesh_path, constraints_path, prompt;
  std::vector<std::string> style_tags;
  std::optional<std::string> negative;
  std::uint64_t seed = 0;
  std::int64_t face_count = sp::kDefaultFaceCount;

  auto* compile_cmd = app.add_subcommand("compile", "Compile a sketch into a constraint set");
  compile_cmd->add_option("--in", in_path, "Sketch document")->required();
  compile_cmd->add_option("--out", out_path, "Constraint file, or - for stdout")->required();
  add_compile_flags(compile_cmd, flags);

  auto* generate_cmd = app.add_subcommand("generate", "Generate and validate a mesh from a sketch and a prompt");
  generate_cmd->add_option("--in", in_path, "Sketch document")->required();
  generate_cmd->add_option("--prompt", prompt, "Semantic prompt text")->required();
  generate_cmd->add_option("--seed", seed, "Generation seed");
  generate_cmd->add_option("--style", style_tags, "Style tag (repeatable)");
  generate_cmd->add_option("--negative", negative, "Negative prompt text");
  generate_cmd->add_option("--face-count", face_count, "Target face count");
  generate_cmd->add_option("--out", out_path, "OBJ output, or - for stdout")->required();
  generate_cmd->add_option("--report", report_path, "Validation report output")->required();
  add_backend_flags(generate_cmd, flags);
  add_compile_flags(generate_cmd, flags);
  add_tolerance_flags(generate_cmd, flags);

  auto* validate_cmd = app.add_subcommand("validate", "Check a mesh against a constraint set");
  validate_cmd->add_option("--mesh", mesh_path, "OBJ mesh")->required();
  validate_cmd->add_option("--constraints", constraints_path, "Constraint file")->required();
  validate_cmd->add_option("--report", report_path, "Report output, or - for stdout")->required();
  add_tolerance_flags(validate_cmd, flags);

  auto* serve_cmd = app.add_subcommand("serve", "Run the collaborative session server");
  serve_cmd->add_option("--listen", flags.listen, "host:port (default 127.0.0.1:8080)");
  add_backend_flags(serve_cmd, flags);
  add_tolerance_flags(serve_cmd, flags);

  auto* replay_cmd = app.add_subcommand("replay", "Re-apply a document's op log and compare digests");
  replay_cmd->add_option("--in", in_path, "Sketch document")->required();

  auto* digest_cmd = app.add_subcommand("digest", "Print the SHA-256 digest of a document or file");
  digest_cmd->add_option("--in", in_path, "Input file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    const Settings settings = resolve(flags);

    if (*compile_cmd) {
      const sp::SketchDocument doc = sp::parse_document(read_file(in_path));
      write_output(out_path, sp::serialize_constraints(sp::compile(doc, settings.compile)));
      return kExitOk;
    }

    if (*generate_cmd) {
      sp::check_config(settings.backend);
      const sp::SketchDocument doc = sp::parse_document(read_file(in_path));
      const sp::ConstraintSet cs = sp::compile(doc, settings.compile);
      sp::AssembleOptions options;
      options.target_face_count = face_count;
      const sp::GenerationRequest req =
          sp::assemble(cs, sp::SemanticPrompt{prompt, style_tags, negative}, seed, options);
      sp::SystemClock clock;
      const sp::GenerationResult result = sp::generate(req, settings.backend, clock);
      const sp::ValidationReport report = sp::validate(result.mesh, cs, settings.tolerances);
      write_output(out_path, sp::export_mesh_obj(result.mesh));
      write_output(report_path, sp::serialize_report(report));
      std::cerr << "request " << req.request_id << " via " << sp::to_string(result.metadata.backend) << " in "
                << result.metadata.elapsed_ms << " ms\n";
      print_report_summary(report);
      return report.overall_pass ? kExitOk : kExitValidation;
    }

    if (*validate_cmd) {
      const sp::TriangleMesh mesh = sp::load_mesh_obj(read_file(mesh_path));
      const sp::ConstraintSet cs = sp::parse_constraints(read_file(constraints_path));
      const sp::ValidationReport report = sp::validate(mesh, cs, settings.tolerances);
      write_output(report_path, sp::serialize_report(report));
      print_report_summary(report);
      return report.overall_pass ? kExitOk : kExitValidation;
    }

    if (*replay_cmd) {
      const sp::SketchDocument doc = sp::parse_document(read_file(in_path));
      const std::string stored = sp::document_digest(doc);
      const std::string replayed = sp::document_digest(sp::replay(doc));
      std::cout << replayed << "\n";
      if (replayed != stored) {
        std::cerr << "replayed digest differs from stored document " << stored << "\n";
        return kExitValidation;
      }
      return kExitOk;
    }

    if (*digest_cmd) {
      // Sketch documents hash in canonical form, so formatting differences do not matter.
      const std::string bytes = read_file(in_path);
      std::string digest;
      try {
        digest = sp::document_digest(sp::parse_document(bytes));
      } catch (const sp::Error&) {
        digest = sp::sha256_hex(bytes);
      }
      std::cout << digest << "\n";
      return kExitOk;
    }

    if (*serve_cmd) {
      sp::ServerOptions options;
      std::tie(options.address, options.port) = split_listen(settings.listen);
      options.backend = settings.backend;
      options.tolerances = settings.tolerances;

      // Block the stop signals before any thread starts so only sigwait sees them.
      sigset_t signals;
      sigemptyset(&signals);
      sigaddset(&signals, SIGINT);
      sigaddset(&signals, SIGTERM);
      pthread_sigmask(SIG_BLOCK, &signals, nullptr);

      sp::WebSocketServer server(options);
      const unsigned short port = server.start();
      std::cerr << "listening on ws://" << options.address << ":" << port << "/session/{id}\n";
      int received = 0;
      sigwait(&signals, &received);
      std::cerr << "stopping\n";
      server.stop();
      return kExitOk;
    }
  } catch (const sp::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
