// geomedia: validate, import, inspect and serve multimedia scenes.
//
// Exit codes: 0 ok, 1 findings (invalid scene or input data), 2 operational
// error (unreadable file, bad address, bind failure).

#include <pthread.h>
#include <signal.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "geomedia/geomedia.hpp"
#include "geomedia/service/server.hpp"

namespace {

namespace fs = std::filesystem;
using geomedia::Error;

constexpr int kOk = 0;
constexpr int kFindings = 1;
constexpr int kOperational = 2;

struct ReadFailure {
  std::string message;
};

std::string read_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ReadFailure{"cannot read '" + path + "'"};
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void print_error(const Error& e) {
  std::cerr << "error[" << geomedia::to_string(e.code()) << "]";
  if (e.field_path()) std::cerr << " at " << *e.field_path();
  if (e.byte_offset()) std::cerr << " (byte " << *e.byte_offset() << ")";
  std::cerr << ": " << e.what() << "\n";
}

int cmd_validate(const std::string& path, bool as_json) {
  geomedia::Scene scene;
  try {
    scene = geomedia::parse_scene(read_input(path));
  } catch (const Error& e) {
    print_error(e);
    if (as_json) std::cout << nlohmann::json{{"valid", false}, {"error", e.what()}}.dump() << "\n";
    return kFindings;
  }
  const auto report = geomedia::validate_scene(scene);
  if (as_json) {
    nlohmann::json findings = nlohmann::json::array();
    for (const auto& f : report) findings.push_back({{"path", f.path}, {"message", f.message}});
    std::cout << nlohmann::json{{"valid", report.empty()}, {"findings", findings}}.dump() << "\n";
  } else {
    for (const auto& f : report) std::cout << f.path << ": " << f.message << "\n";
    std::cerr << path << ": " << report.size() << " finding(s)\n";
  }
  return report.empty() ? kOk : kFindings;
}

int cmd_import(const std::string& input, const std::string& output, const std::string& scene_id) {
  const std::string id = scene_id.empty() ? fs::path(input).stem().string() : scene_id;
  geomedia::Scene scene;
  try {
    scene = geomedia::import_legacy_episode(read_input(input), id);
  } catch (const Error& e) {
    print_error(e);
    return kFindings;
  }
  const auto report = geomedia::validate_scene(scene);
  for (const auto& f : report) std::cerr << f.path << ": " << f.message << "\n";
  const std::string text = geomedia::serialize_scene(scene);
  if (output.empty() || output == "-") {
    std::cout << text;
  } else {
    std::ofstream out(output, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) {
      std::cerr << "cannot write '" << output << "'\n";
      return kOperational;
    }
  }
  return report.empty() ? kOk : kFindings;
}

int cmd_inspect(const std::string& path, bool as_json) {
  geomedia::Scene scene;
  try {
    scene = geomedia::parse_scene(read_input(path));
  } catch (const Error& e) {
    print_error(e);
    return kFindings;
  }
  nlohmann::json kinds = nlohmann::json::object();
  for (auto k : geomedia::kAllMediaKinds) kinds[std::string(geomedia::to_string(k))] = 0;
  for (const auto& d : scene.documents) {
    kinds[std::string(geomedia::to_string(d.kind))] = kinds[std::string(geomedia::to_string(d.kind))].get<int>() + 1;
  }
  const nlohmann::json summary = {
      {"scene_id", scene.scene_id},
      {"documents", scene.documents.size()},
      {"entities",
       {{"pins", scene.pins.size()},
        {"web_boards", scene.web_boards.size()},
        {"extended_documents", scene.extended_documents.size()},
        {"slideshows", scene.slideshows.size()}}},
      {"guidance_mode", geomedia::to_string(scene.guidance.mode)},
      {"document_kinds", kinds},
      {"layers", scene.layers.size()},
      {"tilesets", scene.tileset_refs.size()},
  };
  if (as_json) {
    std::cout << summary.dump() << "\n";
    return kOk;
  }
  std::cout << "scene            " << scene.scene_id << "\n"
            << "guidance mode    " << summary["guidance_mode"].get<std::string>() << "\n"
            << "pins             " << scene.pins.size() << "\n"
            << "web boards       " << scene.web_boards.size() << "\n"
            << "extended docs    " << scene.extended_documents.size() << "\n"
            << "slideshows       " << scene.slideshows.size() << "\n"
            << "documents        " << scene.documents.size() << "\n";
  for (auto it = kinds.begin(); it != kinds.end(); ++it) {
    if (it.value().get<int>() > 0) std::cout << "  " << it.key() << " " << it.value().get<int>() << "\n";
  }
  return kOk;
}

bool split_address(const std::string& addr, std::string& host, int& port) {
  const auto colon = addr.rfind(':');
  if (colon == std::string::npos || colon == 0) return false;
  host = addr.substr(0, colon);
  if (host.size() > 2 && host.front() == '[' && host.back() == ']') host = host.substr(1, host.size() - 2);
  const std::string digits = addr.substr(colon + 1);
  if (digits.empty() || digits.size() > 5 || digits.find_first_not_of("0123456789") != std::string::npos) {
    return false;
  }
  port = std::stoi(digits);
  return port <= 65535;
}

int cmd_serve(const geomedia::service::ServiceConfig& base, const std::string& listen) {
  std::string host;
  int port = 0;
  if (!split_address(listen, host, port)) {
    std::cerr << "invalid listen address '" << listen << "' (expected host:port)\n";
    return kOperational;
  }
  if (!fs::is_directory(base.scene_dir)) {
    std::cerr << "scene directory '" << base.scene_dir.string() << "' does not exist\n";
    return kOperational;
  }

  // Handle SIGINT/SIGTERM on a dedicated thread; every other thread inherits
  // the blocked mask.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  std::unique_ptr<geomedia::service::SceneService> service;
  try {
    service = std::make_unique<geomedia::service::SceneService>(base);
  } catch (const std::exception& e) {
    std::cerr << "cannot start service: " << e.what() << "\n";
    return kOperational;
  }
  const int bound = service->bind(host, port);
  if (bound < 0) {
    std::cerr << "cannot listen on '" << listen << "'\n";
    return kOperational;
  }
  std::cerr << "serving " << base.scene_dir.string() << " on " << host << ":" << bound << "\n";

  std::thread watcher([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    service->stop();
  });
  const bool ok = service->run();
  // Release the watcher if the server stopped on its own.
  kill(getpid(), SIGTERM);
  watcher.join();
  service->sessions().flush();
  std::cerr << "shut down\n";
  return ok ? kOk : kOperational;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multimedia documents in 3D city scenes: validate, import, inspect, serve"};
  app.require_subcommand(1);

  std::string validate_path;
  bool validate_json = false;
  auto* validate = app.add_subcommand("validate", "Check a scene file; exit 0 iff no findings");
  validate->add_option("scene", validate_path, "Scene JSON file")->required();
  validate->add_flag("--json", validate_json, "Print the report as JSON");

  std::string import_input;
  std::string import_output;
  std::string import_id;
  auto* import = app.add_subcommand("import-legacy", "Convert an episode file into a scene file");
  import->add_option("episodes", import_input, "Legacy episode JSON")->required();
  import->add_option("-o,--output", import_output, "Output scene file (default stdout)");
  import->add_option("--id", import_id, "Scene id (default: input file stem)");

  std::string inspect_path;
  bool inspect_json = false;
  auto* inspect = app.add_subcommand("inspect", "Summarise a scene's entities and documents");
  inspect->add_option("scene", inspect_path, "Scene JSON file")->required();
  inspect->add_flag("--json", inspect_json, "Print one JSON object");

  geomedia::service::ServiceConfig config;
  std::string scene_dir;
  std::string data_dir;
  std::string listen = "127.0.0.1:8080";
  auto* serve = app.add_subcommand("serve", "Run the HTTP scene service");
  serve->add_option("--scene-dir", scene_dir, "Directory of scene JSON files")
      ->envname("GEOMEDIA_SCENE_DIR")
      ->required();
  serve->add_option("--listen", listen, "host:port to listen on")->envname("GEOMEDIA_LISTEN");
  serve->add_option("--data-dir", data_dir, "Directory for content blobs and the session journal")
      ->envname("GEOMEDIA_DATA_DIR");
  serve->add_option("--viewer-origin", config.viewer_origin, "Allowed CORS origin")
      ->envname("GEOMEDIA_VIEWER_ORIGIN");
  serve->add_option("--speed", config.travel.speed_mps, "Camera travel speed in m/s");
  serve->add_option("--min-duration", config.travel.min_duration_s, "Minimum camera travel time in s");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kOperational;
  }

  try {
    if (*validate) return cmd_validate(validate_path, validate_json);
    if (*import) return cmd_import(import_input, import_output, import_id);
    if (*inspect) return cmd_inspect(inspect_path, inspect_json);
    if (*serve) {
      config.scene_dir = scene_dir;
      config.data_dir = data_dir;
      return cmd_serve(config, listen);
    }
  } catch (const ReadFailure& f) {
    std::cerr << f.message << "\n";
    return kOperational;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kOperational;
  }
  return kOperational;
}
