#pragma once

// HTTP facade over the pipeline: scan sessions, projector images, masks,
// effects and frame previews under the /api prefix.

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace procam::service {

struct ServiceOptions {
  std::filesystem::path data_dir;    // empty = in-memory only
  unsigned render_threads = 0;       // per request; 0 = default_thread_count()
  int fill_radius = 8;               // hole filling applied to new projector images
};

struct Response {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

/// Session store and request router. Thread-safe: requests on different
/// sessions run in parallel, creations within one session serialize and reads
/// never wait for other reads.
class Service {
 public:
  /// Reloads every session found under options.data_dir.
  explicit Service(ServiceOptions options = {});
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Transport-independent entry point. `path` includes the /api prefix.
  Response handle(std::string_view method, std::string_view path,
                  const std::map<std::string, std::string>& query, std::string_view body);

  std::size_t session_count() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct ServerOptions {
  std::string host = "127.0.0.1";
  int port = 8080;                   // 0 = pick a free port
  std::filesystem::path static_dir;  // served at / when set
};

/// cpp-httplib front end for a Service.
class HttpServer {
 public:
  HttpServer(Service& service, ServerOptions options);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds the socket and returns the bound port. Throws Error on failure.
  int bind();
  /// Serves until stop(). Call after bind().
  void run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

std::string base64_encode(std::span<const std::uint8_t> bytes);
/// Accepts standard alphabet with optional padding and embedded whitespace.
/// Throws FormatError on anything else.
std::vector<std::uint8_t> base64_decode(std::string_view text);

}  // namespace procam::service
