#pragma once

// HTTP front end over a project gallery. Handlers are thin: each one parses
// the request, calls into the engine and serialises the result.

#include <atomic>
#include <filesystem>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>

#include "detent/error.hpp"
#include "detent/project_store.hpp"
#include "detent/springs.hpp"

namespace httplib {
class Server;
}

namespace detent {

std::string_view engine_version();

// 400 for malformed requests, 404 for unknown ids, 422 when the request is
// well formed but the engine rejects the design, 500 for I/O trouble.
int http_status(ErrorCode code);

struct ServiceOptions {
  // Gallery is written back here after every change when set.
  std::optional<std::filesystem::path> archive_path;
  unsigned threads = 1;
  // Samples computed per chunk of a streamed curve.
  std::size_t stream_batch = 4;
};

class SandboxService {
 public:
  SandboxService(Gallery gallery, CoefficientTable table, ServiceOptions options = {});

  void register_routes(httplib::Server& server);

  Gallery gallery() const;
  const CoefficientTable& table() const { return table_; }
  // Streams that stopped early because the client left or the project changed.
  std::size_t cancelled_streams() const { return cancelled_.load(); }

 private:
  struct Snapshot {
    Project project;
    std::uint64_t generation = 0;
  };
  Snapshot snapshot(std::string_view id) const;
  std::uint64_t generation(const std::string& id) const;
  // Runs edit under the write lock, bumps the project's generation and
  // persists the gallery.
  template <typename Edit>
  auto write(const std::string& id, Edit&& edit);
  void persist();

  Gallery gallery_;
  CoefficientTable table_;
  ServiceOptions options_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, std::uint64_t, std::less<>> generations_;
  std::atomic<std::size_t> cancelled_{0};
};

// Blocks until the server stops. Returns false when the port cannot be bound.
bool run_server(SandboxService& service, const std::string& host, int port);

}  // namespace detent
