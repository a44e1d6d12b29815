#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>

namespace httplib {
class Server;
}

namespace limner {

/// HTTP front end over a corpus directory.
///
///   GET  /api/paintings                     index.json contents
///   GET  /api/paintings/{id}/image          image bytes
///   GET  /api/paintings/{id}/annotations    canonical document JSON
///   PUT  /api/paintings/{id}/annotations    validate, then atomic write
///   POST /api/analyze/{kind}[?format=csv]   kind: perspective | shadows |
///                                           eyelights | categories | tilt
///   GET  /                                  UI bundle (ui_dir) or a stub page
///
/// Errors are JSON bodies {"error_class", "message"}; validation failures
/// use 422. Nothing is cached: every request reads the corpus afresh.
class Service {
 public:
  Service(std::filesystem::path corpus_root, std::optional<std::filesystem::path> ui_dir = std::nullopt);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Throws std::runtime_error if the address cannot be bound.
  void bind(const std::string& host, int port);
  /// Binds an ephemeral port and returns it.
  int bind_any_port(const std::string& host);
  /// Blocks until stop().
  void listen();
  void stop();
  void wait_until_ready() const;

 private:
  void routes();
  std::shared_mutex& lock_for(const std::string& id);

  std::filesystem::path root_;
  std::optional<std::filesystem::path> ui_dir_;
  std::unique_ptr<httplib::Server> server_;
  std::mutex locks_mutex_;
  std::map<std::string, std::unique_ptr<std::shared_mutex>> locks_;
};

/// Parses "host:port" (port required). Throws std::invalid_argument.
std::pair<std::string, int> parse_bind(const std::string& address);

}  // namespace limner
