#include "limner/service.hpp"

#include <stdexcept>

#include "httplib.h"
#include "json.hpp"

#include "limner/corpus.hpp"
#include "limner/document.hpp"
#include "limner/error.hpp"
#include "limner/report.hpp"

namespace limner {

using nlohmann::json;

namespace {

constexpr const char* kJson = "application/json";

const char* kStubPage =
    "<!doctype html>\n<html><head><meta charset=\"utf-8\"><title>limner</title></head>\n"
    "<body><h1>limner</h1><p>No UI bundle configured. Start the service with --ui-dir "
    "to serve the annotator. The API lives under <code>/api/</code>.</p></body></html>\n";

void send_error(httplib::Response& res, int status, std::string_view error_class, std::string_view message) {
  res.status = status;
  res.set_content(json{{"error_class", error_class}, {"message", message}}.dump(), kJson);
}

std::string image_mime(const std::filesystem::path& p, std::string_view bytes) {
  if (bytes.size() >= 8 && bytes.substr(0, 8) == "\x89PNG\r\n\x1a\n") return "image/png";
  if (bytes.size() >= 3 && bytes.substr(0, 3) == "\xff\xd8\xff") return "image/jpeg";
  const auto ext = p.extension().string();
  if (ext == ".png") return "image/png";
  if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
  return "application/octet-stream";
}

}  // namespace

std::pair<std::string, int> parse_bind(const std::string& address) {
  const auto colon = address.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == address.size()) {
    throw std::invalid_argument("bind address must be host:port, got '" + address + "'");
  }
  const auto host = address.substr(0, colon);
  int port = 0;
  try {
    std::size_t used = 0;
    port = std::stoi(address.substr(colon + 1), &used);
    if (used != address.size() - colon - 1) throw std::invalid_argument("trailing characters");
  } catch (const std::exception&) {
    throw std::invalid_argument("bad port in '" + address + "'");
  }
  if (port < 0 || port > 65535) throw std::invalid_argument("port out of range in '" + address + "'");
  return {host, port};
}

Service::Service(std::filesystem::path corpus_root, std::optional<std::filesystem::path> ui_dir)
    : root_(std::move(corpus_root)), ui_dir_(std::move(ui_dir)), server_(std::make_unique<httplib::Server>()) {
  // Fail at startup rather than on the first request.
  load_corpus_index(root_);
  routes();
}

Service::~Service() { stop(); }

std::shared_mutex& Service::lock_for(const std::string& id) {
  std::lock_guard guard(locks_mutex_);
  auto& slot = locks_[id];
  if (!slot) slot = std::make_unique<std::shared_mutex>();
  return *slot;
}

void Service::bind(const std::string& host, int port) {
  if (!server_->bind_to_port(host, port)) {
    throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
  }
}

int Service::bind_any_port(const std::string& host) {
  const int port = server_->bind_to_any_port(host);
  if (port < 0) throw std::runtime_error("cannot bind " + host);
  return port;
}

void Service::listen() {
  if (!server_->listen_after_bind()) throw std::runtime_error("server stopped with an error");
}

void Service::stop() {
  if (server_) server_->stop();
}

void Service::wait_until_ready() const { server_->wait_until_ready(); }

void Service::routes() {
  auto& s = *server_;

  s.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      send_error(res, 500, "internal", e.what());
    } catch (...) {
      send_error(res, 500, "internal", "unknown error");
    }
  });

  s.Get("/api/paintings", [this](const httplib::Request&, httplib::Response& res) {
    try {
      res.set_content(to_json(load_corpus_index(root_)).dump(2), kJson);
    } catch (const CorpusError& e) {
      send_error(res, 500, "corpus", e.what());
    }
  });

  s.Get(R"(/api/paintings/([^/]+)/image)", [this](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    CorpusIndex index;
    try {
      index = load_corpus_index(root_);
    } catch (const CorpusError& e) {
      return send_error(res, 500, "corpus", e.what());
    }
    const auto* entry = index.find(id);
    if (!entry) return send_error(res, 404, "not_found", "no painting '" + id + "'");
    if (entry->image_path.empty()) return send_error(res, 404, "not_found", "painting '" + id + "' has no image");
    const auto path = index.resolve(entry->image_path);
    std::string bytes;
    try {
      bytes = read_file(path);
    } catch (const IoError& e) {
      return send_error(res, 500, "io", e.what());
    }
    const auto mime = image_mime(path, bytes);
    res.set_content(std::move(bytes), mime);
  });

  s.Get(R"(/api/paintings/([^/]+)/annotations)", [this](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    CorpusIndex index;
    try {
      index = load_corpus_index(root_);
    } catch (const CorpusError& e) {
      return send_error(res, 500, "corpus", e.what());
    }
    const auto* entry = index.find(id);
    if (!entry) return send_error(res, 404, "not_found", "no painting '" + id + "'");
    std::shared_lock lock(lock_for(id));
    try {
      res.set_content(serialize_document(load_document(index.resolve(entry->annotation_path))), kJson);
    } catch (const DocumentError& e) {
      send_error(res, 422, e.error_class(), e.what());
    } catch (const IoError& e) {
      send_error(res, 500, "io", e.what());
    }
  });

  s.Put(R"(/api/paintings/([^/]+)/annotations)", [this](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    CorpusIndex index;
    try {
      index = load_corpus_index(root_);
    } catch (const CorpusError& e) {
      return send_error(res, 500, "corpus", e.what());
    }
    const auto* entry = index.find(id);
    if (!entry) return send_error(res, 404, "not_found", "no painting '" + id + "'");
    AnnotationDocument doc;
    try {
      doc = parse_document(req.body);
    } catch (const DocumentError& e) {
      return send_error(res, 422, e.error_class(), e.what());
    }
    if (doc.meta.id != id) {
      return send_error(res, 422, "invariant", "meta.id '" + doc.meta.id + "' does not match painting '" + id + "'");
    }
    std::unique_lock lock(lock_for(id));
    try {
      save_document(doc, index.resolve(entry->annotation_path));
    } catch (const IoError& e) {
      return send_error(res, 500, "io", e.what());
    }
    res.set_content(serialize_document(doc), kJson);
  });

  s.Post(R"(/api/analyze/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    const std::string kind_name = req.matches[1];
    json body;
    if (!req.body.empty()) {
      try {
        body = json::parse(req.body);
      } catch (const json::exception& e) {
        return send_error(res, 400, "parse", e.what());
      }
    }

    if (kind_name == "tilt") {
      try {
        res.set_content(report::tilt_preview(eyelight_pair_from_json(body)).dump(), kJson);
      } catch (const DocumentError& e) {
        send_error(res, 422, e.error_class(), e.what());
      } catch (const AnalysisError& e) {
        send_error(res, 422, "analysis", e.what());
      }
      return;
    }

    const auto kind = report::kind_from_string(kind_name);
    if (!kind) return send_error(res, 404, "not_found", "unknown analysis '" + kind_name + "'");
    const std::string format = req.has_param("format") ? req.get_param_value("format") : "json";
    if (format != "json" && format != "csv") return send_error(res, 400, "usage", "format must be json or csv");
    report::AnalyzeOptions options;
    try {
      options = report::options_from_json(body);
    } catch (const std::invalid_argument& e) {
      return send_error(res, 400, "usage", e.what());
    }
    try {
      const auto out = report::analyze(*kind, load_corpus(root_), options);
      if (format == "csv") {
        res.set_content(out.csv, "text/csv");
      } else {
        res.set_content(out.json.dump(2), kJson);
      }
    } catch (const CorpusError& e) {
      send_error(res, 500, "corpus", e.what());
    } catch (const AnalysisError& e) {
      send_error(res, 422, "analysis", e.what());
    }
  });

  if (ui_dir_ && std::filesystem::is_directory(*ui_dir_)) {
    s.set_mount_point("/", ui_dir_->string());
  } else {
    s.Get("/", [](const httplib::Request&, httplib::Response& res) { res.set_content(kStubPage, "text/html"); });
  }
}

}  // namespace limner
