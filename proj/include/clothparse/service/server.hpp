#pragma once

#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include <httplib.h>
#include <json.hpp>

#include "clothparse/service/annotation_store.hpp"

namespace clothparse {

struct ServiceConfig {
  std::filesystem::path project_dir;
  std::filesystem::path palette_path;
  std::filesystem::path ui_dir;  // static UI bundle served at /; optional
  MissingMaskPolicy missing_mask = MissingMaskPolicy::not_found;
};

inline constexpr const char* kFallbackIndexHtml = R"(<!doctype html>
<html><head><meta charset="utf-8"><title>annotation service</title></head>
<body><h1>annotation service</h1>
<p>No UI bundle configured. API: <a href="/api/images">/api/images</a>,
<a href="/api/palette">/api/palette</a>.</p></body></html>
)";

// REST backend for the annotation tool:
//   GET /api/palette, GET /api/images, GET /api/images/{id},
//   GET /api/masks/{id}, PUT /api/masks/{id} (body: PNG), GET / (UI bundle).
class AnnotationService {
 public:
  // Throws if the palette is malformed or the project directory is unusable;
  // the service never starts in that state.
  explicit AnnotationService(const ServiceConfig& cfg)
      : palette_text_(read_text(cfg.palette_path)),
        store_(cfg.project_dir, Palette::from_json(parse_palette(palette_text_)),
               cfg.missing_mask) {
    routes(cfg);
  }

  AnnotationStore& store() { return store_; }
  httplib::Server& http() { return server_; }

  bool listen(const std::string& host, int port) { return server_.listen(host, port); }
  int bind_any(const std::string& host) { return server_.bind_to_any_port(host); }
  bool listen_after_bind() { return server_.listen_after_bind(); }
  void stop() { server_.stop(); }
  void wait_until_ready() { server_.wait_until_ready(); }

 private:
  static std::string read_text(const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in) throw IoError("cannot open palette " + p.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  static nlohmann::json parse_palette(const std::string& text) {
    try {
      return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& ex) {
      throw FormatError(std::string("palette: ") + ex.what());
    }
  }

  static void error(httplib::Response& res, int status, const std::string& msg) {
    res.status = status;
    res.set_content(nlohmann::json{{"error", msg}}.dump(), "application/json");
  }

  template <typename F>
  static void guarded(httplib::Response& res, F&& body) {
    try {
      body();
    } catch (const NotFound& ex) {
      error(res, 404, ex.what());
    } catch (const InvalidMask& ex) {
      error(res, 422, ex.what());
    } catch (const std::exception& ex) {
      error(res, 500, ex.what());
    }
  }

  void routes(const ServiceConfig& cfg) {
    // Unmatched routes and other empty error responses get a JSON body too.
    server_.set_error_handler([](const httplib::Request&, httplib::Response& res) {
      if (!res.body.empty()) return httplib::Server::HandlerResponse::Unhandled;
      res.set_content(nlohmann::json{{"error", httplib::status_message(res.status)}}.dump(),
                      "application/json");
      return httplib::Server::HandlerResponse::Handled;
    });

    server_.Get("/api/palette", [this](const httplib::Request&, httplib::Response& res) {
      res.set_content(palette_text_, "application/json");
    });

    server_.Get("/api/images", [this](const httplib::Request&, httplib::Response& res) {
      guarded(res, [&] {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& i : store_.list_images()) {
          arr.push_back({{"id", i.id}, {"width", i.width}, {"height", i.height},
                         {"has_mask", i.has_mask}});
        }
        res.set_content(arr.dump(), "application/json");
      });
    });

    server_.Get(R"(/api/images/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        auto bytes = store_.image_bytes(req.matches[1]);
        res.set_content(std::string(bytes.begin(), bytes.end()), "image/png");
      });
    });

    server_.Get(R"(/api/masks/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        auto bytes = store_.mask_bytes(req.matches[1]);
        res.set_content(std::string(bytes.begin(), bytes.end()), "image/png");
      });
    });

    server_.Put(R"(/api/masks/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const auto* data = reinterpret_cast<const std::uint8_t*>(req.body.data());
        store_.put_mask(req.matches[1], std::span<const std::uint8_t>(data, req.body.size()));
        res.set_content(nlohmann::json{{"ok", true}}.dump(), "application/json");
      });
    });

    if (!cfg.ui_dir.empty()) {
      if (!server_.set_mount_point("/", cfg.ui_dir.string())) {
        throw IoError("cannot serve UI bundle from " + cfg.ui_dir.string());
      }
    } else {
      server_.Get("/", [](const httplib::Request&, httplib::Response& res) {
        res.set_content(kFallbackIndexHtml, "text/html");
      });
    }
  }

  std::string palette_text_;
  AnnotationStore store_;
  httplib::Server server_;
};

}  // namespace clothparse
