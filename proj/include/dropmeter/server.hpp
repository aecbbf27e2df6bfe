#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <string>

#include "dropmeter/image_io.hpp"
#include "dropmeter/report.hpp"

namespace dropmeter {

inline constexpr std::size_t kDefaultMaxBodyBytes = 32u << 20;

struct ServerConfig {
    std::string host = "127.0.0.1";
    int port = 8080;  // 0 = any free port
    std::size_t max_body_bytes = kDefaultMaxBodyBytes;
    std::filesystem::path ui_dir;  // static assets served at /; built-in page when empty
};

struct AnalyzeRequest {
    Bytes image;
    std::string filename = "upload";
    double card_width_mm = 76.0;
    double card_height_mm = 26.0;
    AnalysisParams params;
    bool include_overlay = false;
};

struct AnalyzeResponse {
    int status = 200;
    std::string body;  // JSON
};

/// Stateless: decode, analyze, serialize. Body is {"report": ..., "overlay_png_base64": ...}
/// on success and {"error": ...} with status 400/422 otherwise.
AnalyzeResponse handle_analyze(const AnalyzeRequest& request, const std::string& timestamp = utc_timestamp());

/// {"status": "ok", "version": "<semver>"}.
std::string handle_health();

std::string base64_encode(std::span<const std::uint8_t> bytes);
Bytes base64_decode(const std::string& text);

/// Embedded HTTP/1.1 endpoint: POST /api/analyze, GET /api/health, GET / (UI).
class Server {
public:
    explicit Server(ServerConfig config);
    ~Server();
    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    /// Binds the socket and returns the bound port.
    int bind();
    /// Serves until stop(); call after bind().
    bool listen();
    void stop();
    void wait_until_ready() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace dropmeter
