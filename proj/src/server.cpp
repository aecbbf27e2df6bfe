#include "dropmeter/server.hpp"

#include <httplib.h>

#include <array>

namespace dropmeter {
namespace {

constexpr char kBase64Alphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

constexpr const char* kBuiltinIndex = R"(<!doctype html>
<html><head><meta charset="utf-8"><title>dropmeter</title></head>
<body>
<h1>dropmeter</h1>
<p>API: <code>POST /api/analyze</code> (multipart field <code>image</code>), <code>GET /api/health</code>.</p>
<p>Start with <code>dropmeter serve --ui-dir &lt;built web assets&gt;</code> to serve the browser client here.</p>
</body></html>
)";

std::string error_body(const std::string& message) { return nlohmann::json{{"error", message}}.dump(); }

bool parse_flag(const std::string& v) {
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off" || v.empty()) return false;
    throw ParameterError("bad boolean '" + v + "'");
}

double parse_number(const std::string& v, const std::string& field) {
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ParameterError("field '" + field + "' is not a number: '" + v + "'");
    }
}

CorrectionParams parse_correction(const std::string& v) {
    const auto comma = v.find(',');
    if (comma == std::string::npos) throw ParameterError("correct must be 'a,b'");
    return {parse_number(v.substr(0, comma), "correct"), parse_number(v.substr(comma + 1), "correct")};
}

// Applies one named parameter; unknown names are rejected.
void apply_field(AnalyzeRequest& req, const std::string& name, const std::string& value) {
    if (name == "card_width_mm") req.card_width_mm = parse_number(value, name);
    else if (name == "card_height_mm") req.card_height_mm = parse_number(value, name);
    else if (name == "bin_threshold") req.params.bin_threshold = parse_number(value, name);
    else if (name == "marker_threshold") req.params.marker_threshold = parse_number(value, name);
    else if (name == "correct") req.params.correction = parse_correction(value);
    else if (name == "normalization") req.params.normalization = normalization_from_string(value);
    else if (name == "overlay") req.include_overlay = parse_flag(value);
    else if (name == "fractal") req.params.include_fractal = parse_flag(value);
    else if (name == "filename") req.filename = value;
    else throw ParameterError("unknown field '" + name + "'");
}

AnalyzeRequest parse_multipart(const httplib::Request& http) {
    AnalyzeRequest req;
    if (!http.has_file("image")) throw ParameterError("multipart field 'image' is required");
    for (const auto& [name, part] : http.files) {
        if (name == "image") {
            req.image.assign(part.content.begin(), part.content.end());
            if (!part.filename.empty()) req.filename = part.filename;
        } else {
            apply_field(req, name, part.content);
        }
    }
    return req;
}

AnalyzeRequest parse_json_request(const std::string& body) {
    const auto j = nlohmann::json::parse(body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw ParameterError("request body is not a JSON object");
    AnalyzeRequest req;
    if (!j.contains("image_base64") || !j["image_base64"].is_string())
        throw ParameterError("field 'image_base64' is required");
    req.image = base64_decode(j["image_base64"].get<std::string>());
    for (const auto& [name, value] : j.items()) {
        if (name == "image_base64") continue;
        if (value.is_string()) apply_field(req, name, value.get<std::string>());
        else if (value.is_boolean()) apply_field(req, name, value.get<bool>() ? "true" : "false");
        else if (value.is_number()) apply_field(req, name, value.dump());
        else throw ParameterError("field '" + name + "' has an unsupported type");
    }
    return req;
}

}  // namespace

std::string base64_encode(std::span<const std::uint8_t> bytes) {
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    std::size_t i = 0;
    for (; i + 2 < bytes.size(); i += 3) {
        const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
        out += kBase64Alphabet[(v >> 18) & 63];
        out += kBase64Alphabet[(v >> 12) & 63];
        out += kBase64Alphabet[(v >> 6) & 63];
        out += kBase64Alphabet[v & 63];
    }
    if (i + 1 == bytes.size()) {
        const std::uint32_t v = bytes[i] << 16;
        out += kBase64Alphabet[(v >> 18) & 63];
        out += kBase64Alphabet[(v >> 12) & 63];
        out += "==";
    } else if (i + 2 == bytes.size()) {
        const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8);
        out += kBase64Alphabet[(v >> 18) & 63];
        out += kBase64Alphabet[(v >> 12) & 63];
        out += kBase64Alphabet[(v >> 6) & 63];
        out += '=';
    }
    return out;
}

Bytes base64_decode(const std::string& text) {
    std::array<int, 256> lookup;
    lookup.fill(-1);
    for (int i = 0; i < 64; ++i) lookup[static_cast<unsigned char>(kBase64Alphabet[i])] = i;
    Bytes out;
    std::uint32_t acc = 0;
    int bits = 0;
    for (const char c : text) {
        if (c == '=' ) break;
        if (c == '\n' || c == '\r' || c == ' ') continue;
        const int v = lookup[static_cast<unsigned char>(c)];
        if (v < 0) throw ParameterError("invalid base64 payload");
        acc = (acc << 6) | std::uint32_t(v);
        bits += 6;
        if (bits >= 8) {
            bits -= 8;
            out.push_back(static_cast<std::uint8_t>((acc >> bits) & 0xff));
        }
    }
    return out;
}

AnalyzeResponse handle_analyze(const AnalyzeRequest& request, const std::string& timestamp) {
    if (request.image.empty()) return {400, error_body("image payload is empty")};
    RgbRaster<double> image;
    try {
        image = decode_image_bytes(request.image);
    } catch (const InputError& e) {
        return {422, error_body(e.what())};
    }
    try {
        const CardGeometry geom = card_geometry(request.card_width_mm, request.card_height_mm, image);
        CardAnalysis analysis = analyze_card_detailed(image, geom, request.params);
        analysis.report.provenance.input = request.filename;
        analysis.report.provenance.timestamp = timestamp;
        nlohmann::ordered_json body;
        body["report"] = to_json(analysis.report);
        if (request.include_overlay)
            body["overlay_png_base64"] = base64_encode(encode_png(render_overlay(image, analysis.segmentation)));
        return {200, body.dump()};
    } catch (const ParameterError& e) {
        return {400, error_body(e.what())};
    } catch (const InputError& e) {
        return {400, error_body(e.what())};
    }
}

std::string handle_health() { return nlohmann::json{{"status", "ok"}, {"version", kVersion}}.dump(); }

struct Server::Impl {
    ServerConfig config;
    httplib::Server http;
};

Server::Server(ServerConfig config) : impl_(std::make_unique<Impl>()) {
    impl_->config = std::move(config);
    auto& http = impl_->http;
    http.set_payload_max_length(impl_->config.max_body_bytes);
    http.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                              {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                              {"Access-Control-Allow-Headers", "Content-Type"}});

    http.Get("/api/health", [](const httplib::Request&, httplib::Response& res) {
        res.set_content(handle_health(), "application/json");
    });
    http.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
    http.Post("/api/analyze", [](const httplib::Request& req, httplib::Response& res) {
        AnalyzeResponse out;
        try {
            const AnalyzeRequest parsed = req.is_multipart_form_data() ? parse_multipart(req) : parse_json_request(req.body);
            out = handle_analyze(parsed);
        } catch (const ParameterError& e) {
            out = {400, error_body(e.what())};
        }
        res.status = out.status;
        res.set_content(out.body, "application/json");
    });

    if (!impl_->config.ui_dir.empty()) {
        if (!http.set_mount_point("/", impl_->config.ui_dir.string()))
            throw InputError("ui directory " + impl_->config.ui_dir.string() + " does not exist");
    } else {
        http.Get("/", [](const httplib::Request&, httplib::Response& res) {
            res.set_content(kBuiltinIndex, "text/html");
        });
    }
}

Server::~Server() { stop(); }

int Server::bind() {
    auto& cfg = impl_->config;
    if (cfg.port == 0) {
        cfg.port = impl_->http.bind_to_any_port(cfg.host);
        if (cfg.port < 0) throw InputError("cannot bind " + cfg.host);
    } else if (!impl_->http.bind_to_port(cfg.host, cfg.port)) {
        throw InputError("cannot bind " + cfg.host + ":" + std::to_string(cfg.port));
    }
    return cfg.port;
}

bool Server::listen() { return impl_->http.listen_after_bind(); }

void Server::stop() {
    if (impl_ && impl_->http.is_running()) impl_->http.stop();
}

void Server::wait_until_ready() const { impl_->http.wait_until_ready(); }

}  // namespace dropmeter
