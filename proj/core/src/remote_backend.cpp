#include <regex>

#include <openssl/evp.h>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "meia/error.hpp"
#include "meia/planner.hpp"

namespace meia {

using nlohmann::json;

namespace {

std::string base64(const std::vector<std::uint8_t>& bytes) {
    std::string out(4 * ((bytes.size() + 2) / 3) + 1, '\0');
    const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
                                  static_cast<int>(bytes.size()));
    out.resize(static_cast<std::size_t>(n));
    return out;
}

}  // namespace

RemoteBackend::RemoteBackend(RemoteConfig config) : config_(std::move(config)) {
    if (config_.endpoint.empty()) throw BackendError("PLANNER_ENDPOINT is not set");
}

json RemoteBackend::request_body(const BackendCall& call) const {
    json messages = json::array();
    for (std::size_t k = 0; k < call.messages.size(); ++k) {
        const auto& m = call.messages[k];
        const bool last = k + 1 == call.messages.size();
        if (last && m.role == "user" && config_.send_floor_plan_image && call.floor_plan != nullptr) {
            const std::string url = "data:image/png;base64," + base64(floor_plan_png(*call.floor_plan));
            messages.push_back({{"role", m.role},
                                {"content", json::array({{{"type", "text"}, {"text", m.content}},
                                                         {{"type", "image_url"}, {"image_url", {{"url", url}}}}})}});
        } else {
            messages.push_back({{"role", m.role}, {"content", m.content}});
        }
    }
    return {{"model", config_.model}, {"messages", messages}, {"temperature", 0}};
}

std::string RemoteBackend::complete(const BackendCall& call) {
    static const std::regex url_re(R"(^(https?://[^/]+)(/.*)?$)");
    std::smatch m;
    if (!std::regex_match(config_.endpoint, m, url_re)) throw BackendError("bad endpoint URL: " + config_.endpoint);
    const std::string path = m[2].matched ? m[2].str() : std::string("/");

    httplib::Client client(m[1].str());
    client.set_connection_timeout(config_.timeout_seconds, 0);
    client.set_read_timeout(config_.timeout_seconds, 0);
    client.set_write_timeout(config_.timeout_seconds, 0);
    httplib::Headers headers;
    if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);

    const auto res = client.Post(path, headers, request_body(call).dump(), "application/json");
    if (!res) throw BackendError("request to " + config_.endpoint + " failed: " + httplib::to_string(res.error()));
    if (res->status != 200)
        throw BackendError("endpoint returned HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200));
    try {
        return json::parse(res->body).at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
        throw BackendError(std::string("malformed chat-completion response: ") + e.what());
    }
}

}  // namespace meia
