#pragma once

// ModelClient backed by a chat-completions-style HTTP endpoint. The auth
// token is read from an environment variable so it never appears in argv.

#include <cstdlib>
#include <memory>
#include <string>
#include <utility>

#include <httplib.h>
#include <json.hpp>

#include "ckg/errors.hpp"
#include "ckg/eval.hpp"

namespace ckg {

struct RemoteClientConfig {
    std::string base_url;  // e.g. http://localhost:8080/v1
    std::string model;
    std::string api_key_env = "CKG_API_KEY";
    int timeout_seconds = 60;
};

class RemoteHttpClient : public ModelClient {
  public:
    explicit RemoteHttpClient(RemoteClientConfig config) : config_(std::move(config)) {
        const std::size_t scheme_end = config_.base_url.find("://");
        if (scheme_end == std::string::npos) {
            throw ClientFailure("base URL must start with http:// or https://, got \"" +
                                config_.base_url + "\"");
        }
        const std::string scheme = config_.base_url.substr(0, scheme_end);
        if (scheme != "http" && scheme != "https") {
            throw ClientFailure("unsupported URL scheme \"" + scheme + "\"");
        }
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
        if (scheme == "https") {
            throw ClientFailure("this build lacks TLS support; use an http:// endpoint");
        }
#endif
        const std::size_t path_start = config_.base_url.find('/', scheme_end + 3);
        if (path_start == std::string::npos) {
            origin_ = config_.base_url;
        } else {
            origin_ = config_.base_url.substr(0, path_start);
            prefix_ = config_.base_url.substr(path_start);
            while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
        }
        if (config_.model.empty()) throw ClientFailure("remote client requires a model name");
        if (const char* token = std::getenv(config_.api_key_env.c_str())) token_ = token;
    }

    std::string answer(const std::string& prompt) override {
        const nlohmann::json payload = {
            {"model", config_.model},
            {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})}};

        // One client per call: httplib clients do not support concurrent
        // requests on a shared instance, and the harness runs parallel jobs.
        httplib::Client http(origin_);
        http.set_connection_timeout(config_.timeout_seconds, 0);
        http.set_read_timeout(config_.timeout_seconds, 0);
        httplib::Headers headers;
        if (!token_.empty()) headers.emplace("Authorization", "Bearer " + token_);

        const httplib::Result result =
            http.Post(prefix_ + "/chat/completions", headers, payload.dump(), "application/json");
        if (!result) {
            throw ClientFailure("transport error contacting " + origin_ + ": " +
                                httplib::to_string(result.error()));
        }
        if (result->status != 200) {
            throw ClientFailure("endpoint returned HTTP " + std::to_string(result->status));
        }
        const nlohmann::json doc = nlohmann::json::parse(result->body, nullptr, false);
        if (doc.is_discarded()) throw ClientFailure("endpoint returned invalid JSON");
        try {
            return doc.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const nlohmann::json::exception& error) {
            throw ClientFailure(std::string("unexpected response shape: ") + error.what());
        }
    }

  private:
    RemoteClientConfig config_;
    std::string origin_;
    std::string prefix_;
    std::string token_;
};

}  // namespace ckg
