#pragma once

// TranslationBackend that forwards batches to an external MT service over
// HTTP. Wire format, one POST per batch:
//
//   request   {"src": "es", "tgt": "gn", "texts": ["...", ...]}
//   response  {"translations": ["...", ...]}
//
// Endpoint and batch size come from the environment (ANDES_MT_ENDPOINT,
// ANDES_MT_BATCH_SIZE) or from the pipeline configuration.

#include <cstddef>
#include <cstdlib>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "andes/augment.hpp"
#include "andes/error.hpp"

namespace andes {

inline constexpr const char* kEndpointEnv = "ANDES_MT_ENDPOINT";
inline constexpr const char* kBatchSizeEnv = "ANDES_MT_BATCH_SIZE";

struct HttpBackendConfig {
  std::string endpoint;  // http://host[:port]/path
  std::size_t batch_size = 32;
  int timeout_seconds = 300;

  /// Reads ANDES_MT_ENDPOINT / ANDES_MT_BATCH_SIZE; nullopt when no endpoint
  /// is set.
  static std::optional<HttpBackendConfig> from_env() {
    const char* endpoint = std::getenv(kEndpointEnv);
    if (!endpoint || !*endpoint) return std::nullopt;
    HttpBackendConfig config;
    config.endpoint = endpoint;
    if (const char* batch = std::getenv(kBatchSizeEnv); batch && *batch) {
      try {
        config.batch_size = std::stoul(batch);
      } catch (const std::exception&) {
        throw ContractError(std::string(kBatchSizeEnv) + " is not a number: " + batch);
      }
    }
    return config;
  }
};

class HttpBackend final : public TranslationBackend {
 public:
  explicit HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {
    const std::string scheme = "http://";
    if (config_.endpoint.rfind(scheme, 0) != 0) {
      throw ContractError("backend endpoint must be an http:// URL: " + config_.endpoint);
    }
    const auto slash = config_.endpoint.find('/', scheme.size());
    host_ = config_.endpoint.substr(0, slash);
    path_ = slash == std::string::npos ? "/" : config_.endpoint.substr(slash);
    if (config_.batch_size == 0) throw ContractError("backend batch size must be positive");
  }

  std::string name() const override { return "http:" + config_.endpoint; }
  std::size_t batch_size() const { return config_.batch_size; }

  std::vector<std::string> translate(std::span<const std::string> texts, const LangCode& src,
                                     const LangCode& tgt) override {
    httplib::Client client(host_);
    client.set_read_timeout(config_.timeout_seconds, 0);
    const nlohmann::json request = {
        {"src", src.str()},
        {"tgt", tgt.str()},
        {"texts", std::vector<std::string>(texts.begin(), texts.end())}};
    auto response = client.Post(path_, request.dump(), "application/json");
    if (!response) {
      throw BackendError("request to " + config_.endpoint + " failed: " +
                         httplib::to_string(response.error()));
    }
    if (response->status != 200) {
      throw BackendError("request to " + config_.endpoint + " returned HTTP " +
                         std::to_string(response->status));
    }
    try {
      return nlohmann::json::parse(response->body).at("translations").get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
      throw BackendError("malformed response from " + config_.endpoint + ": " + e.what());
    }
  }

 private:
  HttpBackendConfig config_;
  std::string host_;
  std::string path_;
};

}  // namespace andes
