#pragma once

#include <chrono>
#include <string>
#include <string_view>

#include <httplib.h>

#include "inquest/core.hpp"

namespace inquest {

struct Endpoint {
  std::string base;  // scheme://host:port
  std::string path;  // begins with '/'

  static Endpoint parse(std::string_view url) {
    const auto scheme = url.find("://");
    if (scheme == std::string_view::npos) {
      throw Error(ErrorKind::InvalidConfig, "endpoint needs a scheme: " + std::string(url));
    }
    const auto slash = url.find('/', scheme + 3);
    if (slash == std::string_view::npos) return {std::string(url), "/"};
    return {std::string(url.substr(0, slash)), std::string(url.substr(slash))};
  }
};

/// POSTs a JSON body and returns the parsed JSON reply.
///
/// Throws ClientTimeout when no complete reply arrives within timeout_ms and
/// ClientError for refused connections, non-2xx statuses and non-JSON bodies.
inline json post_json(std::string_view url, const json& body, int timeout_ms) {
  const auto endpoint = Endpoint::parse(url);
  httplib::Client client(endpoint.base);
  const auto timeout = std::chrono::milliseconds(timeout_ms);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);

  const auto started = std::chrono::steady_clock::now();
  auto result = client.Post(endpoint.path, body.dump(), "application/json");
  const auto elapsed = std::chrono::steady_clock::now() - started;
  if (!result) {
    if (result.error() == httplib::Error::ConnectionTimeout || elapsed >= timeout) {
      throw Error(ErrorKind::ClientTimeout, std::string(url) + " did not reply in " +
                                                std::to_string(timeout_ms) + " ms");
    }
    throw Error(ErrorKind::ClientError, std::string(url) + ": " + httplib::to_string(result.error()));
  }
  if (result->status < 200 || result->status >= 300) {
    throw Error(ErrorKind::ClientError,
                std::string(url) + " returned HTTP " + std::to_string(result->status));
  }
  auto parsed = json::parse(result->body, nullptr, false);
  if (parsed.is_discarded()) {
    throw Error(ErrorKind::ClientError, std::string(url) + " returned a non-JSON body");
  }
  return parsed;
}

}  // namespace inquest
