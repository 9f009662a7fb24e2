#include "http_util.hpp"

#include <httplib.h>

#include "legalrag/error.hpp"

namespace legalrag::detail {

Endpoint ParseEndpoint(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::kInvalidArgument, "endpoint URL lacks a scheme: '" + url + "'");
  }
  const std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw Error(ErrorCode::kInvalidArgument, "unsupported URL scheme '" + scheme + "'");
  }
  const auto path_begin = url.find('/', scheme_end + 3);
  Endpoint ep;
  ep.origin = url.substr(0, path_begin);
  ep.path = path_begin == std::string::npos ? "/" : url.substr(path_begin);
  if (ep.origin.size() <= scheme_end + 3) {
    throw Error(ErrorCode::kInvalidArgument, "endpoint URL has no host: '" + url + "'");
  }
  return ep;
}

std::string PostJson(const Endpoint& endpoint, const std::string& bearer_token, const std::string& body,
                     std::chrono::milliseconds timeout) {
  httplib::Client client(endpoint.origin);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());

  httplib::Headers headers;
  if (!bearer_token.empty()) headers.emplace("Authorization", "Bearer " + bearer_token);

  auto res = client.Post(endpoint.path, headers, body, "application/json");
  if (!res) {
    throw Error(ErrorCode::kProviderUnavailable,
                "POST " + endpoint.origin + endpoint.path + " failed: " + httplib::to_string(res.error()))
        .set_retryable(true);
  }
  if (res->status == 429 || res->status >= 500) {
    throw Error(ErrorCode::kProviderUnavailable,
                "POST " + endpoint.origin + endpoint.path + " returned HTTP " + std::to_string(res->status))
        .set_retryable(true);
  }
  if (res->status < 200 || res->status >= 300) {
    throw Error(ErrorCode::kProviderUnavailable,
                "POST " + endpoint.origin + endpoint.path + " returned HTTP " + std::to_string(res->status) +
                    ": " + res->body.substr(0, 200));
  }
  return res->body;
}

}  // namespace legalrag::detail
