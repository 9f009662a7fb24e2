#pragma once

#include <chrono>
#include <string>

namespace legalrag::detail {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;    // always starts with '/'
};

/// Splits an http(s) URL into the origin httplib connects to and the request
/// path. Throws Error{kInvalidArgument}.
Endpoint ParseEndpoint(const std::string& url);

/// POSTs a JSON body with bearer auth. Transport failures, 429 and 5xx throw a
/// retryable Error{kProviderUnavailable}; other non-2xx statuses throw a
/// non-retryable one. Returns the response body.
std::string PostJson(const Endpoint& endpoint, const std::string& bearer_token, const std::string& body,
                     std::chrono::milliseconds timeout);

}  // namespace legalrag::detail
