#pragma once

// Thin JSON-over-HTTP helper shared by the remote embedder and the remote
// agent backend.

#include <nlohmann/json.hpp>

#include <chrono>
#include <string>

namespace filmset::internal {

struct HttpRequest {
  std::string url; ///< scheme://host[:port]/path
  nlohmann::json body;
  std::string bearer_token; ///< empty = no Authorization header
  std::chrono::seconds timeout{60};
  int retries = 2; ///< extra attempts after a transport failure
};

/// POSTs `body` and parses the JSON response. Transport failures, non-2xx
/// statuses and unparsable bodies throw Error{BackendUnavailable}.
nlohmann::json post_json(const HttpRequest& request);

/// Value of the named environment variable, or empty.
std::string env_or_empty(const std::string& name);

} // namespace filmset::internal
