#include <httplib.h>

#include "worldkeeper/backend.hpp"

namespace worldkeeper {

Transport network_transport() {
  return [](const HttpRequest& req) {
    HttpResponse out;
    const auto scheme = req.url.find("://");
    if (scheme == std::string::npos) {
      out.transport_error = "endpoint is not an absolute URL";
      return out;
    }
    const auto path_at = req.url.find('/', scheme + 3);
    const auto origin = req.url.substr(0, path_at);
    const auto path = path_at == std::string::npos ? std::string("/") : req.url.substr(path_at);

    httplib::Client client(origin);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(req.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(req.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());

    httplib::Headers headers;
    std::string content_type = "application/json";
    for (const auto& [k, v] : req.headers) {
      if (k == "Content-Type") content_type = v;
      else headers.emplace(k, v);
    }
    auto res = client.Post(path, headers, req.body, content_type);
    if (!res) {
      out.transport_error = httplib::to_string(res.error());
      return out;
    }
    out.status = res->status;
    out.body = res->body;
    return out;
  };
}

}  // namespace worldkeeper
