#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace soapbridge::http {

struct Header {
    std::string name;  // compared case-insensitively
    std::string value;
};

struct Request {
    std::string method;
    std::string path;   // always begins with '/'
    std::string query;  // text after '?', empty when absent
    std::string version = "HTTP/1.1";
    std::vector<Header> headers;
    std::string body;

    const std::string* find_header(const std::string& name) const;
    void set_header(const std::string& name, std::string value);
};

struct Response {
    int status = 200;
    std::vector<Header> headers;
    std::string body;

    const std::string* find_header(const std::string& name) const;
    void set_header(const std::string& name, std::string value);
};

class HttpError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class BindFailure : public HttpError {
public:
    BindFailure(std::string address, const std::string& reason)
        : HttpError("cannot bind " + address + ": " + reason),
          address_(std::move(address)) {}
    const std::string& address() const { return address_; }

private:
    std::string address_;
};

class TransportFailure : public HttpError {
public:
    using HttpError::HttpError;
};

class TimeoutFailure : public HttpError {
public:
    using HttpError::HttpError;
};

const char* reason_phrase(int status);

/// "host:port" with a numeric IPv4 host; port 0 asks for an ephemeral port.
std::pair<std::string, std::uint16_t> parse_bind_address(const std::string& s);

struct Url {
    std::string host;
    std::uint16_t port = 80;
    std::string path = "/";
    std::string query;
};

/// Absolute http:// URL only.
Url parse_http_url(const std::string& url);

using RequestHandler = std::function<Response(const Request&)>;

struct ServerOptions {
    std::size_t max_body_bytes = 4 * 1024 * 1024;
    /// Called once per request after the response is written.
    std::function<void(const Request&, const Response&, std::chrono::milliseconds)> logger;
};

/// Thread-per-connection HTTP/1.1 server over a Content-Length subset.
/// One request per connection; every response is completed with
/// Content-Length and Connection: close. Framing violations (chunked
/// bodies, missing Content-Length on POST, oversized payloads, malformed
/// syntax) are answered at this layer with 400/413.
class Server {
public:
    Server(std::string bind_address, RequestHandler handler, ServerOptions options = {});
    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;
    ~Server();

    /// Binds and starts accepting; throws BindFailure.
    void start();
    /// Stops accepting, then waits for in-flight requests to finish.
    void stop();

    std::uint16_t port() const;
    /// "host:port" with the real port (useful after binding port 0).
    std::string address() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// One-shot client request; connects, sends, reads the full response, and
/// closes. Host, Content-Length, and Connection: close headers are supplied
/// automatically when absent. The timeout covers the whole exchange.
Response fetch(const std::string& host, std::uint16_t port, const Request& request,
               std::chrono::milliseconds timeout);

}  // namespace soapbridge::http
