#include "soapbridge/http.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <cctype>
#include <charconv>
#include <cstring>
#include <mutex>
#include <thread>

namespace soapbridge::http {

namespace {

bool iequals(const std::string& a, const std::string& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::tolower(static_cast<unsigned char>(a[i])) !=
            std::tolower(static_cast<unsigned char>(b[i])))
            return false;
    return true;
}

const std::string* find_in(const std::vector<Header>& headers, const std::string& name) {
    for (const auto& h : headers)
        if (iequals(h.name, name)) return &h.value;
    return nullptr;
}

void set_in(std::vector<Header>& headers, const std::string& name, std::string value) {
    for (auto& h : headers) {
        if (iequals(h.name, name)) {
            h.value = std::move(value);
            return;
        }
    }
    headers.push_back({name, std::move(value)});
}

std::string errno_text() { return std::strerror(errno); }

class Fd {
public:
    Fd() = default;
    explicit Fd(int fd) : fd_(fd) {}
    Fd(const Fd&) = delete;
    Fd& operator=(const Fd&) = delete;
    Fd(Fd&& other) noexcept : fd_(other.release()) {}
    Fd& operator=(Fd&& other) noexcept {
        if (this != &other) {
            reset();
            fd_ = other.release();
        }
        return *this;
    }
    ~Fd() { reset(); }

    int get() const { return fd_; }
    bool valid() const { return fd_ >= 0; }
    int release() {
        int fd = fd_;
        fd_ = -1;
        return fd;
    }
    void reset() {
        if (fd_ >= 0) ::close(fd_);
        fd_ = -1;
    }

private:
    int fd_ = -1;
};

constexpr std::size_t kMaxHeaderBytes = 64 * 1024;

}  // namespace

const std::string* Request::find_header(const std::string& name) const {
    return find_in(headers, name);
}
void Request::set_header(const std::string& name, std::string value) {
    set_in(headers, name, std::move(value));
}
const std::string* Response::find_header(const std::string& name) const {
    return find_in(headers, name);
}
void Response::set_header(const std::string& name, std::string value) {
    set_in(headers, name, std::move(value));
}

const char* reason_phrase(int status) {
    switch (status) {
        case 200: return "OK";
        case 400: return "Bad Request";
        case 403: return "Forbidden";
        case 404: return "Not Found";
        case 405: return "Method Not Allowed";
        case 408: return "Request Timeout";
        case 413: return "Payload Too Large";
        case 500: return "Internal Server Error";
        default: return "Unknown";
    }
}

std::pair<std::string, std::uint16_t> parse_bind_address(const std::string& s) {
    auto colon = s.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == s.size())
        throw HttpError("bind address must look like host:port, got '" + s + "'");
    std::string host = s.substr(0, colon);
    std::string port_text = s.substr(colon + 1);
    unsigned long port = 0;
    auto [ptr, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(),
                                     port);
    if (ec != std::errc() || ptr != port_text.data() + port_text.size() || port > 65535)
        throw HttpError("bad port in bind address '" + s + "'");
    in_addr probe{};
    if (::inet_pton(AF_INET, host.c_str(), &probe) != 1)
        throw HttpError("bind address host must be a numeric IPv4 address, got '" + host +
                        "'");
    return {host, static_cast<std::uint16_t>(port)};
}

Url parse_http_url(const std::string& url) {
    const std::string scheme = "http://";
    if (url.rfind(scheme, 0) != 0)
        throw HttpError("only http:// URLs are supported, got '" + url + "'");
    std::string rest = url.substr(scheme.size());
    auto slash = rest.find('/');
    std::string authority = slash == std::string::npos ? rest : rest.substr(0, slash);
    std::string target = slash == std::string::npos ? "/" : rest.substr(slash);
    if (authority.empty()) throw HttpError("URL has no host: '" + url + "'");

    Url out;
    auto colon = authority.rfind(':');
    if (colon == std::string::npos) {
        out.host = authority;
    } else {
        out.host = authority.substr(0, colon);
        std::string port_text = authority.substr(colon + 1);
        unsigned long port = 0;
        auto [ptr, ec] =
            std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
        if (ec != std::errc() || ptr != port_text.data() + port_text.size() || port == 0 ||
            port > 65535)
            throw HttpError("bad port in URL '" + url + "'");
        out.port = static_cast<std::uint16_t>(port);
    }
    if (out.host.empty()) throw HttpError("URL has no host: '" + url + "'");

    auto question = target.find('?');
    if (question == std::string::npos) {
        out.path = target;
    } else {
        out.path = target.substr(0, question);
        out.query = target.substr(question + 1);
    }
    if (out.path.empty()) out.path = "/";
    return out;
}

// ---------------------------------------------------------------------------
// Server

namespace {

// Reads until the header terminator, then Content-Length many body bytes.
// Returns false (with a prepared error response) on framing violations.
bool read_request(int fd, std::size_t max_body, Request& request, Response& error) {
    auto fail = [&](int status, const char* text) {
        error.status = status;
        error.set_header("Content-Type", "text/plain; charset=utf-8");
        error.body = std::string(text) + "\n";
        return false;
    };

    std::string buffer;
    std::size_t header_end = std::string::npos;
    char chunk[8192];
    while (header_end == std::string::npos) {
        if (buffer.size() > kMaxHeaderBytes) return fail(400, "header section too large");
        ssize_t n = ::recv(fd, chunk, sizeof chunk, 0);
        if (n < 0 && errno == EINTR) continue;
        if (n <= 0) return fail(400, "connection closed mid-request");
        buffer.append(chunk, static_cast<std::size_t>(n));
        header_end = buffer.find("\r\n\r\n");
    }

    std::string head = buffer.substr(0, header_end);
    std::string rest = buffer.substr(header_end + 4);

    // Request line.
    auto line_end = head.find("\r\n");
    std::string request_line = head.substr(0, line_end);
    auto sp1 = request_line.find(' ');
    auto sp2 = request_line.rfind(' ');
    if (sp1 == std::string::npos || sp2 == sp1) return fail(400, "malformed request line");
    request.method = request_line.substr(0, sp1);
    std::string target = request_line.substr(sp1 + 1, sp2 - sp1 - 1);
    request.version = request_line.substr(sp2 + 1);
    if (request.method.empty() || target.empty()) return fail(400, "malformed request line");
    if (request.version != "HTTP/1.1" && request.version != "HTTP/1.0")
        return fail(400, "unsupported HTTP version");
    if (target[0] != '/') return fail(400, "request target must be absolute-path");
    auto question = target.find('?');
    request.path = question == std::string::npos ? target : target.substr(0, question);
    request.query = question == std::string::npos ? "" : target.substr(question + 1);

    // Header fields.
    std::size_t pos = line_end == std::string::npos ? head.size() : line_end + 2;
    while (pos < head.size()) {
        auto end = head.find("\r\n", pos);
        if (end == std::string::npos) end = head.size();
        std::string line = head.substr(pos, end - pos);
        pos = end + 2;
        auto colon = line.find(':');
        if (colon == std::string::npos || colon == 0 || line[0] == ' ' || line[0] == '\t')
            return fail(400, "malformed header field");
        std::string name = line.substr(0, colon);
        std::string value = line.substr(colon + 1);
        while (!value.empty() && (value.front() == ' ' || value.front() == '\t'))
            value.erase(value.begin());
        while (!value.empty() && (value.back() == ' ' || value.back() == '\t'))
            value.pop_back();
        request.headers.push_back({std::move(name), std::move(value)});
    }

    if (request.find_header("Transfer-Encoding"))
        return fail(400, "chunked request bodies are not supported");

    const std::string* length_text = request.find_header("Content-Length");
    std::size_t length = 0;
    if (length_text) {
        auto [ptr, ec] = std::from_chars(length_text->data(),
                                         length_text->data() + length_text->size(), length);
        if (ec != std::errc() || ptr != length_text->data() + length_text->size())
            return fail(400, "bad Content-Length");
    } else if (request.method == "POST") {
        return fail(400, "POST requires Content-Length");
    }
    if (length > max_body) return fail(413, "request body exceeds the size limit");

    request.body = std::move(rest);
    while (request.body.size() < length) {
        ssize_t n = ::recv(fd, chunk, sizeof chunk, 0);
        if (n < 0 && errno == EINTR) continue;
        if (n <= 0) return fail(400, "connection closed mid-body");
        request.body.append(chunk, static_cast<std::size_t>(n));
    }
    if (request.body.size() > length) return fail(400, "bytes past the declared body");
    return true;
}

bool send_all(int fd, const std::string& bytes) {
    std::size_t sent = 0;
    while (sent < bytes.size()) {
        ssize_t n = ::send(fd, bytes.data() + sent, bytes.size() - sent, MSG_NOSIGNAL);
        if (n < 0 && errno == EINTR) continue;
        if (n <= 0) return false;
        sent += static_cast<std::size_t>(n);
    }
    return true;
}

std::string response_bytes(const Response& response) {
    std::string out = "HTTP/1.1 " + std::to_string(response.status) + " " +
                      reason_phrase(response.status) + "\r\n";
    for (const auto& h : response.headers) {
        if (iequals(h.name, "Content-Length") || iequals(h.name, "Connection")) continue;
        out += h.name + ": " + h.value + "\r\n";
    }
    out += "Content-Length: " + std::to_string(response.body.size()) + "\r\n";
    out += "Connection: close\r\n\r\n";
    out += response.body;
    return out;
}

}  // namespace

struct Server::Impl {
    std::string bind_address;
    RequestHandler handler;
    ServerOptions options;

    Fd listener;
    std::string host;
    std::uint16_t requested_port = 0;
    std::uint16_t bound_port = 0;
    std::thread acceptor;
    std::atomic<bool> stopping{false};

    struct Worker {
        std::thread thread;
        std::atomic<bool> done{false};
    };
    std::mutex workers_mutex;
    std::vector<std::unique_ptr<Worker>> workers;

    void reap(bool all) {
        std::vector<std::unique_ptr<Worker>> joinable;
        {
            std::lock_guard lock(workers_mutex);
            for (auto it = workers.begin(); it != workers.end();) {
                if (all || (*it)->done.load()) {
                    joinable.push_back(std::move(*it));
                    it = workers.erase(it);
                } else {
                    ++it;
                }
            }
        }
        for (auto& w : joinable)
            if (w->thread.joinable()) w->thread.join();
    }

    void handle_connection(int raw_fd) {
        Fd fd(raw_fd);
        auto started = std::chrono::steady_clock::now();
        Request request;
        Response response;
        if (read_request(fd.get(), options.max_body_bytes, request, response)) {
            try {
                response = handler(request);
            } catch (...) {
                // The routing layer answers errors itself; this is a last
                // resort so a connection never dies without a response.
                response = Response{};
                response.status = 500;
                response.set_header("Content-Type", "text/plain; charset=utf-8");
                response.body = "internal error\n";
            }
        }
        send_all(fd.get(), response_bytes(response));
        if (options.logger) {
            auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                std::chrono::steady_clock::now() - started);
            options.logger(request, response, elapsed);
        }
    }

    void accept_loop() {
        for (;;) {
            sockaddr_in peer{};
            socklen_t peer_len = sizeof peer;
            int fd = ::accept(listener.get(), reinterpret_cast<sockaddr*>(&peer), &peer_len);
            if (fd < 0) {
                if (errno == EINTR) continue;
                break;  // listener closed by stop()
            }
            if (stopping.load()) {
                ::close(fd);
                break;
            }
            timeval io_timeout{15, 0};
            ::setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &io_timeout, sizeof io_timeout);
            ::setsockopt(fd, SOL_SOCKET, SO_SNDTIMEO, &io_timeout, sizeof io_timeout);

            auto worker = std::make_unique<Worker>();
            Worker* raw = worker.get();
            {
                std::lock_guard lock(workers_mutex);
                workers.push_back(std::move(worker));
            }
            raw->thread = std::thread([this, fd, raw] {
                handle_connection(fd);
                raw->done.store(true);
            });
            reap(false);
        }
    }
};

Server::Server(std::string bind_address, RequestHandler handler, ServerOptions options)
    : impl_(std::make_unique<Impl>()) {
    impl_->bind_address = std::move(bind_address);
    impl_->handler = std::move(handler);
    impl_->options = std::move(options);
}

Server::~Server() { stop(); }

void Server::start() {
    auto [host, port] = parse_bind_address(impl_->bind_address);
    impl_->host = host;
    impl_->requested_port = port;

    Fd fd(::socket(AF_INET, SOCK_STREAM, 0));
    if (!fd.valid()) throw BindFailure(impl_->bind_address, errno_text());
    int one = 1;
    ::setsockopt(fd.get(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);

    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    ::inet_pton(AF_INET, host.c_str(), &addr.sin_addr);
    if (::bind(fd.get(), reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0)
        throw BindFailure(impl_->bind_address, errno_text());
    if (::listen(fd.get(), 64) != 0)
        throw BindFailure(impl_->bind_address, errno_text());

    sockaddr_in bound{};
    socklen_t bound_len = sizeof bound;
    ::getsockname(fd.get(), reinterpret_cast<sockaddr*>(&bound), &bound_len);
    impl_->bound_port = ntohs(bound.sin_port);

    impl_->listener = std::move(fd);
    impl_->stopping.store(false);
    impl_->acceptor = std::thread([impl = impl_.get()] { impl->accept_loop(); });
}

void Server::stop() {
    if (!impl_) return;
    impl_->stopping.store(true);
    if (impl_->listener.valid()) {
        ::shutdown(impl_->listener.get(), SHUT_RDWR);
        impl_->listener.reset();
    }
    if (impl_->acceptor.joinable()) impl_->acceptor.join();
    impl_->reap(true);
}

std::uint16_t Server::port() const { return impl_->bound_port; }

std::string Server::address() const {
    return impl_->host + ":" + std::to_string(impl_->bound_port);
}

// ---------------------------------------------------------------------------
// Client

namespace {

using Clock = std::chrono::steady_clock;

int remaining_ms(Clock::time_point deadline) {
    auto left =
        std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
    return left.count() <= 0 ? 0 : static_cast<int>(left.count());
}

void wait_ready(int fd, short events, Clock::time_point deadline, const char* phase) {
    for (;;) {
        int budget = remaining_ms(deadline);
        if (budget == 0)
            throw TimeoutFailure(std::string("timed out during ") + phase);
        pollfd p{fd, events, 0};
        int n = ::poll(&p, 1, budget);
        if (n < 0 && errno == EINTR) continue;
        if (n < 0) throw TransportFailure(std::string(phase) + " failed: " + errno_text());
        if (n == 0) throw TimeoutFailure(std::string("timed out during ") + phase);
        return;
    }
}

std::string request_bytes(const std::string& host, std::uint16_t port, Request request) {
    if (!request.find_header("Host"))
        request.set_header("Host", host + ":" + std::to_string(port));
    if (!request.body.empty() || request.method == "POST")
        if (!request.find_header("Content-Length"))
            request.set_header("Content-Length", std::to_string(request.body.size()));
    if (!request.find_header("Connection")) request.set_header("Connection", "close");

    std::string target = request.path.empty() ? "/" : request.path;
    if (!request.query.empty()) target += "?" + request.query;
    std::string out = request.method + " " + target + " HTTP/1.1\r\n";
    for (const auto& h : request.headers) out += h.name + ": " + h.value + "\r\n";
    out += "\r\n";
    out += request.body;
    return out;
}

Response parse_response(const std::string& raw) {
    auto header_end = raw.find("\r\n\r\n");
    if (header_end == std::string::npos)
        throw TransportFailure("response ended before the header terminator");
    std::string head = raw.substr(0, header_end);
    Response response;
    auto line_end = head.find("\r\n");
    std::string status_line = head.substr(0, line_end);
    if (status_line.rfind("HTTP/1.", 0) != 0)
        throw TransportFailure("malformed status line '" + status_line + "'");
    auto sp1 = status_line.find(' ');
    if (sp1 == std::string::npos || sp1 + 4 > status_line.size())
        throw TransportFailure("malformed status line '" + status_line + "'");
    int status = 0;
    auto [ptr, ec] =
        std::from_chars(status_line.data() + sp1 + 1, status_line.data() + sp1 + 4, status);
    if (ec != std::errc() || ptr != status_line.data() + sp1 + 4)
        throw TransportFailure("malformed status line '" + status_line + "'");
    response.status = status;

    std::size_t pos = line_end == std::string::npos ? head.size() : line_end + 2;
    while (pos < head.size()) {
        auto end = head.find("\r\n", pos);
        if (end == std::string::npos) end = head.size();
        std::string line = head.substr(pos, end - pos);
        pos = end + 2;
        auto colon = line.find(':');
        if (colon == std::string::npos)
            throw TransportFailure("malformed response header '" + line + "'");
        std::string name = line.substr(0, colon);
        std::string value = line.substr(colon + 1);
        while (!value.empty() && (value.front() == ' ' || value.front() == '\t'))
            value.erase(value.begin());
        while (!value.empty() && (value.back() == ' ' || value.back() == '\t'))
            value.pop_back();
        response.headers.push_back({std::move(name), std::move(value)});
    }
    response.body = raw.substr(header_end + 4);
    return response;
}

}  // namespace

Response fetch(const std::string& host, std::uint16_t port, const Request& request,
               std::chrono::milliseconds timeout) {
    auto deadline = Clock::now() + timeout;

    Fd fd(::socket(AF_INET, SOCK_STREAM, 0));
    if (!fd.valid()) throw TransportFailure("socket: " + errno_text());
    int flags = ::fcntl(fd.get(), F_GETFL, 0);
    ::fcntl(fd.get(), F_SETFL, flags | O_NONBLOCK);

    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1)
        throw TransportFailure("client host must be a numeric IPv4 address, got '" + host +
                               "'");

    if (::connect(fd.get(), reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
        if (errno != EINPROGRESS)
            throw TransportFailure("connect to " + host + ":" + std::to_string(port) +
                                   " failed: " + errno_text());
        wait_ready(fd.get(), POLLOUT, deadline, "connect");
        int error = 0;
        socklen_t error_len = sizeof error;
        ::getsockopt(fd.get(), SOL_SOCKET, SO_ERROR, &error, &error_len);
        if (error != 0)
            throw TransportFailure("connect to " + host + ":" + std::to_string(port) +
                                   " failed: " + std::string(std::strerror(error)));
    }

    std::string outgoing = request_bytes(host, port, request);
    std::size_t sent = 0;
    while (sent < outgoing.size()) {
        ssize_t n = ::send(fd.get(), outgoing.data() + sent, outgoing.size() - sent,
                           MSG_NOSIGNAL);
        if (n > 0) {
            sent += static_cast<std::size_t>(n);
            continue;
        }
        if (n < 0 && (errno == EAGAIN || errno == EWOULDBLOCK)) {
            wait_ready(fd.get(), POLLOUT, deadline, "send");
            continue;
        }
        if (n < 0 && errno == EINTR) continue;
        throw TransportFailure("send failed: " + errno_text());
    }

    constexpr std::size_t kMaxResponseBytes = 64 * 1024 * 1024;
    std::string raw;
    std::size_t expected_total = std::string::npos;
    char chunk[16384];
    for (;;) {
        ssize_t n = ::recv(fd.get(), chunk, sizeof chunk, 0);
        if (n > 0) {
            raw.append(chunk, static_cast<std::size_t>(n));
            if (raw.size() > kMaxResponseBytes)
                throw TransportFailure("response exceeds the client size limit");
            if (expected_total == std::string::npos) {
                auto header_end = raw.find("\r\n\r\n");
                if (header_end != std::string::npos) {
                    // Peek at Content-Length so we can stop without EOF.
                    Response head = parse_response(raw.substr(0, header_end + 4));
                    if (const std::string* cl = head.find_header("Content-Length")) {
                        std::size_t length = 0;
                        auto [ptr, ec] =
                            std::from_chars(cl->data(), cl->data() + cl->size(), length);
                        if (ec != std::errc() || ptr != cl->data() + cl->size())
                            throw TransportFailure("bad Content-Length in response");
                        expected_total = header_end + 4 + length;
                    }
                }
            }
            if (expected_total != std::string::npos && raw.size() >= expected_total) break;
            continue;
        }
        if (n == 0) break;  // EOF
        if (errno == EAGAIN || errno == EWOULDBLOCK) {
            wait_ready(fd.get(), POLLIN, deadline, "receive");
            continue;
        }
        if (errno == EINTR) continue;
        throw TransportFailure("receive failed: " + errno_text());
    }

    if (expected_total != std::string::npos) {
        if (raw.size() < expected_total)
            throw TransportFailure("response ended before the declared Content-Length");
        raw.resize(expected_total);
    }
    return parse_response(raw);
}

}  // namespace soapbridge::http
