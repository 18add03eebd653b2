#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "soapbridge/contract.hpp"
#include "soapbridge/http.hpp"
#include "soapbridge/value.hpp"

namespace soapbridge::host {

struct Permissions {
    bool read = true;
    bool execute = true;
};

/// Invoked with the operation name and decoded arguments; returns the result
/// value, or nullopt for void operations. Anything thrown becomes a Server
/// fault. Must be safe to call from concurrent request threads.
using OperationHandler = std::function<std::optional<Value>(
    const std::string& operation,
    const std::vector<std::pair<std::string, Value>>& args)>;

struct ServiceRegistration {
    contract::ServiceDescriptor descriptor;
    OperationHandler handler;
};

class HostError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UnknownFolder : public HostError {
public:
    explicit UnknownFolder(const std::string& path)
        : HostError("no virtual folder '" + path + "'") {}
};

class DuplicateService : public HostError {
public:
    DuplicateService(const std::string& folder, const std::string& service)
        : HostError("service '" + service + "' already registered under '" + folder +
                    "'") {}
};

/// Routing table over virtual folders. Configure folders and services before
/// serving; handle_request is const and safe for concurrent callers.
class ServiceHost {
public:
    /// Folder paths are absolute, without a trailing slash ("/OracleWebService").
    void add_folder(const std::string& path, Permissions permissions);
    void register_service(const std::string& folder_path, const std::string& service_name,
                          ServiceRegistration registration);

    http::Response handle_request(const http::Request& request) const;

    /// Adapter for http::Server; the host must outlive the server.
    http::RequestHandler request_handler() const;

private:
    struct Folder {
        Permissions permissions;
        std::map<std::string, ServiceRegistration> services;
    };

    std::map<std::string, Folder> folders_;
};

/// Well-formed XHTML page describing a service: every operation gets one
/// heading plus its parameter and return types.
std::string render_test_page(const contract::ServiceDescriptor& descriptor,
                             const std::string& base_url);

/// Binds and starts a server that routes through the host. The host must
/// outlive the returned server. Throws http::BindFailure.
std::unique_ptr<http::Server> serve(const ServiceHost& host, const std::string& bind_address,
                                    http::ServerOptions options = {});

}  // namespace soapbridge::host
