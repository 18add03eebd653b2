#pragma once

#include <chrono>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "soapbridge/contract.hpp"
#include "soapbridge/soap.hpp"
#include "soapbridge/value.hpp"

namespace soapbridge::client {

class ClientError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Connection or protocol failure below the SOAP layer.
class TransportError : public ClientError {
public:
    explicit TransportError(const std::string& reason, std::optional<int> status = {})
        : ClientError(reason), status_(status) {}
    /// Set when the failure was an unexpected HTTP status.
    std::optional<int> status() const { return status_; }

private:
    std::optional<int> status_;
};

/// The deadline elapsed before the exchange finished.
class TimeoutError : public ClientError {
public:
    using ClientError::ClientError;
};

/// The server answered with a SOAP fault, carried verbatim.
class FaultError : public ClientError {
public:
    explicit FaultError(soap::SoapFault fault)
        : ClientError(fault.fault_string), fault_(std::move(fault)) {}
    const soap::SoapFault& fault() const { return fault_; }

private:
    soap::SoapFault fault_;
};

/// The request or response does not fit the fetched service contract.
class ContractError : public ClientError {
public:
    using ClientError::ClientError;
};

/// A dynamic stub for one endpoint: the parsed contract plus the URL and
/// transport settings used by call(). Stateless between calls, so one proxy
/// may be shared across threads.
struct ServiceProxy {
    contract::ServiceDescriptor descriptor;
    std::string endpoint_url;
    std::chrono::milliseconds timeout{10000};
};

/// GETs `url?wsdl` (appending the query when absent) and parses the body.
/// Returns the descriptor and the endpoint URL advertised inside it.
std::pair<contract::ServiceDescriptor, std::string> fetch_wsdl(
    const std::string& url,
    std::chrono::milliseconds timeout = std::chrono::milliseconds(10000));

/// fetch_wsdl plus proxy construction in one step.
ServiceProxy connect(const std::string& url,
                     std::chrono::milliseconds timeout = std::chrono::milliseconds(10000));

/// Invokes one operation; the optional is empty for void operations.
/// Arguments are validated against the descriptor before any bytes are
/// sent. Exactly one HTTP request per invocation; no retries, no redirects.
std::optional<Value> call(const ServiceProxy& proxy, const std::string& operation,
                          const std::vector<std::pair<std::string, Value>>& args);

}  // namespace soapbridge::client
