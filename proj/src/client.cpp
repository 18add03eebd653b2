#include "soapbridge/client.hpp"

#include <string>
#include <utility>

#include "soapbridge/http.hpp"
#include "soapbridge/xml.hpp"

namespace soapbridge::client {
namespace {

http::Url locate(const std::string& url) {
    try {
        return http::parse_http_url(url);
    } catch (const http::HttpError& e) {
        throw ContractError(e.what());
    }
}

http::Response exchange(const http::Url& where, const http::Request& request,
                        std::chrono::milliseconds timeout) {
    try {
        return http::fetch(where.host, where.port, request, timeout);
    } catch (const http::TimeoutFailure& e) {
        throw TimeoutError(e.what());
    } catch (const http::HttpError& e) {
        throw TransportError(e.what());
    }
}

TransportError bad_status(int status) {
    return TransportError("HTTP status " + std::to_string(status), status);
}

}  // namespace

std::pair<contract::ServiceDescriptor, std::string> fetch_wsdl(
    const std::string& url, std::chrono::milliseconds timeout) {
    http::Url where = locate(url);

    http::Request request;
    request.method = "GET";
    request.path = where.path;
    request.query = where.query.empty() ? "wsdl" : where.query;

    http::Response response = exchange(where, request, timeout);
    if (response.status != 200) throw bad_status(response.status);

    try {
        return contract::parse_wsdl(xml::parse_document(response.body));
    } catch (const xml::XmlError& e) {
        throw ContractError(std::string("response is not a WSDL document: ") + e.what());
    } catch (const contract::WsdlError& e) {
        throw ContractError(std::string("response is not a WSDL document: ") + e.what());
    }
}

ServiceProxy connect(const std::string& url, std::chrono::milliseconds timeout) {
    auto [descriptor, endpoint] = fetch_wsdl(url, timeout);
    return ServiceProxy{std::move(descriptor), std::move(endpoint), timeout};
}

std::optional<Value> call(const ServiceProxy& proxy, const std::string& operation,
                          const std::vector<std::pair<std::string, Value>>& args) {
    const contract::OperationDescriptor* op = proxy.descriptor.find_operation(operation);
    if (op == nullptr)
        throw ContractError("no operation " + operation + " in service " +
                            proxy.descriptor.service_name);
    if (args.size() != op->params.size())
        throw ContractError(operation + " takes " + std::to_string(op->params.size()) +
                            " arguments, got " + std::to_string(args.size()));
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i].first != op->params[i].name)
            throw ContractError(operation + " argument " + std::to_string(i + 1) +
                                " must be named " + op->params[i].name + ", got " +
                                args[i].first);
        if (!soap::value_conforms(args[i].second, op->params[i].type, proxy.descriptor))
            throw ContractError(operation + " argument " + args[i].first +
                                " does not match its declared type " +
                                op->params[i].type.display_name());
    }

    http::Url where = locate(proxy.endpoint_url);
    const std::string& tns = proxy.descriptor.target_namespace;

    http::Request request;
    request.method = "POST";
    request.path = where.path;
    request.query = where.query;
    request.set_header("Content-Type", "text/xml; charset=utf-8");
    request.set_header("SOAPAction",
                       "\"" + contract::soap_action_for(tns, operation) + "\"");
    soap::SoapEnvelope::Call body{xml::QName{operation, tns}, args};
    request.body = soap::envelope_bytes(soap::SoapEnvelope::call(std::move(body)), tns);

    http::Response response = exchange(where, request, proxy.timeout);
    if (response.status != 200 && response.status != 500) throw bad_status(response.status);

    soap::SoapEnvelope envelope = soap::SoapEnvelope::fault({});
    try {
        envelope = soap::decode_envelope(xml::parse_document(response.body),
                                         proxy.descriptor);
    } catch (const xml::XmlError& e) {
        if (response.status == 500) throw bad_status(response.status);
        throw ContractError(std::string("response is not a SOAP message: ") + e.what());
    } catch (const soap::SoapError& e) {
        if (response.status == 500) throw bad_status(response.status);
        throw ContractError(std::string("response is not a SOAP message: ") + e.what());
    }

    if (envelope.is_fault()) throw FaultError(envelope.as_fault());
    if (response.status == 500) throw bad_status(response.status);
    if (!envelope.is_response())
        throw ContractError("server sent a call envelope instead of a response");

    const soap::SoapEnvelope::Response& answer = envelope.as_response();
    if (answer.operation.local_name != operation || answer.operation.namespace_uri != tns)
        throw ContractError("response answers " + answer.operation.local_name +
                            ", expected " + operation);

    if (op->returns.kind() == contract::TypeRef::Kind::Void) {
        if (answer.result.has_value())
            throw ContractError(operation + " is void but the response carried a value");
        return std::nullopt;
    }
    if (!answer.result.has_value())
        throw ContractError("response for " + operation + " is missing its result");
    if (!soap::value_conforms(*answer.result, op->returns, proxy.descriptor))
        throw ContractError("response for " + operation +
                            " does not match the declared return type");
    return answer.result;
}

}  // namespace soapbridge::client
