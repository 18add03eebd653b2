#include "soapbridge/host.hpp"

#include "soapbridge/soap.hpp"
#include "soapbridge/xml.hpp"

namespace soapbridge::host {

namespace {

http::Response plain_response(int status, const std::string& text) {
    http::Response r;
    r.status = status;
    r.set_header("Content-Type", "text/plain; charset=utf-8");
    r.body = text + "\n";
    return r;
}

http::Response xml_response(int status, const char* content_type, std::string body) {
    http::Response r;
    r.status = status;
    r.set_header("Content-Type", content_type);
    r.body = std::move(body);
    return r;
}

http::Response fault_response(const contract::ServiceDescriptor& descriptor,
                              soap::FaultCode code, const std::string& message) {
    soap::SoapFault fault;
    fault.code = code;
    fault.fault_string = message;
    return xml_response(500, "text/xml; charset=utf-8",
                        soap::envelope_bytes(soap::SoapEnvelope::fault(std::move(fault)),
                                             descriptor.target_namespace));
}

http::Response dispatch_post(const ServiceRegistration& registration,
                             const http::Request& request) {
    const contract::ServiceDescriptor& d = registration.descriptor;

    std::optional<soap::SoapEnvelope> envelope;
    try {
        xml::XmlDocument doc = xml::parse_document(request.body);
        envelope = soap::decode_envelope(doc, d);
    } catch (const xml::XmlError& e) {
        return fault_response(d, soap::FaultCode::Client,
                              std::string("request is not well-formed XML: ") + e.what());
    } catch (const soap::SoapError& e) {
        return fault_response(d, soap::FaultCode::Client, e.what());
    }

    if (!envelope->is_call())
        return fault_response(d, soap::FaultCode::Client,
                              "request body must contain an operation call");
    const auto& call = envelope->as_call();

    if (const std::string* action = request.find_header("SOAPAction")) {
        std::string got = *action;
        if (got.size() >= 2 && got.front() == '"' && got.back() == '"')
            got = got.substr(1, got.size() - 2);
        std::string expected =
            contract::soap_action_for(d.target_namespace, call.operation.local_name);
        if (!got.empty() && got != expected)
            return fault_response(d, soap::FaultCode::Client,
                                  "SOAPAction '" + got + "' does not match operation '" +
                                      call.operation.local_name + "'");
    }

    const contract::OperationDescriptor* op = d.find_operation(call.operation.local_name);
    if (!op)  // decode_envelope guarantees this; guard anyway
        return fault_response(d, soap::FaultCode::Client,
                              "unknown operation '" + call.operation.local_name + "'");

    std::optional<Value> result;
    try {
        result = registration.handler(call.operation.local_name, call.args);
    } catch (const std::exception& e) {
        return fault_response(d, soap::FaultCode::Server, e.what());
    } catch (...) {
        return fault_response(d, soap::FaultCode::Server, "handler failed");
    }

    bool wants_value = op->returns.kind() != contract::TypeRef::Kind::Void;
    if (wants_value && !result)
        return fault_response(d, soap::FaultCode::Server,
                              "handler returned no value for " + op->name);
    if (!wants_value && result)
        return fault_response(d, soap::FaultCode::Server,
                              "handler returned a value for void operation " + op->name);
    if (result && !soap::value_conforms(*result, op->returns, d))
        return fault_response(d, soap::FaultCode::Server,
                              "handler returned a value of the wrong type for " + op->name);

    soap::SoapEnvelope::Response response{call.operation, std::move(result)};
    return xml_response(
        200, "text/xml; charset=utf-8",
        soap::envelope_bytes(soap::SoapEnvelope::response(std::move(response)),
                             d.target_namespace));
}

}  // namespace

void ServiceHost::add_folder(const std::string& path, Permissions permissions) {
    if (path.empty() || path[0] != '/')
        throw HostError("folder path must begin with '/', got '" + path + "'");
    if (path.size() > 1 && path.back() == '/')
        throw HostError("folder path must not end with '/', got '" + path + "'");
    if (folders_.count(path)) throw HostError("folder '" + path + "' already configured");
    folders_[path] = Folder{permissions, {}};
}

void ServiceHost::register_service(const std::string& folder_path,
                                   const std::string& service_name,
                                   ServiceRegistration registration) {
    auto it = folders_.find(folder_path);
    if (it == folders_.end()) throw UnknownFolder(folder_path);
    if (it->second.services.count(service_name))
        throw DuplicateService(folder_path, service_name);
    it->second.services.emplace(service_name, std::move(registration));
}

http::Response ServiceHost::handle_request(const http::Request& request) const {
    auto slash = request.path.rfind('/');
    if (slash == std::string::npos) return plain_response(404, "not found");
    std::string folder_path = slash == 0 ? "/" : request.path.substr(0, slash);
    std::string service_name = request.path.substr(slash + 1);

    auto folder_it = folders_.find(folder_path);
    if (folder_it == folders_.end()) return plain_response(404, "not found");
    const Folder& folder = folder_it->second;
    auto service_it = folder.services.find(service_name);
    if (service_it == folder.services.end()) return plain_response(404, "not found");
    const ServiceRegistration& registration = service_it->second;

    if (request.method == "GET") {
        if (!folder.permissions.read) return plain_response(403, "read permission denied");
        const std::string* host_header = request.find_header("Host");
        std::string base_url = "http://" +
                               (host_header ? *host_header : std::string("localhost")) +
                               request.path;
        if (request.query == "wsdl")
            return xml_response(200, "text/xml; charset=utf-8",
                                contract::wsdl_bytes(registration.descriptor, base_url));
        return xml_response(200, "text/html; charset=utf-8",
                            render_test_page(registration.descriptor, base_url));
    }

    if (request.method == "POST") {
        if (!folder.permissions.execute)
            return plain_response(403, "execute permission denied");
        return dispatch_post(registration, request);
    }

    http::Response r = plain_response(405, "method not allowed");
    r.set_header("Allow", "GET, POST");
    return r;
}

http::RequestHandler ServiceHost::request_handler() const {
    return [this](const http::Request& request) { return handle_request(request); };
}

std::string render_test_page(const contract::ServiceDescriptor& descriptor,
                             const std::string& base_url) {
    using xml::QName;
    using xml::XmlNode;

    auto el = [](const char* name) { return XmlNode::element(QName{name, ""}); };
    auto text_el = [&](const char* name, std::string content) {
        XmlNode node = el(name);
        node.add_child(XmlNode::text(std::move(content)));
        return node;
    };

    XmlNode head = el("head");
    head.add_child(text_el("title", descriptor.service_name + " Web Service"));

    XmlNode body = el("body");
    body.add_child(text_el("h1", descriptor.service_name));
    body.add_child(
        text_el("p", "Target namespace: " + descriptor.target_namespace));
    body.add_child(text_el("p", "Endpoint: " + base_url));
    body.add_child(text_el("p", "The following operations are supported:"));

    for (const auto& op : descriptor.operations) {
        XmlNode section = el("div");
        section.add_attribute(QName{"class", ""}, "operation");
        section.add_child(text_el("h2", op.name));
        if (op.doc) section.add_child(text_el("p", *op.doc));
        if (op.params.empty()) {
            section.add_child(text_el("p", "(no parameters)"));
        } else {
            XmlNode list = el("ul");
            for (const auto& param : op.params)
                list.add_child(
                    text_el("li", param.name + ": " + param.type.display_name()));
            XmlNode params = el("p");
            params.add_child(XmlNode::text("Parameters:"));
            section.add_child(std::move(params));
            section.add_child(std::move(list));
        }
        section.add_child(text_el("p", "Returns: " + op.returns.display_name()));
        body.add_child(std::move(section));
    }

    XmlNode link = el("a");
    link.add_attribute(QName{"href", ""}, base_url + "?wsdl");
    link.add_child(XmlNode::text("Service description (WSDL)"));
    XmlNode footer = el("p");
    footer.add_child(std::move(link));
    body.add_child(std::move(footer));

    XmlNode html = el("html");
    html.add_child(std::move(head));
    html.add_child(std::move(body));
    return xml::serialize_document(xml::XmlDocument{std::move(html)});
}

std::unique_ptr<http::Server> serve(const ServiceHost& host, const std::string& bind_address,
                                    http::ServerOptions options) {
    auto server = std::make_unique<http::Server>(bind_address, host.request_handler(),
                                                 std::move(options));
    server->start();
    return server;
}

}  // namespace soapbridge::host
