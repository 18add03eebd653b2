#include "soapbridge/soap.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>

namespace soapbridge::soap {

namespace {

using contract::ServiceDescriptor;
using contract::TypeRef;
using xml::QName;
using xml::XmlNode;

const std::string kEnv = kEnvelopeNamespace;

std::string trimmed(const std::string& s) {
    const char* ws = " \t\n\r";
    auto begin = s.find_first_not_of(ws);
    if (begin == std::string::npos) return "";
    auto end = s.find_last_not_of(ws);
    return s.substr(begin, end - begin + 1);
}

bool has_element_child(const XmlNode::Element& e) {
    for (const auto& c : e.children)
        if (c.is_element()) return true;
    return false;
}

std::string scalar_text(const XmlNode::Element& e, const std::string& param,
                        const TypeRef& type) {
    if (has_element_child(e))
        throw TypeMismatch(param, type.display_name(), "element content");
    std::string out;
    for (const auto& c : e.children) out += c.text_content();
    return out;
}

XmlNode encode_fault(const SoapFault& f) {
    // The prefix in the faultcode text matches the hint soap_prefix_hints
    // emits; decoders strip whatever prefix they find.
    XmlNode fault = XmlNode::element(QName{"Fault", kEnv});
    fault.add_child(XmlNode::element(QName{"faultcode", ""})
                        .add_child(XmlNode::text("soap:" + fault_code_text(f.code))));
    XmlNode fs = XmlNode::element(QName{"faultstring", ""});
    if (!f.fault_string.empty()) fs.add_child(XmlNode::text(f.fault_string));
    fault.add_child(std::move(fs));
    if (f.detail) {
        XmlNode detail = XmlNode::element(QName{"detail", ""});
        if (!f.detail->empty()) detail.add_child(XmlNode::text(*f.detail));
        fault.add_child(std::move(detail));
    }
    return fault;
}

FaultCode parse_fault_code(const std::string& text) {
    std::string token = trimmed(text);
    if (auto colon = token.rfind(':'); colon != std::string::npos)
        token = token.substr(colon + 1);
    if (token == "VersionMismatch") return FaultCode::VersionMismatch;
    if (token == "MustUnderstand") return FaultCode::MustUnderstand;
    if (token == "Client") return FaultCode::Client;
    if (token == "Server") return FaultCode::Server;
    throw MalformedBody("unrecognized faultcode '" + text + "'");
}

SoapFault decode_fault(const XmlNode::Element& fault) {
    const XmlNode* code = nullptr;
    const XmlNode* fstring = nullptr;
    const XmlNode* detail = nullptr;
    for (const auto& c : fault.children) {
        if (!c.is_element()) continue;
        const auto& local = c.as_element().name.local_name;
        if (local == "faultcode")
            code = &c;
        else if (local == "faultstring")
            fstring = &c;
        else if (local == "detail")
            detail = &c;
        // faultactor and extensions are tolerated and dropped
    }
    if (!code) throw MalformedBody("Fault is missing faultcode");
    if (!fstring) throw MalformedBody("Fault is missing faultstring");
    SoapFault f;
    f.code = parse_fault_code(code->inner_text());
    f.fault_string = fstring->inner_text();
    if (detail) f.detail = detail->inner_text();
    return f;
}

SoapEnvelope::Call decode_call(const XmlNode::Element& wrapper,
                               const contract::OperationDescriptor& op,
                               const ServiceDescriptor& descriptor) {
    std::vector<const XmlNode*> args;
    for (const auto& c : wrapper.children) {
        if (!c.is_element())
            throw MalformedBody("unexpected text inside '" + op.name + "'");
        args.push_back(&c);
    }
    if (args.size() != op.params.size())
        throw MalformedBody("'" + op.name + "' expects " +
                            std::to_string(op.params.size()) + " argument(s), found " +
                            std::to_string(args.size()));
    SoapEnvelope::Call call;
    call.operation = wrapper.name;
    for (std::size_t i = 0; i < args.size(); ++i) {
        const auto& param = op.params[i];
        const auto& el = args[i]->as_element();
        if (el.name.local_name != param.name)
            throw TypeMismatch(param.name, "argument element '" + param.name + "'",
                               "'" + el.name.local_name + "'");
        call.args.emplace_back(param.name, decode_value(*args[i], param.type, descriptor));
    }
    return call;
}

SoapEnvelope::Response decode_response(const XmlNode::Element& wrapper,
                                       const contract::OperationDescriptor& op,
                                       const ServiceDescriptor& descriptor) {
    std::vector<const XmlNode*> children;
    for (const auto& c : wrapper.children) {
        if (!c.is_element())
            throw MalformedBody("unexpected text inside '" + wrapper.name.local_name + "'");
        children.push_back(&c);
    }
    SoapEnvelope::Response resp;
    resp.operation = QName{op.name, wrapper.name.namespace_uri};
    if (op.returns.kind() == TypeRef::Kind::Void) {
        if (!children.empty())
            throw MalformedBody("'" + op.name + "' returns nothing but a result was given");
        return resp;
    }
    if (children.size() != 1)
        throw MalformedBody("'" + wrapper.name.local_name +
                            "' must contain exactly one result element");
    const auto& result = children.front()->as_element();
    const std::string expected_name = op.name + "Result";
    if (result.name.local_name != expected_name)
        throw MalformedBody("expected result element '" + expected_name + "', found '" +
                            result.name.local_name + "'");
    resp.result = decode_value(*children.front(), op.returns, descriptor);
    return resp;
}

}  // namespace

std::string fault_code_text(FaultCode code) {
    switch (code) {
        case FaultCode::VersionMismatch: return "VersionMismatch";
        case FaultCode::MustUnderstand: return "MustUnderstand";
        case FaultCode::Client: return "Client";
        case FaultCode::Server: return "Server";
    }
    return "Server";
}

xml::XmlNode encode_value(const std::string& name, const Value& v) {
    XmlNode el = XmlNode::element(QName{name, ""});
    switch (v.kind()) {
        case Value::Kind::Text:
            if (!v.as_text().empty()) el.add_child(XmlNode::text(v.as_text()));
            break;
        case Value::Kind::Int:
            el.add_child(XmlNode::text(canonical_int(v.as_int())));
            break;
        case Value::Kind::Boolean:
            el.add_child(XmlNode::text(canonical_boolean(v.as_boolean())));
            break;
        case Value::Kind::Double:
            el.add_child(XmlNode::text(canonical_double(v.as_double())));
            break;
        case Value::Kind::TextList:
            for (const auto& item : v.as_text_list()) {
                XmlNode s = XmlNode::element(QName{"string", ""});
                if (!item.empty()) s.add_child(XmlNode::text(item));
                el.add_child(std::move(s));
            }
            break;
        case Value::Kind::Record:
            for (const auto& field : v.as_record().fields)
                el.add_child(encode_value(field.name, field.value));
            break;
    }
    return el;
}

Value parse_lexical(const std::string& param, const std::string& text,
                    const contract::TypeRef& type) {
    using Kind = TypeRef::Kind;
    switch (type.kind()) {
        case Kind::Text:
            return Value::text(text);
        case Kind::Int: {
            std::string t = trimmed(text);
            std::string digits = (!t.empty() && t[0] == '+') ? t.substr(1) : t;
            if (digits.empty() || (!std::isdigit(static_cast<unsigned char>(digits[0])) &&
                                   !(digits[0] == '-' && digits.size() > 1)))
                throw TypeMismatch(param, type.display_name(), "'" + text + "'");
            std::int64_t out = 0;
            auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), out);
            if (ec != std::errc() || ptr != digits.data() + digits.size())
                throw TypeMismatch(param, type.display_name(), "'" + text + "'");
            return Value::integer(out);
        }
        case Kind::Boolean: {
            std::string t = trimmed(text);
            if (t == "true" || t == "1") return Value::boolean(true);
            if (t == "false" || t == "0") return Value::boolean(false);
            throw TypeMismatch(param, type.display_name(), "'" + text + "'");
        }
        case Kind::Double: {
            std::string t = trimmed(text);
            std::string body = (!t.empty() && t[0] == '+') ? t.substr(1) : t;
            double out = 0;
            auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), out);
            if (ec != std::errc() || body.empty() || ptr != body.data() + body.size() ||
                !std::isfinite(out))
                throw TypeMismatch(param, type.display_name(), "'" + text + "'");
            return Value::real(out);
        }
        default:
            throw TypeMismatch(param, type.display_name(), "'" + text + "'");
    }
}

Value decode_value(const xml::XmlNode& element, const contract::TypeRef& type,
                   const contract::ServiceDescriptor& descriptor) {
    using Kind = TypeRef::Kind;
    const auto& e = element.as_element();
    const std::string& where = e.name.local_name;
    switch (type.kind()) {
        case Kind::Text:
            return Value::text(scalar_text(e, where, type));
        case Kind::Int:
        case Kind::Boolean:
        case Kind::Double:
            return parse_lexical(where, scalar_text(e, where, type), type);
        case Kind::TextList: {
            std::vector<std::string> items;
            for (const auto& c : e.children) {
                if (!c.is_element())
                    throw TypeMismatch(where, type.display_name(), "text content");
                const auto& item = c.as_element();
                if (item.name.local_name != "string")
                    throw TypeMismatch(where, "'string' item element",
                                       "'" + item.name.local_name + "'");
                if (has_element_child(item))
                    throw TypeMismatch(item.name.local_name, "text", "element content");
                items.push_back(c.inner_text());
            }
            return Value::text_list(std::move(items));
        }
        case Kind::Record: {
            const auto* def = descriptor.find_record(type.record_name());
            if (!def)
                throw MalformedBody("no record definition for '" + type.record_name() + "'");
            std::vector<const XmlNode*> fields;
            for (const auto& c : e.children) {
                if (!c.is_element())
                    throw MalformedBody("unexpected text inside '" + where + "'");
                fields.push_back(&c);
            }
            if (fields.size() != def->fields.size())
                throw TypeMismatch(where, type.display_name(),
                                   std::to_string(fields.size()) + " field element(s)");
            std::vector<Value::RecordField> out;
            for (std::size_t i = 0; i < fields.size(); ++i) {
                const auto& fd = def->fields[i];
                const auto& fe = fields[i]->as_element();
                if (fe.name.local_name != fd.name)
                    throw TypeMismatch(fd.name, "field element '" + fd.name + "'",
                                       "'" + fe.name.local_name + "'");
                out.push_back({fd.name, decode_value(*fields[i], fd.type, descriptor)});
            }
            return Value::record(type.record_name(), std::move(out));
        }
        case Kind::Void:
            throw MalformedBody("'" + where + "' cannot carry a void value");
    }
    throw MalformedBody("unhandled type");
}

bool value_conforms(const Value& v, const contract::TypeRef& type,
                    const contract::ServiceDescriptor& descriptor) {
    using Kind = TypeRef::Kind;
    switch (type.kind()) {
        case Kind::Text: return v.kind() == Value::Kind::Text;
        case Kind::Int: return v.kind() == Value::Kind::Int;
        case Kind::Boolean: return v.kind() == Value::Kind::Boolean;
        case Kind::Double:
            return v.kind() == Value::Kind::Double && std::isfinite(v.as_double());
        case Kind::TextList: return v.kind() == Value::Kind::TextList;
        case Kind::Record: {
            if (v.kind() != Value::Kind::Record) return false;
            if (v.as_record().type_name != type.record_name()) return false;
            const auto* def = descriptor.find_record(type.record_name());
            if (!def) return false;
            const auto& fields = v.as_record().fields;
            if (fields.size() != def->fields.size()) return false;
            for (std::size_t i = 0; i < fields.size(); ++i) {
                if (fields[i].name != def->fields[i].name) return false;
                if (!value_conforms(fields[i].value, def->fields[i].type, descriptor))
                    return false;
            }
            return true;
        }
        case Kind::Void: return false;
    }
    return false;
}

xml::XmlDocument encode_envelope(const SoapEnvelope& env) {
    XmlNode body = XmlNode::element(QName{"Body", kEnv});
    if (env.is_call()) {
        const auto& call = env.as_call();
        XmlNode wrapper = XmlNode::element(call.operation);
        for (const auto& [name, value] : call.args)
            wrapper.add_child(encode_value(name, value));
        body.add_child(std::move(wrapper));
    } else if (env.is_response()) {
        const auto& resp = env.as_response();
        XmlNode wrapper = XmlNode::element(
            QName{resp.operation.local_name + "Response", resp.operation.namespace_uri});
        if (resp.result)
            wrapper.add_child(
                encode_value(resp.operation.local_name + "Result", *resp.result));
        body.add_child(std::move(wrapper));
    } else {
        body.add_child(encode_fault(env.as_fault()));
    }
    XmlNode root = XmlNode::element(QName{"Envelope", kEnv});
    root.add_child(std::move(body));
    return xml::XmlDocument{std::move(root)};
}

SoapEnvelope decode_envelope(const xml::XmlDocument& doc,
                             const contract::ServiceDescriptor& descriptor) {
    const auto& root = doc.root.as_element();
    if (root.name != QName{"Envelope", kEnv})
        throw NotSoap("document root is not a SOAP 1.1 Envelope");

    const XmlNode* body = nullptr;
    for (const auto& c : root.children) {
        if (!c.is_element()) throw MalformedBody("unexpected text inside Envelope");
        const auto& name = c.as_element().name;
        if (name == QName{"Header", kEnv}) {
            if (body) throw MalformedBody("Header must precede Body");
            continue;  // headers are accepted and ignored
        }
        if (name == QName{"Body", kEnv}) {
            if (body) throw MalformedBody("more than one Body");
            body = &c;
            continue;
        }
        throw MalformedBody("unexpected element '" + name.local_name + "' inside Envelope");
    }
    if (!body) throw MalformedBody("Envelope has no Body");

    const XmlNode* payload = nullptr;
    for (const auto& c : body->as_element().children) {
        if (!c.is_element()) throw MalformedBody("unexpected text inside Body");
        if (payload) throw MalformedBody("Body must contain exactly one element");
        payload = &c;
    }
    if (!payload) throw MalformedBody("Body is empty");

    const auto& wrapper = payload->as_element();
    if (wrapper.name == QName{"Fault", kEnv})
        return SoapEnvelope::fault(decode_fault(wrapper));

    const std::string& local = wrapper.name.local_name;
    if (wrapper.name.namespace_uri != descriptor.target_namespace)
        throw UnknownOperation(local);
    if (const auto* op = descriptor.find_operation(local))
        return SoapEnvelope::call(decode_call(wrapper, *op, descriptor));
    constexpr std::string_view suffix = "Response";
    if (local.size() > suffix.size() &&
        local.compare(local.size() - suffix.size(), suffix.size(), suffix) == 0) {
        const std::string base = local.substr(0, local.size() - suffix.size());
        if (const auto* op = descriptor.find_operation(base))
            return SoapEnvelope::response(decode_response(wrapper, *op, descriptor));
    }
    throw UnknownOperation(local);
}

xml::PrefixHints soap_prefix_hints(const std::string& target_namespace) {
    xml::PrefixHints hints{{kEnv, "soap"}};
    if (!target_namespace.empty()) hints.emplace_back(target_namespace, "tns");
    return hints;
}

std::string envelope_bytes(const SoapEnvelope& env, const std::string& target_namespace) {
    return xml::serialize_document(encode_envelope(env), soap_prefix_hints(target_namespace));
}

}  // namespace soapbridge::soap
