#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "soapbridge/contract.hpp"
#include "soapbridge/value.hpp"
#include "soapbridge/xml.hpp"

namespace soapbridge::soap {

enum class FaultCode { VersionMismatch, MustUnderstand, Client, Server };

struct SoapFault {
    FaultCode code = FaultCode::Server;
    std::string fault_string;
    std::optional<std::string> detail;

    bool operator==(const SoapFault& other) const {
        return code == other.code && fault_string == other.fault_string &&
               detail == other.detail;
    }
};

/// One SOAP message: a request, a successful response, or a fault.
class SoapEnvelope {
public:
    struct Call {
        xml::QName operation;  // namespace_uri is the service target namespace
        std::vector<std::pair<std::string, Value>> args;

        bool operator==(const Call& other) const {
            return operation == other.operation && args == other.args;
        }
    };

    struct Response {
        xml::QName operation;
        std::optional<Value> result;  // empty for void operations

        bool operator==(const Response& other) const {
            return operation == other.operation && result == other.result;
        }
    };

    static SoapEnvelope call(Call c) { return SoapEnvelope(std::move(c)); }
    static SoapEnvelope response(Response r) { return SoapEnvelope(std::move(r)); }
    static SoapEnvelope fault(SoapFault f) { return SoapEnvelope(std::move(f)); }

    bool is_call() const { return std::holds_alternative<Call>(body_); }
    bool is_response() const { return std::holds_alternative<Response>(body_); }
    bool is_fault() const { return std::holds_alternative<SoapFault>(body_); }

    const Call& as_call() const { return std::get<Call>(body_); }
    const Response& as_response() const { return std::get<Response>(body_); }
    const SoapFault& as_fault() const { return std::get<SoapFault>(body_); }

    bool operator==(const SoapEnvelope& other) const { return body_ == other.body_; }
    bool operator!=(const SoapEnvelope& other) const { return !(*this == other); }

private:
    explicit SoapEnvelope(Call c) : body_(std::move(c)) {}
    explicit SoapEnvelope(Response r) : body_(std::move(r)) {}
    explicit SoapEnvelope(SoapFault f) : body_(std::move(f)) {}

    std::variant<Call, Response, SoapFault> body_;
};

class SoapError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Document is not a SOAP 1.1 envelope at all (wrong root or namespace).
class NotSoap : public SoapError {
public:
    using SoapError::SoapError;
};

/// Body addresses an operation the service descriptor does not declare.
class UnknownOperation : public SoapError {
public:
    explicit UnknownOperation(std::string op)
        : SoapError("unknown operation '" + op + "'"), operation_(std::move(op)) {}
    const std::string& operation() const { return operation_; }

private:
    std::string operation_;
};

/// An argument, result, or field does not satisfy its declared type.
class TypeMismatch : public SoapError {
public:
    TypeMismatch(std::string param, std::string expected, std::string found)
        : SoapError("'" + param + "' expects " + expected + ", found " + found),
          param_(std::move(param)),
          expected_(std::move(expected)),
          found_(std::move(found)) {}
    const std::string& param() const { return param_; }
    const std::string& expected() const { return expected_; }
    const std::string& found() const { return found_; }

private:
    std::string param_;
    std::string expected_;
    std::string found_;
};

/// Envelope shape is recognizably SOAP but structurally wrong inside.
class MalformedBody : public SoapError {
public:
    using SoapError::SoapError;
};

xml::XmlDocument encode_envelope(const SoapEnvelope& env);

/// Decodes against a descriptor so argument and result types are known.
SoapEnvelope decode_envelope(const xml::XmlDocument& doc,
                             const contract::ServiceDescriptor& descriptor);

/// Value -> element named `name`; inverse of decode_value.
xml::XmlNode encode_value(const std::string& name, const Value& v);
Value decode_value(const xml::XmlNode& element, const contract::TypeRef& type,
                   const contract::ServiceDescriptor& descriptor);

/// True when the value's shape matches the declared type (records are
/// checked field-by-field against the descriptor's definitions).
bool value_conforms(const Value& v, const contract::TypeRef& type,
                    const contract::ServiceDescriptor& descriptor);

/// Strict lexical forms shared by the decoder and the CLI argument parser.
/// Whitespace around scalars is trimmed first; failure throws TypeMismatch
/// with `param` as the offending name.
Value parse_lexical(const std::string& param, const std::string& text,
                    const contract::TypeRef& type);

xml::PrefixHints soap_prefix_hints(const std::string& target_namespace);

/// encode + serialize with the canonical soap/tns prefixes.
std::string envelope_bytes(const SoapEnvelope& env, const std::string& target_namespace);

constexpr const char* kEnvelopeNamespace = "http://schemas.xmlsoap.org/soap/envelope/";

std::string fault_code_text(FaultCode code);

}  // namespace soapbridge::soap
