#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "soapbridge/xml.hpp"

namespace soapbridge::contract {

/// Wire type of a parameter, return value, or record field.
class TypeRef {
public:
    enum class Kind { Text, Int, Boolean, Double, TextList, Record, Void };

    static TypeRef text() { return TypeRef(Kind::Text); }
    static TypeRef integer() { return TypeRef(Kind::Int); }
    static TypeRef boolean() { return TypeRef(Kind::Boolean); }
    static TypeRef real() { return TypeRef(Kind::Double); }
    static TypeRef text_list() { return TypeRef(Kind::TextList); }
    static TypeRef record(std::string name) {
        TypeRef t(Kind::Record);
        t.record_name_ = std::move(name);
        return t;
    }
    static TypeRef void_type() { return TypeRef(Kind::Void); }

    Kind kind() const { return kind_; }
    const std::string& record_name() const { return record_name_; }

    bool operator==(const TypeRef& other) const {
        return kind_ == other.kind_ && record_name_ == other.record_name_;
    }
    bool operator!=(const TypeRef& other) const { return !(*this == other); }

    /// Human-readable name used by the test page and the describe command.
    std::string display_name() const;

private:
    explicit TypeRef(Kind k) : kind_(k) {}
    Kind kind_;
    std::string record_name_;
};

struct FieldDef {
    std::string name;
    TypeRef type;

    bool operator==(const FieldDef& other) const {
        return name == other.name && type == other.type;
    }
};

struct RecordDef {
    std::string name;
    std::vector<FieldDef> fields;

    bool operator==(const RecordDef& other) const {
        return name == other.name && fields == other.fields;
    }
};

struct OperationDescriptor {
    std::string name;
    std::vector<FieldDef> params;
    TypeRef returns = TypeRef::void_type();
    std::optional<std::string> doc;

    bool operator==(const OperationDescriptor& other) const {
        return name == other.name && params == other.params && returns == other.returns &&
               doc == other.doc;
    }
};

struct ServiceDescriptor {
    std::string service_name;
    std::string target_namespace;
    std::vector<RecordDef> records;
    std::vector<OperationDescriptor> operations;

    const OperationDescriptor* find_operation(const std::string& name) const;
    const RecordDef* find_record(const std::string& name) const;

    bool operator==(const ServiceDescriptor& other) const {
        return service_name == other.service_name &&
               target_namespace == other.target_namespace && records == other.records &&
               operations == other.operations;
    }
};

struct Violation {
    std::string path;  // operation/param/record that violates
    std::string message;
};

/// Empty result means the descriptor satisfies every contract rule.
std::vector<Violation> validate_descriptor(const ServiceDescriptor& d);

class WsdlError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NotWsdl : public WsdlError {
public:
    using WsdlError::WsdlError;
};

class UnsupportedWsdlFeature : public WsdlError {
public:
    using WsdlError::WsdlError;
};

class MissingSection : public WsdlError {
public:
    explicit MissingSection(std::string section)
        : WsdlError("WSDL is missing its '" + section + "' section"),
          section_(std::move(section)) {}
    const std::string& section() const { return section_; }

private:
    std::string section_;
};

class UnresolvedTypeReference : public WsdlError {
public:
    explicit UnresolvedTypeReference(std::string name)
        : WsdlError("unresolved type reference '" + name + "'"), name_(std::move(name)) {}
    const std::string& name() const { return name_; }

private:
    std::string name_;
};

/// WSDL 1.1 projection of a valid descriptor: types, message pairs, one
/// portType, one document-style binding, one service/port at endpoint_url.
xml::XmlDocument generate_wsdl(const ServiceDescriptor& d, const std::string& endpoint_url);

/// Inverse of generate_wsdl for documents this toolkit emits. Sibling
/// sections may appear in any order; anything outside the subset is an error,
/// never a guess.
std::pair<ServiceDescriptor, std::string> parse_wsdl(const xml::XmlDocument& doc);

/// Preferred prefixes for serializing WSDL documents.
xml::PrefixHints wsdl_prefix_hints(const std::string& target_namespace);

/// generate_wsdl + serialization with the canonical prefixes.
std::string wsdl_bytes(const ServiceDescriptor& d, const std::string& endpoint_url);

std::string soap_action_for(const std::string& target_namespace, const std::string& op_name);

constexpr const char* kWsdlNamespace = "http://schemas.xmlsoap.org/wsdl/";
constexpr const char* kSoapBindingNamespace = "http://schemas.xmlsoap.org/wsdl/soap/";
constexpr const char* kXsdNamespace = "http://www.w3.org/2001/XMLSchema";

}  // namespace soapbridge::contract
