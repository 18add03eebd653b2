#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "soapbridge/contract.hpp"
#include "support/descriptor_gen.hpp"
#include "support/rng.hpp"

using namespace soapbridge;
using contract::FieldDef;
using contract::OperationDescriptor;
using contract::RecordDef;
using contract::ServiceDescriptor;
using contract::TypeRef;
using xml::QName;
using xml::XmlNode;

namespace {

ServiceDescriptor employee_descriptor() {
    ServiceDescriptor d;
    d.service_name = "Service";
    d.target_namespace = "urn:oraclews:employee";
    d.records = {{"Employee",
                  {{"id", TypeRef::integer()},
                   {"last_name", TypeRef::text()},
                   {"first_name", TypeRef::text()},
                   {"job", TypeRef::text()},
                   {"salary", TypeRef::real()}}}};
    d.operations = {
        {"GetEmployeesData", {}, TypeRef::text_list(), std::nullopt},
        {"GetEmployeeById", {{"id", TypeRef::integer()}}, TypeRef::record("Employee"),
         std::nullopt},
        {"AddEmployee",
         {{"last_name", TypeRef::text()},
          {"first_name", TypeRef::text()},
          {"job", TypeRef::text()},
          {"salary", TypeRef::real()}},
         TypeRef::integer(),
         std::nullopt},
        {"DeleteEmployee", {{"id", TypeRef::integer()}}, TypeRef::boolean(), std::nullopt},
        {"CountEmployees", {}, TypeRef::integer(), std::nullopt},
    };
    return d;
}

ServiceDescriptor minimal_descriptor() {
    ServiceDescriptor d;
    d.service_name = "Mini";
    d.target_namespace = "urn:mini";
    d.operations = {{"Go", {}, TypeRef::void_type(), std::nullopt}};
    return d;
}

bool has_violation(const std::vector<contract::Violation>& vs, const std::string& path) {
    return std::any_of(vs.begin(), vs.end(),
                       [&](const auto& v) { return v.path == path; });
}

XmlNode::Element* find_element(XmlNode& node, const QName& name) {
    if (!node.is_element()) return nullptr;
    auto& el = node.as_element();
    if (el.name == name) return &el;
    for (auto& c : el.children)
        if (auto* found = find_element(c, name)) return found;
    return nullptr;
}

void drop_root_children(xml::XmlDocument& doc, const std::string& local) {
    auto& children = doc.root.as_element().children;
    children.erase(std::remove_if(children.begin(), children.end(),
                                  [&](const XmlNode& n) {
                                      return n.is_element() &&
                                             n.as_element().name.local_name == local;
                                  }),
                   children.end());
}

void set_attr(XmlNode::Element& el, const std::string& local, const std::string& value) {
    for (auto& a : el.attributes) {
        if (a.name.local_name == local) {
            a.value = value;
            return;
        }
    }
    el.attributes.push_back({QName{local, ""}, value});
}

const std::string kUrl = "http://h/S.asmx";

using testsupport::random_descriptor;

}  // namespace

TEST_CASE("well-formed descriptors validate cleanly") {
    CHECK(contract::validate_descriptor(employee_descriptor()).empty());
    CHECK(contract::validate_descriptor(minimal_descriptor()).empty());
}

TEST_CASE("validation flags each contract rule with a path") {
    auto base = minimal_descriptor();

    auto d = base;
    d.service_name = "1bad";
    CHECK(has_violation(contract::validate_descriptor(d), "service"));

    d = base;
    d.target_namespace = "no-scheme";
    CHECK(has_violation(contract::validate_descriptor(d), "service"));

    d = base;
    d.operations.clear();
    CHECK(has_violation(contract::validate_descriptor(d), "service"));

    d = base;
    d.operations.push_back(d.operations[0]);
    CHECK(has_violation(contract::validate_descriptor(d), "Go"));

    d = base;
    d.operations.push_back({"GoResponse", {}, TypeRef::void_type(), std::nullopt});
    CHECK(!contract::validate_descriptor(d).empty());

    d = base;
    d.operations[0].params = {{"x", TypeRef::text()}, {"x", TypeRef::integer()}};
    CHECK(has_violation(contract::validate_descriptor(d), "Go.x"));

    d = base;
    d.operations[0].params = {{"x", TypeRef::void_type()}};
    CHECK(has_violation(contract::validate_descriptor(d), "Go.x"));

    d = base;
    d.operations[0].returns = TypeRef::record("Ghost");
    CHECK(has_violation(contract::validate_descriptor(d), "Go"));

    d = base;
    d.records = {{"R", {{"f", TypeRef::text_list()}}}};
    CHECK(has_violation(contract::validate_descriptor(d), "R.f"));

    d = base;
    d.records = {{"R", {{"f", TypeRef::record("Missing")}}}};
    CHECK(has_violation(contract::validate_descriptor(d), "R.f"));

    d = base;
    d.records = {{"R", {}}, {"R", {}}};
    CHECK(has_violation(contract::validate_descriptor(d), "R"));

    d = base;
    d.records = {{"ArrayOfString", {}}};
    CHECK(has_violation(contract::validate_descriptor(d), "ArrayOfString"));

    // Operation and record names share the schema's symbol space.
    d = base;
    d.records = {{"Go", {}}};
    CHECK(!contract::validate_descriptor(d).empty());
}

TEST_CASE("record nesting is limited to depth two and must be acyclic") {
    auto d = minimal_descriptor();
    d.records = {{"A", {{"b", TypeRef::record("B")}}},
                 {"B", {{"a", TypeRef::record("A")}}}};
    auto vs = contract::validate_descriptor(d);
    CHECK(has_violation(vs, "A"));
    CHECK(has_violation(vs, "B"));

    d.records = {{"A", {{"b", TypeRef::record("B")}}},
                 {"B", {{"c", TypeRef::record("C")}}},
                 {"C", {{"n", TypeRef::integer()}}}};
    vs = contract::validate_descriptor(d);
    CHECK(has_violation(vs, "A"));
    CHECK_FALSE(has_violation(vs, "B"));

    d.records = {{"A", {{"b", TypeRef::record("B")}}}, {"B", {{"n", TypeRef::integer()}}}};
    CHECK(contract::validate_descriptor(d).empty());

    d.records = {{"Selfish", {{"me", TypeRef::record("Selfish")}}}};
    CHECK(has_violation(contract::validate_descriptor(d), "Selfish"));
}

TEST_CASE("type display names are fixed vocabulary") {
    CHECK(TypeRef::text().display_name() == "text");
    CHECK(TypeRef::integer().display_name() == "int");
    CHECK(TypeRef::boolean().display_name() == "boolean");
    CHECK(TypeRef::real().display_name() == "double");
    CHECK(TypeRef::text_list().display_name() == "list<string-text>");
    CHECK(TypeRef::record("Employee").display_name() == "record<Employee>");
    CHECK(TypeRef::void_type().display_name() == "void");
    CHECK(contract::soap_action_for("urn:test:calc", "Echo") == "urn:test:calc/Echo");
}

TEST_CASE("the emitted WSDL format is frozen") {
    std::string bytes = contract::wsdl_bytes(minimal_descriptor(), kUrl);
    CHECK(bytes ==
          "<?xml version=\"1.0\" encoding=\"utf-8\"?>"
          "<wsdl:definitions xmlns:wsdl=\"http://schemas.xmlsoap.org/wsdl/\" "
          "xmlns:xsd=\"http://www.w3.org/2001/XMLSchema\" "
          "xmlns:soap=\"http://schemas.xmlsoap.org/wsdl/soap/\" "
          "xmlns:tns=\"urn:mini\" targetNamespace=\"urn:mini\">"
          "<wsdl:types><xsd:schema targetNamespace=\"urn:mini\">"
          "<xsd:element name=\"Go\"><xsd:complexType><xsd:sequence /></xsd:complexType>"
          "</xsd:element>"
          "<xsd:element name=\"GoResponse\"><xsd:complexType><xsd:sequence />"
          "</xsd:complexType></xsd:element>"
          "</xsd:schema></wsdl:types>"
          "<wsdl:message name=\"GoSoapIn\">"
          "<wsdl:part name=\"parameters\" element=\"tns:Go\" /></wsdl:message>"
          "<wsdl:message name=\"GoSoapOut\">"
          "<wsdl:part name=\"parameters\" element=\"tns:GoResponse\" /></wsdl:message>"
          "<wsdl:portType name=\"MiniSoap\"><wsdl:operation name=\"Go\">"
          "<wsdl:input message=\"tns:GoSoapIn\" />"
          "<wsdl:output message=\"tns:GoSoapOut\" /></wsdl:operation></wsdl:portType>"
          "<wsdl:binding name=\"MiniSoap\" type=\"tns:MiniSoap\">"
          "<soap:binding transport=\"http://schemas.xmlsoap.org/soap/http\" "
          "style=\"document\" />"
          "<wsdl:operation name=\"Go\">"
          "<soap:operation soapAction=\"urn:mini/Go\" style=\"document\" />"
          "<wsdl:input><soap:body use=\"literal\" /></wsdl:input>"
          "<wsdl:output><soap:body use=\"literal\" /></wsdl:output>"
          "</wsdl:operation></wsdl:binding>"
          "<wsdl:service name=\"Mini\">"
          "<wsdl:port name=\"MiniSoap\" binding=\"tns:MiniSoap\">"
          "<soap:address location=\"http://h/S.asmx\" /></wsdl:port></wsdl:service>"
          "</wsdl:definitions>");
}

TEST_CASE("the employee WSDL has the expected shape and parses back") {
    auto d = employee_descriptor();
    xml::XmlDocument doc = contract::generate_wsdl(d, kUrl);
    const auto& root = doc.root.as_element();

    std::size_t messages = 0;
    for (const auto& c : root.children)
        if (c.is_element() && c.as_element().name.local_name == "message") ++messages;
    CHECK(messages == 10);  // a SoapIn/SoapOut pair per operation

    auto* schema = find_element(doc.root, QName{"schema", contract::kXsdNamespace});
    REQUIRE(schema != nullptr);
    std::size_t wrappers = 0;
    std::size_t complex_types = 0;
    for (const auto& c : schema->children) {
        if (!c.is_element()) continue;
        if (c.as_element().name.local_name == "element") ++wrappers;
        if (c.as_element().name.local_name == "complexType") ++complex_types;
    }
    CHECK(wrappers == 10);
    CHECK(complex_types == 2);  // Employee and ArrayOfString

    auto [back, url] = contract::parse_wsdl(doc);
    CHECK(back == d);
    CHECK(url == kUrl);
}

TEST_CASE("operation documentation survives the round trip") {
    auto d = minimal_descriptor();
    d.operations[0].doc = "returns the row count";
    auto [back, url] = contract::parse_wsdl(contract::generate_wsdl(d, kUrl));
    CHECK(back == d);
    std::string bytes = contract::wsdl_bytes(d, kUrl);
    CHECK(bytes.find("<wsdl:documentation>returns the row count</wsdl:documentation>") !=
          std::string::npos);
}

TEST_CASE("parse rejects non-WSDL documents") {
    CHECK_THROWS_AS(contract::parse_wsdl(xml::parse_document("<html />")),
                    contract::NotWsdl);
    CHECK_THROWS_AS(contract::parse_wsdl(xml::parse_document(
                        "<definitions xmlns=\"urn:not-wsdl\" />")),
                    contract::NotWsdl);
}

TEST_CASE("parse names the section that is missing") {
    for (const char* section : {"types", "message", "portType", "binding", "service"}) {
        auto doc = contract::generate_wsdl(minimal_descriptor(), kUrl);
        drop_root_children(doc, section);
        try {
            contract::parse_wsdl(doc);
            FAIL("expected MissingSection for ", section);
        } catch (const contract::MissingSection& e) {
            CHECK(e.section() == section);
        }
    }
    auto doc = contract::generate_wsdl(minimal_descriptor(), kUrl);
    auto& attrs = doc.root.as_element().attributes;
    attrs.clear();
    CHECK_THROWS_AS(contract::parse_wsdl(doc), contract::MissingSection);
}

TEST_CASE("parse refuses constructs outside the supported subset") {
    auto fresh = [] { return contract::generate_wsdl(minimal_descriptor(), kUrl); };

    auto doc = fresh();
    doc.root.as_element().children.insert(
        doc.root.as_element().children.begin(),
        XmlNode::element(QName{"import", contract::kWsdlNamespace}));
    CHECK_THROWS_AS(contract::parse_wsdl(doc), contract::UnsupportedWsdlFeature);

    doc = fresh();
    auto* soap_binding =
        find_element(doc.root, QName{"binding", contract::kSoapBindingNamespace});
    REQUIRE(soap_binding != nullptr);
    set_attr(*soap_binding, "style", "rpc");
    CHECK_THROWS_AS(contract::parse_wsdl(doc), contract::UnsupportedWsdlFeature);

    doc = fresh();
    auto* body = find_element(doc.root, QName{"body", contract::kSoapBindingNamespace});
    REQUIRE(body != nullptr);
    set_attr(*body, "use", "encoded");
    CHECK_THROWS_AS(contract::parse_wsdl(doc), contract::UnsupportedWsdlFeature);

    doc = fresh();
    auto* soap_op =
        find_element(doc.root, QName{"operation", contract::kSoapBindingNamespace});
    REQUIRE(soap_op != nullptr);
    set_attr(*soap_op, "soapAction", "urn:other/Go");
    CHECK_THROWS_AS(contract::parse_wsdl(doc), contract::UnsupportedWsdlFeature);

    doc = fresh();
    auto* part = find_element(doc.root, QName{"part", contract::kWsdlNamespace});
    REQUIRE(part != nullptr);
    set_attr(*part, "type", "xsd:string");
    CHECK_THROWS_AS(contract::parse_wsdl(doc), contract::UnsupportedWsdlFeature);

    doc = fresh();
    auto* service = find_element(doc.root, QName{"service", contract::kWsdlNamespace});
    REQUIRE(service != nullptr);
    service->children.push_back(service->children.front());
    CHECK_THROWS_AS(contract::parse_wsdl(doc), contract::UnsupportedWsdlFeature);

    // A field with occurrence bounds outside ArrayOfString is not our format.
    auto d = minimal_descriptor();
    d.operations[0].params = {{"x", TypeRef::text()}};
    doc = contract::generate_wsdl(d, kUrl);
    auto* seq = find_element(doc.root, QName{"sequence", contract::kXsdNamespace});
    REQUIRE(seq != nullptr);
    REQUIRE(!seq->children.empty());
    set_attr(seq->children.front().as_element(), "maxOccurs", "unbounded");
    CHECK_THROWS_AS(contract::parse_wsdl(doc), contract::UnsupportedWsdlFeature);
}

TEST_CASE("parse reports unresolved type references by name") {
    auto d = minimal_descriptor();
    d.operations[0].params = {{"x", TypeRef::text()}};
    auto doc = contract::generate_wsdl(d, kUrl);
    auto* seq = find_element(doc.root, QName{"sequence", contract::kXsdNamespace});
    REQUIRE(seq != nullptr);
    REQUIRE(!seq->children.empty());
    auto* param = &seq->children.front().as_element();

    set_attr(*param, "type", "xsd:int");
    try {
        contract::parse_wsdl(doc);
        FAIL("expected UnresolvedTypeReference");
    } catch (const contract::UnresolvedTypeReference& e) {
        CHECK(e.name() == "xsd:int");
    }

    set_attr(*param, "type", "tns:Ghost");
    CHECK_THROWS_AS(contract::parse_wsdl(doc), contract::UnresolvedTypeReference);

    // portType referencing a message that is not declared.
    doc = contract::generate_wsdl(minimal_descriptor(), kUrl);
    auto* input = find_element(doc.root, QName{"input", contract::kWsdlNamespace});
    REQUIRE(input != nullptr);
    set_attr(*input, "message", "tns:NoSuchMessage");
    CHECK_THROWS_AS(contract::parse_wsdl(doc), contract::UnresolvedTypeReference);
}

TEST_CASE("sibling section order does not matter") {
    auto doc = contract::generate_wsdl(employee_descriptor(), kUrl);
    auto& children = doc.root.as_element().children;
    std::reverse(children.begin(), children.end());
    auto [back, url] = contract::parse_wsdl(doc);
    CHECK(back == employee_descriptor());
    CHECK(url == kUrl);
}

TEST_CASE("random descriptors round-trip through WSDL bytes") {
    testsupport::Rng rng(0xC047AC7u);
    for (int i = 0; i < 1000; ++i) {
        ServiceDescriptor d = random_descriptor(rng);
        auto violations = contract::validate_descriptor(d);
        if (!violations.empty()) {
            CAPTURE(violations.front().path);
            CAPTURE(violations.front().message);
            REQUIRE(violations.empty());
        }
        std::string url = "http://127.0.0.1:8080/" + d.service_name + ".asmx";
        std::string bytes = contract::wsdl_bytes(d, url);
        auto [back, back_url] = contract::parse_wsdl(xml::parse_document(bytes));
        if (!(back == d)) {
            CAPTURE(bytes);
            REQUIRE(back == d);
        }
        CHECK(back_url == url);
        // Regenerating from the parsed descriptor reproduces the bytes.
        CHECK(contract::wsdl_bytes(back, back_url) == bytes);
    }
}
