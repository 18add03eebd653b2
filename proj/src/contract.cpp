#include "soapbridge/contract.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

namespace soapbridge::contract {

namespace {

using xml::QName;
using xml::XmlNode;

const std::string kWsdl = kWsdlNamespace;
const std::string kSoapB = kSoapBindingNamespace;
const std::string kXsd = kXsdNamespace;
const std::string kArrayOfString = "ArrayOfString";
const std::string kHttpTransport = "http://schemas.xmlsoap.org/soap/http";

bool is_ncname(const std::string& s) {
    if (s.empty()) return false;
    auto head = static_cast<unsigned char>(s[0]);
    if (!(std::isalpha(head) || s[0] == '_')) return false;
    for (char ch : s.substr(1)) {
        auto c = static_cast<unsigned char>(ch);
        if (!(std::isalnum(c) || ch == '_' || ch == '-' || ch == '.')) return false;
    }
    return true;
}

bool is_absolute_uri(const std::string& s) {
    auto colon = s.find(':');
    if (colon == std::string::npos || colon == 0) return false;
    if (!std::isalpha(static_cast<unsigned char>(s[0]))) return false;
    for (std::size_t i = 1; i < colon; ++i) {
        char ch = s[i];
        if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '+' || ch == '-' ||
              ch == '.'))
            return false;
    }
    return true;
}

// ---- generation ----------------------------------------------------------

std::string type_attr_text(const TypeRef& t) {
    switch (t.kind()) {
        case TypeRef::Kind::Text: return "xsd:string";
        case TypeRef::Kind::Int: return "xsd:long";
        case TypeRef::Kind::Boolean: return "xsd:boolean";
        case TypeRef::Kind::Double: return "xsd:double";
        case TypeRef::Kind::TextList: return "tns:ArrayOfString";
        case TypeRef::Kind::Record: return "tns:" + t.record_name();
        case TypeRef::Kind::Void: break;
    }
    return "";  // void never appears as an element type
}

XmlNode xsd_el(const std::string& local) { return XmlNode::element(QName{local, kXsd}); }
XmlNode wsdl_el(const std::string& local) { return XmlNode::element(QName{local, kWsdl}); }

XmlNode sequence_of(const std::vector<FieldDef>& fields) {
    XmlNode seq = xsd_el("sequence");
    for (const auto& f : fields) {
        XmlNode el = xsd_el("element");
        el.add_attribute(QName{"name", ""}, f.name);
        el.add_attribute(QName{"type", ""}, type_attr_text(f.type));
        seq.add_child(std::move(el));
    }
    return seq;
}

XmlNode wrapper_element(const std::string& name, const std::vector<FieldDef>& fields) {
    XmlNode el = xsd_el("element");
    el.add_attribute(QName{"name", ""}, name);
    XmlNode ct = xsd_el("complexType");
    ct.add_child(sequence_of(fields));
    el.add_child(std::move(ct));
    return el;
}

bool uses_text_list(const ServiceDescriptor& d) {
    for (const auto& op : d.operations) {
        if (op.returns.kind() == TypeRef::Kind::TextList) return true;
        for (const auto& p : op.params)
            if (p.type.kind() == TypeRef::Kind::TextList) return true;
    }
    return false;
}

// ---- parsing -------------------------------------------------------------

struct SeqEntry {
    std::string name;
    std::string type_attr;
    bool has_occurs = false;
};

std::optional<std::string> attr_of(const XmlNode::Element& e, const std::string& local) {
    for (const auto& a : e.attributes)
        if (a.name.local_name == local && a.name.namespace_uri.empty()) return a.value;
    return std::nullopt;
}

std::string required_attr(const XmlNode::Element& e, const std::string& local) {
    auto v = attr_of(e, local);
    if (!v)
        throw UnsupportedWsdlFeature("'" + e.name.local_name + "' is missing its '" + local +
                                     "' attribute");
    return *v;
}

const XmlNode::Element& as_element(const XmlNode& n) { return n.as_element(); }

std::vector<SeqEntry> parse_sequence_fields(const XmlNode::Element& complex_type) {
    std::vector<SeqEntry> out;
    const XmlNode::Element* seq = nullptr;
    for (const auto& c : complex_type.children) {
        if (!c.is_element()) continue;
        const auto& e = as_element(c);
        if (e.name != QName{"sequence", kXsd})
            throw UnsupportedWsdlFeature("complexType may only contain a sequence, found '" +
                                         e.name.local_name + "'");
        if (seq) throw UnsupportedWsdlFeature("complexType with more than one sequence");
        seq = &e;
    }
    if (!seq) return out;
    for (const auto& c : seq->children) {
        if (!c.is_element()) continue;
        const auto& e = as_element(c);
        if (e.name != QName{"element", kXsd})
            throw UnsupportedWsdlFeature("sequence may only contain elements, found '" +
                                         e.name.local_name + "'");
        SeqEntry entry;
        entry.name = required_attr(e, "name");
        entry.type_attr = required_attr(e, "type");
        entry.has_occurs = attr_of(e, "minOccurs") || attr_of(e, "maxOccurs");
        out.push_back(std::move(entry));
    }
    return out;
}

std::string strip_prefix(const std::string& qname, const std::string& prefix) {
    // Attribute-value QNames use the canonical prefixes this toolkit emits;
    // the prefix convention is part of the format.
    if (qname.size() > prefix.size() + 1 && qname.compare(0, prefix.size(), prefix) == 0 &&
        qname[prefix.size()] == ':')
        return qname.substr(prefix.size() + 1);
    return "";
}

struct SchemaIndex {
    // wrapper elements (requests/responses) and named types, in document order
    std::vector<std::pair<std::string, std::vector<SeqEntry>>> wrappers;
    std::vector<std::pair<std::string, std::vector<SeqEntry>>> complex_types;

    const std::vector<SeqEntry>* wrapper(const std::string& name) const {
        for (const auto& [n, f] : wrappers)
            if (n == name) return &f;
        return nullptr;
    }
    bool has_complex_type(const std::string& name) const {
        for (const auto& [n, f] : complex_types)
            if (n == name) return true;
        return false;
    }
};

SchemaIndex parse_schema(const XmlNode::Element& schema) {
    SchemaIndex index;
    std::set<std::string> seen;
    for (const auto& c : schema.children) {
        if (!c.is_element()) continue;
        const auto& e = as_element(c);
        std::string name;
        if (e.name == QName{"element", kXsd}) {
            name = required_attr(e, "name");
            const XmlNode::Element* ct = nullptr;
            for (const auto& ec : e.children) {
                if (!ec.is_element()) continue;
                const auto& inner = as_element(ec);
                if (inner.name != QName{"complexType", kXsd} || ct)
                    throw UnsupportedWsdlFeature(
                        "schema element must contain exactly one inline complexType");
                ct = &inner;
            }
            if (!ct)
                throw UnsupportedWsdlFeature("schema element '" + name +
                                             "' has no inline complexType");
            index.wrappers.emplace_back(name, parse_sequence_fields(*ct));
        } else if (e.name == QName{"complexType", kXsd}) {
            name = required_attr(e, "name");
            index.complex_types.emplace_back(name, parse_sequence_fields(e));
        } else {
            throw UnsupportedWsdlFeature("unsupported schema construct '" +
                                         e.name.local_name + "'");
        }
        if (!seen.insert(name).second)
            throw UnsupportedWsdlFeature("duplicate schema definition '" + name + "'");
    }
    return index;
}

TypeRef resolve_type(const std::string& attr, const SchemaIndex& schema) {
    if (attr == "xsd:string") return TypeRef::text();
    if (attr == "xsd:long") return TypeRef::integer();
    if (attr == "xsd:boolean") return TypeRef::boolean();
    if (attr == "xsd:double") return TypeRef::real();
    if (std::string local = strip_prefix(attr, "tns"); !local.empty()) {
        if (local == kArrayOfString) return TypeRef::text_list();
        if (schema.has_complex_type(local)) return TypeRef::record(local);
    }
    throw UnresolvedTypeReference(attr);
}

std::vector<FieldDef> resolve_fields(const std::vector<SeqEntry>& entries,
                                     const SchemaIndex& schema) {
    std::vector<FieldDef> out;
    for (const auto& e : entries) {
        if (e.has_occurs)
            throw UnsupportedWsdlFeature("occurrence bounds on '" + e.name +
                                         "' are not supported here");
        out.push_back({e.name, resolve_type(e.type_attr, schema)});
    }
    return out;
}

void check_array_of_string(const std::vector<SeqEntry>& entries) {
    if (entries.size() != 1 || entries[0].name != "string" ||
        entries[0].type_attr != "xsd:string" || !entries[0].has_occurs)
        throw UnsupportedWsdlFeature("ArrayOfString must be a repeated xsd:string element");
}

struct PortTypeOp {
    std::string name;
    std::optional<std::string> doc;
    std::string input_message;
    std::string output_message;
};

}  // namespace

std::string TypeRef::display_name() const {
    switch (kind_) {
        case Kind::Text: return "text";
        case Kind::Int: return "int";
        case Kind::Boolean: return "boolean";
        case Kind::Double: return "double";
        case Kind::TextList: return "list<string-text>";
        case Kind::Record: return "record<" + record_name_ + ">";
        case Kind::Void: return "void";
    }
    return "void";
}

const OperationDescriptor* ServiceDescriptor::find_operation(const std::string& name) const {
    for (const auto& op : operations)
        if (op.name == name) return &op;
    return nullptr;
}

const RecordDef* ServiceDescriptor::find_record(const std::string& name) const {
    for (const auto& rec : records)
        if (rec.name == name) return &rec;
    return nullptr;
}

std::string soap_action_for(const std::string& target_namespace, const std::string& op_name) {
    return target_namespace + "/" + op_name;
}

std::vector<Violation> validate_descriptor(const ServiceDescriptor& d) {
    std::vector<Violation> out;
    auto bad = [&](const std::string& path, const std::string& msg) {
        out.push_back({path, msg});
    };

    if (!is_ncname(d.service_name))
        bad("service", "service name '" + d.service_name + "' is not a valid name");
    if (!is_absolute_uri(d.target_namespace))
        bad("service", "target namespace '" + d.target_namespace + "' is not an absolute URI");

    std::set<std::string> record_names;
    for (const auto& rec : d.records) {
        if (!is_ncname(rec.name)) bad(rec.name, "record name is not a valid name");
        if (rec.name == kArrayOfString) bad(rec.name, "record name is reserved");
        if (!record_names.insert(rec.name).second) bad(rec.name, "duplicate record name");
        std::set<std::string> field_names;
        for (const auto& f : rec.fields) {
            std::string path = rec.name + "." + f.name;
            if (!is_ncname(f.name)) bad(path, "field name is not a valid name");
            if (!field_names.insert(f.name).second) bad(path, "duplicate field name");
            switch (f.type.kind()) {
                case TypeRef::Kind::Void: bad(path, "fields cannot be void"); break;
                case TypeRef::Kind::TextList: bad(path, "fields cannot be lists"); break;
                case TypeRef::Kind::Record:
                    if (!d.find_record(f.type.record_name()))
                        bad(path, "field references undefined record '" +
                                      f.type.record_name() + "'");
                    break;
                default: break;
            }
        }
    }

    // Records may nest at most two levels deep and never cyclically.
    for (const auto& rec : d.records) {
        std::set<std::string> trail;
        bool cyclic = false;
        auto depth_of = [&](auto&& self, const RecordDef& r) -> int {
            if (!trail.insert(r.name).second) {
                cyclic = true;
                return 0;
            }
            int depth = 1;
            for (const auto& f : r.fields) {
                if (f.type.kind() != TypeRef::Kind::Record) continue;
                if (const auto* child = d.find_record(f.type.record_name()); child && !cyclic)
                    depth = std::max(depth, 1 + self(self, *child));
            }
            trail.erase(r.name);
            return depth;
        };
        int depth = depth_of(depth_of, rec);
        if (cyclic)
            bad(rec.name, "record nesting is cyclic");
        else if (depth > 2)
            bad(rec.name, "record nesting exceeds depth 2");
    }

    if (d.operations.empty()) bad("service", "a service must declare at least one operation");
    // Operation wrappers, record types, and ArrayOfString share the schema's
    // symbol space, so names must be unique across all of them.
    std::set<std::string> wrapper_names(record_names.begin(), record_names.end());
    wrapper_names.insert(kArrayOfString);
    for (const auto& op : d.operations) {
        if (!is_ncname(op.name)) bad(op.name, "operation name is not a valid name");
        if (!wrapper_names.insert(op.name).second)
            bad(op.name, "operation name collides with another message element");
        if (!wrapper_names.insert(op.name + "Response").second)
            bad(op.name, "operation response element collides with another message element");
        std::set<std::string> param_names;
        for (const auto& p : op.params) {
            std::string path = op.name + "." + p.name;
            if (!is_ncname(p.name)) bad(path, "parameter name is not a valid name");
            if (!param_names.insert(p.name).second) bad(path, "duplicate parameter name");
            if (p.type.kind() == TypeRef::Kind::Void) bad(path, "parameters cannot be void");
            if (p.type.kind() == TypeRef::Kind::Record &&
                !d.find_record(p.type.record_name()))
                bad(path,
                    "parameter references undefined record '" + p.type.record_name() + "'");
        }
        if (op.returns.kind() == TypeRef::Kind::Record &&
            !d.find_record(op.returns.record_name()))
            bad(op.name,
                "return references undefined record '" + op.returns.record_name() + "'");
    }
    return out;
}

xml::XmlDocument generate_wsdl(const ServiceDescriptor& d, const std::string& endpoint_url) {
    XmlNode definitions = wsdl_el("definitions");
    definitions.add_attribute(QName{"targetNamespace", ""}, d.target_namespace);

    XmlNode schema = xsd_el("schema");
    schema.add_attribute(QName{"targetNamespace", ""}, d.target_namespace);
    for (const auto& op : d.operations) {
        schema.add_child(wrapper_element(op.name, op.params));
        std::vector<FieldDef> result_fields;
        if (op.returns.kind() != TypeRef::Kind::Void)
            result_fields.push_back({op.name + "Result", op.returns});
        schema.add_child(wrapper_element(op.name + "Response", result_fields));
    }
    for (const auto& rec : d.records) {
        XmlNode ct = xsd_el("complexType");
        ct.add_attribute(QName{"name", ""}, rec.name);
        ct.add_child(sequence_of(rec.fields));
        schema.add_child(std::move(ct));
    }
    if (uses_text_list(d)) {
        XmlNode ct = xsd_el("complexType");
        ct.add_attribute(QName{"name", ""}, kArrayOfString);
        XmlNode seq = xsd_el("sequence");
        XmlNode item = xsd_el("element");
        item.add_attribute(QName{"name", ""}, "string");
        item.add_attribute(QName{"type", ""}, "xsd:string");
        item.add_attribute(QName{"minOccurs", ""}, "0");
        item.add_attribute(QName{"maxOccurs", ""}, "unbounded");
        seq.add_child(std::move(item));
        ct.add_child(std::move(seq));
        schema.add_child(std::move(ct));
    }
    XmlNode types = wsdl_el("types");
    types.add_child(std::move(schema));
    definitions.add_child(std::move(types));

    for (const auto& op : d.operations) {
        XmlNode in = wsdl_el("message");
        in.add_attribute(QName{"name", ""}, op.name + "SoapIn");
        XmlNode in_part = wsdl_el("part");
        in_part.add_attribute(QName{"name", ""}, "parameters");
        in_part.add_attribute(QName{"element", ""}, "tns:" + op.name);
        in.add_child(std::move(in_part));
        definitions.add_child(std::move(in));

        XmlNode out = wsdl_el("message");
        out.add_attribute(QName{"name", ""}, op.name + "SoapOut");
        XmlNode out_part = wsdl_el("part");
        out_part.add_attribute(QName{"name", ""}, "parameters");
        out_part.add_attribute(QName{"element", ""}, "tns:" + op.name + "Response");
        out.add_child(std::move(out_part));
        definitions.add_child(std::move(out));
    }

    const std::string port_type_name = d.service_name + "Soap";
    XmlNode port_type = wsdl_el("portType");
    port_type.add_attribute(QName{"name", ""}, port_type_name);
    for (const auto& op : d.operations) {
        XmlNode node = wsdl_el("operation");
        node.add_attribute(QName{"name", ""}, op.name);
        if (op.doc)
            node.add_child(wsdl_el("documentation").add_child(XmlNode::text(*op.doc)));
        XmlNode input = wsdl_el("input");
        input.add_attribute(QName{"message", ""}, "tns:" + op.name + "SoapIn");
        node.add_child(std::move(input));
        XmlNode output = wsdl_el("output");
        output.add_attribute(QName{"message", ""}, "tns:" + op.name + "SoapOut");
        node.add_child(std::move(output));
        port_type.add_child(std::move(node));
    }
    definitions.add_child(std::move(port_type));

    XmlNode binding = wsdl_el("binding");
    binding.add_attribute(QName{"name", ""}, port_type_name);
    binding.add_attribute(QName{"type", ""}, "tns:" + port_type_name);
    XmlNode soap_binding = XmlNode::element(QName{"binding", kSoapB});
    soap_binding.add_attribute(QName{"transport", ""}, kHttpTransport);
    soap_binding.add_attribute(QName{"style", ""}, "document");
    binding.add_child(std::move(soap_binding));
    for (const auto& op : d.operations) {
        XmlNode node = wsdl_el("operation");
        node.add_attribute(QName{"name", ""}, op.name);
        XmlNode soap_op = XmlNode::element(QName{"operation", kSoapB});
        soap_op.add_attribute(QName{"soapAction", ""},
                              soap_action_for(d.target_namespace, op.name));
        soap_op.add_attribute(QName{"style", ""}, "document");
        node.add_child(std::move(soap_op));
        XmlNode body = XmlNode::element(QName{"body", kSoapB});
        body.add_attribute(QName{"use", ""}, "literal");
        node.add_child(wsdl_el("input").add_child(XmlNode(body)));
        node.add_child(wsdl_el("output").add_child(std::move(body)));
        binding.add_child(std::move(node));
    }
    definitions.add_child(std::move(binding));

    XmlNode service = wsdl_el("service");
    service.add_attribute(QName{"name", ""}, d.service_name);
    XmlNode port = wsdl_el("port");
    port.add_attribute(QName{"name", ""}, port_type_name);
    port.add_attribute(QName{"binding", ""}, "tns:" + port_type_name);
    XmlNode address = XmlNode::element(QName{"address", kSoapB});
    address.add_attribute(QName{"location", ""}, endpoint_url);
    port.add_child(std::move(address));
    service.add_child(std::move(port));
    definitions.add_child(std::move(service));

    return xml::XmlDocument{std::move(definitions)};
}

std::pair<ServiceDescriptor, std::string> parse_wsdl(const xml::XmlDocument& doc) {
    const auto& root = doc.root.as_element();
    if (root.name != QName{"definitions", kWsdl})
        throw NotWsdl("document root is not a WSDL definitions element");
    auto tns = attr_of(root, "targetNamespace");
    if (!tns || tns->empty()) throw MissingSection("targetNamespace");

    const XmlNode::Element* types = nullptr;
    std::map<std::string, std::string> messages;  // name -> part element ref
    const XmlNode::Element* port_type = nullptr;
    const XmlNode::Element* binding = nullptr;
    const XmlNode::Element* service = nullptr;

    for (const auto& c : root.children) {
        if (!c.is_element()) throw UnsupportedWsdlFeature("text content inside definitions");
        const auto& e = as_element(c);
        if (e.name == QName{"documentation", kWsdl}) continue;
        if (e.name == QName{"types", kWsdl}) {
            if (types) throw UnsupportedWsdlFeature("multiple types sections");
            types = &e;
        } else if (e.name == QName{"message", kWsdl}) {
            std::string name = required_attr(e, "name");
            const XmlNode::Element* part = nullptr;
            for (const auto& mc : e.children) {
                if (!mc.is_element()) continue;
                const auto& pe = as_element(mc);
                if (pe.name != QName{"part", kWsdl} || part)
                    throw UnsupportedWsdlFeature("message '" + name +
                                                 "' must have exactly one part");
                part = &pe;
            }
            if (!part)
                throw UnsupportedWsdlFeature("message '" + name + "' has no part");
            if (attr_of(*part, "type"))
                throw UnsupportedWsdlFeature("rpc-style message parts are not supported");
            if (!messages.emplace(name, required_attr(*part, "element")).second)
                throw UnsupportedWsdlFeature("duplicate message '" + name + "'");
        } else if (e.name == QName{"portType", kWsdl}) {
            if (port_type) throw UnsupportedWsdlFeature("multiple portTypes");
            port_type = &e;
        } else if (e.name == QName{"binding", kWsdl}) {
            if (binding) throw UnsupportedWsdlFeature("multiple bindings");
            binding = &e;
        } else if (e.name == QName{"service", kWsdl}) {
            if (service) throw UnsupportedWsdlFeature("multiple services");
            service = &e;
        } else {
            throw UnsupportedWsdlFeature("unsupported definitions child '" +
                                         e.name.local_name + "'");
        }
    }
    if (!types) throw MissingSection("types");
    if (messages.empty()) throw MissingSection("message");
    if (!port_type) throw MissingSection("portType");
    if (!binding) throw MissingSection("binding");
    if (!service) throw MissingSection("service");

    const XmlNode::Element* schema_el = nullptr;
    for (const auto& c : types->children) {
        if (!c.is_element()) continue;
        const auto& e = as_element(c);
        if (e.name != QName{"schema", kXsd} || schema_el)
            throw UnsupportedWsdlFeature("types must contain exactly one schema");
        schema_el = &e;
    }
    if (!schema_el) throw MissingSection("schema");
    if (auto stns = attr_of(*schema_el, "targetNamespace"); !stns || *stns != *tns)
        throw UnsupportedWsdlFeature("schema target namespace differs from the service's");
    SchemaIndex schema = parse_schema(*schema_el);

    std::vector<std::pair<std::string, std::vector<SeqEntry>>> record_types;
    for (const auto& [name, entries] : schema.complex_types) {
        if (name == kArrayOfString) {
            check_array_of_string(entries);
            continue;
        }
        record_types.emplace_back(name, entries);
    }

    std::vector<PortTypeOp> pt_ops;
    for (const auto& c : port_type->children) {
        if (!c.is_element()) continue;
        const auto& e = as_element(c);
        if (e.name != QName{"operation", kWsdl})
            throw UnsupportedWsdlFeature("unsupported portType child '" + e.name.local_name +
                                         "'");
        PortTypeOp op;
        op.name = required_attr(e, "name");
        for (const auto& oc : e.children) {
            if (!oc.is_element()) continue;
            const auto& oe = as_element(oc);
            if (oe.name == QName{"documentation", kWsdl})
                op.doc = oc.inner_text();
            else if (oe.name == QName{"input", kWsdl})
                op.input_message = required_attr(oe, "message");
            else if (oe.name == QName{"output", kWsdl})
                op.output_message = required_attr(oe, "message");
            else
                throw UnsupportedWsdlFeature("unsupported portType operation child '" +
                                             oe.name.local_name + "'");
        }
        if (op.input_message.empty() || op.output_message.empty())
            throw UnsupportedWsdlFeature("operation '" + op.name +
                                         "' must be request-response");
        pt_ops.push_back(std::move(op));
    }

    // Binding: insist on document/literal and canonical soapActions.
    for (const auto& c : binding->children) {
        if (!c.is_element()) continue;
        const auto& e = as_element(c);
        if (e.name == QName{"binding", kSoapB}) {
            if (attr_of(e, "style").value_or("document") != "document")
                throw UnsupportedWsdlFeature("only document-style bindings are supported");
            if (required_attr(e, "transport") != kHttpTransport)
                throw UnsupportedWsdlFeature("unsupported binding transport");
        } else if (e.name == QName{"operation", kWsdl}) {
            std::string op_name = required_attr(e, "name");
            for (const auto& oc : e.children) {
                if (!oc.is_element()) continue;
                const auto& oe = as_element(oc);
                if (oe.name == QName{"operation", kSoapB}) {
                    if (attr_of(oe, "style").value_or("document") != "document")
                        throw UnsupportedWsdlFeature(
                            "only document-style operations are supported");
                    if (required_attr(oe, "soapAction") != soap_action_for(*tns, op_name))
                        throw UnsupportedWsdlFeature("non-canonical soapAction for '" +
                                                     op_name + "'");
                } else if (oe.name == QName{"input", kWsdl} ||
                           oe.name == QName{"output", kWsdl}) {
                    for (const auto& bc : oe.children) {
                        if (!bc.is_element()) continue;
                        const auto& be = as_element(bc);
                        if (be.name != QName{"body", kSoapB} ||
                            required_attr(be, "use") != "literal")
                            throw UnsupportedWsdlFeature("only literal bodies are supported");
                    }
                } else {
                    throw UnsupportedWsdlFeature("unsupported binding operation child '" +
                                                 oe.name.local_name + "'");
                }
            }
        } else {
            throw UnsupportedWsdlFeature("unsupported binding child '" + e.name.local_name +
                                         "'");
        }
    }

    ServiceDescriptor d;
    d.target_namespace = *tns;
    d.service_name = required_attr(*service, "name");

    std::string endpoint_url;
    const XmlNode::Element* port = nullptr;
    for (const auto& c : service->children) {
        if (!c.is_element()) continue;
        const auto& e = as_element(c);
        if (e.name != QName{"port", kWsdl} || port)
            throw UnsupportedWsdlFeature("service must declare exactly one port");
        port = &e;
        for (const auto& pc : e.children) {
            if (!pc.is_element()) continue;
            const auto& ae = as_element(pc);
            if (ae.name != QName{"address", kSoapB})
                throw UnsupportedWsdlFeature("unsupported port child '" +
                                             ae.name.local_name + "'");
            endpoint_url = required_attr(ae, "location");
        }
    }
    if (!port || endpoint_url.empty()) throw MissingSection("port");

    for (const auto& pt_op : pt_ops) {
        OperationDescriptor op;
        op.name = pt_op.name;
        op.doc = pt_op.doc;

        auto message_element = [&](const std::string& ref) -> std::string {
            std::string message_name = strip_prefix(ref, "tns");
            auto it = messages.find(message_name);
            if (message_name.empty() || it == messages.end())
                throw UnresolvedTypeReference(ref);
            std::string element_ref = strip_prefix(it->second, "tns");
            if (element_ref.empty()) throw UnresolvedTypeReference(it->second);
            return element_ref;
        };
        if (message_element(pt_op.input_message) != op.name)
            throw UnsupportedWsdlFeature("input message for '" + op.name +
                                         "' does not reference its request element");
        if (message_element(pt_op.output_message) != op.name + "Response")
            throw UnsupportedWsdlFeature("output message for '" + op.name +
                                         "' does not reference its response element");

        const auto* request = schema.wrapper(op.name);
        if (!request) throw UnresolvedTypeReference(op.name);
        op.params = resolve_fields(*request, schema);

        const auto* response = schema.wrapper(op.name + "Response");
        if (!response) throw UnresolvedTypeReference(op.name + "Response");
        if (response->empty()) {
            op.returns = TypeRef::void_type();
        } else if (response->size() == 1 && response->front().name == op.name + "Result") {
            auto resolved = resolve_fields(*response, schema);
            op.returns = resolved.front().type;
        } else {
            throw UnsupportedWsdlFeature("response for '" + op.name +
                                         "' must hold a single '" + op.name +
                                         "Result' element");
        }
        d.operations.push_back(std::move(op));
    }

    for (const auto& [name, entries] : record_types)
        d.records.push_back({name, resolve_fields(entries, schema)});

    return {std::move(d), std::move(endpoint_url)};
}

xml::PrefixHints wsdl_prefix_hints(const std::string& target_namespace) {
    xml::PrefixHints hints{
        {kWsdl, "wsdl"}, {kSoapB, "soap"}, {kXsd, "xsd"}};
    if (!target_namespace.empty()) hints.emplace_back(target_namespace, "tns");
    return hints;
}

std::string wsdl_bytes(const ServiceDescriptor& d, const std::string& endpoint_url) {
    return xml::serialize_document(generate_wsdl(d, endpoint_url),
                                   wsdl_prefix_hints(d.target_namespace));
}

}  // namespace soapbridge::contract
