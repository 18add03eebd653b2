#pragma once

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace soapbridge::xml {

/// Namespace-qualified name. Prefixes are a serialization detail and never
/// stored; two names are the same name iff (local_name, namespace_uri) match.
struct QName {
    std::string local_name;
    std::string namespace_uri;  // empty = no namespace

    bool operator==(const QName& other) const {
        return local_name == other.local_name && namespace_uri == other.namespace_uri;
    }
    bool operator!=(const QName& other) const { return !(*this == other); }
    bool operator<(const QName& other) const {
        if (namespace_uri != other.namespace_uri)
            return namespace_uri < other.namespace_uri;
        return local_name < other.local_name;
    }
};

struct Attribute {
    QName name;
    std::string value;
};

/// Tree node: either an element (name, attributes, children) or a text run.
/// Attribute QNames are unique within an element; adjacent text children are
/// merged by normalization.
class XmlNode {
public:
    struct Element {
        QName name;
        std::vector<Attribute> attributes;
        std::vector<XmlNode> children;
    };

    struct Text {
        std::string content;
    };

    static XmlNode element(QName name);
    static XmlNode element(QName name, std::vector<Attribute> attributes,
                           std::vector<XmlNode> children);
    static XmlNode text(std::string content);

    bool is_element() const { return std::holds_alternative<Element>(data_); }
    bool is_text() const { return std::holds_alternative<Text>(data_); }

    const Element& as_element() const { return std::get<Element>(data_); }
    Element& as_element() { return std::get<Element>(data_); }
    const std::string& text_content() const { return std::get<Text>(data_).content; }

    /// Builder conveniences used while assembling trees.
    XmlNode& add_child(XmlNode child);
    XmlNode& add_attribute(QName name, std::string value);

    /// Concatenated content of all text children (one level deep).
    std::string inner_text() const;

    /// First element child with the given local name, or nullptr.
    const XmlNode* find_child(const std::string& local_name) const;

    /// All element children, in order.
    std::vector<const XmlNode*> element_children() const;

    /// Attribute value by local name (any namespace), or nullptr.
    const std::string* attribute(const std::string& local_name) const;

private:
    std::variant<Element, Text> data_;
};

/// One root element; encoding fixed to UTF-8.
struct XmlDocument {
    XmlNode root;
};

/// Preferred prefixes per namespace URI used when serializing. URIs not listed
/// get generated prefixes ns0, ns1, ... in first-use order.
using PrefixHints = std::vector<std::pair<std::string, std::string>>;  // uri -> prefix

enum class EscapeContext { ElementContent, AttributeValue };

class XmlError : public std::runtime_error {
public:
    XmlError(std::string what, std::size_t offset)
        : std::runtime_error(std::move(what)), offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

/// Syntax error: mismatched tags, stray bytes, bad names.
class MalformedXml : public XmlError {
public:
    using XmlError::XmlError;
};

/// Prefix used without an in-scope xmlns declaration.
class UnboundPrefix : public XmlError {
public:
    UnboundPrefix(std::string prefix, std::size_t offset)
        : XmlError("unbound namespace prefix '" + prefix + "'", offset),
          prefix_(std::move(prefix)) {}
    const std::string& prefix() const { return prefix_; }

private:
    std::string prefix_;
};

/// Two attributes resolving to the same QName on one element.
class DuplicateAttribute : public XmlError {
public:
    DuplicateAttribute(const QName& name, std::size_t offset)
        : XmlError("duplicate attribute '" + name.local_name + "'", offset), name_(name) {}
    const QName& name() const { return name_; }

private:
    QName name_;
};

/// DOCTYPE, CDATA, or processing instructions other than the XML declaration.
class UnsupportedConstruct : public XmlError {
public:
    using XmlError::XmlError;
};

/// Broken entity or character reference.
class BadEntityReference : public XmlError {
public:
    using XmlError::XmlError;
};

/// Parse a UTF-8 document in the supported XML subset. Prefixes are resolved
/// to namespace URIs and xmlns attributes consumed; comments are discarded;
/// text runs of literal whitespace between elements are dropped.
XmlDocument parse_document(const std::string& input);

/// Serialize to UTF-8 bytes starting with the XML declaration. Deterministic:
/// identical trees (and hints) produce identical bytes. All namespace
/// declarations are emitted on the root element.
std::string serialize_document(const XmlDocument& doc, const PrefixHints& hints = {});

/// Escape text for embedding. '<' and '&' always; '"' plus tab/newline in
/// attribute values; carriage returns always (they would not survive
/// re-parsing otherwise).
std::string escape_text(const std::string& raw, EscapeContext context);

/// Decode entity and character references; inverse of escape_text.
std::string unescape_text(const std::string& escaped);

/// Structural equality: QNames by (local, uri); attribute order ignored;
/// child order significant; adjacent/empty text normalized before comparison.
bool nodes_equal(const XmlNode& a, const XmlNode& b);

}  // namespace soapbridge::xml
