#include "soapbridge/xml.hpp"

#include <algorithm>
#include <cstdint>

namespace soapbridge::xml {

namespace {

constexpr const char* kXmlNamespace = "http://www.w3.org/XML/1998/namespace";

bool is_ws(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r';
}

bool is_name_start(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c >= 0x80;
}

bool is_name_char(unsigned char c) {
    return is_name_start(c) || (c >= '0' && c <= '9') || c == '-' || c == '.';
}

void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

/// Decodes the reference starting at input[pos] (which is '&'); advances pos
/// past the terminating ';'.
std::string decode_reference(const std::string& input, std::size_t& pos) {
    const std::size_t start = pos;
    ++pos;  // '&'
    if (pos >= input.size())
        throw BadEntityReference("truncated reference", start);
    std::string out;
    if (input[pos] == '#') {
        ++pos;
        bool hex = pos < input.size() && (input[pos] == 'x' || input[pos] == 'X');
        if (hex)
            ++pos;
        std::uint32_t cp = 0;
        std::size_t digits = 0;
        while (pos < input.size() && input[pos] != ';') {
            char c = input[pos];
            std::uint32_t d;
            if (c >= '0' && c <= '9')
                d = static_cast<std::uint32_t>(c - '0');
            else if (hex && c >= 'a' && c <= 'f')
                d = static_cast<std::uint32_t>(c - 'a' + 10);
            else if (hex && c >= 'A' && c <= 'F')
                d = static_cast<std::uint32_t>(c - 'A' + 10);
            else
                throw BadEntityReference("bad digit in character reference", start);
            cp = cp * (hex ? 16u : 10u) + d;
            if (cp > 0x10FFFF)
                throw BadEntityReference("character reference out of range", start);
            ++digits;
            ++pos;
        }
        if (pos >= input.size() || digits == 0)
            throw BadEntityReference("unterminated character reference", start);
        ++pos;  // ';'
        if (cp == 0 || (cp >= 0xD800 && cp <= 0xDFFF))
            throw BadEntityReference("invalid code point in character reference", start);
        append_utf8(out, cp);
        return out;
    }
    std::size_t end = input.find(';', pos);
    if (end == std::string::npos || end - pos > 6)
        throw BadEntityReference("unterminated entity reference", start);
    std::string name = input.substr(pos, end - pos);
    pos = end + 1;
    if (name == "lt")
        out = "<";
    else if (name == "gt")
        out = ">";
    else if (name == "amp")
        out = "&";
    else if (name == "quot")
        out = "\"";
    else if (name == "apos")
        out = "'";
    else
        throw BadEntityReference("unknown entity '&" + name + ";'", start);
    return out;
}

struct RawAttr {
    std::string name;
    std::string value;
    std::size_t offset;
};

class Parser {
public:
    explicit Parser(const std::string& input) : in_(input) {}

    XmlDocument parse() {
        if (in_.size() >= 3 && static_cast<unsigned char>(in_[0]) == 0xEF &&
            static_cast<unsigned char>(in_[1]) == 0xBB &&
            static_cast<unsigned char>(in_[2]) == 0xBF)
            pos_ = 3;
        skip_declaration();
        skip_misc();
        if (at_end() || peek() != '<')
            throw MalformedXml("expected root element", pos_);
        scopes_.push_back({});
        XmlNode root = parse_element();
        skip_misc();
        if (!at_end())
            throw MalformedXml("content after root element", pos_);
        return XmlDocument{std::move(root)};
    }

private:
    const std::string& in_;
    std::size_t pos_ = 0;
    std::vector<std::map<std::string, std::string>> scopes_;

    bool at_end() const { return pos_ >= in_.size(); }
    char peek() const { return in_[pos_]; }
    bool looking_at(const char* s) const { return in_.compare(pos_, std::char_traits<char>::length(s), s) == 0; }

    void skip_ws() {
        while (!at_end() && is_ws(peek()))
            ++pos_;
    }

    void expect(char c, const char* what) {
        if (at_end() || peek() != c)
            throw MalformedXml(std::string("expected ") + what, pos_);
        ++pos_;
    }

    void skip_declaration() {
        if (!looking_at("<?xml"))
            return;
        std::size_t end = in_.find("?>", pos_);
        if (end == std::string::npos)
            throw MalformedXml("unterminated XML declaration", pos_);
        pos_ = end + 2;
    }

    void skip_comment() {
        // positioned at "<!--"
        std::size_t end = in_.find("-->", pos_ + 4);
        if (end == std::string::npos)
            throw MalformedXml("unterminated comment", pos_);
        pos_ = end + 3;
    }

    void skip_misc() {
        for (;;) {
            skip_ws();
            if (looking_at("<!--")) {
                skip_comment();
                continue;
            }
            if (looking_at("<!DOCTYPE"))
                throw UnsupportedConstruct("DOCTYPE is not supported", pos_);
            if (looking_at("<?"))
                throw UnsupportedConstruct("processing instructions are not supported", pos_);
            return;
        }
    }

    std::string read_name() {
        std::size_t start = pos_;
        if (at_end() || !(is_name_start(static_cast<unsigned char>(peek())) || peek() == ':'))
            throw MalformedXml("expected name", pos_);
        while (!at_end() &&
               (is_name_char(static_cast<unsigned char>(peek())) || peek() == ':'))
            ++pos_;
        return in_.substr(start, pos_ - start);
    }

    // Splits a raw name into (prefix, local); validates shape.
    static std::pair<std::string, std::string> split_name(const std::string& raw,
                                                          std::size_t offset) {
        std::size_t colon = raw.find(':');
        if (colon == std::string::npos)
            return {"", raw};
        if (colon == 0 || colon + 1 >= raw.size() || raw.find(':', colon + 1) != std::string::npos)
            throw MalformedXml("malformed qualified name '" + raw + "'", offset);
        return {raw.substr(0, colon), raw.substr(colon + 1)};
    }

    std::string resolve_prefix(const std::string& prefix, std::size_t offset) {
        if (prefix == "xml")
            return kXmlNamespace;
        for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
            auto found = it->find(prefix);
            if (found != it->end())
                return found->second;
        }
        if (prefix.empty())
            return "";
        throw UnboundPrefix(prefix, offset);
    }

    std::string parse_attr_value() {
        if (at_end() || (peek() != '"' && peek() != '\''))
            throw MalformedXml("expected quoted attribute value", pos_);
        char quote = peek();
        ++pos_;
        std::string out;
        while (!at_end() && peek() != quote) {
            char c = peek();
            if (c == '<')
                throw MalformedXml("'<' in attribute value", pos_);
            if (c == '&') {
                out += decode_reference(in_, pos_);
                continue;
            }
            if (c == '\r') {
                ++pos_;
                if (!at_end() && peek() == '\n')
                    ++pos_;
                out.push_back(' ');
                continue;
            }
            if (c == '\n' || c == '\t') {
                out.push_back(' ');
                ++pos_;
                continue;
            }
            out.push_back(c);
            ++pos_;
        }
        expect(quote, "closing quote");
        return out;
    }

    XmlNode parse_element() {
        std::size_t open_offset = pos_;
        expect('<', "'<'");
        std::string raw_name = read_name();

        std::vector<RawAttr> raw_attrs;
        bool self_closing = false;
        for (;;) {
            bool had_ws = !at_end() && is_ws(peek());
            skip_ws();
            if (at_end())
                throw MalformedXml("unterminated start tag", pos_);
            if (peek() == '>') {
                ++pos_;
                break;
            }
            if (peek() == '/') {
                ++pos_;
                expect('>', "'>' after '/'");
                self_closing = true;
                break;
            }
            if (!had_ws)
                throw MalformedXml("expected whitespace before attribute", pos_);
            std::size_t attr_offset = pos_;
            std::string attr_name = read_name();
            skip_ws();
            expect('=', "'=' after attribute name");
            skip_ws();
            std::string value = parse_attr_value();
            raw_attrs.push_back({std::move(attr_name), std::move(value), attr_offset});
        }

        // Namespace declarations open a new scope before names resolve.
        std::map<std::string, std::string> scope;
        std::vector<const RawAttr*> plain_attrs;
        for (const RawAttr& a : raw_attrs) {
            if (a.name == "xmlns") {
                if (!scope.emplace("", a.value).second)
                    throw DuplicateAttribute(QName{"xmlns", ""}, a.offset);
            } else if (a.name.rfind("xmlns:", 0) == 0) {
                std::string prefix = a.name.substr(6);
                if (prefix.empty() || prefix.find(':') != std::string::npos)
                    throw MalformedXml("malformed xmlns declaration", a.offset);
                if (prefix == "xmlns")
                    throw MalformedXml("prefix 'xmlns' may not be declared", a.offset);
                if (prefix == "xml" && a.value != kXmlNamespace)
                    throw MalformedXml("prefix 'xml' is reserved", a.offset);
                if (a.value.empty())
                    throw MalformedXml("empty namespace URI for prefix '" + prefix + "'",
                                       a.offset);
                if (!scope.emplace(prefix, a.value).second)
                    throw DuplicateAttribute(QName{a.name, ""}, a.offset);
            } else {
                plain_attrs.push_back(&a);
            }
        }
        scopes_.push_back(std::move(scope));

        auto [prefix, local] = split_name(raw_name, open_offset);
        QName name{local, resolve_prefix(prefix, open_offset)};

        std::vector<Attribute> attributes;
        for (const RawAttr* a : plain_attrs) {
            auto [ap, al] = split_name(a->name, a->offset);
            // Unprefixed attributes are never in a namespace.
            std::string uri = ap.empty() ? "" : resolve_prefix(ap, a->offset);
            QName qn{al, uri};
            for (const Attribute& existing : attributes)
                if (existing.name == qn)
                    throw DuplicateAttribute(qn, a->offset);
            attributes.push_back({std::move(qn), a->value});
        }

        std::vector<XmlNode> children;
        if (!self_closing)
            parse_content(raw_name, children);

        scopes_.pop_back();
        return XmlNode::element(std::move(name), std::move(attributes), std::move(children));
    }

    void parse_content(const std::string& open_raw_name, std::vector<XmlNode>& children) {
        std::string text;
        bool literal_ws_only = true;

        auto flush_text = [&]() {
            if (text.empty()) {
                literal_ws_only = true;
                return;
            }
            if (!literal_ws_only) {
                if (!children.empty() && children.back().is_text()) {
                    std::string merged =
                        children.back().text_content() + text;
                    children.back() = XmlNode::text(std::move(merged));
                } else {
                    children.push_back(XmlNode::text(std::move(text)));
                }
            }
            text.clear();
            literal_ws_only = true;
        };

        for (;;) {
            if (at_end())
                throw MalformedXml("unterminated element '" + open_raw_name + "'", pos_);
            char c = peek();
            if (c == '<') {
                if (looking_at("</")) {
                    flush_text();
                    pos_ += 2;
                    std::size_t close_offset = pos_;
                    std::string close_name = read_name();
                    if (close_name != open_raw_name)
                        throw MalformedXml("mismatched close tag '</" + close_name +
                                               ">' for '<" + open_raw_name + ">'",
                                           close_offset);
                    skip_ws();
                    expect('>', "'>' in close tag");
                    return;
                }
                if (looking_at("<!--")) {
                    flush_text();
                    skip_comment();
                    continue;
                }
                if (looking_at("<![CDATA["))
                    throw UnsupportedConstruct("CDATA sections are not supported", pos_);
                if (looking_at("<!"))
                    throw UnsupportedConstruct("declaration in element content", pos_);
                if (looking_at("<?"))
                    throw UnsupportedConstruct("processing instructions are not supported",
                                               pos_);
                flush_text();
                children.push_back(parse_element());
                continue;
            }
            if (c == '&') {
                text += decode_reference(in_, pos_);
                literal_ws_only = false;
                continue;
            }
            if (c == '\r') {
                ++pos_;
                if (!at_end() && peek() == '\n')
                    ++pos_;
                text.push_back('\n');
                continue;
            }
            if (!is_ws(c))
                literal_ws_only = false;
            text.push_back(c);
            ++pos_;
        }
    }
};

class Serializer {
public:
    explicit Serializer(const PrefixHints& hints) : hints_(hints) {}

    std::string run(const XmlDocument& doc) {
        collect_namespaces(doc.root);
        // Hinted namespaces are declared even when no name uses them, so
        // QNames inside attribute values (message="tns:Op") stay resolvable.
        for (const auto& [uri, prefix] : hints_) {
            if (uri.empty() || prefix_for(uri) || prefix_taken(prefix))
                continue;
            bindings_.emplace_back(uri, prefix);
        }
        out_ = "<?xml version=\"1.0\" encoding=\"utf-8\"?>";
        write_element(doc.root, true);
        return std::move(out_);
    }

private:
    const PrefixHints& hints_;
    std::string out_;
    std::vector<std::pair<std::string, std::string>> bindings_;  // uri -> prefix, first-use order
    std::size_t generated_ = 0;

    const std::string* prefix_for(const std::string& uri) const {
        for (const auto& [u, p] : bindings_)
            if (u == uri)
                return &p;
        return nullptr;
    }

    bool prefix_taken(const std::string& prefix) const {
        return std::any_of(bindings_.begin(), bindings_.end(),
                           [&](const auto& b) { return b.second == prefix; });
    }

    void note_uri(const std::string& uri) {
        if (uri.empty() || prefix_for(uri))
            return;
        for (const auto& [huri, hprefix] : hints_) {
            if (huri == uri && !prefix_taken(hprefix)) {
                bindings_.emplace_back(uri, hprefix);
                return;
            }
        }
        std::string candidate;
        do {
            candidate = "ns" + std::to_string(generated_++);
        } while (prefix_taken(candidate));
        bindings_.emplace_back(uri, candidate);
    }

    void collect_namespaces(const XmlNode& node) {
        if (!node.is_element())
            return;
        const auto& el = node.as_element();
        note_uri(el.name.namespace_uri);
        for (const Attribute& a : el.attributes)
            note_uri(a.name.namespace_uri);
        for (const XmlNode& child : el.children)
            collect_namespaces(child);
    }

    void write_tag_name(const QName& name) {
        if (!name.namespace_uri.empty()) {
            out_ += *prefix_for(name.namespace_uri);
            out_ += ':';
        }
        out_ += name.local_name;
    }

    void write_element(const XmlNode& node, bool is_root) {
        const auto& el = node.as_element();
        out_ += '<';
        write_tag_name(el.name);
        if (is_root) {
            for (const auto& [uri, prefix] : bindings_) {
                out_ += " xmlns:";
                out_ += prefix;
                out_ += "=\"";
                out_ += escape_text(uri, EscapeContext::AttributeValue);
                out_ += '"';
            }
        }
        for (const Attribute& a : el.attributes) {
            out_ += ' ';
            write_tag_name(a.name);
            out_ += "=\"";
            out_ += escape_text(a.value, EscapeContext::AttributeValue);
            out_ += '"';
        }
        if (el.children.empty()) {
            out_ += " />";
            return;
        }
        out_ += '>';
        for (const XmlNode& child : el.children) {
            if (child.is_element()) {
                write_element(child, false);
            } else {
                write_text(child.text_content());
            }
        }
        out_ += "</";
        write_tag_name(el.name);
        out_ += '>';
    }

    void write_text(const std::string& content) {
        if (content.empty())
            return;
        bool all_ws = std::all_of(content.begin(), content.end(),
                                  [](char c) { return is_ws(c); });
        std::size_t start = 0;
        if (all_ws) {
            // A purely literal whitespace run would be dropped on re-parse;
            // a character reference marks it as deliberate content.
            out_ += "&#" + std::to_string(static_cast<unsigned char>(content[0])) + ";";
            start = 1;
        }
        out_ += escape_text(content.substr(start), EscapeContext::ElementContent);
    }
};

void normalized_children(const XmlNode::Element& el, std::vector<const XmlNode*>& out,
                         std::vector<XmlNode>& merged_storage) {
    for (const XmlNode& child : el.children) {
        if (child.is_text()) {
            if (child.text_content().empty())
                continue;
            if (!out.empty() && out.back()->is_text()) {
                merged_storage.push_back(
                    XmlNode::text(out.back()->text_content() + child.text_content()));
                out.back() = &merged_storage.back();
                continue;
            }
        }
        out.push_back(&child);
    }
}

}  // namespace

XmlNode XmlNode::element(QName name) {
    XmlNode n;
    n.data_ = Element{std::move(name), {}, {}};
    return n;
}

XmlNode XmlNode::element(QName name, std::vector<Attribute> attributes,
                         std::vector<XmlNode> children) {
    XmlNode n;
    n.data_ = Element{std::move(name), std::move(attributes), std::move(children)};
    return n;
}

XmlNode XmlNode::text(std::string content) {
    XmlNode n;
    n.data_ = Text{std::move(content)};
    return n;
}

XmlNode& XmlNode::add_child(XmlNode child) {
    as_element().children.push_back(std::move(child));
    return *this;
}

XmlNode& XmlNode::add_attribute(QName name, std::string value) {
    as_element().attributes.push_back({std::move(name), std::move(value)});
    return *this;
}

std::string XmlNode::inner_text() const {
    std::string out;
    for (const XmlNode& child : as_element().children)
        if (child.is_text())
            out += child.text_content();
    return out;
}

const XmlNode* XmlNode::find_child(const std::string& local_name) const {
    for (const XmlNode& child : as_element().children)
        if (child.is_element() && child.as_element().name.local_name == local_name)
            return &child;
    return nullptr;
}

std::vector<const XmlNode*> XmlNode::element_children() const {
    std::vector<const XmlNode*> out;
    for (const XmlNode& child : as_element().children)
        if (child.is_element())
            out.push_back(&child);
    return out;
}

const std::string* XmlNode::attribute(const std::string& local_name) const {
    for (const Attribute& a : as_element().attributes)
        if (a.name.local_name == local_name)
            return &a.value;
    return nullptr;
}

XmlDocument parse_document(const std::string& input) {
    return Parser(input).parse();
}

std::string serialize_document(const XmlDocument& doc, const PrefixHints& hints) {
    if (!doc.root.is_element())
        throw MalformedXml("document root must be an element", 0);
    return Serializer(hints).run(doc);
}

std::string escape_text(const std::string& raw, EscapeContext context) {
    std::string out;
    out.reserve(raw.size());
    for (char c : raw) {
        switch (c) {
        case '&':
            out += "&amp;";
            break;
        case '<':
            out += "&lt;";
            break;
        case '>':
            out += "&gt;";
            break;
        case '\r':
            out += "&#13;";
            break;
        case '"':
            if (context == EscapeContext::AttributeValue)
                out += "&quot;";
            else
                out.push_back(c);
            break;
        case '\t':
            if (context == EscapeContext::AttributeValue)
                out += "&#9;";
            else
                out.push_back(c);
            break;
        case '\n':
            if (context == EscapeContext::AttributeValue)
                out += "&#10;";
            else
                out.push_back(c);
            break;
        default:
            out.push_back(c);
        }
    }
    return out;
}

std::string unescape_text(const std::string& escaped) {
    std::string out;
    out.reserve(escaped.size());
    std::size_t pos = 0;
    while (pos < escaped.size()) {
        if (escaped[pos] == '&') {
            out += decode_reference(escaped, pos);
        } else {
            out.push_back(escaped[pos]);
            ++pos;
        }
    }
    return out;
}

bool nodes_equal(const XmlNode& a, const XmlNode& b) {
    if (a.is_text() != b.is_text())
        return false;
    if (a.is_text())
        return a.text_content() == b.text_content();

    const auto& ea = a.as_element();
    const auto& eb = b.as_element();
    if (ea.name != eb.name)
        return false;

    if (ea.attributes.size() != eb.attributes.size())
        return false;
    auto sorted = [](const std::vector<Attribute>& attrs) {
        std::vector<const Attribute*> v;
        v.reserve(attrs.size());
        for (const Attribute& attr : attrs)
            v.push_back(&attr);
        std::sort(v.begin(), v.end(),
                  [](const Attribute* x, const Attribute* y) { return x->name < y->name; });
        return v;
    };
    auto sa = sorted(ea.attributes);
    auto sb = sorted(eb.attributes);
    for (std::size_t i = 0; i < sa.size(); ++i)
        if (sa[i]->name != sb[i]->name || sa[i]->value != sb[i]->value)
            return false;

    std::vector<XmlNode> storage_a, storage_b;
    storage_a.reserve(ea.children.size());
    storage_b.reserve(eb.children.size());
    std::vector<const XmlNode*> ca, cb;
    normalized_children(ea, ca, storage_a);
    normalized_children(eb, cb, storage_b);
    if (ca.size() != cb.size())
        return false;
    for (std::size_t i = 0; i < ca.size(); ++i)
        if (!nodes_equal(*ca[i], *cb[i]))
            return false;
    return true;
}

}  // namespace soapbridge::xml
