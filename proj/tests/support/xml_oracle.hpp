#pragma once

// Independent XML oracle for round-trip testing: a naive serializer and a
// token-stack reference parser, deliberately structured unlike the library
// implementation. Both cover the same document subset.

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "soapbridge/xml.hpp"

namespace testsupport {

// ---- naive serializer -------------------------------------------------
//
// Declares a fresh prefix on every element for every namespace it touches and
// escapes every delicate character as a numeric reference. Valid, ugly, and
// nothing like the production serializer.

inline void naive_escape_into(std::string& out, const std::string& raw, bool in_attr) {
    for (unsigned char c : raw) {
        bool risky = c == '<' || c == '>' || c == '&' || c == '"' || c == '\'' ||
                     c == '\t' || c == '\n' || c == '\r' || c == ' ';
        if (risky || (in_attr && c < 0x20)) {
            out += "&#x";
            const char* digits = "0123456789ABCDEF";
            if (c >= 16)
                out.push_back(digits[c >> 4]);
            out.push_back(digits[c & 0xF]);
            out += ";";
        } else {
            out.push_back(static_cast<char>(c));
        }
    }
}

inline void naive_serialize_node(std::string& out, const soapbridge::xml::XmlNode& node,
                                 int& prefix_counter) {
    using soapbridge::xml::XmlNode;
    if (node.is_text()) {
        naive_escape_into(out, node.text_content(), false);
        return;
    }
    const auto& el = node.as_element();

    std::map<std::string, std::string> local;  // uri -> prefix for this element
    auto prefix_of = [&](const std::string& uri) -> std::string {
        if (uri.empty())
            return "";
        auto it = local.find(uri);
        if (it == local.end())
            it = local.emplace(uri, "p" + std::to_string(prefix_counter++)).first;
        return it->second + ":";
    };

    std::string tag = prefix_of(el.name.namespace_uri) + el.name.local_name;
    std::string attrs;
    for (const auto& a : el.attributes) {
        attrs += " " + prefix_of(a.name.namespace_uri) + a.name.local_name + "=\"";
        naive_escape_into(attrs, a.value, true);
        attrs += "\"";
    }
    std::string decls;
    for (const auto& [uri, prefix] : local) {
        decls += " xmlns:" + prefix + "=\"";
        naive_escape_into(decls, uri, true);
        decls += "\"";
    }

    out += "<" + tag + decls + attrs;
    if (el.children.empty()) {
        out += "/>";
        return;
    }
    out += ">";
    for (const auto& child : el.children)
        naive_serialize_node(out, child, prefix_counter);
    out += "</" + tag + ">";
}

inline std::string naive_serialize(const soapbridge::xml::XmlDocument& doc) {
    std::string out = "<?xml version=\"1.0\" encoding=\"utf-8\"?>\n";
    int counter = 0;
    naive_serialize_node(out, doc.root, counter);
    out += "\n";
    return out;
}

// ---- reference parser -------------------------------------------------
//
// Two stages: a flat tokenizer producing tag/text events, then a stack
// machine that resolves namespaces and builds the tree.

struct OracleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace oracle_detail {

struct Tok {
    enum Kind { Open, Close, SelfClose, Text } kind;
    std::string name;                                     // raw tag name
    std::vector<std::pair<std::string, std::string>> attrs;  // raw name -> decoded value
    std::string text;
    bool text_literal_ws_only = false;
};

inline std::uint32_t parse_charref(const std::string& s, std::size_t& i) {
    // s[i] just past "&#"
    bool hex = i < s.size() && (s[i] == 'x' || s[i] == 'X');
    if (hex)
        ++i;
    std::uint32_t cp = 0;
    bool any = false;
    while (i < s.size() && s[i] != ';') {
        char c = s[i];
        int d = -1;
        if (c >= '0' && c <= '9')
            d = c - '0';
        else if (hex && c >= 'a' && c <= 'f')
            d = c - 'a' + 10;
        else if (hex && c >= 'A' && c <= 'F')
            d = c - 'A' + 10;
        if (d < 0)
            throw OracleError("bad charref digit");
        cp = cp * (hex ? 16 : 10) + static_cast<std::uint32_t>(d);
        if (cp > 0x10FFFF)
            throw OracleError("charref out of range");
        any = true;
        ++i;
    }
    if (!any || i >= s.size())
        throw OracleError("unterminated charref");
    ++i;  // ';'
    if (cp == 0 || (cp >= 0xD800 && cp <= 0xDFFF))
        throw OracleError("illegal charref");
    return cp;
}

inline std::string decode_refs(const std::string& s, bool attr_mode) {
    std::string out;
    std::size_t i = 0;
    while (i < s.size()) {
        char c = s[i];
        if (c == '&') {
            ++i;
            if (i < s.size() && s[i] == '#') {
                ++i;
                append_utf8(out, parse_charref(s, i));
                continue;
            }
            std::size_t semi = s.find(';', i);
            if (semi == std::string::npos)
                throw OracleError("unterminated entity");
            std::string name = s.substr(i, semi - i);
            i = semi + 1;
            if (name == "lt")
                out += "<";
            else if (name == "gt")
                out += ">";
            else if (name == "amp")
                out += "&";
            else if (name == "quot")
                out += "\"";
            else if (name == "apos")
                out += "'";
            else
                throw OracleError("unknown entity");
            continue;
        }
        if (c == '\r') {
            ++i;
            if (i < s.size() && s[i] == '\n')
                ++i;
            out.push_back(attr_mode ? ' ' : '\n');
            continue;
        }
        if (attr_mode && (c == '\n' || c == '\t')) {
            out.push_back(' ');
            ++i;
            continue;
        }
        out.push_back(c);
        ++i;
    }
    return out;
}

inline bool literal_ws_only(const std::string& raw) {
    for (char c : raw) {
        if (c == '&')
            return false;
        if (c != ' ' && c != '\t' && c != '\n' && c != '\r')
            return false;
    }
    return true;
}

inline bool strchr_ws(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r';
}

inline std::vector<Tok> tokenize(const std::string& in) {
    std::vector<Tok> toks;
    std::size_t i = 0;
    if (in.rfind("\xEF\xBB\xBF", 0) == 0)
        i = 3;
    if (in.compare(i, 5, "<?xml") == 0) {
        std::size_t end = in.find("?>", i);
        if (end == std::string::npos)
            throw OracleError("bad decl");
        i = end + 2;
    }
    while (i < in.size()) {
        if (in[i] == '<') {
            if (in.compare(i, 4, "<!--") == 0) {
                std::size_t end = in.find("-->", i + 4);
                if (end == std::string::npos)
                    throw OracleError("unterminated comment");
                i = end + 3;
                continue;
            }
            if (in.compare(i, 2, "<!") == 0 || in.compare(i, 2, "<?") == 0)
                throw OracleError("unsupported construct");
            if (in.compare(i, 2, "</") == 0) {
                std::size_t end = in.find('>', i);
                if (end == std::string::npos)
                    throw OracleError("unterminated close tag");
                Tok t;
                t.kind = Tok::Close;
                t.name = in.substr(i + 2, end - i - 2);
                while (!t.name.empty() && (t.name.back() == ' ' || t.name.back() == '\t' ||
                                           t.name.back() == '\n' || t.name.back() == '\r'))
                    t.name.pop_back();
                if (t.name.empty())
                    throw OracleError("empty close tag");
                toks.push_back(std::move(t));
                i = end + 1;
                continue;
            }
            // open tag: scan respecting quotes
            std::size_t j = i + 1;
            std::string raw;
            char quote = 0;
            for (; j < in.size(); ++j) {
                char c = in[j];
                if (quote) {
                    if (c == quote)
                        quote = 0;
                } else if (c == '"' || c == '\'') {
                    quote = c;
                } else if (c == '>') {
                    break;
                }
                raw.push_back(c);
            }
            if (j >= in.size())
                throw OracleError("unterminated tag");
            i = j + 1;
            Tok t;
            t.kind = Tok::Open;
            if (!raw.empty() && raw.back() == '/') {
                t.kind = Tok::SelfClose;
                raw.pop_back();
            }
            // split name and attributes
            std::size_t k = 0;
            while (k < raw.size() && !strchr_ws(raw[k]))
                ++k;
            t.name = raw.substr(0, k);
            if (t.name.empty())
                throw OracleError("empty tag name");
            while (k < raw.size()) {
                while (k < raw.size() && strchr_ws(raw[k]))
                    ++k;
                if (k >= raw.size())
                    break;
                std::size_t eq = raw.find('=', k);
                if (eq == std::string::npos)
                    throw OracleError("attribute without value");
                std::string aname = raw.substr(k, eq - k);
                while (!aname.empty() && strchr_ws(aname.back()))
                    aname.pop_back();
                k = eq + 1;
                while (k < raw.size() && strchr_ws(raw[k]))
                    ++k;
                if (k >= raw.size() || (raw[k] != '"' && raw[k] != '\''))
                    throw OracleError("unquoted attribute value");
                char q = raw[k++];
                std::size_t vend = raw.find(q, k);
                if (vend == std::string::npos)
                    throw OracleError("unterminated attribute value");
                t.attrs.emplace_back(aname, decode_refs(raw.substr(k, vend - k), true));
                k = vend + 1;
            }
            toks.push_back(std::move(t));
            continue;
        }
        std::size_t end = in.find('<', i);
        if (end == std::string::npos)
            end = in.size();
        std::string raw = in.substr(i, end - i);
        Tok t;
        t.kind = Tok::Text;
        t.text_literal_ws_only = literal_ws_only(raw);
        t.text = decode_refs(raw, false);
        toks.push_back(std::move(t));
        i = end;
    }
    return toks;
}

}  // namespace oracle_detail

inline soapbridge::xml::XmlDocument reference_parse(const std::string& input) {
    using soapbridge::xml::Attribute;
    using soapbridge::xml::QName;
    using soapbridge::xml::XmlNode;
    using namespace oracle_detail;

    auto toks = tokenize(input);

    struct Frame {
        std::string raw_name;
        XmlNode node;
        std::vector<std::pair<std::string, std::string>> bindings;  // prefix -> uri
    };
    std::vector<Frame> stack;
    std::vector<XmlNode> roots;

    auto resolve = [&stack](const std::string& prefix, bool is_attr) -> std::string {
        if (prefix == "xml")
            return "http://www.w3.org/XML/1998/namespace";
        if (prefix.empty() && is_attr)
            return "";
        for (auto f = stack.rbegin(); f != stack.rend(); ++f)
            for (auto b = f->bindings.rbegin(); b != f->bindings.rend(); ++b)
                if (b->first == prefix)
                    return b->second;
        if (prefix.empty())
            return "";
        throw OracleError("unbound prefix " + prefix);
    };

    auto split = [](const std::string& raw) -> std::pair<std::string, std::string> {
        auto colon = raw.find(':');
        if (colon == std::string::npos)
            return {"", raw};
        return {raw.substr(0, colon), raw.substr(colon + 1)};
    };

    auto attach = [&](XmlNode&& node) {
        if (stack.empty())
            roots.push_back(std::move(node));
        else
            stack.back().node.add_child(std::move(node));
    };

    for (auto& t : toks) {
        switch (t.kind) {
        case Tok::Text: {
            if (stack.empty()) {
                if (!t.text_literal_ws_only)
                    throw OracleError("text outside root");
                break;
            }
            if (t.text_literal_ws_only || t.text.empty())
                break;
            auto& children = stack.back().node.as_element().children;
            if (!children.empty() && children.back().is_text())
                children.back() = XmlNode::text(children.back().text_content() + t.text);
            else
                children.push_back(XmlNode::text(t.text));
            break;
        }
        case Tok::Open:
        case Tok::SelfClose: {
            Frame f;
            f.raw_name = t.name;
            for (auto& [an, av] : t.attrs) {
                if (an == "xmlns")
                    f.bindings.emplace_back("", av);
                else if (an.rfind("xmlns:", 0) == 0)
                    f.bindings.emplace_back(an.substr(6), av);
            }
            stack.push_back(std::move(f));
            auto [p, l] = split(t.name);
            XmlNode el = XmlNode::element(QName{l, resolve(p, false)});
            for (auto& [an, av] : t.attrs) {
                if (an == "xmlns" || an.rfind("xmlns:", 0) == 0)
                    continue;
                auto [ap, al] = split(an);
                QName qn{al, resolve(ap, true)};
                for (const Attribute& prev : el.as_element().attributes)
                    if (prev.name == qn)
                        throw OracleError("duplicate attribute");
                el.add_attribute(qn, av);
            }
            stack.back().node = std::move(el);
            if (t.kind == Tok::SelfClose) {
                XmlNode done = std::move(stack.back().node);
                stack.pop_back();
                attach(std::move(done));
            }
            break;
        }
        case Tok::Close: {
            if (stack.empty() || stack.back().raw_name != t.name)
                throw OracleError("mismatched close tag " + t.name);
            XmlNode done = std::move(stack.back().node);
            stack.pop_back();
            attach(std::move(done));
            break;
        }
        }
    }
    if (!stack.empty())
        throw OracleError("unclosed element " + stack.back().raw_name);
    if (roots.size() != 1)
        throw OracleError("expected exactly one root");
    return soapbridge::xml::XmlDocument{std::move(roots.front())};
}

}  // namespace testsupport
