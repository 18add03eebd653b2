#pragma once

// Random XML tree generator for round-trip properties. Trees satisfy the
// document invariants: valid NCNames, unique attribute QNames per element,
// no empty or adjacent text children.

#include <string>
#include <vector>

#include "soapbridge/xml.hpp"
#include "rng.hpp"

namespace testsupport {

inline const std::vector<std::string>& namespace_pool() {
    static const std::vector<std::string> pool = {
        "", "urn:x", "urn:y", "http://example.org/a", "http://example.org/b",
        "urn:with space & <odd> \"chars\"",
    };
    return pool;
}

inline soapbridge::xml::XmlNode random_element(Rng& rng, int depth) {
    using soapbridge::xml::QName;
    using soapbridge::xml::XmlNode;

    XmlNode el = XmlNode::element(QName{random_ncname(rng), rng.pick(namespace_pool())});

    std::size_t attr_count = rng.index(4);
    for (std::size_t i = 0; i < attr_count; ++i) {
        QName name{random_ncname(rng), rng.chance(0.3) ? rng.pick(namespace_pool()) : ""};
        bool duplicate = false;
        for (const auto& a : el.as_element().attributes)
            if (a.name == name)
                duplicate = true;
        if (duplicate)
            continue;
        el.add_attribute(std::move(name), random_text(rng, 12));
    }

    if (depth <= 0)
        return el;

    std::size_t child_count = rng.index(5);
    bool last_was_text = false;
    for (std::size_t i = 0; i < child_count; ++i) {
        if (!last_was_text && rng.chance(0.4)) {
            std::string content = random_text(rng, 16);
            if (!content.empty()) {
                el.add_child(XmlNode::text(content));
                last_was_text = true;
            }
        } else {
            el.add_child(random_element(rng, depth - 1));
            last_was_text = false;
        }
    }
    return el;
}

inline soapbridge::xml::XmlDocument random_document(Rng& rng) {
    return soapbridge::xml::XmlDocument{random_element(rng, 3)};
}

}  // namespace testsupport
