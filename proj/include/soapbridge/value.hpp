#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace soapbridge {

/// Typed payload value carried in SOAP bodies and datastore rows.
///
/// Variants: Text | Int (64-bit) | Boolean | Double (finite) | TextList |
/// Record. Record fields keep declaration order; TextList elements are plain
/// text. Values are immutable once built.
class Value {
public:
    enum class Kind { Text, Int, Boolean, Double, TextList, Record };

    struct RecordField;

    struct Record {
        std::string type_name;
        std::vector<RecordField> fields;

        bool operator==(const Record& other) const;
    };

    using List = std::vector<std::string>;

    static Value text(std::string s);
    static Value integer(std::int64_t n);
    static Value boolean(bool b);
    static Value real(double d);
    static Value text_list(List items);
    static Value record(std::string type_name, std::vector<RecordField> fields);

    Kind kind() const;

    const std::string& as_text() const;
    std::int64_t as_int() const;
    bool as_boolean() const;
    double as_double() const;
    const List& as_text_list() const;
    const Record& as_record() const;

    bool operator==(const Value& other) const;
    bool operator!=(const Value& other) const { return !(*this == other); }

private:
    std::variant<std::string, std::int64_t, bool, double, List, Record> data_;
};

struct Value::RecordField {
    std::string name;
    Value value;

    bool operator==(const RecordField& other) const {
        return name == other.name && value == other.value;
    }
};

/// Canonical lexical forms used on the wire and in catalog files.
/// Doubles use the shortest round-tripping decimal; booleans are
/// `true`/`false`; integers plain decimal.
std::string canonical_int(std::int64_t n);
std::string canonical_boolean(bool b);
std::string canonical_double(double d);

const char* kind_name(Value::Kind k);

}  // namespace soapbridge
