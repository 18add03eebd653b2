#include "soapbridge/value.hpp"

#include <charconv>
#include <stdexcept>

namespace soapbridge {

Value Value::text(std::string s) {
    Value v;
    v.data_ = std::move(s);
    return v;
}

Value Value::integer(std::int64_t n) {
    Value v;
    v.data_ = n;
    return v;
}

Value Value::boolean(bool b) {
    Value v;
    v.data_ = b;
    return v;
}

Value Value::real(double d) {
    Value v;
    v.data_ = d;
    return v;
}

Value Value::text_list(List items) {
    Value v;
    v.data_ = std::move(items);
    return v;
}

Value Value::record(std::string type_name, std::vector<RecordField> fields) {
    Value v;
    v.data_ = Record{std::move(type_name), std::move(fields)};
    return v;
}

Value::Kind Value::kind() const {
    return static_cast<Kind>(data_.index());
}

const std::string& Value::as_text() const {
    return std::get<std::string>(data_);
}

std::int64_t Value::as_int() const {
    return std::get<std::int64_t>(data_);
}

bool Value::as_boolean() const {
    return std::get<bool>(data_);
}

double Value::as_double() const {
    return std::get<double>(data_);
}

const Value::List& Value::as_text_list() const {
    return std::get<List>(data_);
}

const Value::Record& Value::as_record() const {
    return std::get<Record>(data_);
}

bool Value::Record::operator==(const Record& other) const {
    return type_name == other.type_name && fields == other.fields;
}

bool Value::operator==(const Value& other) const {
    return data_ == other.data_;
}

std::string canonical_int(std::int64_t n) {
    char buf[24];
    auto r = std::to_chars(buf, buf + sizeof buf, n);
    return std::string(buf, r.ptr);
}

std::string canonical_boolean(bool b) {
    return b ? "true" : "false";
}

std::string canonical_double(double d) {
    char buf[40];
    auto r = std::to_chars(buf, buf + sizeof buf, d);
    return std::string(buf, r.ptr);
}

const char* kind_name(Value::Kind k) {
    switch (k) {
    case Value::Kind::Text: return "text";
    case Value::Kind::Int: return "int";
    case Value::Kind::Boolean: return "boolean";
    case Value::Kind::Double: return "double";
    case Value::Kind::TextList: return "text-list";
    case Value::Kind::Record: return "record";
    }
    return "?";
}

}  // namespace soapbridge
