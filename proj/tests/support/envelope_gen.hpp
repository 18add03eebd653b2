#pragma once

// Random well-typed values and envelopes for a given service descriptor.

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "soapbridge/contract.hpp"
#include "soapbridge/soap.hpp"
#include "soapbridge/value.hpp"
#include "soapbridge/xml.hpp"
#include "rng.hpp"

namespace testsupport {

inline soapbridge::Value random_value(Rng& rng, const soapbridge::contract::TypeRef& type,
                                      const soapbridge::contract::ServiceDescriptor& d) {
    using soapbridge::Value;
    using soapbridge::contract::TypeRef;

    switch (type.kind()) {
        case TypeRef::Kind::Text: return Value::text(random_text(rng, 12));
        case TypeRef::Kind::Int:
            return Value::integer(static_cast<std::int64_t>(rng.bits()));
        case TypeRef::Kind::Boolean: return Value::boolean(rng.chance(0.5));
        case TypeRef::Kind::Double: return Value::real(rng.finite_double());
        case TypeRef::Kind::TextList: {
            Value::List items;
            std::size_t n = rng.index(5);
            for (std::size_t i = 0; i < n; ++i) items.push_back(random_text(rng, 10));
            return Value::text_list(std::move(items));
        }
        case TypeRef::Kind::Record: {
            const auto* def = d.find_record(type.record_name());
            if (def == nullptr)
                throw std::logic_error("generator referenced unknown record " +
                                       type.record_name());
            std::vector<Value::RecordField> fields;
            for (const auto& f : def->fields)
                fields.push_back({f.name, random_value(rng, f.type, d)});
            return Value::record(type.record_name(), std::move(fields));
        }
        case TypeRef::Kind::Void: break;
    }
    throw std::logic_error("void cannot be materialized");
}

inline soapbridge::soap::SoapEnvelope random_envelope(
    Rng& rng, const soapbridge::contract::ServiceDescriptor& d) {
    using soapbridge::contract::TypeRef;
    using soapbridge::soap::FaultCode;
    using soapbridge::soap::SoapEnvelope;
    using soapbridge::soap::SoapFault;
    using soapbridge::xml::QName;

    switch (rng.index(3)) {
        case 0: {
            const auto& op = d.operations[rng.index(d.operations.size())];
            SoapEnvelope::Call call;
            call.operation = QName{op.name, d.target_namespace};
            for (const auto& p : op.params)
                call.args.emplace_back(p.name, random_value(rng, p.type, d));
            return SoapEnvelope::call(std::move(call));
        }
        case 1: {
            const auto& op = d.operations[rng.index(d.operations.size())];
            SoapEnvelope::Response resp;
            resp.operation = QName{op.name, d.target_namespace};
            if (op.returns.kind() != TypeRef::Kind::Void)
                resp.result = random_value(rng, op.returns, d);
            return SoapEnvelope::response(std::move(resp));
        }
        default: {
            SoapFault f;
            switch (rng.index(4)) {
                case 0: f.code = FaultCode::VersionMismatch; break;
                case 1: f.code = FaultCode::MustUnderstand; break;
                case 2: f.code = FaultCode::Client; break;
                default: f.code = FaultCode::Server; break;
            }
            f.fault_string = random_text(rng, 24);
            if (rng.chance(0.5)) f.detail = random_text(rng, 16);
            return SoapEnvelope::fault(std::move(f));
        }
    }
}

}  // namespace testsupport
