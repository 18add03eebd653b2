#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "soapbridge/contract.hpp"
#include "soapbridge/store.hpp"
#include "soapbridge/value.hpp"

namespace soapbridge::employee {

inline constexpr char kPackageName[] = "EMP_PKG";
inline constexpr char kServiceFolder[] = "/OracleWebService";
inline constexpr char kServiceFile[] = "Service.asmx";
inline constexpr char kDefaultConnectionString[] =
    "User Id=csharp;password=csharp;Data Source=XE;";

struct EmployeeRecord {
    std::int64_t id = 0;
    std::string last_name;
    std::string first_name;
    std::string job;
    double salary = 0.0;

    Value to_value() const;
    static EmployeeRecord from_value(const Value& v);

    bool operator==(const EmployeeRecord& other) const {
        return id == other.id && last_name == other.last_name &&
               first_name == other.first_name && job == other.job &&
               salary == other.salary;
    }
};

class EmployeeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NotFound : public EmployeeError {
public:
    explicit NotFound(std::int64_t id)
        : EmployeeError("no employee with id " + std::to_string(id)), id_(id) {}
    std::int64_t id() const { return id_; }

private:
    std::int64_t id_;
};

class ValidationError : public EmployeeError {
public:
    ValidationError(std::string field, const std::string& reason)
        : EmployeeError(reason), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

/// The service contract: five operations plus the Employee record type.
contract::ServiceDescriptor build_descriptor();

/// Manager tier over an open datastore session; all calls go through the
/// EMP_PKG stored procedures. Thread safety is the session's.
class DataManager {
public:
    explicit DataManager(store::Session& session) : session_(session) {}

    /// One `id|last_name|first_name|job|salary` line per employee.
    std::vector<std::string> get_employees_data();
    EmployeeRecord get_employee_by_id(std::int64_t id);
    std::int64_t add_employee(const std::string& last_name, const std::string& first_name,
                              const std::string& job, double salary);
    bool delete_employee(std::int64_t id);
    std::int64_t count_employees();

private:
    store::Session& session_;
};

using Handler = std::function<std::optional<Value>(
    const std::string& operation, const std::vector<std::pair<std::string, Value>>& args)>;

/// Adapts a session to the host's operation-handler shape. The handler may be
/// invoked from many request threads at once.
Handler make_handler(std::shared_ptr<store::Session> session);

/// The XE catalog with three seeded employees (next id 4).
store::Catalog default_catalog();
/// The same schema and procedures with no rows.
store::Catalog empty_catalog();

}  // namespace soapbridge::employee
