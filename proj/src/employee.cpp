#include "soapbridge/employee.hpp"

#include <cmath>

namespace soapbridge::employee {

namespace {

using contract::FieldDef;
using contract::OperationDescriptor;
using contract::RecordDef;
using contract::ServiceDescriptor;
using contract::TypeRef;

Value reader_field(const store::RowReader& reader, const char* column) {
    return reader.get(column);
}

}  // namespace

Value EmployeeRecord::to_value() const {
    return Value::record("Employee", {
                                         {"id", Value::integer(id)},
                                         {"last_name", Value::text(last_name)},
                                         {"first_name", Value::text(first_name)},
                                         {"job", Value::text(job)},
                                         {"salary", Value::real(salary)},
                                     });
}

EmployeeRecord EmployeeRecord::from_value(const Value& v) {
    const auto& rec = v.as_record();
    if (rec.type_name != "Employee" || rec.fields.size() != 5)
        throw EmployeeError("value is not an Employee record");
    EmployeeRecord out;
    out.id = rec.fields[0].value.as_int();
    out.last_name = rec.fields[1].value.as_text();
    out.first_name = rec.fields[2].value.as_text();
    out.job = rec.fields[3].value.as_text();
    out.salary = rec.fields[4].value.as_double();
    return out;
}

ServiceDescriptor build_descriptor() {
    ServiceDescriptor d;
    d.service_name = "Service";
    d.target_namespace = "urn:oraclews:employee";
    d.records = {RecordDef{"Employee",
                           {FieldDef{"id", TypeRef::integer()},
                            FieldDef{"last_name", TypeRef::text()},
                            FieldDef{"first_name", TypeRef::text()},
                            FieldDef{"job", TypeRef::text()},
                            FieldDef{"salary", TypeRef::real()}}}};

    OperationDescriptor get_all;
    get_all.name = "GetEmployeesData";
    get_all.returns = TypeRef::text_list();
    get_all.doc = "Lists every employee as an id|last_name|first_name|job|salary line.";

    OperationDescriptor get_by_id;
    get_by_id.name = "GetEmployeeById";
    get_by_id.params = {FieldDef{"id", TypeRef::integer()}};
    get_by_id.returns = TypeRef::record("Employee");
    get_by_id.doc = "Returns the employee with the given id.";

    OperationDescriptor add;
    add.name = "AddEmployee";
    add.params = {FieldDef{"last_name", TypeRef::text()},
                  FieldDef{"first_name", TypeRef::text()},
                  FieldDef{"job", TypeRef::text()},
                  FieldDef{"salary", TypeRef::real()}};
    add.returns = TypeRef::integer();
    add.doc = "Inserts an employee and returns its assigned id.";

    OperationDescriptor del;
    del.name = "DeleteEmployee";
    del.params = {FieldDef{"id", TypeRef::integer()}};
    del.returns = TypeRef::boolean();
    del.doc = "Deletes the employee with the given id; true when a row went away.";

    OperationDescriptor count;
    count.name = "CountEmployees";
    count.returns = TypeRef::integer();
    count.doc = "Counts the employee rows.";

    d.operations = {std::move(get_all), std::move(get_by_id), std::move(add),
                    std::move(del), std::move(count)};
    return d;
}

std::vector<std::string> DataManager::get_employees_data() {
    auto result = session_.execute_procedure(kPackageName, "GET_ALL", {});
    auto& reader = std::get<store::RowReader>(result);
    std::vector<std::string> lines;
    lines.reserve(reader.row_count());
    while (reader.next()) lines.push_back(reader.get("VALUE").as_text());
    return lines;
}

EmployeeRecord DataManager::get_employee_by_id(std::int64_t id) {
    auto result =
        session_.execute_procedure(kPackageName, "GET_BY_ID", {Value::integer(id)});
    auto& reader = std::get<store::RowReader>(result);
    if (!reader.next()) throw NotFound(id);
    EmployeeRecord record;
    record.id = reader_field(reader, "ID").as_int();
    record.last_name = reader_field(reader, "LAST_NAME").as_text();
    record.first_name = reader_field(reader, "FIRST_NAME").as_text();
    record.job = reader_field(reader, "JOB").as_text();
    record.salary = reader_field(reader, "SALARY").as_double();
    return record;
}

std::int64_t DataManager::add_employee(const std::string& last_name,
                                       const std::string& first_name,
                                       const std::string& job, double salary) {
    if (last_name.empty())
        throw ValidationError("last_name", "last_name must not be empty");
    if (!std::isfinite(salary) || salary < 0.0)
        throw ValidationError("salary", "salary must be finite and non-negative");
    auto result = session_.execute_procedure(
        kPackageName, "INS",
        {Value::text(last_name), Value::text(first_name), Value::text(job),
         Value::real(salary)});
    const auto& affected = std::get<store::Affected>(result);
    if (!affected.last_insert_id)
        throw store::StoreError("insert did not assign an id");
    return *affected.last_insert_id;
}

bool DataManager::delete_employee(std::int64_t id) {
    auto result = session_.execute_procedure(kPackageName, "DEL", {Value::integer(id)});
    return std::get<store::Affected>(result).count > 0;
}

std::int64_t DataManager::count_employees() {
    auto result = session_.execute_procedure(kPackageName, "COUNT", {});
    return std::get<std::int64_t>(result);
}

Handler make_handler(std::shared_ptr<store::Session> session) {
    return [session](const std::string& operation,
                     const std::vector<std::pair<std::string, Value>>& args)
               -> std::optional<Value> {
        DataManager manager(*session);
        auto expect_args = [&](std::size_t n) {
            if (args.size() != n)
                throw EmployeeError("operation " + operation + " expects " +
                                    std::to_string(n) + " argument(s)");
        };
        if (operation == "GetEmployeesData") {
            expect_args(0);
            return Value::text_list(manager.get_employees_data());
        }
        if (operation == "GetEmployeeById") {
            expect_args(1);
            return manager.get_employee_by_id(args[0].second.as_int()).to_value();
        }
        if (operation == "AddEmployee") {
            expect_args(4);
            return Value::integer(manager.add_employee(
                args[0].second.as_text(), args[1].second.as_text(),
                args[2].second.as_text(), args[3].second.as_double()));
        }
        if (operation == "DeleteEmployee") {
            expect_args(1);
            return Value::boolean(manager.delete_employee(args[0].second.as_int()));
        }
        if (operation == "CountEmployees") {
            expect_args(0);
            return Value::integer(manager.count_employees());
        }
        throw EmployeeError("no handler for operation " + operation);
    };
}

namespace {

store::Catalog catalog_skeleton() {
    using store::ColumnType;
    using store::Procedure;

    store::Catalog c;
    c.data_source = "XE";
    c.credentials = {{"csharp", "csharp"}};

    store::Table t;
    t.name = "EMPLOYEES";
    t.columns = {{"ID", ColumnType::Int},
                 {"LAST_NAME", ColumnType::Text},
                 {"FIRST_NAME", ColumnType::Text},
                 {"JOB", ColumnType::Text},
                 {"SALARY", ColumnType::Double}};
    c.tables.push_back(std::move(t));

    store::Package pkg;
    pkg.name = kPackageName;
    Procedure get_all;
    get_all.name = "GET_ALL";
    get_all.kind = Procedure::Kind::SelectAll;
    get_all.table = "EMPLOYEES";
    get_all.projection =
        store::FormatTemplate{"{ID}|{LAST_NAME}|{FIRST_NAME}|{JOB}|{SALARY}"};
    Procedure get_by_id;
    get_by_id.name = "GET_BY_ID";
    get_by_id.kind = Procedure::Kind::SelectWhereEq;
    get_by_id.table = "EMPLOYEES";
    get_by_id.column = "ID";
    Procedure ins;
    ins.name = "INS";
    ins.kind = Procedure::Kind::Insert;
    ins.table = "EMPLOYEES";
    Procedure del;
    del.name = "DEL";
    del.kind = Procedure::Kind::DeleteWhereEq;
    del.table = "EMPLOYEES";
    del.column = "ID";
    Procedure count;
    count.name = "COUNT";
    count.kind = Procedure::Kind::Count;
    count.table = "EMPLOYEES";
    pkg.procedures = {std::move(get_all), std::move(get_by_id), std::move(ins),
                      std::move(del), std::move(count)};
    c.packages.push_back(std::move(pkg));
    return c;
}

}  // namespace

store::Catalog default_catalog() {
    store::Catalog c = catalog_skeleton();
    auto row = [](std::int64_t id, const char* last, const char* first, const char* job,
                  double salary) {
        return std::vector<Value>{Value::integer(id), Value::text(last), Value::text(first),
                                  Value::text(job), Value::real(salary)};
    };
    c.tables[0].rows = {row(1, "KING", "ADA", "PRESIDENT", 5000.0),
                        row(2, "BLAKE", "ROBERT", "MANAGER", 2850.0),
                        row(3, "SMITH", "JOHN", "CLERK", 800.0)};
    c.tables[0].next_id = 4;
    return c;
}

store::Catalog empty_catalog() { return catalog_skeleton(); }

}  // namespace soapbridge::employee
