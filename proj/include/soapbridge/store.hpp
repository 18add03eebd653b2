#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "soapbridge/value.hpp"

namespace soapbridge::store {

struct ConnectionDescriptor {
    std::string user_id;
    std::string password;
    std::string data_source;

    bool operator==(const ConnectionDescriptor& other) const {
        return user_id == other.user_id && password == other.password &&
               data_source == other.data_source;
    }
};

enum class ColumnType { Text, Int, Double };

struct Column {
    std::string name;
    ColumnType type;

    bool operator==(const Column& other) const {
        return name == other.name && type == other.type;
    }
};

struct Table {
    std::string name;  // upper-case, [A-Z][A-Z0-9_]*
    std::vector<Column> columns;
    std::vector<std::vector<Value>> rows;
    std::int64_t next_id = 1;

    /// Auto-assigned ids apply when the first column is an Int named ID.
    bool has_auto_id() const {
        return !columns.empty() && columns.front().name == "ID" &&
               columns.front().type == ColumnType::Int;
    }
    const Column* find_column(const std::string& name) const;

    bool operator==(const Table& other) const {
        return name == other.name && columns == other.columns && rows == other.rows &&
               next_id == other.next_id;
    }
};

/// `{COL}` placeholders replaced by the row's cell text.
struct FormatTemplate {
    std::string text;

    bool operator==(const FormatTemplate& other) const { return text == other.text; }
};

/// All columns | a named subset | a single formatted text column named VALUE.
using Projection = std::variant<std::monostate, std::vector<std::string>, FormatTemplate>;

struct Procedure {
    enum class Kind { SelectAll, SelectWhereEq, Insert, DeleteWhereEq, Count };

    std::string name;
    Kind kind = Kind::Count;
    std::string table;
    std::string column;     // SelectWhereEq / DeleteWhereEq match column
    Projection projection;  // select kinds only

    bool operator==(const Procedure& other) const {
        return name == other.name && kind == other.kind && table == other.table &&
               column == other.column && projection == other.projection;
    }
};

struct Package {
    std::string name;
    std::vector<Procedure> procedures;

    bool operator==(const Package& other) const {
        return name == other.name && procedures == other.procedures;
    }
};

struct Catalog {
    std::string data_source;
    std::vector<std::pair<std::string, std::string>> credentials;  // (user_id, password)
    std::vector<Table> tables;
    std::vector<Package> packages;
    std::filesystem::path backing_file;  // where it was loaded from; not part of equality

    Table* find_table(const std::string& name);
    const Table* find_table(const std::string& name) const;
    const Procedure* find_procedure(const std::string& package, const std::string& name) const;

    bool operator==(const Catalog& other) const {
        return data_source == other.data_source && credentials == other.credentials &&
               tables == other.tables && packages == other.packages;
    }
};

class StoreError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class MissingKey : public StoreError {
public:
    explicit MissingKey(std::string key)
        : StoreError("connection string is missing '" + key + "'"), key_(std::move(key)) {}
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

class MalformedPair : public StoreError {
public:
    explicit MalformedPair(std::string fragment)
        : StoreError("malformed connection string fragment '" + fragment + "'"),
          fragment_(std::move(fragment)) {}
    const std::string& fragment() const { return fragment_; }

private:
    std::string fragment_;
};

class DuplicateKey : public StoreError {
public:
    explicit DuplicateKey(std::string key)
        : StoreError("duplicate connection string key '" + key + "'"),
          key_(std::move(key)) {}
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

class UnknownDataSource : public StoreError {
public:
    using StoreError::StoreError;
};

class AuthenticationFailed : public StoreError {
public:
    using StoreError::StoreError;
};

class CorruptCatalog : public StoreError {
public:
    CorruptCatalog(std::size_t line, const std::string& reason)
        : StoreError("catalog line " + std::to_string(line) + ": " + reason),
          line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class IoFailure : public StoreError {
public:
    using StoreError::StoreError;
};

class UnknownProcedure : public StoreError {
public:
    using StoreError::StoreError;
};

class ArgumentMismatch : public StoreError {
public:
    using StoreError::StoreError;
};

class TypeMismatch : public StoreError {
public:
    using StoreError::StoreError;
};

class NoCurrentRow : public StoreError {
public:
    using StoreError::StoreError;
};

class UnknownColumn : public StoreError {
public:
    using StoreError::StoreError;
};

/// Forward-only cursor over a materialized result snapshot. Reading never
/// observes later mutations; advancing past the end stays at the end.
class RowReader {
public:
    bool next();
    Value get(const std::string& column) const;
    const std::vector<std::string>& columns() const { return columns_; }
    std::size_t row_count() const { return rows_.size(); }

private:
    friend class Session;
    friend RowReader make_reader(std::vector<std::string>, std::vector<std::vector<Value>>);

    std::vector<std::string> columns_;
    std::vector<std::vector<Value>> rows_;
    std::size_t pos_ = 0;
    bool started_ = false;
};

struct Affected {
    std::int64_t count = 0;
    std::optional<std::int64_t> last_insert_id;  // set by auto-id inserts
};

using ProcedureResult = std::variant<RowReader, Affected, std::int64_t>;

/// One open catalog guarded by a reader-writer lock: any number of reads or
/// one mutation at a time; saving serializes with mutations.
class Session {
public:
    Session(Catalog catalog, std::filesystem::path file);
    Session(const Session&) = delete;
    Session& operator=(const Session&) = delete;

    ProcedureResult execute_procedure(const std::string& package, const std::string& proc,
                                      const std::vector<Value>& args);
    void save();
    Catalog snapshot() const;
    const std::filesystem::path& backing_file() const { return file_; }

private:
    mutable std::shared_mutex mutex_;
    Catalog catalog_;
    std::filesystem::path file_;
};

ConnectionDescriptor parse_connection_string(const std::string& s);

std::unique_ptr<Session> open_session(const std::filesystem::path& catalog_dir,
                                      const ConnectionDescriptor& conn);

Catalog load_catalog(const std::filesystem::path& file);
void save_catalog(const Catalog& catalog, const std::filesystem::path& file);

/// The exact bytes save_catalog writes (UTF-8, LF, deterministic).
std::string catalog_to_bytes(const Catalog& catalog);
Catalog catalog_from_bytes(const std::string& bytes);

}  // namespace soapbridge::store
