#include "soapbridge/store.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <mutex>
#include <set>

namespace soapbridge::store {

namespace {

std::string trim(const std::string& s) {
    const char* ws = " \t\n\r";
    auto begin = s.find_first_not_of(ws);
    if (begin == std::string::npos) return "";
    auto end = s.find_last_not_of(ws);
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        auto pos = s.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

bool is_upper_name(const std::string& s) {
    if (s.empty()) return false;
    if (!(std::isupper(static_cast<unsigned char>(s[0])))) return false;
    return std::all_of(s.begin(), s.end(), [](char c) {
        return std::isupper(static_cast<unsigned char>(c)) ||
               std::isdigit(static_cast<unsigned char>(c)) || c == '_';
    });
}

bool is_column_name(const std::string& s) {
    if (s.empty()) return false;
    auto head = static_cast<unsigned char>(s[0]);
    if (!(std::isalpha(head) || s[0] == '_')) return false;
    return std::all_of(s.begin(), s.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    });
}

// Cells escape the characters that carry file structure; a leading escape on
// the first cell keeps row lines distinguishable from directive lines.
std::string escape_cell(const std::string& s, bool first_cell) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '\\': out += "\\\\"; break;
            case '\t': out += "\\t"; break;
            case '\n': out += "\\n"; break;
            default: out.push_back(c);
        }
    }
    if (first_cell && !out.empty() && (out[0] == '!' || out[0] == '@' || out[0] == '#'))
        out.insert(out.begin(), '\\');
    return out;
}

std::string unescape_cell(const std::string& s, std::size_t line) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != '\\') {
            out.push_back(s[i]);
            continue;
        }
        if (i + 1 >= s.size()) throw CorruptCatalog(line, "dangling escape");
        switch (s[++i]) {
            case 't': out.push_back('\t'); break;
            case 'n': out.push_back('\n'); break;
            case '\\': out.push_back('\\'); break;
            case '!': out.push_back('!'); break;
            case '@': out.push_back('@'); break;
            case '#': out.push_back('#'); break;
            case 'e': break;  // empty-cell marker, expands to nothing
            default: throw CorruptCatalog(line, "unknown escape");
        }
    }
    return out;
}

const char* column_type_token(ColumnType t) {
    switch (t) {
        case ColumnType::Text: return "text";
        case ColumnType::Int: return "int";
        case ColumnType::Double: return "double";
    }
    return "text";
}

ColumnType parse_column_type(const std::string& token, std::size_t line) {
    if (token == "text") return ColumnType::Text;
    if (token == "int") return ColumnType::Int;
    if (token == "double") return ColumnType::Double;
    throw CorruptCatalog(line, "unknown column type '" + token + "'");
}

const char* kind_token(Procedure::Kind k) {
    switch (k) {
        case Procedure::Kind::SelectAll: return "select_all";
        case Procedure::Kind::SelectWhereEq: return "select_where_eq";
        case Procedure::Kind::Insert: return "insert";
        case Procedure::Kind::DeleteWhereEq: return "delete_where_eq";
        case Procedure::Kind::Count: return "count";
    }
    return "count";
}

std::int64_t parse_int_token(const std::string& s, std::size_t line,
                             const std::string& what) {
    std::int64_t out = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        throw CorruptCatalog(line, "bad " + what + " '" + s + "'");
    return out;
}

std::string cell_text(const Value& v) {
    switch (v.kind()) {
        case Value::Kind::Text: return v.as_text();
        case Value::Kind::Int: return canonical_int(v.as_int());
        case Value::Kind::Double: return canonical_double(v.as_double());
        default: return "";
    }
}

Value parse_cell(const std::string& text, ColumnType type, std::size_t line) {
    switch (type) {
        case ColumnType::Text: return Value::text(text);
        case ColumnType::Int: return Value::integer(parse_int_token(text, line, "int cell"));
        case ColumnType::Double: {
            double out = 0;
            auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
            if (ec != std::errc() || ptr != text.data() + text.size() || text.empty() ||
                !std::isfinite(out))
                throw CorruptCatalog(line, "bad double cell '" + text + "'");
            return Value::real(out);
        }
    }
    throw CorruptCatalog(line, "bad cell");
}

bool cell_matches(const Value& v, ColumnType type) {
    switch (type) {
        case ColumnType::Text: return v.kind() == Value::Kind::Text;
        case ColumnType::Int: return v.kind() == Value::Kind::Int;
        case ColumnType::Double:
            return v.kind() == Value::Kind::Double && std::isfinite(v.as_double());
    }
    return false;
}

void validate_template(const std::string& text, const Table& table, std::size_t line) {
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '\t' || text[i] == '\n')
            throw CorruptCatalog(line, "format template may not contain tabs or newlines");
        if (text[i] != '{') continue;
        auto close = text.find('}', i + 1);
        if (close == std::string::npos)
            throw CorruptCatalog(line, "unterminated '{' in format template");
        std::string column = text.substr(i + 1, close - i - 1);
        if (column.empty() || column.find('{') != std::string::npos)
            throw CorruptCatalog(line, "bad placeholder in format template");
        if (!table.find_column(column))
            throw CorruptCatalog(line,
                                 "format template names unknown column '" + column + "'");
        i = close;
    }
}

std::string render_template(const std::string& text, const Table& table,
                            const std::vector<Value>& row) {
    std::string out;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] != '{') {
            out.push_back(text[i]);
            continue;
        }
        auto close = text.find('}', i + 1);
        std::string column = text.substr(i + 1, close - i - 1);
        for (std::size_t c = 0; c < table.columns.size(); ++c) {
            if (table.columns[c].name == column) {
                out += cell_text(row[c]);
                break;
            }
        }
        i = close;
    }
    return out;
}

std::string projection_token(const Projection& p) {
    if (std::holds_alternative<std::monostate>(p)) return "";
    if (const auto* cols = std::get_if<std::vector<std::string>>(&p)) {
        std::string out = "cols:";
        for (std::size_t i = 0; i < cols->size(); ++i) {
            if (i) out.push_back(',');
            out += (*cols)[i];
        }
        return out;
    }
    return "fmt:" + std::get<FormatTemplate>(p).text;
}

Projection parse_projection(const std::string& token, const Table& table,
                            std::size_t line) {
    if (token.rfind("cols:", 0) == 0) {
        auto names = split(token.substr(5), ',');
        if (names.size() == 1 && names[0].empty())
            throw CorruptCatalog(line, "empty column projection");
        std::set<std::string> seen;
        for (const auto& name : names) {
            if (!table.find_column(name))
                throw CorruptCatalog(line, "projection names unknown column '" + name + "'");
            if (!seen.insert(name).second)
                throw CorruptCatalog(line, "duplicate projection column '" + name + "'");
        }
        return names;
    }
    if (token.rfind("fmt:", 0) == 0) {
        std::string text = token.substr(4);
        validate_template(text, table, line);
        return FormatTemplate{text};
    }
    throw CorruptCatalog(line, "bad projection '" + token + "'");
}

}  // namespace

RowReader make_reader(std::vector<std::string> columns,
                      std::vector<std::vector<Value>> rows) {
    RowReader reader;
    reader.columns_ = std::move(columns);
    reader.rows_ = std::move(rows);
    return reader;
}

const Column* Table::find_column(const std::string& name) const {
    for (const auto& c : columns)
        if (c.name == name) return &c;
    return nullptr;
}

Table* Catalog::find_table(const std::string& name) {
    for (auto& t : tables)
        if (t.name == name) return &t;
    return nullptr;
}

const Table* Catalog::find_table(const std::string& name) const {
    for (const auto& t : tables)
        if (t.name == name) return &t;
    return nullptr;
}

const Procedure* Catalog::find_procedure(const std::string& package,
                                         const std::string& name) const {
    for (const auto& p : packages) {
        if (p.name != package) continue;
        for (const auto& proc : p.procedures)
            if (proc.name == name) return &proc;
    }
    return nullptr;
}

ConnectionDescriptor parse_connection_string(const std::string& s) {
    std::optional<std::string> user_id;
    std::optional<std::string> password;
    std::optional<std::string> data_source;

    for (const std::string& segment : split(s, ';')) {
        if (trim(segment).empty()) continue;
        auto eq = segment.find('=');
        if (eq == std::string::npos) throw MalformedPair(segment);

        std::string key;
        for (char c : segment.substr(0, eq)) {
            if (c == ' ' || c == '\t') continue;
            key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        }
        std::string value = trim(segment.substr(eq + 1));
        if (value.empty()) throw MalformedPair(segment);

        std::optional<std::string>* slot = nullptr;
        std::string canonical;
        if (key == "userid") {
            slot = &user_id;
            canonical = "user id";
        } else if (key == "password") {
            slot = &password;
            canonical = "password";
        } else if (key == "datasource") {
            slot = &data_source;
            canonical = "data source";
        } else {
            throw MalformedPair(segment);
        }
        if (*slot) throw DuplicateKey(canonical);
        *slot = value;
    }

    if (!user_id) throw MissingKey("user id");
    if (!password) throw MissingKey("password");
    if (!data_source) throw MissingKey("data source");
    return {*user_id, *password, *data_source};
}

std::string catalog_to_bytes(const Catalog& catalog) {
    std::string out = "#catalog " + catalog.data_source + " v1\n";
    if (!catalog.credentials.empty()) {
        for (const auto& [user, pwd] : catalog.credentials)
            out += "@user " + escape_cell(user, false) + "\t" + escape_cell(pwd, false) +
                   "\n";
        out += "\n";
    }
    for (const auto& table : catalog.tables) {
        out += "@table " + table.name + "\n!cols ";
        for (std::size_t i = 0; i < table.columns.size(); ++i) {
            if (i) out.push_back('\t');
            out += table.columns[i].name;
            out.push_back(':');
            out += column_type_token(table.columns[i].type);
        }
        out.push_back('\n');
        for (const auto& row : table.rows) {
            std::string line;
            for (std::size_t i = 0; i < row.size(); ++i) {
                if (i) line.push_back('\t');
                line += escape_cell(cell_text(row[i]), i == 0);
            }
            // A lone empty text cell would render as a blank line, which ends
            // the block; mark it explicitly instead.
            if (line.empty()) line = "\\e";
            out += line;
            out.push_back('\n');
        }
        if (table.has_auto_id()) out += "!next_id " + canonical_int(table.next_id) + "\n";
        out += "\n";
    }
    for (const auto& package : catalog.packages) {
        out += "@package " + package.name + "\n";
        for (const auto& proc : package.procedures) {
            out += "!proc " + proc.name + "\t" + kind_token(proc.kind) + "\t" + proc.table;
            if (proc.kind == Procedure::Kind::SelectWhereEq ||
                proc.kind == Procedure::Kind::DeleteWhereEq)
                out += "\t" + proc.column;
            if (proc.kind == Procedure::Kind::SelectAll ||
                proc.kind == Procedure::Kind::SelectWhereEq) {
                std::string token = projection_token(proc.projection);
                if (!token.empty()) out += "\t" + token;
            }
            out.push_back('\n');
        }
        out += "\n";
    }
    return out;
}

Catalog catalog_from_bytes(const std::string& bytes) {
    if (bytes.empty()) throw CorruptCatalog(1, "empty catalog");
    if (bytes.back() != '\n')
        throw CorruptCatalog(std::count(bytes.begin(), bytes.end(), '\n') + 1,
                             "missing final newline");
    std::vector<std::string> lines = split(bytes, '\n');
    lines.pop_back();  // the split sentinel after the final newline

    Catalog catalog;
    std::size_t i = 0;
    auto line_no = [&] { return i + 1; };

    {
        const std::string& header = lines[0];
        const std::string prefix = "#catalog ";
        if (header.rfind(prefix, 0) != 0) throw CorruptCatalog(1, "missing catalog header");
        auto tokens = split(header.substr(prefix.size()), ' ');
        if (tokens.size() != 2 || tokens[1] != "v1" || tokens[0].empty() ||
            tokens[0].find('\t') != std::string::npos)
            throw CorruptCatalog(1, "bad catalog header");
        catalog.data_source = tokens[0];
        i = 1;
    }

    bool seen_table = false;
    bool seen_package = false;
    bool seen_users = false;

    auto expect_blank = [&](const char* after) {
        if (i >= lines.size() || !lines[i].empty())
            throw CorruptCatalog(line_no(), std::string("expected blank line after ") + after);
        ++i;
    };

    while (i < lines.size()) {
        const std::string& line = lines[i];
        if (line.rfind("@user ", 0) == 0) {
            if (seen_users || seen_table || seen_package)
                throw CorruptCatalog(line_no(), "credentials must form one leading block");
            seen_users = true;
            while (i < lines.size() && lines[i].rfind("@user ", 0) == 0) {
                auto fields = split(lines[i].substr(6), '\t');
                if (fields.size() != 2)
                    throw CorruptCatalog(line_no(), "credential line needs user and password");
                catalog.credentials.emplace_back(unescape_cell(fields[0], line_no()),
                                                 unescape_cell(fields[1], line_no()));
                ++i;
            }
            expect_blank("credentials");
        } else if (line.rfind("@table ", 0) == 0) {
            if (seen_package)
                throw CorruptCatalog(line_no(), "tables must precede packages");
            Table table;
            table.name = line.substr(7);
            if (!is_upper_name(table.name))
                throw CorruptCatalog(line_no(), "bad table name '" + table.name + "'");
            if (catalog.find_table(table.name))
                throw CorruptCatalog(line_no(), "duplicate table '" + table.name + "'");
            seen_table = true;
            ++i;

            if (i >= lines.size() || lines[i].rfind("!cols ", 0) != 0)
                throw CorruptCatalog(line_no(), "table is missing its !cols line");
            std::set<std::string> col_names;
            for (const std::string& spec : split(lines[i].substr(6), '\t')) {
                auto colon = spec.rfind(':');
                if (colon == std::string::npos || colon == 0)
                    throw CorruptCatalog(line_no(), "bad column spec '" + spec + "'");
                Column col{spec.substr(0, colon),
                           parse_column_type(spec.substr(colon + 1), line_no())};
                if (!is_column_name(col.name))
                    throw CorruptCatalog(line_no(), "bad column name '" + col.name + "'");
                if (!col_names.insert(col.name).second)
                    throw CorruptCatalog(line_no(), "duplicate column '" + col.name + "'");
                table.columns.push_back(std::move(col));
            }
            ++i;

            while (i < lines.size() && !lines[i].empty() && lines[i][0] != '!') {
                auto cells = split(lines[i], '\t');
                if (cells.size() != table.columns.size())
                    throw CorruptCatalog(line_no(), "row has wrong cell count");
                std::vector<Value> row;
                for (std::size_t c = 0; c < cells.size(); ++c)
                    row.push_back(parse_cell(unescape_cell(cells[c], line_no()),
                                             table.columns[c].type, line_no()));
                table.rows.push_back(std::move(row));
                ++i;
            }

            if (table.has_auto_id()) {
                if (i >= lines.size() || lines[i].rfind("!next_id ", 0) != 0)
                    throw CorruptCatalog(line_no(), "auto-id table is missing !next_id");
                table.next_id = parse_int_token(lines[i].substr(9), line_no(), "next_id");
                std::int64_t max_id = 0;
                for (const auto& row : table.rows)
                    max_id = std::max(max_id, row[0].as_int());
                if (table.next_id <= max_id || table.next_id < 1)
                    throw CorruptCatalog(line_no(), "next_id does not exceed existing ids");
                ++i;
            } else if (i < lines.size() && lines[i].rfind("!next_id", 0) == 0) {
                throw CorruptCatalog(line_no(), "next_id on a table without auto-id");
            }
            catalog.tables.push_back(std::move(table));
            expect_blank("table block");
        } else if (line.rfind("@package ", 0) == 0) {
            Package package;
            package.name = line.substr(9);
            if (!is_upper_name(package.name))
                throw CorruptCatalog(line_no(), "bad package name '" + package.name + "'");
            for (const auto& p : catalog.packages)
                if (p.name == package.name)
                    throw CorruptCatalog(line_no(),
                                         "duplicate package '" + package.name + "'");
            seen_package = true;
            ++i;

            while (i < lines.size() && lines[i].rfind("!proc ", 0) == 0) {
                auto fields = split(lines[i].substr(6), '\t');
                if (fields.size() < 3)
                    throw CorruptCatalog(line_no(), "procedure line needs name, kind, table");
                Procedure proc;
                proc.name = fields[0];
                if (!is_upper_name(proc.name))
                    throw CorruptCatalog(line_no(), "bad procedure name '" + proc.name + "'");
                for (const auto& existing : package.procedures)
                    if (existing.name == proc.name)
                        throw CorruptCatalog(line_no(),
                                             "duplicate procedure '" + proc.name + "'");
                proc.table = fields[2];
                const Table* table = catalog.find_table(proc.table);
                if (!table)
                    throw CorruptCatalog(line_no(),
                                         "procedure references unknown table '" +
                                             proc.table + "'");

                const std::string& kind = fields[1];
                auto want = [&](std::size_t lo, std::size_t hi) {
                    if (fields.size() < 3 + lo || fields.size() > 3 + hi)
                        throw CorruptCatalog(line_no(), "wrong field count for " + kind);
                };
                auto column_field = [&](const std::string& name) {
                    if (!table->find_column(name))
                        throw CorruptCatalog(
                            line_no(), "procedure names unknown column '" + name + "'");
                    return name;
                };
                if (kind == "select_all") {
                    want(0, 1);
                    proc.kind = Procedure::Kind::SelectAll;
                    if (fields.size() == 4)
                        proc.projection = parse_projection(fields[3], *table, line_no());
                } else if (kind == "select_where_eq") {
                    want(1, 2);
                    proc.kind = Procedure::Kind::SelectWhereEq;
                    proc.column = column_field(fields[3]);
                    if (fields.size() == 5)
                        proc.projection = parse_projection(fields[4], *table, line_no());
                } else if (kind == "insert") {
                    want(0, 0);
                    proc.kind = Procedure::Kind::Insert;
                } else if (kind == "delete_where_eq") {
                    want(1, 1);
                    proc.kind = Procedure::Kind::DeleteWhereEq;
                    proc.column = column_field(fields[3]);
                } else if (kind == "count") {
                    want(0, 0);
                    proc.kind = Procedure::Kind::Count;
                } else {
                    throw CorruptCatalog(line_no(), "unknown procedure kind '" + kind + "'");
                }
                package.procedures.push_back(std::move(proc));
                ++i;
            }
            catalog.packages.push_back(std::move(package));
            expect_blank("package block");
        } else if (line.empty()) {
            throw CorruptCatalog(line_no(), "unexpected blank line");
        } else {
            throw CorruptCatalog(line_no(), "unrecognized line");
        }
    }
    return catalog;
}

Catalog load_catalog(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw IoFailure("cannot read catalog file " + file.string());
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoFailure("error reading catalog file " + file.string());
    Catalog catalog = catalog_from_bytes(bytes);
    catalog.backing_file = file;
    return catalog;
}

void save_catalog(const Catalog& catalog, const std::filesystem::path& file) {
    std::string bytes = catalog_to_bytes(catalog);
    try {
        catalog_from_bytes(bytes);  // refuse to write a file we could not load
    } catch (const StoreError& e) {
        throw IoFailure(std::string("catalog is not serializable: ") + e.what());
    }
    std::filesystem::path temp = file;
    temp += ".tmp";
    {
        std::ofstream out(temp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoFailure("cannot write catalog file " + temp.string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.flush();
        if (!out) throw IoFailure("error writing catalog file " + temp.string());
    }
    std::error_code ec;
    std::filesystem::rename(temp, file, ec);
    if (ec) throw IoFailure("cannot replace catalog file " + file.string() + ": " +
                            ec.message());
}

std::unique_ptr<Session> open_session(const std::filesystem::path& catalog_dir,
                                      const ConnectionDescriptor& conn) {
    std::filesystem::path file = catalog_dir / (conn.data_source + ".cat");
    std::error_code ec;
    if (!std::filesystem::exists(file, ec) || ec)
        throw UnknownDataSource("no catalog for data source '" + conn.data_source + "' (" +
                                file.string() + ")");
    Catalog catalog = load_catalog(file);
    if (catalog.data_source != conn.data_source)
        throw CorruptCatalog(1, "catalog header names data source '" + catalog.data_source +
                                    "', file is for '" + conn.data_source + "'");
    bool ok = std::any_of(catalog.credentials.begin(), catalog.credentials.end(),
                          [&](const auto& cred) {
                              return cred.first == conn.user_id &&
                                     cred.second == conn.password;
                          });
    if (!ok)
        throw AuthenticationFailed("invalid credentials for data source '" +
                                   conn.data_source + "'");
    return std::make_unique<Session>(std::move(catalog), std::move(file));
}

bool RowReader::next() {
    if (!started_)
        started_ = true;
    else if (pos_ < rows_.size())
        ++pos_;
    return pos_ < rows_.size();
}

Value RowReader::get(const std::string& column) const {
    if (!started_ || pos_ >= rows_.size())
        throw NoCurrentRow("no current row; call next() first");
    for (std::size_t i = 0; i < columns_.size(); ++i)
        if (columns_[i] == column) return rows_[pos_][i];
    throw UnknownColumn("unknown column '" + column + "'");
}

namespace {

RowReader project_rows(const Table& table, const std::vector<const std::vector<Value>*>& rows,
                       const Projection& projection) {
    std::vector<std::string> columns;
    std::vector<std::vector<Value>> out;
    if (const auto* cols = std::get_if<std::vector<std::string>>(&projection)) {
        std::vector<std::size_t> indices;
        for (const auto& name : *cols) {
            for (std::size_t i = 0; i < table.columns.size(); ++i)
                if (table.columns[i].name == name) indices.push_back(i);
        }
        columns = *cols;
        for (const auto* row : rows) {
            std::vector<Value> projected;
            for (std::size_t i : indices) projected.push_back((*row)[i]);
            out.push_back(std::move(projected));
        }
    } else if (const auto* fmt = std::get_if<FormatTemplate>(&projection)) {
        columns = {"VALUE"};
        for (const auto* row : rows)
            out.push_back({Value::text(render_template(fmt->text, table, *row))});
    } else {
        for (const auto& col : table.columns) columns.push_back(col.name);
        for (const auto* row : rows) out.push_back(*row);
    }
    return make_reader(std::move(columns), std::move(out));
}

}  // namespace

Session::Session(Catalog catalog, std::filesystem::path file)
    : catalog_(std::move(catalog)), file_(std::move(file)) {}

ProcedureResult Session::execute_procedure(const std::string& package,
                                           const std::string& proc,
                                           const std::vector<Value>& args) {
    // Package and table definitions are immutable after load; only row data
    // and next_id change, and those are only touched under the lock below.
    const Procedure* p = catalog_.find_procedure(package, proc);
    if (!p) throw UnknownProcedure("no procedure " + package + "." + proc);
    Table* table = catalog_.find_table(p->table);
    if (!table) throw UnknownProcedure("procedure table vanished");  // load prevents this

    auto check_arg = [&](const Value& v, const Column& col) {
        if (!cell_matches(v, col.type))
            throw TypeMismatch("procedure " + package + "." + proc + ": column '" +
                               col.name + "' expects " + column_type_token(col.type) +
                               ", got " + kind_name(v.kind()));
    };
    auto want_args = [&](std::size_t n) {
        if (args.size() != n)
            throw ArgumentMismatch("procedure " + package + "." + proc + " takes " +
                                   std::to_string(n) + " argument(s), got " +
                                   std::to_string(args.size()));
    };

    switch (p->kind) {
        case Procedure::Kind::SelectAll: {
            want_args(0);
            std::shared_lock lock(mutex_);
            std::vector<const std::vector<Value>*> rows;
            for (const auto& row : table->rows) rows.push_back(&row);
            return project_rows(*table, rows, p->projection);
        }
        case Procedure::Kind::SelectWhereEq: {
            want_args(1);
            const Column* col = table->find_column(p->column);
            check_arg(args[0], *col);
            std::size_t idx =
                static_cast<std::size_t>(col - table->columns.data());
            std::shared_lock lock(mutex_);
            std::vector<const std::vector<Value>*> rows;
            for (const auto& row : table->rows)
                if (row[idx] == args[0]) rows.push_back(&row);
            return project_rows(*table, rows, p->projection);
        }
        case Procedure::Kind::Insert: {
            bool auto_id = table->has_auto_id();
            std::size_t offset = auto_id ? 1 : 0;
            want_args(table->columns.size() - offset);
            for (std::size_t i = 0; i < args.size(); ++i)
                check_arg(args[i], table->columns[i + offset]);
            std::unique_lock lock(mutex_);
            std::vector<Value> row;
            Affected result{1, std::nullopt};
            if (auto_id) {
                result.last_insert_id = table->next_id;
                row.push_back(Value::integer(table->next_id++));
            }
            row.insert(row.end(), args.begin(), args.end());
            table->rows.push_back(std::move(row));
            return result;
        }
        case Procedure::Kind::DeleteWhereEq: {
            want_args(1);
            const Column* col = table->find_column(p->column);
            check_arg(args[0], *col);
            std::size_t idx =
                static_cast<std::size_t>(col - table->columns.data());
            std::unique_lock lock(mutex_);
            auto before = table->rows.size();
            table->rows.erase(std::remove_if(table->rows.begin(), table->rows.end(),
                                             [&](const std::vector<Value>& row) {
                                                 return row[idx] == args[0];
                                             }),
                              table->rows.end());
            return Affected{static_cast<std::int64_t>(before - table->rows.size()),
                            std::nullopt};
        }
        case Procedure::Kind::Count: {
            want_args(0);
            std::shared_lock lock(mutex_);
            return static_cast<std::int64_t>(table->rows.size());
        }
    }
    throw UnknownProcedure("unhandled procedure kind");
}

void Session::save() {
    std::unique_lock lock(mutex_);
    save_catalog(catalog_, file_);
}

Catalog Session::snapshot() const {
    std::shared_lock lock(mutex_);
    return catalog_;
}

}  // namespace soapbridge::store
