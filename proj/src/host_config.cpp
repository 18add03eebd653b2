#include "soapbridge/host_config.hpp"

#include <fstream>
#include <sstream>
#include <utility>

namespace soapbridge::config {
namespace {

std::string trim(const std::string& s) {
    std::size_t begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    std::size_t end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

bool parse_flag(std::size_t line, const std::string& key, const std::string& value) {
    if (value == "true") return true;
    if (value == "false") return false;
    throw ConfigError(line, key + " must be true or false, got '" + value + "'");
}

std::string folder_path(std::size_t line, const std::string& header) {
    const std::string prefix = "[folder \"";
    const std::string suffix = "\"]";
    if (header.size() < prefix.size() + suffix.size() ||
        header.compare(0, prefix.size(), prefix) != 0 ||
        header.compare(header.size() - suffix.size(), suffix.size(), suffix) != 0)
        throw ConfigError(line, "malformed section header, expected [folder \"<path>\"]");
    std::string path = header.substr(prefix.size(),
                                     header.size() - prefix.size() - suffix.size());
    if (path.empty() || path.front() != '/')
        throw ConfigError(line, "folder path must start with '/'");
    if (path.size() == 1 || path.back() == '/')
        throw ConfigError(line, "folder path must not end with '/'");
    return path;
}

ServiceEntry parse_service(std::size_t line, const std::string& value) {
    std::istringstream words(value);
    std::string name;
    std::string kind;
    std::string extra;
    if (!(words >> name >> kind) || (words >> extra))
        throw ConfigError(line, "service takes '<name> <kind>', got '" + value + "'");
    if (kind != "employee") throw ConfigError(line, "unknown service kind '" + kind + "'");
    return ServiceEntry{std::move(name), std::move(kind)};
}

}  // namespace

HostConfig default_config() {
    HostConfig c;
    c.folders = {FolderEntry{employee::kServiceFolder,
                             true,
                             true,
                             {ServiceEntry{employee::kServiceFile, "employee"}}}};
    return c;
}

HostConfig parse_config(const std::string& text) {
    HostConfig c;
    FolderEntry* folder = nullptr;
    bool seen_bind = false;
    bool seen_catalog_dir = false;
    bool seen_connection = false;
    bool seen_read = false;
    bool seen_execute = false;

    std::size_t line_no = 0;
    std::size_t begin = 0;
    while (begin <= text.size()) {
        std::size_t end = text.find('\n', begin);
        if (end == std::string::npos) end = text.size();
        std::string line = trim(text.substr(begin, end - begin));
        begin = end + 1;
        ++line_no;
        if (begin > text.size() && line.empty()) break;  // no trailing pseudo-line
        if (line.empty() || line.front() == '#') continue;

        if (line.front() == '[') {
            std::string path = folder_path(line_no, line);
            for (const FolderEntry& f : c.folders)
                if (f.path == path)
                    throw ConfigError(line_no, "duplicate folder '" + path + "'");
            c.folders.push_back(FolderEntry{path, true, true, {}});
            folder = &c.folders.back();
            seen_read = false;
            seen_execute = false;
            continue;
        }

        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(line_no, "expected 'key = value', got '" + line + "'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(line_no, "missing key before '='");
        if (value.empty()) throw ConfigError(line_no, "empty value for '" + key + "'");

        if (folder == nullptr) {
            if (key == "bind") {
                if (std::exchange(seen_bind, true))
                    throw ConfigError(line_no, "duplicate key 'bind'");
                c.bind = value;
            } else if (key == "catalog_dir") {
                if (std::exchange(seen_catalog_dir, true))
                    throw ConfigError(line_no, "duplicate key 'catalog_dir'");
                c.catalog_dir = value;
            } else if (key == "connection") {
                if (std::exchange(seen_connection, true))
                    throw ConfigError(line_no, "duplicate key 'connection'");
                c.connection = value;
            } else if (key == "read" || key == "execute" || key == "service") {
                throw ConfigError(line_no,
                                  "key '" + key + "' only applies inside a folder section");
            } else {
                throw ConfigError(line_no, "unknown key '" + key + "'");
            }
            continue;
        }

        if (key == "read") {
            if (std::exchange(seen_read, true))
                throw ConfigError(line_no, "duplicate key 'read'");
            folder->read = parse_flag(line_no, key, value);
        } else if (key == "execute") {
            if (std::exchange(seen_execute, true))
                throw ConfigError(line_no, "duplicate key 'execute'");
            folder->execute = parse_flag(line_no, key, value);
        } else if (key == "service") {
            ServiceEntry entry = parse_service(line_no, value);
            for (const ServiceEntry& s : folder->services)
                if (s.name == entry.name)
                    throw ConfigError(line_no, "duplicate service '" + entry.name +
                                                   "' in folder '" + folder->path + "'");
            folder->services.push_back(std::move(entry));
        } else if (key == "bind" || key == "catalog_dir" || key == "connection") {
            throw ConfigError(line_no,
                              "key '" + key + "' must appear before any folder section");
        } else {
            throw ConfigError(line_no, "unknown key '" + key + "'");
        }
    }
    return c;
}

HostConfig load_config(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw ConfigError(0, "cannot read " + file.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) throw ConfigError(0, "cannot read " + file.string());
    return parse_config(buffer.str());
}

}  // namespace soapbridge::config
