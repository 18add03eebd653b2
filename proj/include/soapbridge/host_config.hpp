#pragma once

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "soapbridge/employee.hpp"

namespace soapbridge::config {

/// Reported with the 1-based line the problem was found on; line 0 means the
/// file itself could not be read.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::size_t line, const std::string& reason)
        : std::runtime_error(line == 0 ? "config: " + reason
                                       : "config line " + std::to_string(line) + ": " +
                                             reason),
          line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

struct ServiceEntry {
    std::string name;  // file-style name, e.g. "Service.asmx"
    std::string kind;  // only "employee" is known

    bool operator==(const ServiceEntry&) const = default;
};

struct FolderEntry {
    std::string path;  // absolute, no trailing slash
    bool read = true;
    bool execute = true;
    std::vector<ServiceEntry> services;

    bool operator==(const FolderEntry&) const = default;
};

struct HostConfig {
    std::string bind = "127.0.0.1:1576";
    std::string catalog_dir = ".";
    std::string connection = employee::kDefaultConnectionString;
    std::vector<FolderEntry> folders;

    bool operator==(const HostConfig&) const = default;
};

/// The out-of-the-box host: the employee service in its usual folder.
HostConfig default_config();

/// Line-oriented `key = value` text with `[folder "<path>"]` sections and
/// `#` comment lines. Keys before any section: bind, catalog_dir,
/// connection. Keys inside a section: read, execute, and repeatable
/// `service = <name> <kind>` lines.
HostConfig parse_config(const std::string& text);

HostConfig load_config(const std::filesystem::path& file);

}  // namespace soapbridge::config
