#include <algorithm>
#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "soapbridge/client.hpp"
#include "soapbridge/contract.hpp"
#include "soapbridge/employee.hpp"
#include "soapbridge/host.hpp"
#include "soapbridge/host_config.hpp"
#include "soapbridge/http.hpp"
#include "soapbridge/soap.hpp"
#include "soapbridge/store.hpp"
#include "soapbridge/value.hpp"

namespace {

using namespace soapbridge;

// Exit codes shared by every subcommand: 0 success, 2 configuration or
// argument error (before any request is sent), 3 bind failure, 4 transport
// or contract error, 5 SOAP fault.
constexpr int kOk = 0;
constexpr int kUsageError = 2;
constexpr int kBindError = 3;
constexpr int kTransportError = 4;
constexpr int kFaultError = 5;

std::atomic<bool> g_stop{false};

void request_stop(int) { g_stop.store(true); }

std::string scalar_text(const Value& v) {
    switch (v.kind()) {
        case Value::Kind::Text: return v.as_text();
        case Value::Kind::Int: return canonical_int(v.as_int());
        case Value::Kind::Boolean: return canonical_boolean(v.as_boolean());
        case Value::Kind::Double: return canonical_double(v.as_double());
        case Value::Kind::TextList: {
            std::string joined;
            for (const std::string& item : v.as_text_list()) {
                if (!joined.empty()) joined += ", ";
                joined += item;
            }
            return joined;
        }
        case Value::Kind::Record: return "<" + v.as_record().type_name + ">";
    }
    return "";
}

void print_result(const Value& v) {
    switch (v.kind()) {
        case Value::Kind::TextList:
            for (const std::string& item : v.as_text_list()) std::cout << item << "\n";
            break;
        case Value::Kind::Record:
            for (const Value::RecordField& field : v.as_record().fields)
                std::cout << field.name << "=" << scalar_text(field.value) << "\n";
            break;
        default:
            std::cout << scalar_text(v) << "\n";
            break;
    }
}

int cmd_serve(const std::optional<std::string>& config_path,
              const std::optional<std::string>& bind_override,
              const std::optional<std::string>& catalog_override) {
    config::HostConfig cfg;
    try {
        if (config_path) {
            cfg = config::load_config(*config_path);
        } else if (const char* env = std::getenv("SOAPBRIDGE_CONFIG")) {
            cfg = config::load_config(env);
        } else {
            cfg = config::default_config();
        }
    } catch (const config::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kUsageError;
    }
    if (bind_override) cfg.bind = *bind_override;
    if (catalog_override) cfg.catalog_dir = *catalog_override;

    std::size_t service_count = 0;
    for (const config::FolderEntry& folder : cfg.folders)
        service_count += folder.services.size();
    if (service_count == 0) {
        std::cerr << "config defines no services\n";
        return kUsageError;
    }

    store::ConnectionDescriptor conn;
    try {
        conn = store::parse_connection_string(cfg.connection);
    } catch (const store::StoreError& e) {
        std::cerr << "bad connection string: " << e.what() << "\n";
        return kUsageError;
    }

    const std::filesystem::path catalog_file =
        std::filesystem::path(cfg.catalog_dir) / (conn.data_source + ".cat");
    std::shared_ptr<store::Session> session;
    try {
        session = store::open_session(cfg.catalog_dir, conn);
    } catch (const store::StoreError& e) {
        std::cerr << "cannot open catalog " << catalog_file.string() << ": " << e.what()
                  << "\n";
        return kUsageError;
    }

    host::ServiceHost service_host;
    for (const config::FolderEntry& folder : cfg.folders) {
        service_host.add_folder(folder.path, {folder.read, folder.execute});
        for (const config::ServiceEntry& svc : folder.services)
            service_host.register_service(
                folder.path, svc.name,
                {employee::build_descriptor(), employee::make_handler(session)});
    }

    http::ServerOptions options;
    options.logger = [](const http::Request& request, const http::Response& response,
                        std::chrono::milliseconds elapsed) {
        std::cerr << request.method << " " << request.path
                  << (request.query.empty() ? "" : "?" + request.query) << " "
                  << response.status << " " << elapsed.count() << "ms\n";
    };

    std::unique_ptr<http::Server> server;
    try {
        server = host::serve(service_host, cfg.bind, options);
    } catch (const http::BindFailure& e) {
        std::cerr << e.what() << "\n";
        return kBindError;
    }

    std::signal(SIGINT, request_stop);
    std::signal(SIGTERM, request_stop);
    std::cerr << "listening on " << server->address() << "\n";
    while (!g_stop.load()) std::this_thread::sleep_for(std::chrono::milliseconds(50));
    server->stop();
    return kOk;
}

int cmd_describe(const std::string& url) {
    try {
        auto [descriptor, endpoint] = client::fetch_wsdl(url);
        std::vector<contract::OperationDescriptor> ops = descriptor.operations;
        std::sort(ops.begin(), ops.end(),
                  [](const auto& a, const auto& b) { return a.name < b.name; });
        for (const contract::OperationDescriptor& op : ops) {
            std::cout << op.name << "(";
            for (std::size_t i = 0; i < op.params.size(); ++i) {
                if (i > 0) std::cout << ", ";
                std::cout << op.params[i].name << ":" << op.params[i].type.display_name();
            }
            std::cout << ") -> " << op.returns.display_name() << "\n";
        }
        return kOk;
    } catch (const client::ClientError& e) {
        std::cerr << e.what() << "\n";
        return kTransportError;
    }
}

int cmd_call(const std::string& url, const std::string& op_name,
             const std::vector<std::string>& raw_args) {
    std::vector<std::pair<std::string, std::string>> given;
    for (const std::string& raw : raw_args) {
        std::size_t eq = raw.find('=');
        if (eq == std::string::npos || eq == 0) {
            std::cerr << "argument must be name=value, got '" << raw << "'\n";
            return kUsageError;
        }
        std::string name = raw.substr(0, eq);
        for (const auto& [existing, ignored] : given) {
            if (existing == name) {
                std::cerr << "duplicate argument '" << name << "'\n";
                return kUsageError;
            }
        }
        given.emplace_back(std::move(name), raw.substr(eq + 1));
    }

    client::ServiceProxy proxy;
    try {
        proxy = client::connect(url);
    } catch (const client::ClientError& e) {
        std::cerr << e.what() << "\n";
        return kTransportError;
    }

    const contract::OperationDescriptor* op = proxy.descriptor.find_operation(op_name);
    if (op == nullptr) {
        std::cerr << "no operation " << op_name << " in the service contract\n";
        return kTransportError;
    }
    if (given.size() != op->params.size()) {
        std::cerr << op_name << " takes " << op->params.size() << " arguments, got "
                  << given.size() << "\n";
        return kUsageError;
    }

    std::vector<std::pair<std::string, Value>> args;
    for (const contract::FieldDef& param : op->params) {
        auto match = std::find_if(given.begin(), given.end(),
                                  [&](const auto& g) { return g.first == param.name; });
        if (match == given.end()) {
            std::cerr << "missing argument '" << param.name << "'\n";
            return kUsageError;
        }
        try {
            args.emplace_back(param.name,
                              soap::parse_lexical(param.name, match->second, param.type));
        } catch (const soap::SoapError& e) {
            std::cerr << e.what() << "\n";
            return kUsageError;
        }
    }

    try {
        std::optional<Value> result = client::call(proxy, op_name, args);
        if (result.has_value()) print_result(*result);
        return kOk;
    } catch (const client::FaultError& e) {
        std::cerr << e.fault().fault_string << "\n";
        return kFaultError;
    } catch (const client::ClientError& e) {
        std::cerr << e.what() << "\n";
        return kTransportError;
    }
}

int cmd_db_seed(const std::string& dir, const std::string& fixture) {
    store::Catalog catalog =
        fixture == "default" ? employee::default_catalog() : employee::empty_catalog();
    std::filesystem::path file =
        std::filesystem::path(dir) / (catalog.data_source + ".cat");
    try {
        store::save_catalog(catalog, file);
    } catch (const store::StoreError& e) {
        std::cerr << e.what() << "\n";
        return kUsageError;
    }
    std::cout << "wrote " << file.string() << "\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"table-backed SOAP services: serve, describe, call, and seed"};
    app.require_subcommand(1);

    auto* serve = app.add_subcommand("serve", "host the configured services");
    std::optional<std::string> config_path;
    std::optional<std::string> bind_override;
    std::optional<std::string> catalog_override;
    serve->add_option("--config", config_path,
                      "config file (default: $SOAPBRIDGE_CONFIG, then built-in)");
    serve->add_option("--bind", bind_override, "host:port to listen on");
    serve->add_option("--catalog-dir", catalog_override, "directory with .cat files");

    auto* describe = app.add_subcommand("describe", "print a service's operations");
    std::string describe_url;
    describe->add_option("--url", describe_url, "service endpoint URL")->required();

    auto* call = app.add_subcommand("call", "invoke one operation");
    std::string call_url;
    std::string call_op;
    std::vector<std::string> call_args;
    call->add_option("--url", call_url, "service endpoint URL")->required();
    call->add_option("--op", call_op, "operation name")->required();
    call->add_option("--arg", call_args, "argument as name=value (repeatable)");

    auto* db_seed = app.add_subcommand("db-seed", "write a catalog fixture");
    std::string seed_dir;
    std::string seed_fixture;
    db_seed->add_option("--catalog-dir", seed_dir, "directory to write into")->required();
    db_seed->add_option("--fixture", seed_fixture, "default | empty")
        ->required()
        ->check(CLI::IsMember({"default", "empty"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kUsageError;
    }

    if (serve->parsed()) return cmd_serve(config_path, bind_override, catalog_override);
    if (describe->parsed()) return cmd_describe(describe_url);
    if (call->parsed()) return cmd_call(call_url, call_op, call_args);
    return cmd_db_seed(seed_dir, seed_fixture);
}
