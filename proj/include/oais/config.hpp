// Gateway configuration: one JSON document, every field optional, defaults
// chosen so `serve` works with zero configuration.
#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "oais/packaging.hpp"
#include "oais/resolver.hpp"

namespace oais::gateway {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct GatewayConfig {
    std::string instance_name = "demo";
    std::string listen_address = "127.0.0.1";
    int listen_port = 8080;
    // Advertised base; empty means derive http://{listen_address}:{port} at
    // startup (works with an ephemeral port).
    std::string public_base_url;
    std::string oaipmh_base_path = "/oaipmh";
    std::string openurl_base_path = "/openurl";
    std::string repository_name = "OAIS Gateway";
    std::string admin_email = "admin@localhost";
    std::size_t page_size = 100;
    std::int64_t token_ttl_seconds = 86400;
    std::string token_secret = "oais-gateway-dev-secret";
    std::vector<std::pair<std::string, std::string>> sets;        // (spec, name)
    std::vector<packaging::DipFormatDescriptor> formats;          // default: native format
    openurl::VersionKeyMode version_key_mode = openurl::VersionKeyMode::Aip;
    bool version_scoped_tiebreak = false;
    openurl::AutoSelect auto_select = openurl::AutoSelect::Off;
    std::string store_dir = "./store";

    bool operator==(const GatewayConfig&) const = default;

    // Throws ConfigError on invariant violations (shared base paths, empty
    // token secret, malformed format descriptors, ...).
    void validate() const;

    // JSON text codec; parse applies defaults for absent keys and validates.
    static GatewayConfig parse(const std::string& json_text);
    std::string serialize() const;

    static GatewayConfig load_file(const std::filesystem::path& path);
};

GatewayConfig default_config();

}  // namespace oais::gateway
