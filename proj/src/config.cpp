#include "oais/config.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "oais/text.hpp"

namespace oais::gateway {

using nlohmann::json;

namespace {

std::string_view embed_mode_name(packaging::EmbedMode m) {
    return m == packaging::EmbedMode::Inline ? "inline" : "by-reference";
}

packaging::EmbedMode embed_mode_from(const std::string& s) {
    if (s == "inline") return packaging::EmbedMode::Inline;
    if (s == "by-reference") return packaging::EmbedMode::ByReference;
    throw ConfigError("unknown embed_mode '" + s + "' (expected inline or by-reference)");
}

std::string_view auto_select_name(openurl::AutoSelect a) {
    return a == openurl::AutoSelect::Off ? "off" : "latest";
}

openurl::AutoSelect auto_select_from(const std::string& s) {
    if (s == "off") return openurl::AutoSelect::Off;
    if (s == "latest") return openurl::AutoSelect::Latest;
    throw ConfigError("unknown auto_select '" + s + "' (expected off or latest)");
}

template <typename T>
void read_field(const json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
    }
}

}  // namespace

GatewayConfig default_config() {
    GatewayConfig cfg;
    cfg.formats = {packaging::native_format()};
    return cfg;
}

void GatewayConfig::validate() const {
    if (instance_name.empty()) throw ConfigError("instance_name must not be empty");
    if (listen_port < 0 || listen_port > 65535) throw ConfigError("listen_port out of range");
    if (oaipmh_base_path == openurl_base_path)
        throw ConfigError("oaipmh_base_path and openurl_base_path must differ");
    if (oaipmh_base_path.empty() || oaipmh_base_path.front() != '/')
        throw ConfigError("oaipmh_base_path must start with '/'");
    if (openurl_base_path.empty() || openurl_base_path.front() != '/')
        throw ConfigError("openurl_base_path must start with '/'");
    if (page_size == 0) throw ConfigError("page_size must be at least 1");
    if (token_secret.empty()) throw ConfigError("token_secret must not be empty");
    if (token_ttl_seconds <= 0) throw ConfigError("token_ttl_seconds must be positive");
    if (store_dir.empty()) throw ConfigError("store_dir must not be empty");
    for (const auto& [spec, name] : sets) {
        if (!text::is_set_spec(spec)) throw ConfigError("malformed set spec '" + spec + "'");
        if (name.empty()) throw ConfigError("set '" + spec + "' needs a name");
    }
    for (const auto& f : formats) {
        if (!text::is_absolute_uri(f.format_uri))
            throw ConfigError("format_uri is not an absolute URI: '" + f.format_uri + "'");
        if (!text::is_metadata_prefix(f.metadata_prefix))
            throw ConfigError("metadata_prefix has illegal characters: '" + f.metadata_prefix + "'");
        if (f.namespace_uri.empty())
            throw ConfigError("format '" + f.format_uri + "' needs a namespace_uri");
    }
}

GatewayConfig GatewayConfig::parse(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("configuration is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("configuration root must be a JSON object");

    GatewayConfig cfg = default_config();
    read_field(j, "instance_name", cfg.instance_name);
    read_field(j, "listen_address", cfg.listen_address);
    read_field(j, "listen_port", cfg.listen_port);
    read_field(j, "public_base_url", cfg.public_base_url);
    read_field(j, "oaipmh_base_path", cfg.oaipmh_base_path);
    read_field(j, "openurl_base_path", cfg.openurl_base_path);
    read_field(j, "repository_name", cfg.repository_name);
    read_field(j, "admin_email", cfg.admin_email);
    read_field(j, "page_size", cfg.page_size);
    read_field(j, "token_ttl_seconds", cfg.token_ttl_seconds);
    read_field(j, "token_secret", cfg.token_secret);
    read_field(j, "store_dir", cfg.store_dir);
    read_field(j, "version_scoped_tiebreak", cfg.version_scoped_tiebreak);

    if (j.contains("version_key_mode")) {
        const auto s = j.at("version_key_mode").get<std::string>();
        const auto m = openurl::version_key_mode_from_string(s);
        if (!m)
            throw ConfigError("unknown version_key_mode '" + s +
                              "' (expected aip, version-global or version-scoped)");
        cfg.version_key_mode = *m;
    }
    if (j.contains("auto_select")) cfg.auto_select = auto_select_from(j.at("auto_select").get<std::string>());

    if (j.contains("sets")) {
        cfg.sets.clear();
        for (const auto& s : j.at("sets")) {
            if (!s.is_object() || !s.contains("spec") || !s.contains("name"))
                throw ConfigError("each set needs 'spec' and 'name'");
            cfg.sets.emplace_back(s.at("spec").get<std::string>(), s.at("name").get<std::string>());
        }
    }
    if (j.contains("formats")) {
        cfg.formats.clear();
        for (const auto& f : j.at("formats")) {
            if (!f.is_object() || !f.contains("format_uri") || !f.contains("metadata_prefix"))
                throw ConfigError("each format needs 'format_uri' and 'metadata_prefix'");
            packaging::DipFormatDescriptor desc;
            desc.format_uri = f.at("format_uri").get<std::string>();
            desc.metadata_prefix = f.at("metadata_prefix").get<std::string>();
            desc.namespace_uri =
                f.contains("namespace_uri") ? f.at("namespace_uri").get<std::string>() : desc.format_uri;
            desc.schema_url = f.contains("schema_url") ? f.at("schema_url").get<std::string>() : "";
            if (f.contains("embed_mode"))
                desc.embed_mode = embed_mode_from(f.at("embed_mode").get<std::string>());
            cfg.formats.push_back(std::move(desc));
        }
    }

    cfg.validate();
    return cfg;
}

std::string GatewayConfig::serialize() const {
    json j;
    j["instance_name"] = instance_name;
    j["listen_address"] = listen_address;
    j["listen_port"] = listen_port;
    j["public_base_url"] = public_base_url;
    j["oaipmh_base_path"] = oaipmh_base_path;
    j["openurl_base_path"] = openurl_base_path;
    j["repository_name"] = repository_name;
    j["admin_email"] = admin_email;
    j["page_size"] = page_size;
    j["token_ttl_seconds"] = token_ttl_seconds;
    j["token_secret"] = token_secret;
    j["store_dir"] = store_dir;
    j["version_key_mode"] = std::string(openurl::to_string(version_key_mode));
    j["version_scoped_tiebreak"] = version_scoped_tiebreak;
    j["auto_select"] = std::string(auto_select_name(auto_select));
    j["sets"] = json::array();
    for (const auto& [spec, name] : sets) j["sets"].push_back({{"spec", spec}, {"name", name}});
    j["formats"] = json::array();
    for (const auto& f : formats)
        j["formats"].push_back({{"format_uri", f.format_uri},
                                {"metadata_prefix", f.metadata_prefix},
                                {"namespace_uri", f.namespace_uri},
                                {"schema_url", f.schema_url},
                                {"embed_mode", std::string(embed_mode_name(f.embed_mode))}});
    return j.dump(2) + "\n";
}

GatewayConfig GatewayConfig::load_file(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open configuration file " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse(ss.str());
}

}  // namespace oais::gateway
