#include "oais/gateway.hpp"

#include <chrono>
#include <cstdio>
#include <optional>
#include <thread>

#include "httplib.h"
#include "oais/kev.hpp"
#include "oais/text.hpp"
#include "oais/time.hpp"

namespace oais::gateway {

namespace {

std::string_view raw_query_of(const httplib::Request& req) {
    const auto pos = req.target.find('?');
    return pos == std::string::npos ? std::string_view{}
                                    : std::string_view(req.target).substr(pos + 1);
}

// first value of a key in a raw query string, for the request log only
std::string query_param(std::string_view raw, std::string_view key) {
    for (const auto& part : text::split(raw, '&')) {
        const auto eq = part.find('=');
        if (eq == std::string::npos) continue;
        if (std::string_view(part).substr(0, eq) != key) continue;
        return text::percent_decode(std::string_view(part).substr(eq + 1)).value_or("");
    }
    return "";
}

void log_request(const char* kind, const std::string& path, const std::string& detail, int status,
                 std::chrono::steady_clock::time_point started) {
    const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - started)
                             .count();
    std::fprintf(stderr, "%s %s path=%s %s status=%d duration_ms=%lld\n",
                 time::format_utc(time::now_epoch_seconds()).c_str(), kind, path.c_str(),
                 detail.c_str(), status, static_cast<long long>(elapsed));
}

}  // namespace

struct GatewayService::Impl {
    explicit Impl(GatewayConfig cfg)
        : config(std::move(cfg)), archive(config.store_dir, config.instance_name) {
        for (const auto& f : config.formats) registry.register_format(f);

        openurl::ResolverConfig rcfg;
        rcfg.mode = config.version_key_mode;
        rcfg.scoped_tiebreak = config.version_scoped_tiebreak;
        rcfg.auto_select = config.auto_select;
        resolver.emplace(archive, registry, rcfg);

        // ByReference DIP components point at the Level-2 identity service
        registry.set_reference_url_builder(
            [this](const archive::Aip& aip, const std::string& fragment_id) {
                openurl::ContextObject co;
                co.referent.descriptors.push_back(openurl::Descriptor::identifier(aip.ci_id.value));
                auto key = resolver->referent_key(aip);
                co.referent.descriptors.push_back(openurl::Descriptor::by_value(
                    std::string(openurl::kPathwaysFormat),
                    {std::move(key), {"args", fragment_id}}));
                co.service_type.descriptors.push_back(
                    openurl::Descriptor::identifier(std::string(openurl::kSvcGetDatastream)));
                return openurl_url() + "?" + openurl::serialize_kev(co);
            });
    }

    std::string base_url() const {
        if (!config.public_base_url.empty()) return config.public_base_url;
        return "http://" + config.listen_address + ":" + std::to_string(actual_port);
    }
    std::string oaipmh_url() const { return base_url() + config.oaipmh_base_path; }
    std::string openurl_url() const { return base_url() + config.openurl_base_path; }

    void start() {
        if (running) return;
        // SO_REUSEADDR only: a second gateway on the same port must fail, not
        // silently share the listener via SO_REUSEPORT
        server.set_socket_options([](socket_t sock) {
            int yes = 1;
            ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes),
                         sizeof(yes));
        });
        if (config.listen_port == 0) {
            actual_port = server.bind_to_any_port(config.listen_address);
            if (actual_port <= 0) throw BindError("cannot bind to an ephemeral port");
        } else {
            if (!server.bind_to_port(config.listen_address, config.listen_port))
                throw BindError("cannot bind " + config.listen_address + ":" +
                                std::to_string(config.listen_port));
            actual_port = config.listen_port;
        }

        oaipmh::OaiConfig ocfg;
        ocfg.repository_name = config.repository_name;
        ocfg.base_url = oaipmh_url();
        ocfg.admin_email = config.admin_email;
        ocfg.page_size = config.page_size;
        ocfg.token_ttl_seconds = config.token_ttl_seconds;
        ocfg.token_secret = config.token_secret;
        ocfg.sets = config.sets;
        oai.emplace(archive, registry, ocfg);

        auto handle_oaipmh = [this](const httplib::Request& req, httplib::Response& res) {
            const auto started = std::chrono::steady_clock::now();
            std::string raw(raw_query_of(req));
            if (req.method == "POST" &&
                req.get_header_value("Content-Type").rfind("application/x-www-form-urlencoded", 0) == 0)
                raw = req.body;
            res.set_content(oai->handle_query(raw, time::now_epoch_seconds()),
                            std::string(oaipmh::kContentType));
            log_request("oaipmh", req.path, "verb=" + query_param(raw, "verb"), res.status, started);
        };
        server.Get(config.oaipmh_base_path, handle_oaipmh);
        server.Post(config.oaipmh_base_path, handle_oaipmh);

        server.Get(config.openurl_base_path, [this](const httplib::Request& req, httplib::Response& res) {
            const auto started = std::chrono::steady_clock::now();
            const auto raw = raw_query_of(req);
            auto reply = resolver->handle_query(raw);
            res.status = reply.status;
            res.set_content(std::move(reply.body), reply.content_type);
            log_request("openurl", req.path, "svc=" + query_param(raw, "svc_id"), res.status, started);
        });

        server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
            res.set_content("ok\n", "text/plain");
        });

        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
        running = true;
    }

    void stop() {
        if (!running) return;
        server.stop();
        if (thread.joinable()) thread.join();
        running = false;
    }

    GatewayConfig config;
    archive::Archive archive;
    packaging::FormatRegistry registry;
    std::optional<openurl::Resolver> resolver;
    std::optional<oaipmh::OaiService> oai;
    httplib::Server server;
    std::thread thread;
    int actual_port = 0;
    bool running = false;
};

GatewayService::GatewayService(GatewayConfig config) {
    config.validate();
    impl_ = std::make_unique<Impl>(std::move(config));
}

GatewayService::~GatewayService() {
    if (impl_) impl_->stop();
}

void GatewayService::start() { impl_->start(); }
void GatewayService::stop() { impl_->stop(); }

int GatewayService::port() const { return impl_->actual_port; }
std::string GatewayService::oaipmh_url() const { return impl_->oaipmh_url(); }
std::string GatewayService::openurl_url() const { return impl_->openurl_url(); }

archive::Archive& GatewayService::archive() { return impl_->archive; }
const GatewayConfig& GatewayService::config() const { return impl_->config; }
const packaging::FormatRegistry& GatewayService::formats() const { return impl_->registry; }
const openurl::Resolver& GatewayService::resolver() const { return *impl_->resolver; }
const oaipmh::OaiService& GatewayService::oai() const { return *impl_->oai; }

}  // namespace oais::gateway
