// Operational shell: one process hosting both access interfaces over one
// archive snapshot, plus /healthz. GET endpoints are side-effect-free; the
// only mutation path is ingest, which takes the archive's single-writer role.
#pragma once

#include <memory>
#include <string>

#include "oais/archive.hpp"
#include "oais/config.hpp"
#include "oais/oaipmh.hpp"
#include "oais/packaging.hpp"
#include "oais/resolver.hpp"

namespace oais::gateway {

class BindError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class GatewayService {
public:
    // Opens (and locks) the store immediately; network listeners start with
    // start().
    explicit GatewayService(GatewayConfig config);
    ~GatewayService();

    GatewayService(const GatewayService&) = delete;
    GatewayService& operator=(const GatewayService&) = delete;

    void start();  // binds, then serves on a background thread
    void stop();   // graceful: stops accepting, drains in-flight requests

    int port() const;  // actual port (configurable as 0 for ephemeral)
    std::string oaipmh_url() const;
    std::string openurl_url() const;

    archive::Archive& archive();
    const GatewayConfig& config() const;
    const packaging::FormatRegistry& formats() const;
    const openurl::Resolver& resolver() const;
    const oaipmh::OaiService& oai() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace oais::gateway
