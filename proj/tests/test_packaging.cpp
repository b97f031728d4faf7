#include <functional>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "oais/archive.hpp"
#include "oais/packaging.hpp"
#include "oais/time.hpp"
#include "oais/xml.hpp"

using namespace oais;
using namespace oais::packaging;
using testutil::TempDir;

namespace {

constexpr const char* kIsbn = "urn:isbn:90-70002-04-3";

DipFormatDescriptor rdf_flavor() {
    DipFormatDescriptor d;
    d.format_uri = "info:pathways/dip.rdf";
    d.metadata_prefix = "pathways_dip_rdf";
    d.namespace_uri = "info:pathways/dip.rdf";
    d.schema_url = "http://localhost/schemas/pathways-dip-rdf.xsd";
    return d;
}

FormatRegistry standard_registry() {
    FormatRegistry registry;
    registry.register_format(native_format());
    registry.register_format(rdf_flavor());
    return registry;
}

archive::Aip sample_aip(std::mt19937& rng, const std::string& ci = kIsbn) {
    archive::Aip aip;
    aip.aip_id.value = "info:repo/demo/" + std::to_string(10000000 + rng() % 1000000);
    aip.ci_id.value = ci;
    aip.created = static_cast<std::int64_t>(rng() % 2000000000);
    const std::size_t n = 1 + rng() % 4;
    for (std::size_t i = 0; i < n; ++i) {
        archive::Datastream ds;
        ds.fragment_id = "ds" + std::to_string(i + 1);
        ds.media_type = i % 2 ? "image/jpeg" : "application/pdf";
        ds.content = testutil::random_bytes(rng, 120);
        aip.datastreams.push_back(std::move(ds));
    }
    return aip;
}

PackagingErrc errc_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const PackagingError& e) {
        return e.code();
    }
    FAIL("expected a PackagingError");
    return PackagingErrc::MalformedXml;
}

}  // namespace

TEST_CASE("registry rejects duplicates and malformed descriptors") {
    FormatRegistry registry;
    registry.register_format(rdf_flavor());
    CHECK(registry.find("pathways_dip_rdf") != nullptr);
    CHECK(registry.find("info:pathways/dip.rdf") != nullptr);

    CHECK(errc_of([&] { registry.register_format(rdf_flavor()); }) == PackagingErrc::DuplicateFormat);

    auto same_prefix = native_format();
    same_prefix.metadata_prefix = "pathways_dip_rdf";
    CHECK(errc_of([&] { registry.register_format(same_prefix); }) == PackagingErrc::DuplicateFormat);

    auto bad_prefix = native_format();
    bad_prefix.metadata_prefix = "has:colon";
    CHECK(errc_of([&] { registry.register_format(bad_prefix); }) == PackagingErrc::InvalidDescriptor);

    auto bad_uri = native_format();
    bad_uri.format_uri = "not a uri";
    CHECK(errc_of([&] { registry.register_format(bad_uri); }) == PackagingErrc::InvalidDescriptor);
}

TEST_CASE("the svc-qualified alias from the protocol examples resolves") {
    const auto registry = standard_registry();
    const auto* direct = registry.find("info:pathways/dip.rdf");
    REQUIRE(direct);
    CHECK(registry.find("info:pathways/svc/dip.rdf") == direct);
    CHECK(registry.find("info:pathways/svc/dip.xml") == registry.find("pathways_dip_xml"));
    CHECK(registry.find("info:pathways/svc/dip.nope") == nullptr);
    CHECK(registry.find("unknown") == nullptr);
}

TEST_CASE("derive_dip is deterministic and carries the package identity") {
    const auto registry = standard_registry();
    std::mt19937 rng(11);
    auto aip = sample_aip(rng);
    aip.created = 1125576000;

    const auto doc = derive_dip(aip, "info:pathways/dip.xml", registry);
    CHECK(doc.format_uri == "info:pathways/dip.xml");
    CHECK(doc.ci_id == aip.ci_id);
    CHECK(doc.source_aip == aip.aip_id);
    CHECK(doc.xml == derive_dip(aip, "info:pathways/dip.xml", registry).xml);

    const auto root = xml::parse(doc.xml);
    CHECK(root.name == "dip");
    CHECK(*root.find_attr("xmlns") == "info:pathways/dip.xml");
    CHECK(*root.find_attr("ciId") == aip.ci_id.value);
    CHECK(*root.find_attr("aipId") == aip.aip_id.value);
    CHECK(*root.find_attr("created") == "2005-09-01T12:00:00Z");
    CHECK(root.children_named("component").size() == aip.datastreams.size());

    // every datastream appears exactly once, addressable by its fragment id
    for (const auto& ds : aip.datastreams) {
        int hits = 0;
        for (const auto* c : root.children_named("component"))
            if (*c->find_attr("id") == ds.fragment_id) {
                ++hits;
                CHECK(*c->find_attr("mimeType") == ds.media_type);
            }
        CHECK(hits == 1);
    }

    CHECK(errc_of([&] { derive_dip(aip, "info:pathways/dip.unregistered", registry); }) ==
          PackagingErrc::UnknownFormat);
}

TEST_CASE("single-datastream dip decodes back to the stored bytes") {
    const auto registry = standard_registry();
    archive::Aip aip;
    aip.aip_id.value = "info:repo/demo/00000001";
    aip.ci_id.value = kIsbn;
    aip.created = 42;
    aip.datastreams.push_back(archive::Datastream{"ds1", "application/pdf", "binary\x01\x02 payload"});

    const auto doc = derive_dip(aip, "pathways_dip_xml", registry);
    const auto root = xml::parse(doc.xml);
    const auto parsed = parse_dip(doc.xml, registry);
    REQUIRE(parsed.datastreams.size() == 1);
    CHECK(parsed.datastreams[0].content == "binary\x01\x02 payload");
    CHECK(parsed.datastreams[0].media_type == "application/pdf");
    CHECK(parsed.ci_id == aip.ci_id);
    CHECK(parsed.source_aip == aip.aip_id);
    CHECK(parsed.created == 42);
    // exactly one component whose payload decodes to the stored bytes
    CHECK(root.children_named("component").size() == 1);
}

TEST_CASE("parse_dip inverts derive_dip over 100 random packages") {
    const auto registry = standard_registry();
    std::mt19937 rng(12);
    for (int i = 0; i < 100; ++i) {
        const auto aip = sample_aip(rng, "urn:x-test:ci" + std::to_string(i));
        const auto format = i % 2 ? "info:pathways/dip.rdf" : "info:pathways/dip.xml";
        const auto parsed = parse_dip(derive_dip(aip, format, registry).xml, registry);
        CHECK(parsed.ci_id == aip.ci_id);
        CHECK(parsed.source_aip == aip.aip_id);
        CHECK(parsed.created == aip.created);
        REQUIRE(parsed.datastreams.size() == aip.datastreams.size());
        for (std::size_t d = 0; d < aip.datastreams.size(); ++d) {
            CHECK(parsed.datastreams[d].fragment_id == aip.datastreams[d].fragment_id);
            CHECK(parsed.datastreams[d].media_type == aip.datastreams[d].media_type);
            CHECK(parsed.datastreams[d].content == aip.datastreams[d].content);
        }
    }
}

TEST_CASE("parse_dip error paths") {
    const auto registry = standard_registry();
    std::mt19937 rng(13);
    const auto aip = sample_aip(rng);
    const auto good = derive_dip(aip, "info:pathways/dip.xml", registry).xml;

    CHECK(errc_of([&] { parse_dip(good.substr(0, good.size() / 2), registry); }) ==
          PackagingErrc::MalformedXml);
    CHECK(errc_of([&] { parse_dip("not xml at all", registry); }) == PackagingErrc::MalformedXml);

    const auto alien = std::string("<dip xmlns=\"info:alien/format\" ciId=\"urn:x:1\" ") +
                       "aipId=\"info:repo/x/1\" created=\"2005-09-01T12:00:00Z\"/>";
    CHECK(errc_of([&] { parse_dip(alien, registry); }) == PackagingErrc::UnknownFormat);

    const auto no_id = std::string("<dip xmlns=\"info:pathways/dip.xml\" ciId=\"urn:x:1\" ") +
                       "aipId=\"info:repo/x/1\" created=\"2005-09-01T12:00:00Z\">" +
                       "<component mimeType=\"text/plain\"><resource>QQ==</resource></component></dip>";
    CHECK(errc_of([&] { parse_dip(no_id, registry); }) == PackagingErrc::MissingFragmentId);

    const auto bad_b64 = std::string("<dip xmlns=\"info:pathways/dip.xml\" ciId=\"urn:x:1\" ") +
                         "aipId=\"info:repo/x/1\" created=\"2005-09-01T12:00:00Z\">" +
                         "<component id=\"ds1\" mimeType=\"text/plain\">"
                         "<resource>!!notbase64!!</resource></component></dip>";
    CHECK(errc_of([&] { parse_dip(bad_b64, registry); }) == PackagingErrc::BadBase64);
}

TEST_CASE("by-reference mode emits the dissemination url instead of bytes") {
    FormatRegistry registry;
    registry.register_format(native_format());
    DipFormatDescriptor byref;
    byref.format_uri = "info:pathways/dip.ref";
    byref.metadata_prefix = "pathways_dip_ref";
    byref.namespace_uri = "info:pathways/dip.ref";
    byref.embed_mode = EmbedMode::ByReference;
    registry.register_format(byref);

    std::mt19937 rng(14);
    const auto aip = sample_aip(rng);

    // without a URL builder the derivation fails loudly
    CHECK(errc_of([&] { derive_dip(aip, "info:pathways/dip.ref", registry); }) ==
          PackagingErrc::InvalidDescriptor);

    registry.set_reference_url_builder([](const archive::Aip& a, const std::string& frag) {
        return "http://resolver.example/openurl?rft.aip=" + a.aip_id.value + "&rft.args=" + frag;
    });
    const auto doc = derive_dip(aip, "info:pathways/dip.ref", registry);
    const auto root = xml::parse(doc.xml);
    for (const auto* component : root.children_named("component")) {
        const auto* resource = component->first_child("resource");
        REQUIRE(resource);
        CHECK(resource->text_content().empty());
        REQUIRE(resource->find_attr("ref"));
        CHECK(resource->find_attr("ref")->find(*component->find_attr("id")) != std::string::npos);
    }
    // a by-reference document carries no inline payload to recover
    CHECK(errc_of([&] { parse_dip(doc.xml, registry); }) == PackagingErrc::BadBase64);

    // inline derivation is indifferent to the builder
    const auto inline_doc = derive_dip(aip, "info:pathways/dip.xml", registry);
    CHECK(parse_dip(inline_doc.xml, registry).datastreams.size() == aip.datastreams.size());
}
