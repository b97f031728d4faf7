#include <algorithm>
#include <functional>
#include <map>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "oais/archive.hpp"
#include "oais/time.hpp"

using namespace oais;
using namespace oais::archive;
using testutil::TempDir;

namespace {

constexpr const char* kIsbn = "urn:isbn:90-70002-04-3";

Sip pdf_sip(const std::string& ci, const std::string& body = "pdf-bytes") {
    Sip sip;
    sip.ci_id.value = ci;
    sip.datastreams.push_back(Datastream{"ds1", "application/pdf", body});
    return sip;
}

ArchiveErrc errc_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const ArchiveError& e) {
        return e.code();
    }
    FAIL("expected an ArchiveError");
    return ArchiveErrc::StoreCorrupt;
}

}  // namespace

TEST_CASE("original plus version share a ci but never an aip id") {
    TempDir dir;
    Archive store(dir / "store");

    const auto original = store.ingest(pdf_sip(kIsbn, "first edition"), 1000);
    CHECK(original.ci_id.value == kIsbn);
    CHECK(original.provenance.change_kind == ChangeKind::Original);
    CHECK_FALSE(original.provenance.source_aip.has_value());

    Sip version = pdf_sip(kIsbn, "migrated bytes");
    version.change_kind = ChangeKind::Version;
    version.source_aip = original.aip_id;
    version.note = "format migration";
    const auto second = store.ingest(version, 2000);

    CHECK(second.aip_id != original.aip_id);
    CHECK(second.ci_id == original.ci_id);
    CHECK(second.provenance.source_aip == original.aip_id);

    // both remain retrievable, byte-identical
    CHECK(store.get_aip(original.aip_id).datastreams[0].content == "first edition");
    CHECK(store.get_aip(second.aip_id).datastreams[0].content == "migrated bytes");

    const auto versions = store.aips_for_ci(CiId{kIsbn});
    REQUIRE(versions.size() == 2);
    CHECK(versions[0].aip_id == original.aip_id);
    CHECK(versions[1].aip_id == second.aip_id);
    CHECK(store.latest_for_ci(CiId{kIsbn}).aip_id == second.aip_id);
}

TEST_CASE("ingest validation errors") {
    TempDir dir;
    Archive store(dir / "store");
    std::mt19937 rng(1);

    Sip empty;
    empty.ci_id.value = kIsbn;
    CHECK(errc_of([&] { store.ingest(empty, 1); }) == ArchiveErrc::EmptyPackage);

    Sip dup = pdf_sip(kIsbn);
    dup.datastreams.push_back(Datastream{"ds1", "text/plain", "x"});
    CHECK(errc_of([&] { store.ingest(dup, 1); }) == ArchiveErrc::DuplicateFragmentId);

    Sip version = pdf_sip(kIsbn);
    version.change_kind = ChangeKind::Version;
    version.source_aip = AipId{"info:repo/void/99999999"};
    version.note = "n";
    CHECK(errc_of([&] { store.ingest(version, 1); }) == ArchiveErrc::UnknownSourceAip);

    const auto a = store.ingest(pdf_sip("urn:other:ci"), 1);
    Sip mismatch = pdf_sip(kIsbn);
    mismatch.change_kind = ChangeKind::Version;
    mismatch.source_aip = a.aip_id;
    mismatch.note = "n";
    CHECK(errc_of([&] { store.ingest(mismatch, 1); }) == ArchiveErrc::CiMismatch);

    Sip bad_uri = pdf_sip("not a uri");
    CHECK(errc_of([&] { store.ingest(bad_uri, 1); }) == ArchiveErrc::InvalidPackage);

    Sip bad_frag = pdf_sip(kIsbn);
    bad_frag.datastreams[0].fragment_id = "1bad";
    CHECK(errc_of([&] { store.ingest(bad_frag, 1); }) == ArchiveErrc::InvalidPackage);

    Sip bad_mime = pdf_sip(kIsbn);
    bad_mime.datastreams[0].media_type = "nope";
    CHECK(errc_of([&] { store.ingest(bad_mime, 1); }) == ArchiveErrc::InvalidPackage);

    Sip noteless = pdf_sip(kIsbn);
    noteless.change_kind = ChangeKind::Edition;
    noteless.source_aip = a.aip_id;
    CHECK(errc_of([&] { store.ingest(noteless, 1); }) == ArchiveErrc::InvalidPackage);

    Sip original_with_source = pdf_sip(kIsbn);
    original_with_source.source_aip = a.aip_id;
    CHECK(errc_of([&] { store.ingest(original_with_source, 1); }) == ArchiveErrc::InvalidPackage);

    Sip bad_set = pdf_sip(kIsbn);
    bad_set.sets = {"has space"};
    CHECK(errc_of([&] { store.ingest(bad_set, 1); }) == ArchiveErrc::InvalidPackage);
}

TEST_CASE("get_aip round trip and unknown id") {
    TempDir dir;
    Archive store(dir / "store");
    std::mt19937 rng(2);
    const auto sip = testutil::make_sip(kIsbn, rng, 3);
    const auto aip = store.ingest(sip, 1234);
    const auto back = store.get_aip(aip.aip_id);
    CHECK(back == aip);
    CHECK(back.datastreams.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) CHECK(back.datastreams[i].content == sip.datastreams[i].content);
    CHECK(errc_of([&] { store.get_aip(AipId{"info:repo/demo/00999999"}); }) == ArchiveErrc::UnknownAip);
}

TEST_CASE("list order matches a sort-the-table oracle") {
    TempDir dir;
    Archive store(dir / "store");
    std::mt19937 rng(3);

    // 5 versions with strictly increasing timestamps arrive in ingest order
    std::optional<AipId> prev;
    for (int i = 0; i < 5; ++i) {
        Sip sip = pdf_sip(kIsbn, "v" + std::to_string(i));
        if (prev) {
            sip.change_kind = ChangeKind::Version;
            sip.source_aip = prev;
            sip.note = "step";
        }
        prev = store.ingest(sip, 100 + i).aip_id;
    }
    const auto versions = store.aips_for_ci(CiId{kIsbn});
    REQUIRE(versions.size() == 5);
    for (int i = 0; i < 5; ++i) CHECK(versions[i].datastreams[0].content == "v" + std::to_string(i));

    // randomized table with colliding created instants, oracle = sorted scan
    struct Row {
        std::string ci;
        std::string aip;
        std::int64_t created;
    };
    std::vector<Row> table;
    for (int i = 0; i < 60; ++i) {
        const std::string ci = "urn:x-test:ci" + std::to_string(rng() % 7);
        const auto created = static_cast<std::int64_t>(rng() % 5);  // force collisions
        const auto aip = store.ingest(testutil::make_sip(ci, rng, 1), created);
        table.push_back({ci, aip.aip_id.value, created});
    }
    for (int c = 0; c < 7; ++c) {
        const std::string ci = "urn:x-test:ci" + std::to_string(c);
        std::vector<Row> expect;
        for (const auto& r : table)
            if (r.ci == ci) expect.push_back(r);
        std::sort(expect.begin(), expect.end(), [](const Row& a, const Row& b) {
            if (a.created != b.created) return a.created < b.created;
            return a.aip < b.aip;
        });
        const auto got = store.aips_for_ci(CiId{ci});
        REQUIRE(got.size() == expect.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
            CHECK(got[i].aip_id.value == expect[i].aip);
            CHECK(got[i].created == expect[i].created);
        }
        if (!got.empty()) {
            // latest = last element of the ordered list
            CHECK(store.latest_for_ci(CiId{ci}).aip_id == got.back().aip_id);
        }
    }
    CHECK(store.aips_for_ci(CiId{"urn:x-test:absent"}).empty());
}

TEST_CASE("latest_for_ci agrees with a brute-force oracle under until cutoffs") {
    TempDir dir;
    Archive store(dir / "store");
    std::mt19937 rng(4);

    struct Row {
        std::string ci;
        AipId aip;
        std::int64_t created;
    };
    std::vector<Row> table;
    for (int i = 0; i < 50; ++i) {
        const std::string ci = "urn:x-test:ci" + std::to_string(rng() % 10);
        const auto created = static_cast<std::int64_t>(rng() % 1000);
        const auto aip = store.ingest(testutil::make_sip(ci, rng, 1), created);
        table.push_back({ci, aip.aip_id, created});
    }
    for (int q = 0; q < 200; ++q) {
        const std::string ci = "urn:x-test:ci" + std::to_string(rng() % 10);
        std::optional<std::int64_t> until;
        if (rng() % 3) until = static_cast<std::int64_t>(rng() % 1100);
        const Row* best = nullptr;
        for (const auto& r : table) {
            if (r.ci != ci) continue;
            if (until && r.created > *until) continue;
            if (!best || r.created > best->created ||
                (r.created == best->created && r.aip.value > best->aip.value))
                best = &r;
        }
        if (!best) {
            CHECK(errc_of([&] { store.latest_for_ci(CiId{ci}, until); }) == ArchiveErrc::NoSuchContent);
        } else {
            CHECK(store.latest_for_ci(CiId{ci}, until).aip_id == best->aip);
        }
    }
}

TEST_CASE("append-only store: earlier packages survive later ingests byte-identically") {
    TempDir dir;
    Archive store(dir / "store");
    std::mt19937 rng(5);
    std::vector<Aip> issued;
    for (int i = 0; i < 30; ++i) {
        issued.push_back(store.ingest(testutil::make_sip("urn:x:ci" + std::to_string(i % 4), rng), i));
        for (const auto& old : issued) CHECK(store.get_aip(old.aip_id) == old);
    }
    // identifier bifurcation: aip ids are pairwise distinct
    for (std::size_t i = 0; i < issued.size(); ++i)
        for (std::size_t j = i + 1; j < issued.size(); ++j)
            CHECK(issued[i].aip_id != issued[j].aip_id);
}

TEST_CASE("provenance chains terminate at an original with the same ci") {
    TempDir dir;
    Archive store(dir / "store");
    std::mt19937 rng(6);
    auto head = store.ingest(testutil::make_sip(kIsbn, rng), 0);
    for (int i = 1; i <= 6; ++i) {
        Sip sip = testutil::make_sip(kIsbn, rng);
        sip.change_kind = i % 2 ? ChangeKind::Version : ChangeKind::Edition;
        sip.source_aip = head.aip_id;
        sip.note = "hop " + std::to_string(i);
        head = store.ingest(sip, i);
    }
    int hops = 0;
    Aip cursor = head;
    while (cursor.provenance.source_aip) {
        REQUIRE(hops++ < 100);
        const auto parent = store.get_aip(*cursor.provenance.source_aip);
        CHECK(parent.ci_id == cursor.ci_id);
        cursor = parent;
    }
    CHECK(cursor.provenance.change_kind == ChangeKind::Original);
    CHECK(hops == 6);
}

TEST_CASE("store reopen replays the index and keeps minting unique ids") {
    TempDir dir;
    std::mt19937 rng(7);
    std::vector<Aip> issued;
    {
        Archive store(dir / "store");
        for (int i = 0; i < 10; ++i)
            issued.push_back(
                store.ingest(testutil::make_sip("urn:x:ci" + std::to_string(i % 3), rng), 50 - i));
    }
    Archive reopened(dir / "store");
    CHECK(reopened.size() == issued.size());
    for (const auto& aip : issued) CHECK(reopened.get_aip(aip.aip_id) == aip);
    const auto fresh = reopened.ingest(testutil::make_sip("urn:x:ci0", rng), 99);
    for (const auto& aip : issued) CHECK(fresh.aip_id != aip.aip_id);
}

TEST_CASE("created instants collide without breaking resolution") {
    TempDir dir;
    Archive store(dir / "store");
    const auto a = store.ingest(pdf_sip(kIsbn, "a"), 500);
    const auto b = store.ingest(pdf_sip(kIsbn, "b"), 500);
    CHECK(a.created == b.created);
    // deterministic: lexicographically larger aip_id wins the tie
    const auto expected = a.aip_id.value > b.aip_id.value ? a.aip_id : b.aip_id;
    CHECK(store.latest_for_ci(CiId{kIsbn}).aip_id == expected);
}

TEST_CASE("the store directory is single-writer locked") {
    TempDir dir;
    Archive store(dir / "store");
    CHECK_THROWS_AS(Archive(dir / "store"), ArchiveError);
    Archive unlocked(dir / "store", "repo", false);  // explicit read-only share for tooling
    CHECK(unlocked.size() == 0);
}

TEST_CASE("aip document serialization round trips") {
    TempDir dir;
    Archive store(dir / "store");
    std::mt19937 rng(8);
    Sip sip = testutil::make_sip(kIsbn, rng, 2);
    sip.sets = {"journals", "theses:2026"};
    const auto aip = store.ingest(sip, 1754758861);
    auto parsed = parse_aip_document(write_aip_document(aip));
    parsed.sets = aip.sets;  // sets live in the index, not the document
    CHECK(parsed == aip);
    CHECK(write_aip_document(aip) == write_aip_document(store.get_aip(aip.aip_id)));
}
