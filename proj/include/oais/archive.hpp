// Archival store: immutable AIPs, many AIPs per Content Information
// Identifier, version resolution by (created, aip_id).
#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace oais::archive {

using Bytes = std::string;

// Identifier of the content itself; shared by all versions of an asset.
struct CiId {
    std::string value;
    auto operator<=>(const CiId&) const = default;
};

// Repository-internal package identifier; unique per stored AIP, never reused.
struct AipId {
    std::string value;
    auto operator<=>(const AipId&) const = default;
};

struct Datastream {
    std::string fragment_id;  // XML NCName, unique within its AIP
    std::string media_type;
    Bytes content;

    std::size_t length() const { return content.size(); }
    bool operator==(const Datastream&) const = default;
};

enum class ChangeKind { Original, Version, Edition };

std::string_view to_string(ChangeKind k);
std::optional<ChangeKind> change_kind_from_string(std::string_view s);

struct Provenance {
    ChangeKind change_kind = ChangeKind::Original;
    std::optional<AipId> source_aip;  // absent iff Original
    std::string note;                 // required unless Original

    bool operator==(const Provenance&) const = default;
};

struct Aip {
    AipId aip_id;
    CiId ci_id;
    std::int64_t created = 0;  // epoch seconds
    std::vector<Datastream> datastreams;
    Provenance provenance;
    std::vector<std::string> sets;

    const Datastream* find_datastream(std::string_view fragment_id) const;
    bool operator==(const Aip&) const = default;
};

// Ingest-time input shape.
struct Sip {
    CiId ci_id;
    std::vector<Datastream> datastreams;
    ChangeKind change_kind = ChangeKind::Original;
    std::optional<AipId> source_aip;
    std::string note;
    std::vector<std::string> sets;
};

// Header-only view used by harvest-window selection.
struct AipInfo {
    AipId aip_id;
    CiId ci_id;
    std::int64_t created = 0;
    std::vector<std::string> sets;
};

enum class ArchiveErrc {
    UnknownAip,
    UnknownSourceAip,
    CiMismatch,
    DuplicateFragmentId,
    EmptyPackage,
    NoSuchContent,
    InvalidPackage,
    StoreCorrupt,
    StoreLocked,
};

std::string_view to_string(ArchiveErrc c);

class ArchiveError : public std::runtime_error {
public:
    ArchiveError(ArchiveErrc code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}
    ArchiveErrc code() const { return code_; }

private:
    ArchiveErrc code_;
};

// Single-writer, multi-reader store. Ingests are serialized; reads run
// concurrently and see every ingest completed before they began. Values
// returned to callers are detached copies.
//
// Layout under store_dir:
//   aips/{sha256(aip_id)}.xml   one document per AIP
//   index.tsv                   append-only (aip_id, ci_id, created, sets, file);
//                               replayed on open, authoritative for ordering
//   .lock                       held while this process owns the directory
class Archive {
public:
    explicit Archive(std::filesystem::path store_dir, std::string instance_name = "repo",
                     bool take_lock = true);
    ~Archive();

    Archive(const Archive&) = delete;
    Archive& operator=(const Archive&) = delete;

    Aip ingest(const Sip& sip, std::int64_t now);

    Aip get_aip(const AipId& id) const;

    // Ordered by (created asc, aip_id asc); empty when the CI is unknown.
    std::vector<Aip> aips_for_ci(const CiId& ci) const;

    // Maximal (created, aip_id) among AIPs of the CI with created <= until.
    // Throws NoSuchContent when nothing qualifies.
    Aip latest_for_ci(const CiId& ci, std::optional<std::int64_t> until = std::nullopt) const;

    std::vector<AipInfo> list_infos() const;  // index order
    std::optional<std::int64_t> earliest_created() const;
    std::size_t size() const;

    const std::filesystem::path& store_dir() const { return store_dir_; }
    const std::string& instance_name() const { return instance_name_; }

private:
    void replay_index();
    std::string mint_aip_id_locked();
    void persist_locked(const Aip& aip);
    static void validate_sip(const Sip& sip);

    std::filesystem::path store_dir_;
    std::string instance_name_;
    bool locked_ = false;

    mutable std::shared_mutex mutex_;
    std::vector<Aip> aips_;  // index order
    std::unordered_map<std::string, std::size_t> by_aip_id_;
    std::uint64_t next_serial_ = 1;
};

// Serialization of one AIP document (exposed for store tooling and tests).
std::string write_aip_document(const Aip& aip);
Aip parse_aip_document(std::string_view xml_bytes);  // sets are not part of the document

}  // namespace oais::archive
