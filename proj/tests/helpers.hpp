// Shared test fixtures: scratch directories and random package generators.
#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "oais/archive.hpp"

namespace testutil {

namespace fs = std::filesystem;

struct TempDir {
    fs::path path;

    TempDir() {
        static std::mt19937_64 rng(std::random_device{}());
        path = fs::temp_directory_path() /
               ("oais-test-" + std::to_string(rng()) + "-" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    fs::path operator/(const std::string& sub) const { return path / sub; }
};

inline std::string random_bytes(std::mt19937& rng, std::size_t max_len = 64) {
    std::string out(rng() % max_len, '\0');
    for (auto& c : out) c = static_cast<char>(rng() & 0xFF);
    return out;
}

inline oais::archive::Sip make_sip(const std::string& ci, std::mt19937& rng,
                                   std::size_t datastreams = 2) {
    oais::archive::Sip sip;
    sip.ci_id.value = ci;
    const char* mimes[] = {"application/pdf", "image/jpeg", "text/plain", "application/xml"};
    for (std::size_t i = 0; i < datastreams; ++i) {
        oais::archive::Datastream ds;
        ds.fragment_id = "ds" + std::to_string(i + 1);
        ds.media_type = mimes[rng() % 4];
        ds.content = random_bytes(rng);
        sip.datastreams.push_back(std::move(ds));
    }
    return sip;
}

}  // namespace testutil
