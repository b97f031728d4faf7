#include <random>

#include "doctest.h"
#include "oais/base64.hpp"
#include "oais/hash.hpp"
#include "oais/text.hpp"
#include "oais/time.hpp"

using namespace oais;

TEST_CASE("base64 known vectors") {
    CHECK(base64::encode("") == "");
    CHECK(base64::encode("f") == "Zg==");
    CHECK(base64::encode("fo") == "Zm8=");
    CHECK(base64::encode("foo") == "Zm9v");
    CHECK(base64::encode("foobar") == "Zm9vYmFy");
    CHECK(base64::decode("Zm9vYmFy") == std::string("foobar"));
    CHECK(base64::decode("Zg==") == std::string("f"));
    CHECK_FALSE(base64::decode("Zg=").has_value());
    CHECK_FALSE(base64::decode("Z!g=").has_value());
    CHECK_FALSE(base64::decode("A").has_value());
    // whitespace inside a re-flowed document still decodes
    CHECK(base64::decode("Zm9v\nYmFy") == std::string("foobar"));
}

TEST_CASE("base64 round trip over random binary") {
    std::mt19937 rng(42);
    for (int i = 0; i < 500; ++i) {
        std::string data(static_cast<std::size_t>(rng() % 200), '\0');
        for (auto& c : data) c = static_cast<char>(rng() & 0xFF);
        CHECK(base64::decode(base64::encode(data)) == data);
        CHECK(base64::decode_url(base64::encode_url(data)) == data);
    }
}

TEST_CASE("sha256 and hmac known vectors") {
    CHECK(hash::sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(hash::sha256_hex("abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    // RFC 4231 test case 2
    CHECK(hash::hmac_sha256_hex("Jefe", "what do ya want for nothing?") ==
          "5bdcc146bf60754e6a042426089575c75a003f089d2739839dec58b964ec3843");
}

TEST_CASE("utc format and parse") {
    CHECK(time::format_utc(0) == "1970-01-01T00:00:00Z");
    CHECK(time::format_utc(1125576000) == "2005-09-01T12:00:00Z");
    CHECK(time::format_utc(946684799) == "1999-12-31T23:59:59Z");
    CHECK(time::parse_utc("2005-09-01T12:00:00Z") == 1125576000);
    CHECK(time::parse_utc("2000-02-29T00:00:00Z") == 951782400);
    CHECK(time::parse_utc("2024-02-29T23:59:59Z") == 1709251199);
    CHECK_FALSE(time::parse_utc("2023-02-29T00:00:00Z").has_value());  // not a leap year
    CHECK_FALSE(time::parse_utc("2005-13-01T00:00:00Z").has_value());
    CHECK_FALSE(time::parse_utc("2005-09-01T24:00:00Z").has_value());
    CHECK_FALSE(time::parse_utc("2005-09-01 12:00:00Z").has_value());
    CHECK_FALSE(time::parse_utc("2005-09-01T12:00:00").has_value());
}

TEST_CASE("utc round trip over random instants") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 2000; ++i) {
        const auto t = static_cast<std::int64_t>(rng() % 4102444800LL);  // through 2099
        CHECK(time::parse_utc(time::format_utc(t)) == t);
    }
}

TEST_CASE("day-granularity datestamps expand to window edges") {
    CHECK(time::parse_datestamp("2005-09-01", false) == 1125576000 - 12 * 3600);
    CHECK(time::parse_datestamp("2005-09-01", true) == 1125576000 - 12 * 3600 + 86399);
    CHECK(time::parse_datestamp("2005-09-01T12:00:00Z", true) == 1125576000);
    CHECK_FALSE(time::parse_datestamp("2005-9-1", false).has_value());
    CHECK(time::is_day_granularity("2005-09-01"));
    CHECK_FALSE(time::is_day_granularity("2005-09-01T12:00:00Z"));
}

TEST_CASE("identifier syntax checks") {
    CHECK(text::is_absolute_uri("urn:isbn:90-70002-04-3"));
    CHECK(text::is_absolute_uri("info:repo/demo/00000001"));
    CHECK(text::is_absolute_uri("http://example.org/x"));
    CHECK_FALSE(text::is_absolute_uri(""));
    CHECK_FALSE(text::is_absolute_uri("no-scheme"));
    CHECK_FALSE(text::is_absolute_uri(":empty-scheme"));
    CHECK_FALSE(text::is_absolute_uri("9scheme:x"));
    CHECK_FALSE(text::is_absolute_uri("urn:with space"));
    CHECK_FALSE(text::is_absolute_uri("urn:"));

    CHECK(text::is_ncname("ds1"));
    CHECK(text::is_ncname("_x-y.z"));
    CHECK_FALSE(text::is_ncname("1ds"));
    CHECK_FALSE(text::is_ncname("a:b"));
    CHECK_FALSE(text::is_ncname(""));

    CHECK(text::is_media_type("application/pdf"));
    CHECK(text::is_media_type("text/plain;charset=utf-8"));
    CHECK_FALSE(text::is_media_type("noslash"));
    CHECK_FALSE(text::is_media_type("bad type/x"));
    CHECK_FALSE(text::is_media_type("a/"));

    CHECK(text::is_set_spec("journals"));
    CHECK(text::is_set_spec("a:b:c"));
    CHECK_FALSE(text::is_set_spec(":a"));
    CHECK_FALSE(text::is_set_spec("a:"));
    CHECK_FALSE(text::is_set_spec("a b"));

    CHECK(text::is_metadata_prefix("pathways_dip_xml"));
    CHECK_FALSE(text::is_metadata_prefix("has:colon"));
    CHECK_FALSE(text::is_metadata_prefix("has/slash"));
}

TEST_CASE("percent codec") {
    CHECK(text::percent_encode("abc-._~XYZ09") == "abc-._~XYZ09");
    CHECK(text::percent_encode("a b&c=d") == "a%20b%26c%3Dd");
    CHECK(text::percent_encode("info:ofi/fmt:kev:mtx:pathways") ==
          "info%3Aofi%2Ffmt%3Akev%3Amtx%3Apathways");
    CHECK(text::percent_decode("a%20b%26c%3Dd") == std::string("a b&c=d"));
    CHECK(text::percent_decode("a+b") == std::string("a b"));
    CHECK_FALSE(text::percent_decode("bad%2").has_value());
    CHECK_FALSE(text::percent_decode("bad%zz").has_value());
}

TEST_CASE("percent codec round trip including reserved characters") {
    std::mt19937 rng(99);
    const std::string alphabet = "abc &=%+?/:#[]@!$'()*,;\xC3\xA9\x01\x7F";
    for (int i = 0; i < 1000; ++i) {
        std::string s(static_cast<std::size_t>(rng() % 30), '\0');
        for (auto& c : s) c = alphabet[rng() % alphabet.size()];
        CHECK(text::percent_decode(text::percent_encode(s)) == s);
    }
}
