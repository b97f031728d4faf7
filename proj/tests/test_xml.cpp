#include <functional>
#include <random>

#include "doctest.h"
#include "oais/xml.hpp"

using namespace oais;

TEST_CASE("parse a small document") {
    const auto root = xml::parse(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        "<a x=\"1\" y=\"two &amp; three\">\n"
        "  <b>text</b>\n"
        "  <c/>\n"
        "</a>\n");
    CHECK(root.name == "a");
    REQUIRE(root.find_attr("x"));
    CHECK(*root.find_attr("x") == "1");
    CHECK(*root.find_attr("y") == "two & three");
    REQUIRE(root.first_child("b"));
    CHECK(root.first_child("b")->text_content() == "text");
    CHECK(root.first_child("c")->children.empty());
    CHECK(root.element_children().size() == 2);
}

TEST_CASE("entities and numeric character references") {
    const auto root = xml::parse("<t>&lt;&gt;&amp;&apos;&quot;&#65;&#x42;</t>");
    CHECK(root.text_content() == "<>&'\"AB");
    const auto utf8 = xml::parse("<t>&#233;</t>");
    CHECK(utf8.text_content() == "\xC3\xA9");
}

TEST_CASE("cdata, comments and processing instructions") {
    const auto root = xml::parse("<t><!-- note --><![CDATA[a<b&c]]><?pi data?>x</t>");
    CHECK(root.text_content() == "a<b&cx");
}

TEST_CASE("malformed documents are rejected") {
    CHECK_THROWS_AS(xml::parse(""), xml::ParseError);
    CHECK_THROWS_AS(xml::parse("<a>"), xml::ParseError);
    CHECK_THROWS_AS(xml::parse("<a></b>"), xml::ParseError);
    CHECK_THROWS_AS(xml::parse("<a><b></a></b>"), xml::ParseError);
    CHECK_THROWS_AS(xml::parse("<a>&unknown;</a>"), xml::ParseError);
    CHECK_THROWS_AS(xml::parse("<a>&#xZZ;</a>"), xml::ParseError);
    CHECK_THROWS_AS(xml::parse("<a attr=unquoted/>"), xml::ParseError);
    CHECK_THROWS_AS(xml::parse("<a x=\"1\" x=\"2\"/>"), xml::ParseError);
    CHECK_THROWS_AS(xml::parse("<a/><b/>"), xml::ParseError);
    CHECK_THROWS_AS(xml::parse("<a/>trailing"), xml::ParseError);
    CHECK_THROWS_AS(xml::parse("<!DOCTYPE a><a/>"), xml::ParseError);
    CHECK_THROWS_AS(xml::parse("<a x=\"<\"/>"), xml::ParseError);
    // truncated mid-payload
    CHECK_THROWS_AS(xml::parse("<dip><component id=\"ds1\">AAAA</compo"), xml::ParseError);
}

TEST_CASE("writer escapes markup characters") {
    xml::Element e("t");
    e.attr("a", "quote \" amp & lt < nl \n");
    e.text("body & <tag> ]]>");
    const auto bytes = xml::write_element(e);
    CHECK(bytes ==
          "<t a=\"quote &quot; amp &amp; lt &lt; nl &#10;\">body &amp; &lt;tag&gt; ]]&gt;</t>");
}

TEST_CASE("write then parse recovers the tree") {
    std::mt19937 rng(1234);
    const std::string names[] = {"alpha", "beta", "gamma", "delta"};
    const std::string texts[] = {"plain", "a&b", "<angle>", "tab\tnl\n", "quote\"'", "%20+", ""};

    std::function<xml::Element(int)> gen = [&](int depth) {
        xml::Element e(names[rng() % 4]);
        const int attrs = static_cast<int>(rng() % 3);
        for (int i = 0; i < attrs; ++i)
            e.attr(names[rng() % 4] + std::to_string(i), texts[rng() % 7]);
        const int kids = depth > 2 ? 0 : static_cast<int>(rng() % 4);
        if (kids == 0) {
            const auto& t = texts[rng() % 7];
            if (!t.empty()) e.text(t);
            return e;
        }
        for (int i = 0; i < kids; ++i) e.child(gen(depth + 1));
        return e;
    };

    for (int i = 0; i < 300; ++i) {
        xml::Element original = gen(0);
        auto parsed = xml::parse(xml::write_document(original));
        // pretty-printing inserts whitespace-only text nodes between elements
        xml::strip_whitespace_nodes(parsed);
        xml::Element normalized = original;
        xml::strip_whitespace_nodes(normalized);
        CHECK(parsed == normalized);
    }
}

TEST_CASE("text-only elements render inline and exact") {
    xml::Element e("payload");
    e.text("QUJDRA==");
    xml::Element root("wrap");
    root.child(std::move(e));
    const auto doc = xml::write_document(root);
    CHECK(doc.find("<payload>QUJDRA==</payload>") != std::string::npos);
    const auto back = xml::parse(doc);
    CHECK(back.first_child("payload")->text_content() == "QUJDRA==");
}
