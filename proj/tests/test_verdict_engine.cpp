// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <random>

#include "gep/errors.hpp"
#include "gep/verdict_engine.hpp"
#include "support.hpp"

using namespace gep;

namespace {

WebSample sample_at(const std::string& url) {
    WebSample s;
    s.id = "s";
    s.url = url;
    s.html = "<html/>";
    return s;
}

} // namespace

TEST_CASE("NoBrand verdicts are unconditionally benign") {
    geptest::StubWebSearch search;
    for (const auto& url : {"https://www.nike.com/", "https://paypa1-secure.com/x",
                            "http://10.0.0.1/login"}) {
        auto outcome = classify(sample_at(url), BrandVerdict::no_brand("blank page"), {}, search);
        CHECK(outcome.classification.value == ClassValue::Benign);
        CHECK(outcome.classification.basis == ClassBasis::NoBrandDefault);
        CHECK(outcome.domains_checked.entries.empty());
    }
    CHECK(search.calls == 0); // no query for NoBrand
}

TEST_CASE("direct domain match is benign") {
    geptest::StubWebSearch search;
    search.canned["\"Nike\""] = geptest::make_results({"nike.com", "nike.co.uk"});
    auto outcome =
        classify(sample_at("https://www.nike.com/"), BrandVerdict::named("Nike", "r"), {}, search);
    CHECK(outcome.classification.value == ClassValue::Benign);
    CHECK(outcome.classification.basis == ClassBasis::DomainMatch);
    CHECK(search.calls == 1);
}

TEST_CASE("mismatch is phishing; the query is the quoted brand name") {
    geptest::StubWebSearch search;
    search.canned["\"PayPal\""] = geptest::make_results({"paypal.com", "paypal.co.uk"});
    auto outcome = classify(sample_at("https://paypa1-secure.com/verify"),
                            BrandVerdict::named("PayPal", "r"), {}, search);
    CHECK(outcome.classification.value == ClassValue::Phishing);
    CHECK(outcome.classification.basis == ClassBasis::DomainMismatch);
    CHECK(search.calls == 1);
    // unquoted or keyword-padded queries must not be issued
    CHECK(search.canned.count("PayPal") == 0);
}

TEST_CASE("subdomains of an official domain match; lookalike subdomains do not") {
    geptest::StubWebSearch search;
    search.canned["\"Nike\""] = geptest::make_results({"nike.com"});
    auto sub = classify(sample_at("https://shop.nike.com/us"),
                        BrandVerdict::named("Nike", "r"), {}, search);
    CHECK(sub.classification.basis == ClassBasis::DomainMatch);
    auto evil = classify(sample_at("https://nike.evil.com/us"),
                         BrandVerdict::named("Nike", "r"), {}, search);
    CHECK(evil.classification.basis == ClassBasis::DomainMismatch);
}

TEST_CASE("an IP-hosted sample can never match a named brand") {
    geptest::StubWebSearch search;
    search.canned["\"Nike\""] = geptest::make_results({"nike.com"});
    auto outcome = classify(sample_at("http://203.0.113.9/login"),
                            BrandVerdict::named("Nike", "r"), {}, search);
    CHECK(outcome.classification.value == ClassValue::Phishing);
    CHECK(outcome.classification.basis == ClassBasis::DomainMismatch);
}

TEST_CASE("list size limits how many result domains are considered") {
    geptest::StubWebSearch search;
    search.canned["\"Globex Bank\""] = geptest::make_results(
        {"globex-reviews.net", "wikipedia.org", "bloomberg.com", "linkedin.com", "facebook.com",
         "crunchbase.com", "globexbank.com", "trustpilot.com", "glassdoor.com", "reuters.com"});
    auto s = sample_at("https://www.globexbank.com/retail");
    auto verdict = BrandVerdict::named("Globex Bank", "r");

    CheckerConfig ten{10, false};
    CHECK(classify(s, verdict, ten, search).classification.basis == ClassBasis::DomainMatch);
    CheckerConfig five{5, false};
    CHECK(classify(s, verdict, five, search).classification.basis == ClassBasis::DomainMismatch);
    CheckerConfig one{1, false};
    CHECK(classify(s, verdict, one, search).classification.basis == ClassBasis::DomainMismatch);
}

TEST_CASE("benign under list size 5 stays benign under list size 10") {
    std::mt19937 rng(60601);
    std::vector<std::string> pool = {"nike.com", "a.com",   "b.net",  "c.org", "d.co.uk",
                                     "e.xyz",    "f.shop",  "g.icu",  "h.top", "i.site",
                                     "nike.net", "j.online"};
    geptest::StubWebSearch search;
    auto s = sample_at("https://www.nike.com/");
    auto verdict = BrandVerdict::named("Nike", "r");
    for (int i = 0; i < 300; ++i) {
        std::vector<std::string> hosts;
        int n = rng() % 12;
        for (int k = 0; k < n; ++k) hosts.push_back(pool[rng() % pool.size()]);
        search.canned["\"Nike\""] = geptest::make_results(hosts);
        auto five = classify(s, verdict, {5, false}, search).classification;
        auto ten = classify(s, verdict, {10, false}, search).classification;
        if (five.value == ClassValue::Benign) CHECK(ten.value == ClassValue::Benign);
    }
}

TEST_CASE("redirection check rescues a redirected official page") {
    geptest::StubWebSearch search;
    search.canned["\"Nike\""] = geptest::make_results({"nike.com"});
    geptest::StubRedirects redirects;
    redirects.canned["https://nike-promo.example-redirect.net/go"] = "https://www.nike.com/sale";

    auto s = sample_at("https://nike-promo.example-redirect.net/go");
    auto verdict = BrandVerdict::named("Nike", "r");

    // default config: no redirect request, mismatch stands
    auto off = classify(s, verdict, {10, false}, search, &redirects);
    CHECK(off.classification.basis == ClassBasis::DomainMismatch);
    CHECK(redirects.calls == 0);

    // enabled: one redirect request, re-test passes
    auto on = classify(s, verdict, {10, true}, search, &redirects);
    CHECK(on.classification.basis == ClassBasis::DomainMatch);
    CHECK(redirects.calls == 1);

    // unreachable redirect target leaves the mismatch in place
    geptest::StubRedirects dead;
    auto still = classify(s, verdict, {10, true}, search, &dead);
    CHECK(still.classification.basis == ClassBasis::DomainMismatch);
    CHECK(dead.calls == 1);
}

TEST_CASE("classify issues at most one search query per sample") {
    geptest::StubWebSearch search;
    search.canned["\"Nike\""] = geptest::make_results({"other.com"});
    geptest::StubRedirects redirects;
    classify(sample_at("https://www.nike.com/"), BrandVerdict::named("Nike", "r"),
             {10, true}, search, &redirects);
    CHECK(search.calls == 1);
    CHECK(redirects.calls <= 1);
}

TEST_CASE("one-shot baseline parses a single scripted response") {
    auto s = sample_at("https://en.wikipedia.org/wiki/Main_Page");
    s.html = "<title>Wikipedia</title>";

    SUBCASE("named verdict with rounds_used 0") {
        ScriptedGateway gw({FinalText{R"({"brand_name":"Wikipedia","reason":"title"})"}});
        auto r = one_shot_brand(s, gw);
        REQUIRE(r.verdict.brand_name() != nullptr);
        CHECK(*r.verdict.brand_name() == "Wikipedia");
        CHECK(r.verdict.rounds_used == 0);
    }

    SUBCASE("repair path shared with the agent") {
        ScriptedGateway gw({FinalText{"not json"},
                            FinalText{R"({"brand_name":"Wikipedia","reason":"second try"})"}});
        auto r = one_shot_brand(s, gw);
        REQUIRE(r.verdict.brand_name() != nullptr);
        CHECK(*r.verdict.brand_name() == "Wikipedia");
    }

    SUBCASE("no brand found") {
        ScriptedGateway gw({FinalText{R"({"brand_name":"no brand found","reason":"blank"})"}});
        auto r = one_shot_brand(s, gw);
        CHECK(r.verdict.is_no_brand());
    }
}
